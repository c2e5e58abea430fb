//! Lexicographic subset enumeration and ranking.

use num::{BigInt, One};

/// `C(n, k)` as u128, zero when `k > n`.
pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `C(n, k)` with negative or out-of-range arguments mapped to zero.
pub fn binom_big(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// All `size`-subsets of `ground` in lexicographic order. `ground` must be
/// sorted ascending; output subsets are sorted too.
pub fn subsets(ground: &[usize], size: usize) -> Vec<Vec<usize>> {
    Combinations::new(ground.len(), size)
        .map(|idx| idx.into_iter().map(|i| ground[i]).collect())
        .collect()
}

/// Lexicographic iterator over index combinations of `0..n`.
pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let cur = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, cur }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut c = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                self.cur = Some(c);
                break;
            }
        }
        Some(out)
    }
}

/// Position of the sorted subset `set` of `0..n` in lexicographic order.
pub fn subset_rank(set: &[usize], n: usize) -> usize {
    let k = set.len();
    let mut rank = 0u128;
    let mut next = 0;
    for (i, &s) in set.iter().enumerate() {
        for v in next..s {
            rank += binom(n - 1 - v, k - 1 - i);
        }
        next = s + 1;
    }
    rank as usize
}

/// Inverse of [`subset_rank`].
pub fn subset_unrank(mut rank: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut v = 0;
    for i in 0..k {
        loop {
            let block = binom(n - 1 - v, k - 1 - i) as usize;
            if rank < block {
                break;
            }
            rank -= block;
            v += 1;
        }
        out.push(v);
        v += 1;
    }
    out
}

/// Sorted `set` minus one element.
pub fn without(set: &[usize], x: usize) -> Vec<usize> {
    set.iter().copied().filter(|&y| y != x).collect()
}

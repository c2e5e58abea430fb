//! Lower bounds on the worst-case load.

use num::{BigInt, Zero};

use crate::model::{Rational, SystemParams};

/// Resolution of the sampled `alpha` grid in [`yma_lb`].
pub const ALPHA_STEPS: i64 = 64;

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn clamp(x: Rational) -> Rational {
    if x < Rational::zero() {
        Rational::zero()
    } else {
        x
    }
}

/// `max_s s - s M / floor(N / s)` over `s` in `1..=min(N, K')`.
pub fn cutset_lb(p: &SystemParams, m: &Rational) -> Rational {
    let n = p.n_files as i64;
    (1..=p.min_kn() as i64)
        .map(|s| int(s) - int(s) * m / int(n / s))
        .max()
        .map(clamp)
        .unwrap_or_else(Rational::zero)
}

/// Right-hand side of the `ell` condition solved for `alpha`: the largest
/// `alpha` for which `ell` satisfies it.
fn ell_threshold(n: i64, s: i64, ell: i64) -> Rational {
    let lhs = Rational::new(BigInt::from(s * (s - 1) - ell * (ell - 1)), BigInt::from(2));
    (int((n - ell + 1) * ell) - lhs) / int(s)
}

fn minimal_ell(n: i64, s: i64, alpha: &Rational) -> i64 {
    (1..=s).find(|&l| alpha <= &ell_threshold(n, s, l)).unwrap_or(s)
}

fn yma_term(n: i64, s: i64, ell: i64, alpha: &Rational, m: &Rational) -> Rational {
    let slope = (int(s * (s - 1) - ell * (ell - 1)) + int(2 * s) * alpha) / int(2 * (n - ell + 1));
    int(s - 1) + alpha - slope * m
}

/// Candidate `(alpha, ell)` pairs for one `s`: the sampled grid with its
/// minimal `ell`, plus both closure endpoints of every interval on which
/// the minimal `ell` is constant. The bound is affine in `alpha` for fixed
/// `ell`, so the endpoints carry the exact supremum over `alpha in [0, 1]`.
fn alpha_candidates(n: i64, s: i64) -> Vec<(Rational, i64)> {
    let mut out = Vec::new();
    for j in 0..=ALPHA_STEPS {
        let a = Rational::new(BigInt::from(j), BigInt::from(ALPHA_STEPS));
        let l = minimal_ell(n, s, &a);
        out.push((a, l));
    }
    let mut lower = Rational::zero();
    for l in 1..=s {
        let upper = ell_threshold(n, s, l).min(int(1));
        if lower <= upper {
            out.push((lower.clone(), l));
            out.push((upper.clone(), l));
        }
        lower = lower.max(ell_threshold(n, s, l));
        if lower > int(1) {
            break;
        }
    }
    out
}

/// Averaged-demand bound for the classical system with `K'` users, maximised
/// over `s` and over `alpha` (sampled grid plus exact interval endpoints).
pub fn yma_lb(p: &SystemParams, m: &Rational) -> Rational {
    let n = p.n_files as i64;
    let mut best = Rational::zero();
    for s in 1..=p.min_kn() as i64 {
        for (a, l) in alpha_candidates(n, s) {
            let v = yma_term(n, s, l, &a, m);
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Same as [`yma_lb`] restricted to the `1/64` grid of `alpha`.
pub fn yma_lb_grid(p: &SystemParams, m: &Rational) -> Rational {
    let n = p.n_files as i64;
    let mut best = Rational::zero();
    for s in 1..=p.min_kn() as i64 {
        for j in 0..=ALPHA_STEPS {
            let a = Rational::new(BigInt::from(j), BigInt::from(ALPHA_STEPS));
            let v = yma_term(n, s, minimal_ell(n, s, &a), &a, m);
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Exact optimum for two active users; `None` unless `K' = 2`.
pub fn exact_small_lb(p: &SystemParams, m: &Rational) -> Option<Rational> {
    if p.k_active != 2 {
        return None;
    }
    let n = int(p.n_files as i64);
    let v = match p.n_files {
        1 => int(1) - m,
        2 => {
            let a = int(2) - int(2) * m;
            let b = Rational::new(3.into(), 2.into()) - m;
            let c = int(1) - m / int(2);
            a.max(b).max(c)
        }
        _ => {
            let a = int(2) - int(3) * m / &n;
            let b = int(1) - m / &n;
            a.max(b)
        }
    };
    Some(clamp(v))
}

/// Converse for demand privacy against colluding users:
/// `max_l l + (N-l) m_l / ((N-l) + m_l) - l M` with `m_l = min(l+1, K')`.
pub fn privacy_lb(p: &SystemParams, m: &Rational) -> Rational {
    let (n, kp) = (p.n_files as i64, p.k_active as i64);
    (1..=n)
        .map(|l| {
            let ml = (l + 1).min(kp);
            int(l) + Rational::new(BigInt::from((n - l) * ml), BigInt::from((n - l) + ml)) - int(l) * m
        })
        .max()
        .map(clamp)
        .unwrap_or_else(Rational::zero)
}

/// Best non-private converse: cut-set, the averaged-demand family and, for two
/// active users, the exact optimum.
pub fn nonprivate_converse(p: &SystemParams, m: &Rational) -> Rational {
    let mut v = cutset_lb(p, m).max(yma_lb(p, m));
    if let Some(e) = exact_small_lb(p, m) {
        v = v.max(e);
    }
    v
}

/// Private converse: pointwise max of [`privacy_lb`] and the non-private
/// bounds.
pub fn private_converse(p: &SystemParams, m: &Rational) -> Rational {
    privacy_lb(p, m).max(nonprivate_converse(p, m))
}

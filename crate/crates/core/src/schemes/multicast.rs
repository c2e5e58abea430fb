//! Coded multicast over `(t+1)`-subsets of a user ground set, with leader
//! based omission.
//!
//! Every scheme of this shape sends, for `S` in `Omega^{t+1}`,
//!
//! ```text
//! X_S = sum_{k in S} alpha_{k,S} sum_n rows[k][n] W(n, S \ {k})
//! ```
//!
//! where `W(n, T)` is a scheme-specific block (an uncoded subfile, an MDS
//! coded subfile, or a projection of file `n`). Only subsets meeting the
//! leader set are transmitted.
//!
//! Signs alternate with position in `S`. With that choice the message map
//! is the Koszul differential of the row map `e_k -> rows[k]`. Its kernel
//! is the exterior power of the row kernel, which meets the span of the
//! leader-touching subsets trivially, so every omitted message is a linear
//! combination of the sent ones for any rows whatsoever (demand or query
//! vectors alike). [`Multicast::omission_sound`] checks this numerically.

use std::collections::HashMap;

use crate::gf::{Field, FieldMatrix};
use crate::model::{binom, leader_set, subset_rank, subsets, without, Label, MulticastInfo};

use super::SchemeError;

#[derive(Debug, Clone)]
pub struct Multicast {
    field: Field,
    n_files: usize,
    info: MulticastInfo,
    pos: HashMap<usize, usize>,
}

impl Multicast {
    /// Leaders are chosen greedily among `candidates` (in order).
    pub fn new(
        field: Field,
        n_files: usize,
        users: Vec<usize>,
        t: usize,
        rows: Vec<Vec<u32>>,
        candidates: &[usize],
    ) -> Self {
        let pos: HashMap<usize, usize> = users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let cand_rows: Vec<Vec<u32>> = candidates.iter().map(|u| rows[pos[u]].clone()).collect();
        let leaders = leader_set(field, &cand_rows).into_iter().map(|i| candidates[i]).collect();
        Multicast {
            field,
            n_files,
            info: MulticastInfo {
                users,
                t,
                rows,
                leaders,
            },
            pos,
        }
    }

    pub fn from_info(field: Field, n_files: usize, info: &MulticastInfo) -> Self {
        let pos = info.users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        Multicast {
            field,
            n_files,
            info: info.clone(),
            pos,
        }
    }

    pub fn info(&self) -> &MulticastInfo {
        &self.info
    }

    pub fn row(&self, user: usize) -> &[u32] {
        &self.info.rows[self.pos[&user]]
    }

    /// `+1` at even positions of `S`, `-1` at odd ones.
    pub fn alpha(&self, s: &[usize], k: usize) -> u32 {
        let i = s.iter().position(|&x| x == k).expect("user in subset");
        if i % 2 == 0 {
            1
        } else {
            self.field.neg(1)
        }
    }

    pub fn all_subsets(&self) -> Vec<Vec<usize>> {
        subsets(&self.info.users, self.info.t + 1)
    }

    pub fn is_sent(&self, s: &[usize]) -> bool {
        s.iter().any(|u| self.info.leaders.contains(u))
    }

    pub fn sent_subsets(&self) -> Vec<Vec<usize>> {
        self.all_subsets().into_iter().filter(|s| self.is_sent(s)).collect()
    }

    /// Build the transmitted messages from a block oracle.
    pub fn encode(
        &self,
        width: usize,
        mut block: impl FnMut(usize, &[usize]) -> Result<Vec<u32>, SchemeError>,
    ) -> Result<Vec<(Label, Vec<u32>)>, SchemeError> {
        let f = self.field;
        let mut out = Vec::new();
        for s in self.sent_subsets() {
            let mut acc = vec![0u32; width];
            for &k in &s {
                let a = self.alpha(&s, k);
                let rest = without(&s, k);
                for (n, &c) in self.row(k).iter().enumerate() {
                    if c != 0 {
                        f.axpy(&mut acc, f.mul(a, c), &block(n, &rest)?);
                    }
                }
            }
            out.push((Label::Multicast { users: s }, acc));
        }
        Ok(out)
    }

    fn column(&self, n: usize, t_set: &[usize]) -> usize {
        let idx: Vec<usize> = t_set.iter().map(|u| self.pos[u]).collect();
        n * binom(self.info.users.len(), self.info.t) as usize + subset_rank(&idx, self.info.users.len())
    }

    fn n_columns(&self) -> usize {
        self.n_files * binom(self.info.users.len(), self.info.t) as usize
    }

    /// Coefficients of `X_S` over the virtual blocks `W(n, T)`.
    pub fn coefficient_row(&self, s: &[usize]) -> Vec<u32> {
        let f = self.field;
        let mut row = vec![0u32; self.n_columns()];
        for &k in s {
            let a = self.alpha(s, k);
            let rest = without(s, k);
            for (n, &c) in self.row(k).iter().enumerate() {
                if c != 0 {
                    let col = self.column(n, &rest);
                    row[col] = f.add(row[col], f.mul(a, c));
                }
            }
        }
        row
    }

    /// `X_S` for every `S` containing `user`, rebuilding omitted messages
    /// from the sent ones. `width` is the block width, needed when nothing
    /// was sent (all rows zero).
    pub fn messages_for(
        &self,
        user: usize,
        payload: &[(Label, Vec<u32>)],
        width: usize,
    ) -> Result<Vec<(Vec<usize>, Vec<u32>)>, SchemeError> {
        let lookup: HashMap<&Vec<usize>, &Vec<u32>> = payload
            .iter()
            .filter_map(|(l, d)| match l {
                Label::Multicast { users } => Some((users, d)),
                _ => None,
            })
            .collect();
        let mine: Vec<Vec<usize>> = self.all_subsets().into_iter().filter(|s| s.contains(&user)).collect();
        let missing: Vec<&Vec<usize>> = mine.iter().filter(|s| !self.is_sent(s)).collect();
        let mut out = Vec::with_capacity(mine.len());
        let mut rebuilt: HashMap<Vec<usize>, Vec<u32>> = HashMap::new();
        if !missing.is_empty() {
            let sent = self.sent_subsets();
            let f = self.field;
            let cols = self.n_columns();
            let mut a = FieldMatrix::zeros(f, cols, sent.len());
            for (j, s) in sent.iter().enumerate() {
                for (c, v) in self.coefficient_row(s).into_iter().enumerate() {
                    if v != 0 {
                        a.set(c, j, v);
                    }
                }
            }
            let mut b = FieldMatrix::zeros(f, cols, missing.len());
            for (j, s) in missing.iter().enumerate() {
                for (c, v) in self.coefficient_row(s).into_iter().enumerate() {
                    if v != 0 {
                        b.set(c, j, v);
                    }
                }
            }
            let coeffs = a
                .solve(&b)?
                .ok_or_else(|| SchemeError::Reconstruction(format!("omitted messages for user {user} not in span")))?;
            for (j, s) in missing.iter().enumerate() {
                let mut acc = vec![0u32; width];
                for (i, sent_s) in sent.iter().enumerate() {
                    let c = coeffs.get(i, j);
                    if c != 0 {
                        let x = lookup
                            .get(sent_s)
                            .ok_or_else(|| SchemeError::Reconstruction(format!("message {sent_s:?} missing")))?;
                        f.axpy(&mut acc, c, x);
                    }
                }
                rebuilt.insert((*s).clone(), acc);
            }
        }
        for s in mine {
            let x = match rebuilt.remove(&s) {
                Some(x) => x,
                None => lookup
                    .get(&s)
                    .map(|x| (*x).clone())
                    .ok_or_else(|| SchemeError::Reconstruction(format!("message {s:?} missing")))?,
            };
            out.push((s, x));
        }
        Ok(out)
    }

    /// From `X_S` remove every term a user `v` in `S` already knows and
    /// return `sum_n rows[v][n] W(n, S \ {v})`. `known(n, T)` must return
    /// `W(n, T)` for any `T` containing `v`.
    pub fn strip(
        &self,
        v: usize,
        s: &[usize],
        x: &[u32],
        mut known: impl FnMut(usize, &[usize]) -> Result<Vec<u32>, SchemeError>,
    ) -> Result<Vec<u32>, SchemeError> {
        let f = self.field;
        let mut acc = x.to_vec();
        for &k in s.iter().filter(|&&k| k != v) {
            let a = self.alpha(s, k);
            let rest = without(s, k);
            for (n, &c) in self.row(k).iter().enumerate() {
                if c != 0 {
                    f.axpy(&mut acc, f.neg(f.mul(a, c)), &known(n, &rest)?);
                }
            }
        }
        let inv = f.inv(self.alpha(s, v))?;
        for z in acc.iter_mut() {
            *z = f.mul(*z, inv);
        }
        Ok(acc)
    }

    /// Omitted messages are in the span of sent ones and the sent ones are
    /// independent, checked by rank over the virtual blocks.
    pub fn omission_sound(&self) -> bool {
        let f = self.field;
        let all = self.all_subsets();
        if all.is_empty() {
            return true;
        }
        let sent: Vec<Vec<u32>> = self.sent_subsets().iter().map(|s| self.coefficient_row(s)).collect();
        let every: Vec<Vec<u32>> = all.iter().map(|s| self.coefficient_row(s)).collect();
        let rank_sent = if sent.is_empty() { 0 } else { FieldMatrix::from_rows(f, &sent).unwrap().rank() };
        let rank_all = FieldMatrix::from_rows(f, &every).unwrap().rank();
        rank_sent == rank_all && rank_sent == sent.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::unit;

    fn demand_rows(d: &[usize], n: usize) -> Vec<Vec<u32>> {
        d.iter().map(|&x| unit(n, x)).collect()
    }

    #[test]
    fn single_class_sends_expected_count() {
        let f = Field::new(7).unwrap();
        let users: Vec<usize> = (0..5).collect();
        let mc = Multicast::new(f, 3, users.clone(), 2, demand_rows(&[1; 5], 3), &users);
        assert_eq!(mc.info().leaders, vec![0]);
        assert_eq!(mc.sent_subsets().len() as u128, binom(5, 3) - binom(4, 3));
        assert!(mc.omission_sound());
    }

    #[test]
    fn general_rows_are_sound() {
        let f = Field::new(5).unwrap();
        let users: Vec<usize> = (0..5).collect();
        let rows = vec![vec![1, 2, 2], vec![3, 0, 2], vec![4, 2, 4], vec![1, 1, 3], vec![0, 3, 2]];
        for t in 0..4 {
            let mc = Multicast::new(f, 3, users.clone(), t, rows.clone(), &users);
            assert!(mc.omission_sound(), "t={t}");
        }
    }
}

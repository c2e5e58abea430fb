//! Vandermonde generator matrices and brute-force MDS checks.
//!
//! Generators are stored one row per coded symbol: a `code_len x info_len`
//! matrix whose every `info_len` rows are linearly independent.

use serde::Serialize;
use thiserror::Error;

use crate::gf::{Field, FieldMatrix, GfError};
use crate::model::{binom, Combinations};

/// Largest number of row subsets the brute-force check will enumerate.
pub const MDS_ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdsError {
    #[error("GF({q}) too small: need q > {needed}")]
    FieldTooSmall { q: u32, needed: usize },
    #[error("MDS check over {0} subsets exceeds the enumeration limit")]
    EnumerationTooLarge(u128),
    #[error("invalid code shape: {0}")]
    BadShape(String),
    #[error(transparent)]
    Gf(#[from] GfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MdsSpec {
    pub info_len: usize,
    pub code_len: usize,
    pub modulus: u32,
}

impl MdsSpec {
    pub fn new(info_len: usize, code_len: usize, modulus: u32) -> Self {
        MdsSpec {
            info_len,
            code_len,
            modulus,
        }
    }
}

/// Row `r` is `[1, x, ..., x^(k-1)]` at node `x = r + 1`.
/// Needs `q > code_len` so the nodes are distinct and nonzero.
pub fn vandermonde(spec: MdsSpec) -> Result<FieldMatrix, MdsError> {
    if spec.info_len == 0 || spec.info_len > spec.code_len {
        return Err(MdsError::BadShape(format!(
            "info_len {} code_len {}",
            spec.info_len, spec.code_len
        )));
    }
    if spec.modulus as usize <= spec.code_len {
        return Err(MdsError::FieldTooSmall {
            q: spec.modulus,
            needed: spec.code_len,
        });
    }
    let f = Field::new(spec.modulus)?;
    Ok(FieldMatrix::from_fn(f, spec.code_len, spec.info_len, |r, c| {
        f.pow(r as u32 + 1, c as u64)
    }))
}

/// A Vandermonde row at node `code_len + 1 + offset`, independent of any
/// `info_len - 1` rows of [`vandermonde`]. Needs one more field element of
/// headroom per offset.
pub fn extra_vandermonde_row(spec: MdsSpec, offset: usize) -> Result<Vec<u32>, MdsError> {
    let node = spec.code_len + 1 + offset;
    if spec.modulus as usize <= node {
        return Err(MdsError::FieldTooSmall {
            q: spec.modulus,
            needed: node,
        });
    }
    let f = Field::new(spec.modulus)?;
    Ok((0..spec.info_len).map(|c| f.pow(node as u32, c as u64)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MdsCheck {
    Pass,
    /// A rank-deficient subset of rows (or blocks).
    Fail { subset: Vec<usize> },
}

impl MdsCheck {
    pub fn passed(&self) -> bool {
        matches!(self, MdsCheck::Pass)
    }
}

/// Exhaustively check that every `k` rows of `g` are independent.
pub fn assert_mds(g: &FieldMatrix, k: usize) -> Result<MdsCheck, MdsError> {
    if k > g.rows() || k > g.cols() {
        return Err(MdsError::BadShape(format!("k={k} for {}x{}", g.rows(), g.cols())));
    }
    let count = binom(g.rows(), k);
    if count > MDS_ENUMERATION_LIMIT {
        return Err(MdsError::EnumerationTooLarge(count));
    }
    for rows in Combinations::new(g.rows(), k) {
        if g.select_rows(&rows).rank() < k {
            return Ok(MdsCheck::Fail { subset: rows });
        }
    }
    Ok(MdsCheck::Pass)
}

/// Check that every choice of `k_blocks` consecutive row blocks (each
/// `block_rows` tall) has full column rank.
pub fn assert_block_mds(g: &FieldMatrix, block_rows: usize, k_blocks: usize) -> Result<MdsCheck, MdsError> {
    if block_rows == 0 || g.rows() % block_rows != 0 {
        return Err(MdsError::BadShape(format!("{} rows in blocks of {block_rows}", g.rows())));
    }
    let blocks = g.rows() / block_rows;
    let count = binom(blocks, k_blocks);
    if count > MDS_ENUMERATION_LIMIT {
        return Err(MdsError::EnumerationTooLarge(count));
    }
    for sel in Combinations::new(blocks, k_blocks) {
        let rows: Vec<usize> = sel
            .iter()
            .flat_map(|&b| b * block_rows..(b + 1) * block_rows)
            .collect();
        if g.select_rows(&rows).rank() < g.cols() {
            return Ok(MdsCheck::Fail { subset: sel });
        }
    }
    Ok(MdsCheck::Pass)
}

/// Structural certificate: every row is `[1, x, x^2, ...]` for pairwise
/// distinct nodes `x`. Any such matrix with at least as many rows as
/// columns is MDS, since square Vandermonde determinants factor as
/// products of node differences.
pub fn vandermonde_certificate(g: &FieldMatrix) -> bool {
    let f = g.field();
    let k = g.cols();
    if k == 0 {
        return false;
    }
    let mut nodes = Vec::with_capacity(g.rows());
    for r in 0..g.rows() {
        let row = g.row(r);
        if row[0] != 1 {
            return false;
        }
        let x = if k > 1 { row[1] } else { r as u32 };
        if (0..k).any(|c| row[c] != f.pow(x, c as u64)) {
            return false;
        }
        nodes.push(x);
    }
    if k == 1 {
        return true;
    }
    nodes.sort_unstable();
    nodes.windows(2).all(|w| w[0] != w[1])
}

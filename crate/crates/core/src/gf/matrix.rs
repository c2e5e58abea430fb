use std::fmt;

use super::{Field, GfError};

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{} over GF({})", self.rows, self.cols, self.field.modulus())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Entries are reduced mod q; every row must have the same length.
    pub fn from_rows(field: Field, rows: &[Vec<u32>]) -> Result<Self, GfError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(GfError::DimensionMismatch(format!(
                    "ragged rows: {} vs {}",
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().map(|&x| x % field.modulus()));
        }
        Ok(FieldMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Build from a flat row-major buffer (already reduced).
    pub fn from_flat(field: Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self, GfError> {
        if data.len() != rows * cols {
            return Err(GfError::DimensionMismatch(format!(
                "{} entries for {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(FieldMatrix {
            field,
            rows,
            cols,
            data: data.into_iter().map(|x| x % field.modulus()).collect(),
        })
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c) % field.modulus();
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn as_flat(&self) -> &[u32] {
        &self.data
    }
    pub fn into_flat(self) -> Vec<u32> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        FieldMatrix {
            field: self.field,
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Stack matrices vertically. All parts must share field and width.
    pub fn vstack(parts: &[&FieldMatrix]) -> Result<Self, GfError> {
        let first = parts
            .first()
            .ok_or_else(|| GfError::DimensionMismatch("vstack of nothing".into()))?;
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            if p.cols != first.cols {
                return Err(GfError::DimensionMismatch(format!("vstack widths {} vs {}", p.cols, first.cols)));
            }
            if p.field != first.field {
                return Err(GfError::ModulusMismatch(p.field.modulus(), first.field.modulus()));
            }
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        Ok(FieldMatrix {
            field: first.field,
            rows,
            cols: first.cols,
            data,
        })
    }

    pub fn push_row(&mut self, row: &[u32]) -> Result<(), GfError> {
        if self.rows > 0 && row.len() != self.cols {
            return Err(GfError::DimensionMismatch(format!("row of {} into width {}", row.len(), self.cols)));
        }
        if self.rows == 0 {
            self.cols = row.len();
        }
        let q = self.field.modulus();
        self.data.extend(row.iter().map(|&x| x % q));
        self.rows += 1;
        Ok(())
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix, GfError> {
        if self.field != other.field {
            return Err(GfError::ModulusMismatch(self.field.modulus(), other.field.modulus()));
        }
        if self.cols != other.rows {
            return Err(GfError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = FieldMatrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a != 0 {
                    let (src, dst) = (other.row(k), r);
                    let dst_row = &mut out.data[dst * other.cols..(dst + 1) * other.cols];
                    f.axpy(dst_row, a, src);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v^T A`.
    pub fn left_mul_vec(&self, v: &[u32]) -> Result<Vec<u32>, GfError> {
        if v.len() != self.rows {
            return Err(GfError::DimensionMismatch(format!("vec {} * {}x{}", v.len(), self.rows, self.cols)));
        }
        let mut out = vec![0; self.cols];
        for (r, &c) in v.iter().enumerate() {
            self.field.axpy(&mut out, c, self.row(r));
        }
        Ok(out)
    }

    /// In-place reduced row echelon form. Returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for x in self.row_mut(r) {
                *x = f.mul(*x, inv);
            }
            let pivot_row = self.row(r).to_vec();
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        let neg = f.neg(factor);
                        f.axpy(self.row_mut(i), neg, &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<FieldMatrix, GfError> {
        if self.rows != self.cols {
            return Err(GfError::DimensionMismatch(format!("inverse of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = FieldMatrix::zeros(self.field, n, 2 * n);
        for r in 0..n {
            aug.row_mut(r)[..n].copy_from_slice(self.row(r));
            aug.set(r, n + r, 1);
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(GfError::Singular);
        }
        Ok(FieldMatrix::from_fn(self.field, n, n, |r, c| aug.get(r, n + c)))
    }

    /// Solve `self * X = B` for X. Returns `None` when inconsistent; when
    /// the solution is not unique the free variables are set to zero.
    pub fn solve(&self, b: &FieldMatrix) -> Result<Option<FieldMatrix>, GfError> {
        if b.rows != self.rows {
            return Err(GfError::DimensionMismatch(format!("solve {}x{} with rhs {} rows", self.rows, self.cols, b.rows)));
        }
        let (n, m) = (self.cols, b.cols);
        let mut aug = FieldMatrix::zeros(self.field, self.rows, n + m);
        for r in 0..self.rows {
            aug.row_mut(r)[..n].copy_from_slice(self.row(r));
            aug.row_mut(r)[n..].copy_from_slice(b.row(r));
        }
        let pivots = aug.rref_in_place();
        if pivots.iter().any(|&c| c >= n) {
            return Ok(None);
        }
        let mut x = FieldMatrix::zeros(self.field, n, m);
        for (r, &c) in pivots.iter().enumerate() {
            x.row_mut(c).copy_from_slice(&aug.row(r)[n..]);
        }
        Ok(Some(x))
    }

    /// Solve `self * x = b` for a single vector.
    pub fn solve_vec(&self, b: &[u32]) -> Result<Option<Vec<u32>>, GfError> {
        let rhs = FieldMatrix::from_flat(self.field, b.len(), 1, b.to_vec())?;
        Ok(self.solve(&rhs)?.map(|x| x.into_flat()))
    }

    /// Basis of the right nullspace `{x : self * x = 0}`, one vector per
    /// free column in increasing column order.
    pub fn nullspace(&self) -> Vec<Vec<u32>> {
        let (red, pivots) = self.rref();
        let f = self.field;
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(red.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[u32]) -> bool {
        let t = self.transpose();
        matches!(t.solve_vec(v), Ok(Some(_)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn rank_and_inverse_small() {
        let f = gf(5);
        let m = FieldMatrix::from_rows(f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.inverse(), Err(GfError::Singular));
        let m = FieldMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), FieldMatrix::identity(f, 2));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let f = gf(7);
        let m = FieldMatrix::from_rows(f, &[vec![1, 1, 1]]).unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(f.dot(m.row(0), &v), 0);
        }
    }

    #[test]
    fn inconsistent_solve() {
        let f = gf(3);
        let a = FieldMatrix::from_rows(f, &[vec![1, 0], vec![1, 0]]).unwrap();
        assert_eq!(a.solve_vec(&[1, 2]).unwrap(), None);
        assert_eq!(a.solve_vec(&[2, 2]).unwrap(), Some(vec![2, 0]));
    }
}

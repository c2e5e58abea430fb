//! Prime-field arithmetic and dense linear algebra over GF(q).
//!
//! Elements are stored as canonical residues in `0..q`. All products go
//! through `u64`, so any prime below 2^32 is fine.

mod matrix;

pub use matrix::FieldMatrix;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `p >= n`.
pub fn next_prime(n: u32) -> u32 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Arithmetic context for GF(q), q prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    q: u32,
}

impl Field {
    pub fn new(q: u32) -> Result<Self, GfError> {
        if !is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        Ok(Field { q })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.q as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat.
    pub fn inv(self, a: u32) -> Result<u32, GfError> {
        if a % self.q == 0 {
            return Err(GfError::DivisionByZero(self.q));
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(self, a: u32, b: u32) -> Result<u32, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `acc += c * x` elementwise.
    pub fn axpy(self, acc: &mut [u32], c: u32, x: &[u32]) {
        debug_assert_eq!(acc.len(), x.len());
        if c == 0 {
            return;
        }
        for (a, &v) in acc.iter_mut().zip(x) {
            *a = self.add(*a, self.mul(c, v));
        }
    }

    pub fn dot(self, a: &[u32], b: &[u32]) -> u32 {
        let q = self.q as u64;
        let mut acc = 0u64;
        for (&x, &y) in a.iter().zip(b) {
            acc = (acc + x as u64 * y as u64) % q;
        }
        acc as u32
    }
}

/// A residue tagged with its modulus. Mixing moduli is an error rather than
/// a silent reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub value: u32,
    pub modulus: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn new(value: u64, modulus: u32) -> Result<Self, GfError> {
        if !is_prime(modulus) {
            return Err(GfError::NotPrime(modulus));
        }
        Ok(FieldElement {
            value: (value % modulus as u64) as u32,
            modulus,
        })
    }

    fn field(self) -> Field {
        Field { q: self.modulus }
    }

    pub fn inv(self) -> Result<Self, GfError> {
        Ok(FieldElement {
            value: self.field().inv(self.value)?,
            modulus: self.modulus,
        })
    }

    pub fn neg(self) -> Self {
        FieldElement {
            value: self.field().neg(self.value),
            modulus: self.modulus,
        }
    }
}

pub fn fe_arith(a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement, GfError> {
    if a.modulus != b.modulus {
        return Err(GfError::ModulusMismatch(a.modulus, b.modulus));
    }
    let f = a.field();
    let value = match op {
        FieldOp::Add => f.add(a.value, b.value),
        FieldOp::Sub => f.sub(a.value, b.value),
        FieldOp::Mul => f.mul(a.value, b.value),
        FieldOp::Div => f.div(a.value, b.value)?,
    };
    Ok(FieldElement {
        value,
        modulus: a.modulus,
    })
}

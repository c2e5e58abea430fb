//! System parameters, files, caches, transcripts and tradeoff curves.
//!
//! Users and files are 0-based throughout the API.

mod curve;
mod subsets;

pub use curve::*;
pub use subsets::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, FieldMatrix, GfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("demand vector does not match the active set: {0}")]
    BadDemand(String),
}

/// The `(K', K, N)` system plus scheme knobs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Users active during delivery (K').
    pub k_active: usize,
    /// Users present during placement (K).
    pub k_total: usize,
    /// Number of files (N).
    pub n_files: usize,
    /// Scheme-specific memory parameter (ignored by schemes without one).
    pub t: usize,
    /// Field size. Zero lets each scheme pick the smallest prime it needs.
    pub q: u32,
    /// File length in units of the scheme's subpacketization.
    pub b_factor: usize,
}

impl SystemParams {
    pub fn new(k_active: usize, k_total: usize, n_files: usize) -> Self {
        SystemParams {
            k_active,
            k_total,
            n_files,
            t: 1,
            q: 0,
            b_factor: 1,
        }
    }

    pub fn with_t(mut self, t: usize) -> Self {
        self.t = t;
        self
    }

    pub fn with_q(mut self, q: u32) -> Self {
        self.q = q;
        self
    }

    pub fn with_b_factor(mut self, b: usize) -> Self {
        self.b_factor = b;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.k_active == 0 || self.k_active > self.k_total {
            return Err(ModelError::InvalidParams(format!(
                "need 1 <= K' <= K, got K'={} K={}",
                self.k_active, self.k_total
            )));
        }
        if self.n_files == 0 {
            return Err(ModelError::InvalidParams("need N >= 1".into()));
        }
        if self.b_factor == 0 {
            return Err(ModelError::InvalidParams("b_factor must be positive".into()));
        }
        Ok(())
    }

    /// `min(K', N)`.
    pub fn min_kn(&self) -> usize {
        self.k_active.min(self.n_files)
    }
}

/// Active users and what each of them wants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemandVector {
    /// Sorted active user ids.
    pub active: Vec<usize>,
    /// `demands[i]` is the file wanted by `active[i]`.
    pub demands: Vec<usize>,
}

impl DemandVector {
    pub fn new(active: Vec<usize>, demands: Vec<usize>, params: &SystemParams) -> Result<Self, ModelError> {
        if active.len() != params.k_active || demands.len() != active.len() {
            return Err(ModelError::BadDemand(format!(
                "{} active users and {} demands for K'={}",
                active.len(),
                demands.len(),
                params.k_active
            )));
        }
        if active.windows(2).any(|w| w[0] >= w[1]) || active.iter().any(|&u| u >= params.k_total) {
            return Err(ModelError::BadDemand(format!("active set {active:?} not sorted within 0..{}", params.k_total)));
        }
        if demands.iter().any(|&d| d >= params.n_files) {
            return Err(ModelError::BadDemand(format!("demand out of range in {demands:?}")));
        }
        Ok(DemandVector { active, demands })
    }

    pub fn demand_of(&self, user: usize) -> Option<usize> {
        self.active.iter().position(|&u| u == user).map(|i| self.demands[i])
    }

    /// Every `(I, d_I)` pair, active sets in lexicographic order and demands
    /// in base-N counting order.
    pub fn enumerate(params: &SystemParams) -> Vec<DemandVector> {
        let users: Vec<usize> = (0..params.k_total).collect();
        let mut out = Vec::new();
        for active in subsets(&users, params.k_active) {
            for d in all_words(params.n_files, params.k_active) {
                out.push(DemandVector {
                    active: active.clone(),
                    demands: d,
                });
            }
        }
        out
    }
}

/// All words of length `len` over `0..alphabet`, in counting order.
pub fn all_words(alphabet: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * alphabet);
        for w in &out {
            for a in 0..alphabet {
                let mut w2 = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

/// `N` files of `len` symbols each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileLibrary {
    pub field: Field,
    pub files: Vec<Vec<u32>>,
}

impl FileLibrary {
    pub fn random(field: Field, n_files: usize, len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..n_files)
            .map(|_| (0..len).map(|_| rng.gen_range(0..field.modulus())).collect())
            .collect();
        FileLibrary { field, files }
    }

    /// Every file identical: a library where demands are indistinguishable
    /// by content.
    pub fn repeated(field: Field, n_files: usize, len: usize, seed: u64) -> Self {
        let one = Self::random(field, 1, len, seed).files.pop().unwrap();
        FileLibrary {
            field,
            files: vec![one; n_files],
        }
    }

    pub fn file_len(&self) -> usize {
        self.files.first().map_or(0, |f| f.len())
    }

    /// File `n` viewed as `parts` subfiles (rows) of equal width.
    pub fn subfiles(&self, n: usize, parts: usize) -> Result<FieldMatrix, GfError> {
        let len = self.file_len();
        if parts == 0 || len % parts != 0 {
            return Err(GfError::DimensionMismatch(format!("file of {len} symbols into {parts} parts")));
        }
        FieldMatrix::from_flat(self.field, parts, len / parts, self.files[n].clone())
    }
}

/// Names a stored or transmitted segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// Coded or uncoded piece of one file at a global code row.
    Piece { file: usize, row: usize },
    /// The same code row applied to the sum of all files.
    SumPiece { row: usize },
    /// Key: the user's key vector paired with code row `row`.
    Key { row: usize },
    /// Key paired with an extra vector outside the placement code.
    ExtraKey { index: usize },
    /// Coded multicast to a user subset.
    Multicast { users: Vec<usize> },
    /// Pairwise combination `row_a F + row_b F` of one file.
    PairPiece { file: usize, row_a: usize, row_b: usize },
    /// Whole file sent uncoded.
    WholeFile { file: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserSecret {
    None,
    /// Key vector in GF(q)^N.
    Key(Vec<u32>),
    /// Virtual-user offset in `0..N`.
    Offset(usize),
}

impl UserSecret {
    pub fn symbols(&self) -> usize {
        match self {
            UserSecret::None => 0,
            UserSecret::Key(k) => k.len(),
            UserSecret::Offset(_) => 1,
        }
    }
}

/// What one user stores. Secrets are O(1) in the file length and are not
/// counted towards memory.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UserCache {
    pub segments: Vec<(Label, Vec<u32>)>,
    pub secret: UserSecret,
}

impl UserCache {
    pub fn new(secret: UserSecret) -> Self {
        UserCache {
            segments: Vec::new(),
            secret,
        }
    }

    pub fn push(&mut self, label: Label, data: Vec<u32>) {
        self.segments.push((label, data));
    }

    pub fn get(&self, label: &Label) -> Option<&[u32]> {
        self.segments.iter().find(|(l, _)| l == label).map(|(_, d)| d.as_slice())
    }

    pub fn symbol_count(&self) -> usize {
        self.segments.iter().map(|(_, d)| d.len()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Placement {
    pub caches: Vec<UserCache>,
    /// What the server remembers about each user (keys, offsets).
    pub server_secrets: Vec<UserSecret>,
}

/// Public description of a coded-multicast delivery over a user ground set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MulticastInfo {
    pub users: Vec<usize>,
    pub t: usize,
    /// One row in GF(q)^N per user in `users`.
    pub rows: Vec<Vec<u32>>,
    /// Leader users (ids, not positions).
    pub leaders: Vec<usize>,
}

/// Everything broadcast besides the payload. Its size must not grow with
/// the file length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SideInfo {
    pub active: Vec<usize>,
    pub demands: Option<Vec<usize>>,
    pub multicast: Option<MulticastInfo>,
    pub offsets: Option<Vec<usize>>,
    pub inner: Option<Box<SideInfo>>,
}

impl SideInfo {
    pub fn symbols(&self) -> usize {
        let mut n = self.active.len();
        n += self.demands.as_ref().map_or(0, |d| d.len());
        if let Some(m) = &self.multicast {
            n += m.users.len() + 1 + m.rows.iter().map(|r| r.len()).sum::<usize>() + m.leaders.len();
        }
        n += self.offsets.as_ref().map_or(0, |o| o.len());
        n += self.inner.as_ref().map_or(0, |i| i.symbols());
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeliveryTranscript {
    pub payload: Vec<(Label, Vec<u32>)>,
    pub side_info: SideInfo,
}

impl DeliveryTranscript {
    pub fn payload_symbols(&self) -> usize {
        self.payload.iter().map(|(_, d)| d.len()).sum()
    }

    pub fn get(&self, label: &Label) -> Option<&[u32]> {
        self.payload.iter().find(|(l, _)| l == label).map(|(_, d)| d.as_slice())
    }
}

/// Greedy leaders: walk `rows` in order and keep each row that raises the
/// rank of those kept so far. Returns positions into `rows`.
pub fn leader_set(field: Field, rows: &[Vec<u32>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut leaders = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for (pivot, b) in &basis {
            let c = v[*pivot];
            if c != 0 {
                field.axpy(&mut v, field.neg(c), b);
            }
        }
        if let Some(p) = v.iter().position(|&x| x != 0) {
            let inv = field.inv(v[p]).unwrap();
            for x in v.iter_mut() {
                *x = field.mul(*x, inv);
            }
            for (_, b) in basis.iter_mut() {
                let c = b[p];
                if c != 0 {
                    field.axpy(b, field.neg(c), &v);
                }
            }
            basis.push((p, v));
            leaders.push(i);
        }
    }
    leaders
}

/// Unit vector `e_n` in GF(q)^len.
pub fn unit(len: usize, n: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    v[n] = 1;
    v
}

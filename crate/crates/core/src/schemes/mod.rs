//! Placement, delivery and decoding for every hotplug scheme.
//!
//! A scheme owns its public construction (generator matrices, decoding
//! vectors). Decoders see only that public construction, one user's cache
//! and the broadcast transcript.

pub mod multicast;
pub mod nonprivate;
pub mod private;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{next_prime, Field, FieldMatrix, GfError};
use crate::mds::MdsError;
use crate::model::{
    all_words, DeliveryTranscript, DemandVector, FileLibrary, ModelError, Placement, SystemParams, TradeoffPoint,
    UserCache, UserSecret,
};

pub use nonprivate::{flex_default_l, Flex, Ht1, Ht2, YmaPlus};
pub use private::{Ht1Pk, Ht3Pk, HtVu, PkPlus, VuWrap};

/// Largest subpacketization any scheme will instantiate.
pub const MAX_SUBPACKETIZATION: usize = 20_000;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("{scheme} does not support these parameters: {reason}")]
    Unsupported { scheme: String, reason: String },
    #[error("GF({q}) too small for {scheme}: need q >= {needed}")]
    FieldTooSmall { scheme: String, q: u32, needed: u32 },
    #[error("subpacketization too large: {0}")]
    SubpacketizationTooLarge(String),
    #[error("decoding failed for user {user}: {reason}")]
    DecodeFailure { user: usize, reason: String },
    #[error("omitted message reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("no decoding vector: {0}")]
    DecodingVectorNotFound(String),
    #[error("no valid phi vector: {0}")]
    PhiNotFound(String),
    #[error("construction condition violated: {0}")]
    ConditionViolated(String),
    #[error("cannot complete extra key rows: {0}")]
    InfeasibleXi(String),
    #[error("bad secret: {0}")]
    BadSecret(String),
    #[error("unknown scheme name {0:?}")]
    UnknownScheme(String),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Mds(#[from] MdsError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SchemeError {
    pub(crate) fn decode(user: usize, reason: impl Into<String>) -> Self {
        SchemeError::DecodeFailure {
            user,
            reason: reason.into(),
        }
    }
}

/// Per-user randomness a scheme draws at placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SecretSpace {
    None,
    /// Vectors in GF(q)^N whose entries sum to q - 1.
    Keys,
    /// Offsets in `0..N`.
    Offsets,
    /// Offsets pinned to zero: the pad is removed. Only useful as a
    /// negative control for the privacy checker.
    PinnedOffset,
}

impl SecretSpace {
    /// Every possible secret, in a fixed order.
    pub fn enumerate(self, field: Field, n_files: usize) -> Vec<UserSecret> {
        match self {
            SecretSpace::None => vec![UserSecret::None],
            SecretSpace::Offsets => (0..n_files).map(UserSecret::Offset).collect(),
            SecretSpace::PinnedOffset => vec![UserSecret::Offset(0)],
            SecretSpace::Keys => {
                let q = field.modulus() as usize;
                all_words(q, n_files - 1)
                    .into_iter()
                    .map(|w| {
                        let mut p: Vec<u32> = w.into_iter().map(|x| x as u32).collect();
                        let s = p.iter().fold(0, |acc, &x| field.add(acc, x));
                        p.push(field.sub(field.neg(1), s));
                        UserSecret::Key(p)
                    })
                    .collect()
            }
        }
    }

    pub fn size(self, field: Field, n_files: usize) -> u128 {
        match self {
            SecretSpace::None | SecretSpace::PinnedOffset => 1,
            SecretSpace::Offsets => n_files as u128,
            SecretSpace::Keys => (field.modulus() as u128).pow(n_files as u32 - 1),
        }
    }

    pub fn sample<R: Rng>(self, field: Field, n_files: usize, rng: &mut R) -> UserSecret {
        match self {
            SecretSpace::None => UserSecret::None,
            SecretSpace::Offsets => UserSecret::Offset(rng.gen_range(0..n_files)),
            SecretSpace::PinnedOffset => UserSecret::Offset(0),
            SecretSpace::Keys => {
                let mut p: Vec<u32> = (0..n_files - 1).map(|_| rng.gen_range(0..field.modulus())).collect();
                let s = p.iter().fold(0, |acc, &x| field.add(acc, x));
                p.push(field.sub(field.neg(1), s));
                UserSecret::Key(p)
            }
        }
    }

    pub fn sample_all<R: Rng>(self, field: Field, n_files: usize, users: usize, rng: &mut R) -> Vec<UserSecret> {
        (0..users).map(|_| self.sample(field, n_files, rng)).collect()
    }
}

/// A generator matrix whose every `k` rows must be independent.
#[derive(Debug, Clone)]
pub struct MdsRequirement {
    pub label: String,
    pub matrix: FieldMatrix,
    pub k: usize,
}

pub trait Scheme: Send + Sync {
    fn name(&self) -> String;
    /// Parameters with the field size resolved.
    fn params(&self) -> &SystemParams;
    fn field(&self) -> Field;
    fn subpacketization(&self) -> usize;
    fn file_len(&self) -> usize {
        self.subpacketization() * self.params().b_factor
    }
    /// The memory-load pair this construction is designed to achieve.
    fn declared(&self) -> TradeoffPoint;
    fn secret_space(&self) -> SecretSpace {
        SecretSpace::None
    }
    fn is_private(&self) -> bool {
        false
    }
    fn place(&self, library: &FileLibrary, secrets: &[UserSecret]) -> Result<Placement, SchemeError>;
    /// Server side. `secrets` are the server's copy from placement.
    fn deliver(
        &self,
        secrets: &[UserSecret],
        library: &FileLibrary,
        demand: &DemandVector,
    ) -> Result<DeliveryTranscript, SchemeError>;
    /// User side: recover file `demand` from one cache and the broadcast.
    fn decode(
        &self,
        user: usize,
        cache: &UserCache,
        transcript: &DeliveryTranscript,
        demand: usize,
    ) -> Result<Vec<u32>, SchemeError>;
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        Vec::new()
    }
    /// Whether the multicast omission rule was sound for this transcript.
    fn omission_sound(&self, transcript: &DeliveryTranscript) -> bool {
        transcript.side_info.multicast.as_ref().map_or(true, |info| {
            multicast::Multicast::from_info(self.field(), self.params().n_files, info).omission_sound()
        })
    }
}

/// Smallest field picked automatically, so uncoded schemes still get
/// enough symbol diversity for content checks to mean something.
pub const AUTO_Q_FLOOR: u32 = 5;

/// Use `params.q` if set (checking it), otherwise the smallest prime that is
/// at least `needed` (and at least [`AUTO_Q_FLOOR`]).
pub(crate) fn resolve_field(scheme: &str, params: &SystemParams, needed: u32) -> Result<Field, SchemeError> {
    let needed = needed.max(2);
    if params.q == 0 {
        return Ok(Field::new(next_prime(needed.max(AUTO_Q_FLOOR)))?);
    }
    let f = Field::new(params.q)?;
    if params.q < needed {
        return Err(SchemeError::FieldTooSmall {
            scheme: scheme.into(),
            q: params.q,
            needed,
        });
    }
    Ok(f)
}

pub(crate) fn check_subpacketization(scheme: &str, l: u128) -> Result<usize, SchemeError> {
    if l == 0 || l > MAX_SUBPACKETIZATION as u128 {
        return Err(SchemeError::SubpacketizationTooLarge(format!("{scheme}: {l}")));
    }
    Ok(l as usize)
}

pub(crate) fn key_of(secret: &UserSecret, field: Field, n: usize) -> Result<&[u32], SchemeError> {
    match secret {
        UserSecret::Key(p) if p.len() == n => {
            let s = p.iter().fold(0, |acc, &x| field.add(acc, x));
            if s != field.neg(1) {
                return Err(SchemeError::BadSecret(format!("key {p:?} does not sum to q-1")));
            }
            Ok(p)
        }
        other => Err(SchemeError::BadSecret(format!("expected a key vector, got {other:?}"))),
    }
}

pub(crate) fn offset_of(secret: &UserSecret, n: usize) -> Result<usize, SchemeError> {
    match secret {
        UserSecret::Offset(o) if *o < n => Ok(*o),
        other => Err(SchemeError::BadSecret(format!("expected an offset below {n}, got {other:?}"))),
    }
}

/// Subfile matrices of every file (rows = subfiles).
pub(crate) fn split_library(library: &FileLibrary, parts: usize) -> Result<Vec<FieldMatrix>, SchemeError> {
    (0..library.files.len())
        .map(|n| library.subfiles(n, parts).map_err(SchemeError::from))
        .collect()
}

pub(crate) fn check_library(scheme: &dyn Scheme, library: &FileLibrary) -> Result<(), SchemeError> {
    let p = scheme.params();
    if library.files.len() != p.n_files || library.file_len() != scheme.file_len() || library.field != scheme.field() {
        return Err(SchemeError::Model(ModelError::InvalidParams(format!(
            "library has {} files of {} symbols over GF({}), scheme wants {} of {} over GF({})",
            library.files.len(),
            library.file_len(),
            library.field.modulus(),
            p.n_files,
            scheme.file_len(),
            scheme.field().modulus()
        ))));
    }
    Ok(())
}

/// Solve `rows * F = values` for the subfile matrix `F` and flatten it.
pub(crate) fn solve_subfiles(
    user: usize,
    field: Field,
    rows: Vec<Vec<u32>>,
    values: Vec<Vec<u32>>,
) -> Result<Vec<u32>, SchemeError> {
    let a = FieldMatrix::from_rows(field, &rows)?;
    let b = FieldMatrix::from_rows(field, &values)?;
    if a.rank() < a.cols() {
        return Err(SchemeError::decode(
            user,
            format!("collected {} rows of rank {} < {}", a.rows(), a.rank(), a.cols()),
        ));
    }
    let x = a
        .solve(&b)?
        .ok_or_else(|| SchemeError::decode(user, "inconsistent coded symbols"))?;
    Ok(x.into_flat())
}

/// Every registry name accepted by [`build_scheme`], except the generic
/// `vu(<inner>)` form.
pub const SCHEME_NAMES: &[&str] = &[
    "yma_plus", "ht1", "ht2", "ht3", "flex", "pk_plus", "ht1_pk", "ht3_pk", "ht_vu",
];

/// Instantiate a scheme by registry name. `vu(<inner>)` wraps any
/// non-private scheme name.
pub fn build_scheme(name: &str, params: &SystemParams) -> Result<Box<dyn Scheme>, SchemeError> {
    params.validate()?;
    let name = name.trim();
    if let Some(inner) = name.strip_prefix("vu(").and_then(|s| s.strip_suffix(')')) {
        return Ok(Box::new(VuWrap::new(inner, params, true)?));
    }
    Ok(match name {
        "yma_plus" => Box::new(YmaPlus::new(params)?),
        "ht1" => Box::new(Ht1::new(params)?),
        "ht2" => Box::new(Ht2::new(params)?),
        "ht3" => Box::new(Flex::ht3(params)?),
        "flex" => Box::new(Flex::new(params, None)?),
        "pk_plus" => Box::new(PkPlus::new(params)?),
        "ht1_pk" => Box::new(Ht1Pk::new(params)?),
        "ht3_pk" => Box::new(Ht3Pk::new(params)?),
        "ht_vu" => Box::new(HtVu::new(params)?),
        other => return Err(SchemeError::UnknownScheme(other.into())),
    })
}

/// Valid `t` values for a registry name at these parameters; a single
/// placeholder for schemes without a memory parameter.
pub fn t_range(name: &str, params: &SystemParams) -> Vec<usize> {
    let (kp, k) = (params.k_active, params.k_total);
    if let Some(inner) = name.strip_prefix("vu(").and_then(|s| s.strip_suffix(')')) {
        return t_range(inner, &crate::bounds::formulas::virtual_params(params));
    }
    match name {
        "yma_plus" | "pk_plus" => (0..=k).collect(),
        "ht1" | "ht1_pk" => (0..=kp).collect(),
        "flex" if kp >= 3 => (2..kp).collect(),
        "flex" => Vec::new(),
        _ => vec![params.t],
    }
}

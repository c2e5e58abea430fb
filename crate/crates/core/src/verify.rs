//! Ground-truth checkers: exhaustive decoding, exact load accounting,
//! exact demand privacy and MDS validation.

use std::collections::HashMap;

use num::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::mds::{assert_mds, vandermonde_certificate, MdsCheck, MDS_ENUMERATION_LIMIT};
use crate::model::{
    all_words, binom, fmt_rat, subsets, DeliveryTranscript, DemandVector, FileLibrary, Rational, SystemParams,
    TradeoffPoint, UserCache, UserSecret,
};
use crate::schemes::{Scheme, SchemeError};

/// Cap on `C(K, K') N^K'` for the decode sweep.
pub const CORRECTNESS_CELL_LIMIT: u128 = 1_000_000;
/// Cap on secret assignments times demands, summed over active sets.
pub const PRIVACY_CELL_LIMIT: u128 = 10_000_000;
/// Arg-max cells kept verbatim in a report; the rest are only counted.
pub const ARGMAX_SAMPLE: usize = 8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DECODE: i32 = 2;
pub const EXIT_PRIVACY: i32 = 3;
pub const EXIT_ACCOUNTING: i32 = 4;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("enumeration of {cells} cells exceeds the limit of {limit}; use smaller parameters")]
    TooLarge { cells: u128, limit: u128 },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub active: Vec<usize>,
    pub demands: Vec<usize>,
    pub user: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectnessReport {
    pub decode_ok: bool,
    pub counterexample: Option<Counterexample>,
    pub cells: usize,
    pub omission_ok: bool,
    pub measured: Option<TradeoffPoint>,
    pub declared: TradeoffPoint,
    pub accounting_ok: bool,
    pub argmax_count: usize,
    pub argmax_sample: Vec<DemandVector>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CorrectnessOptions {
    pub seed: u64,
    /// Flip one cached symbol of user 0 before decoding.
    pub sabotage: bool,
}

fn file_units(symbols: usize, file_len: usize) -> Rational {
    Rational::new(BigInt::from(symbols), BigInt::from(file_len))
}

/// Random secrets from a seeded stream, as the server would draw them.
pub fn seeded_secrets(scheme: &dyn Scheme, seed: u64) -> Vec<UserSecret> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = scheme.params();
    scheme
        .secret_space()
        .sample_all(scheme.field(), p.n_files, p.k_total, &mut rng)
}

pub fn seeded_library(scheme: &dyn Scheme, seed: u64) -> FileLibrary {
    FileLibrary::random(scheme.field(), scheme.params().n_files, scheme.file_len(), seed)
}

struct CellOutcome {
    failure: Option<Counterexample>,
    payload: usize,
    omission_ok: bool,
}

/// Place once, then deliver and decode every `(I, d_I)`. Loads are the
/// worst case over all cells, in file units.
pub fn verify_correctness(scheme: &dyn Scheme, opts: CorrectnessOptions) -> Result<CorrectnessReport, VerifyError> {
    let p = scheme.params().clone();
    let cells = binom(p.k_total, p.k_active).saturating_mul((p.n_files as u128).saturating_pow(p.k_active as u32));
    if cells > CORRECTNESS_CELL_LIMIT {
        return Err(VerifyError::TooLarge {
            cells,
            limit: CORRECTNESS_CELL_LIMIT,
        });
    }
    let library = seeded_library(scheme, opts.seed);
    let secrets = seeded_secrets(scheme, opts.seed ^ 0x5eed);
    let mut placement = scheme.place(&library, &secrets)?;
    if opts.sabotage {
        if let Some((_, data)) = placement.caches[0].segments.iter_mut().find(|(_, d)| !d.is_empty()) {
            data[0] = scheme.field().add(data[0], 1);
        }
    }
    let file_len = scheme.file_len();
    let memory = placement.caches.iter().map(UserCache::symbol_count).max().unwrap_or(0);

    let demands = DemandVector::enumerate(&p);
    let outcomes: Vec<CellOutcome> = demands
        .par_iter()
        .map(|dv| {
            let fail = |user: usize, reason: String| Counterexample {
                active: dv.active.clone(),
                demands: dv.demands.clone(),
                user,
                reason,
            };
            let tr = match scheme.deliver(&placement.server_secrets, &library, dv) {
                Ok(tr) => tr,
                Err(e) => {
                    return CellOutcome {
                        failure: Some(fail(usize::MAX, format!("delivery failed: {e}"))),
                        payload: 0,
                        omission_ok: true,
                    }
                }
            };
            let mut failure = None;
            for (&u, &d) in dv.active.iter().zip(&dv.demands) {
                match scheme.decode(u, &placement.caches[u], &tr, d) {
                    Ok(out) if out == library.files[d] => {}
                    Ok(_) => {
                        failure = Some(fail(u, "decoded content differs from the file".into()));
                        break;
                    }
                    Err(e) => {
                        failure = Some(fail(u, e.to_string()));
                        break;
                    }
                }
            }
            CellOutcome {
                failure,
                payload: tr.payload_symbols(),
                omission_ok: scheme.omission_sound(&tr),
            }
        })
        .collect();

    let counterexample = outcomes.iter().find_map(|o| o.failure.clone());
    let max_payload = outcomes.iter().map(|o| o.payload).max().unwrap_or(0);
    let argmax: Vec<&DemandVector> = demands
        .iter()
        .zip(&outcomes)
        .filter(|(_, o)| o.payload == max_payload)
        .map(|(d, _)| d)
        .collect();
    let decode_ok = counterexample.is_none();
    let measured = decode_ok.then(|| TradeoffPoint::new(file_units(memory, file_len), file_units(max_payload, file_len)));
    let declared = scheme.declared();
    Ok(CorrectnessReport {
        decode_ok,
        counterexample,
        cells: demands.len(),
        omission_ok: outcomes.iter().all(|o| o.omission_ok),
        accounting_ok: measured.as_ref() == Some(&declared),
        measured,
        declared,
        argmax_count: argmax.len(),
        argmax_sample: argmax.into_iter().take(ARGMAX_SAMPLE).cloned().collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PrivacyViolation {
    pub library: String,
    pub active: Vec<usize>,
    pub colluders: Vec<usize>,
    pub mutual_information_bits: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrivacyReport {
    pub privacy_ok: bool,
    /// Independence verified by exact counting; the bit value is only for
    /// display.
    pub max_mutual_information_bits: f64,
    pub cells: u128,
    pub colluding_sets: usize,
    pub violation: Option<PrivacyViolation>,
}

/// Number of joint outcomes [`verify_privacy`] would enumerate.
pub fn privacy_cells(scheme: &dyn Scheme) -> u128 {
    let p = scheme.params();
    let s = scheme.secret_space().size(scheme.field(), p.n_files);
    let per_set = s
        .saturating_pow(p.k_active as u32)
        .saturating_mul((p.n_files as u128).saturating_pow(p.k_active as u32));
    per_set.saturating_mul(binom(p.k_total, p.k_active))
}

/// Interns hashable values into dense ids.
struct Interner<T> {
    ids: HashMap<T, u32>,
}

impl<T: std::hash::Hash + Eq> Interner<T> {
    fn new() -> Self {
        Interner { ids: HashMap::new() }
    }
    fn id(&mut self, v: T) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(v).or_insert(next)
    }
}

/// One joint outcome for a fixed active set.
struct Obs {
    demand: usize,
    transcript: u32,
    caches: Vec<u32>,
}

fn observe(
    scheme: &dyn Scheme,
    library: &FileLibrary,
    active: &[usize],
) -> Result<(Vec<Obs>, Vec<Vec<usize>>), VerifyError> {
    let p = scheme.params();
    let space = scheme.secret_space().enumerate(scheme.field(), p.n_files);
    let assignments = all_words(space.len(), p.k_active);
    let demand_words = all_words(p.n_files, p.k_active);
    let mut transcripts: Interner<DeliveryTranscript> = Interner::new();
    let mut caches: Interner<UserCache> = Interner::new();
    let mut obs = Vec::with_capacity(assignments.len() * demand_words.len());
    for chunk in assignments.chunks(64) {
        let part: Vec<(Vec<UserCache>, Vec<DeliveryTranscript>)> = chunk
            .par_iter()
            .map(|a| {
                let mut secrets = vec![space[0].clone(); p.k_total];
                for (i, &u) in active.iter().enumerate() {
                    secrets[u] = space[a[i]].clone();
                }
                let placement = scheme.place(library, &secrets)?;
                let own: Vec<UserCache> = active.iter().map(|&u| placement.caches[u].clone()).collect();
                let trs = demand_words
                    .iter()
                    .map(|d| {
                        let dv = DemandVector::new(active.to_vec(), d.clone(), p).map_err(SchemeError::from)?;
                        scheme.deliver(&placement.server_secrets, library, &dv)
                    })
                    .collect::<Result<Vec<_>, SchemeError>>()?;
                Ok((own, trs))
            })
            .collect::<Result<_, SchemeError>>()?;
        for (own, trs) in part {
            let ids: Vec<u32> = own.into_iter().map(|c| caches.id(c)).collect();
            for (d, tr) in trs.into_iter().enumerate() {
                obs.push(Obs {
                    demand: d,
                    transcript: transcripts.id(tr),
                    caches: ids.clone(),
                });
            }
        }
    }
    Ok((obs, demand_words))
}

/// Exact test of `d_hidden` independent of `(X, d_B, Z_B)`. Returns the
/// mutual information in bits when they are dependent.
fn dependence(obs: &[Obs], words: &[Vec<usize>], colluders: &[usize], n_files: usize) -> Option<f64> {
    let k = words[0].len();
    let hidden: Vec<usize> = (0..k).filter(|i| !colluders.contains(i)).collect();
    let n_hidden = n_files.pow(hidden.len() as u32);
    let code = |w: &[usize], pos: &[usize]| pos.iter().fold(0usize, |acc, &i| acc * n_files + w[i]);
    let mut views: Interner<(u32, usize, Vec<u32>)> = Interner::new();
    let mut joint: HashMap<(u32, usize), u64> = HashMap::new();
    let mut view_count: HashMap<u32, u64> = HashMap::new();
    let mut hidden_count = vec![0u64; n_hidden];
    for o in obs {
        let w = &words[o.demand];
        let v = views.id((
            o.transcript,
            code(w, colluders),
            colluders.iter().map(|&i| o.caches[i]).collect(),
        ));
        let h = code(w, &hidden);
        *joint.entry((v, h)).or_default() += 1;
        *view_count.entry(v).or_default() += 1;
        hidden_count[h] += 1;
    }
    let total = obs.len() as u64;
    let mut support: HashMap<u32, usize> = HashMap::new();
    let mut independent = true;
    for (&(v, h), &c) in &joint {
        *support.entry(v).or_default() += 1;
        if c as u128 * total as u128 != view_count[&v] as u128 * hidden_count[h] as u128 {
            independent = false;
        }
    }
    // a zero joint count with positive marginals is dependence too
    let nonzero_hidden = hidden_count.iter().filter(|&&c| c > 0).count();
    if support.values().any(|&s| s != nonzero_hidden) {
        independent = false;
    }
    if independent {
        return None;
    }
    let t = total as f64;
    let mi = joint
        .iter()
        .map(|(&(v, h), &c)| {
            let pj = c as f64 / t;
            let pv = view_count[&v] as f64 / t;
            let ph = hidden_count[h] as f64 / t;
            pj * (pj / (pv * ph)).log2()
        })
        .sum::<f64>();
    Some(mi.max(f64::MIN_POSITIVE))
}

/// Enumerate every secret assignment of the active users, every demand,
/// every active set and every nonempty colluding subset, on a random and
/// on a repeated-file library, and test exact independence.
pub fn verify_privacy(scheme: &dyn Scheme, seed: u64) -> Result<PrivacyReport, VerifyError> {
    let cells = privacy_cells(scheme);
    if cells > PRIVACY_CELL_LIMIT {
        return Err(VerifyError::TooLarge {
            cells,
            limit: PRIVACY_CELL_LIMIT,
        });
    }
    let p = scheme.params().clone();
    let libraries = [
        ("random", seeded_library(scheme, seed)),
        (
            "repeated",
            FileLibrary::repeated(scheme.field(), p.n_files, scheme.file_len(), seed.wrapping_add(1)),
        ),
    ];
    let users: Vec<usize> = (0..p.k_total).collect();
    let positions: Vec<usize> = (0..p.k_active).collect();
    let mut colluding_sets = 0;
    let mut worst: Option<PrivacyViolation> = None;
    for (name, library) in &libraries {
        for active in subsets(&users, p.k_active) {
            let (obs, words) = observe(scheme, library, &active)?;
            // B = I leaves nothing hidden
            for size in 1..p.k_active {
                for b in subsets(&positions, size) {
                    colluding_sets += 1;
                    if let Some(mi) = dependence(&obs, &words, &b, p.n_files) {
                        if worst.as_ref().map_or(true, |w| mi > w.mutual_information_bits) {
                            worst = Some(PrivacyViolation {
                                library: name.to_string(),
                                active: active.clone(),
                                colluders: b.iter().map(|&i| active[i]).collect(),
                                mutual_information_bits: mi,
                            });
                        }
                    }
                }
            }
            colluding_sets += 1;
        }
    }
    Ok(PrivacyReport {
        privacy_ok: worst.is_none(),
        max_mutual_information_bits: worst.as_ref().map_or(0.0, |w| w.mutual_information_bits),
        cells,
        colluding_sets,
        violation: worst,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SideInfoReport {
    pub ok: bool,
    pub cells: usize,
    /// Failing cell, if any.
    pub mismatch: Option<DemandVector>,
}

/// Run the scheme at file length `B` and `2B` on every cell: the payload
/// must double exactly and the side information must not change.
pub fn verify_side_info_size(name: &str, params: &SystemParams, seed: u64) -> Result<SideInfoReport, VerifyError> {
    let one = crate::schemes::build_scheme(name, &params.clone().with_b_factor(1))?;
    let two = crate::schemes::build_scheme(name, &params.clone().with_b_factor(2))?;
    let p = one.params().clone();
    let cells = binom(p.k_total, p.k_active).saturating_mul((p.n_files as u128).saturating_pow(p.k_active as u32));
    if cells > CORRECTNESS_CELL_LIMIT {
        return Err(VerifyError::TooLarge {
            cells,
            limit: CORRECTNESS_CELL_LIMIT,
        });
    }
    let secrets = seeded_secrets(one.as_ref(), seed);
    let lib1 = seeded_library(one.as_ref(), seed);
    let lib2 = seeded_library(two.as_ref(), seed);
    let demands = DemandVector::enumerate(&p);
    let mismatch = demands
        .par_iter()
        .map(|dv| -> Result<Option<DemandVector>, SchemeError> {
            let a = one.deliver(&secrets, &lib1, dv)?;
            let b = two.deliver(&secrets, &lib2, dv)?;
            let ok = b.payload_symbols() == 2 * a.payload_symbols()
                && a.side_info == b.side_info
                && a.side_info.symbols() == b.side_info.symbols();
            Ok((!ok).then(|| dv.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(SideInfoReport {
        ok: mismatch.is_none(),
        cells: demands.len(),
        mismatch,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MdsReport {
    pub label: String,
    pub rows: usize,
    pub k: usize,
    /// `brute_force` or `vandermonde_certificate`.
    pub method: String,
    pub ok: bool,
    pub failing_rows: Option<Vec<usize>>,
}

/// Brute force over all `k`-row subsets when that is at most
/// [`MDS_ENUMERATION_LIMIT`] checks, otherwise the structural Vandermonde
/// certificate.
pub fn verify_mds(scheme: &dyn Scheme) -> Vec<MdsReport> {
    scheme
        .mds_requirements()
        .into_iter()
        .map(|req| {
            let rows = req.matrix.rows();
            let base = MdsReport {
                label: req.label.clone(),
                rows,
                k: req.k,
                method: String::new(),
                ok: false,
                failing_rows: None,
            };
            if binom(rows, req.k) <= MDS_ENUMERATION_LIMIT {
                match assert_mds(&req.matrix, req.k) {
                    Ok(MdsCheck::Pass) => MdsReport {
                        method: "brute_force".into(),
                        ok: true,
                        ..base
                    },
                    Ok(MdsCheck::Fail { subset }) => MdsReport {
                        method: "brute_force".into(),
                        failing_rows: Some(subset),
                        ..base
                    },
                    Err(_) => MdsReport {
                        method: "brute_force".into(),
                        ..base
                    },
                }
            } else {
                MdsReport {
                    method: "vandermonde_certificate".into(),
                    ok: req.matrix.cols() == req.k && vandermonde_certificate(&req.matrix),
                    ..base
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub scheme: String,
    pub params: SystemParams,
    pub subpacketization: usize,
    pub correctness: Option<CorrectnessReport>,
    pub privacy: Option<PrivacyReport>,
    pub side_info: Option<SideInfoReport>,
    pub mds: Vec<MdsReport>,
}

impl VerificationReport {
    /// Decode-level failures (including MDS and omission checks) win over
    /// privacy, which wins over accounting.
    pub fn exit_code(&self) -> i32 {
        let c = self.correctness.as_ref();
        if c.map_or(false, |c| !c.decode_ok || !c.omission_ok) || self.mds.iter().any(|m| !m.ok) {
            return EXIT_DECODE;
        }
        if self.privacy.as_ref().map_or(false, |p| !p.privacy_ok) {
            return EXIT_PRIVACY;
        }
        if c.map_or(false, |c| !c.accounting_ok) || self.side_info.as_ref().map_or(false, |s| !s.ok) {
            return EXIT_ACCOUNTING;
        }
        EXIT_OK
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut parts = vec![self.scheme.clone()];
        if let Some(c) = &self.correctness {
            parts.push(format!("decode {}", if c.decode_ok { "ok" } else { "FAIL" }));
            if let Some(m) = &c.measured {
                parts.push(format!("measured (M, R) = ({}, {})", fmt_rat(&m.m), fmt_rat(&m.r)));
            }
            if !c.accounting_ok {
                parts.push(format!(
                    "declared ({}, {})",
                    fmt_rat(&c.declared.m),
                    fmt_rat(&c.declared.r)
                ));
            }
        }
        if let Some(p) = &self.privacy {
            parts.push(format!("privacy {}", if p.privacy_ok { "ok" } else { "LEAKS" }));
        }
        if let Some(s) = &self.side_info {
            parts.push(format!("side info {}", if s.ok { "ok" } else { "FAIL" }));
        }
        if !self.mds.is_empty() {
            parts.push(format!("mds {}", if self.mds.iter().all(|m| m.ok) { "ok" } else { "FAIL" }));
        }
        parts.join(", ")
    }
}

/// What [`verify_scheme`] should run.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyPlan {
    pub seed: u64,
    pub correctness: bool,
    pub privacy: bool,
    pub side_info: bool,
    pub mds: bool,
    pub sabotage: bool,
}

pub fn verify_scheme(name: &str, params: &SystemParams, plan: VerifyPlan) -> Result<VerificationReport, VerifyError> {
    let scheme = crate::schemes::build_scheme(name, params)?;
    let correctness = if plan.correctness {
        Some(verify_correctness(
            scheme.as_ref(),
            CorrectnessOptions {
                seed: plan.seed,
                sabotage: plan.sabotage,
            },
        )?)
    } else {
        None
    };
    let privacy = if plan.privacy {
        Some(verify_privacy(scheme.as_ref(), plan.seed)?)
    } else {
        None
    };
    let side_info = if plan.side_info {
        Some(verify_side_info_size(name, params, plan.seed)?)
    } else {
        None
    };
    let mds = if plan.mds { verify_mds(scheme.as_ref()) } else { Vec::new() };
    Ok(VerificationReport {
        schema: 1,
        scheme: scheme.name(),
        params: scheme.params().clone(),
        subpacketization: scheme.subpacketization(),
        correctness,
        privacy,
        side_info,
        mds,
    })
}

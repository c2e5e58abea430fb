use std::collections::BTreeSet;

use crate::bounds::formulas;
use crate::gf::{Field, FieldMatrix};
use crate::mds::{vandermonde, MdsSpec};
use crate::model::{
    DeliveryTranscript, DemandVector, FileLibrary, Label, Placement, SideInfo, SystemParams, TradeoffPoint, UserCache,
    UserSecret,
};
use crate::schemes::{
    check_library, resolve_field, solve_subfiles, split_library, MdsRequirement, Scheme, SchemeError,
};

/// Each user caches one coded piece of the sum of all files. Needs at least
/// as many active users as files.
pub struct Ht2 {
    params: SystemParams,
    field: Field,
    /// `K x K'`, any `K'` rows invertible.
    g: FieldMatrix,
}

impl Ht2 {
    pub fn new(params: &SystemParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let (kp, k, n) = (params.k_active, params.k_total, params.n_files);
        if kp < n {
            return Err(SchemeError::Unsupported {
                scheme: "ht2".into(),
                reason: format!("needs K' >= N, got K'={kp} N={n}"),
            });
        }
        let field = resolve_field("ht2", params, k as u32 + 1)?;
        let g = vandermonde(MdsSpec::new(kp, k, field.modulus()))?;
        let mut params = params.clone();
        params.q = field.modulus();
        Ok(Ht2 { params, field, g })
    }
}

impl Scheme for Ht2 {
    fn name(&self) -> String {
        "ht2".into()
    }
    fn params(&self) -> &SystemParams {
        &self.params
    }
    fn field(&self) -> Field {
        self.field
    }
    fn subpacketization(&self) -> usize {
        self.params.k_active
    }
    fn declared(&self) -> TradeoffPoint {
        formulas::ht2_point(&self.params).expect("K' >= N checked at construction")
    }
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        vec![MdsRequirement {
            label: "ht2 generator".into(),
            matrix: self.g.clone(),
            k: self.params.k_active,
        }]
    }

    fn place(&self, library: &FileLibrary, _secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let f = self.field;
        let sub = split_library(library, self.subpacketization())?;
        let mut sum = FieldMatrix::zeros(f, sub[0].rows(), sub[0].cols());
        for m in &sub {
            let flat: Vec<u32> = sum.as_flat().iter().zip(m.as_flat()).map(|(&a, &b)| f.add(a, b)).collect();
            sum = FieldMatrix::from_flat(f, m.rows(), m.cols(), flat)?;
        }
        let caches = (0..self.params.k_total)
            .map(|u| {
                let mut c = UserCache::new(UserSecret::None);
                c.push(Label::SumPiece { row: u }, sum.left_mul_vec(self.g.row(u))?);
                Ok(c)
            })
            .collect::<Result<_, SchemeError>>()?;
        Ok(Placement {
            caches,
            server_secrets: vec![UserSecret::None; self.params.k_total],
        })
    }

    fn deliver(
        &self,
        _secrets: &[UserSecret],
        library: &FileLibrary,
        demand: &DemandVector,
    ) -> Result<DeliveryTranscript, SchemeError> {
        check_library(self, library)?;
        let f = self.field;
        let n_files = self.params.n_files;
        let sub = split_library(library, self.subpacketization())?;
        let requested: BTreeSet<usize> = demand.demands.iter().copied().collect();
        let mut payload = Vec::new();
        if requested.len() < n_files {
            // Some file is unrequested: sending the requested files whole
            // costs at most N - 1, below the coded load.
            for &n in &requested {
                payload.push((Label::WholeFile { file: n }, library.files[n].clone()));
            }
        } else {
            for (&u, &d) in demand.active.iter().zip(&demand.demands) {
                for n in (0..n_files).filter(|&n| n != d) {
                    payload.push((Label::Piece { file: n, row: u }, sub[n].left_mul_vec(self.g.row(u))?));
                }
            }
            for n in 0..n_files {
                let group: Vec<usize> = demand
                    .active
                    .iter()
                    .zip(&demand.demands)
                    .filter(|(_, &d)| d == n)
                    .map(|(&u, _)| u)
                    .collect();
                let leader = group[0];
                let lead_piece = sub[n].left_mul_vec(self.g.row(leader))?;
                for &j in &group[1..] {
                    let mut x = sub[n].left_mul_vec(self.g.row(j))?;
                    f.axpy(&mut x, 1, &lead_piece);
                    payload.push((
                        Label::PairPiece {
                            file: n,
                            row_a: leader,
                            row_b: j,
                        },
                        x,
                    ));
                }
            }
        }
        Ok(DeliveryTranscript {
            payload,
            side_info: SideInfo {
                active: demand.active.clone(),
                demands: Some(demand.demands.clone()),
                ..Default::default()
            },
        })
    }

    fn decode(
        &self,
        user: usize,
        cache: &UserCache,
        transcript: &DeliveryTranscript,
        demand: usize,
    ) -> Result<Vec<u32>, SchemeError> {
        if let Some(x) = transcript.get(&Label::WholeFile { file: demand }) {
            return Ok(x.to_vec());
        }
        let f = self.field;
        let si = &transcript.side_info;
        let demands = si
            .demands
            .as_ref()
            .ok_or_else(|| SchemeError::decode(user, "no demand side information"))?;
        let get = |label: Label| {
            transcript
                .get(&label)
                .map(|x| x.to_vec())
                .ok_or_else(|| SchemeError::decode(user, format!("missing {label:?}")))
        };
        // Unlock our own piece of the wanted file from the cached sum.
        let mut own = cache
            .get(&Label::SumPiece { row: user })
            .ok_or_else(|| SchemeError::decode(user, "cached sum missing"))?
            .to_vec();
        for n in (0..self.params.n_files).filter(|&n| n != demand) {
            f.axpy(&mut own, f.neg(1), &get(Label::Piece { file: n, row: user })?);
        }
        let group: Vec<usize> = si
            .active
            .iter()
            .zip(demands)
            .filter(|(_, &d)| d == demand)
            .map(|(&u, _)| u)
            .collect();
        let leader = group[0];
        let lead_piece = if leader == user {
            own.clone()
        } else {
            let mut x = get(Label::PairPiece {
                file: demand,
                row_a: leader,
                row_b: user,
            })?;
            f.axpy(&mut x, f.neg(1), &own);
            x
        };
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for (&u, &d) in si.active.iter().zip(demands) {
            let v = if d != demand {
                get(Label::Piece { file: demand, row: u })?
            } else if u == leader {
                lead_piece.clone()
            } else if u == user {
                own.clone()
            } else {
                let mut x = get(Label::PairPiece {
                    file: demand,
                    row_a: leader,
                    row_b: u,
                })?;
                f.axpy(&mut x, f.neg(1), &lead_piece);
                x
            };
            rows.push(self.g.row(u).to_vec());
            values.push(v);
        }
        solve_subfiles(user, f, rows, values)
    }
}

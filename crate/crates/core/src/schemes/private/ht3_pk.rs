use crate::bounds::formulas;
use crate::gf::{next_prime, Field, FieldMatrix};
use crate::mds::{extra_vandermonde_row, vandermonde, MdsSpec};
use crate::model::{
    binom, subsets, without, DeliveryTranscript, DemandVector, FileLibrary, Label, Placement, SideInfo, SystemParams,
    TradeoffPoint, UserCache, UserSecret,
};
use crate::schemes::{
    check_library, key_of, resolve_field, solve_subfiles, split_library, MdsRequirement, Scheme, SchemeError,
    SecretSpace, AUTO_Q_FLOOR,
};

use super::pk_plus::{key_term, queries};

/// Active-set count above which the construction-time condition sweep is
/// skipped (conditions are still checked on every delivery).
const CONDITION_SWEEP_LIMIT: u128 = 20_000;

/// Per-user `(K'-1) x K'` blocks of one MDS code, one key against a shared
/// extra row `xi`, and a single multicast `sum_j T(q_j, phi_j)` where
/// `phi_j` lies in every other active user's span.
pub struct Ht3Pk {
    params: SystemParams,
    field: Field,
    g: FieldMatrix,
    xi: Vec<u32>,
    nulls: Vec<FieldMatrix>,
}

impl Ht3Pk {
    pub fn new(params: &SystemParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let kp = params.k_active;
        if kp < 3 {
            return Err(SchemeError::Unsupported {
                scheme: "ht3_pk".into(),
                reason: format!("needs K' >= 3, got {kp}"),
            });
        }
        let code_len = params.k_total * (kp - 1);
        let needed = code_len as u32 + 2;
        let mut field = resolve_field("ht3_pk", params, needed)?;
        loop {
            match Self::build(params, field) {
                Ok(s) => return Ok(s),
                Err(SchemeError::ConditionViolated(_)) | Err(SchemeError::PhiNotFound(_)) if params.q == 0 => {
                    field = Field::new(next_prime(field.modulus() + 1).max(AUTO_Q_FLOOR))?;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn build(params: &SystemParams, field: Field) -> Result<Self, SchemeError> {
        let (kp, k) = (params.k_active, params.k_total);
        let spec = MdsSpec::new(kp, k * (kp - 1), field.modulus());
        let g = vandermonde(spec)?;
        let xi = extra_vandermonde_row(spec, 0)?;
        let mut params = params.clone();
        params.q = field.modulus();
        let nulls = (0..k)
            .map(|u| {
                let block = g.select_rows(&(u * (kp - 1)..(u + 1) * (kp - 1)).collect::<Vec<_>>());
                FieldMatrix::from_rows(field, &block.nullspace()).map_err(SchemeError::from)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let s = Ht3Pk {
            params,
            field,
            g,
            xi,
            nulls,
        };
        // Condition 1: own block plus xi spans everything.
        for u in 0..k {
            let mut m = s.block(u);
            m.push_row(&s.xi)?;
            if m.rank() < kp {
                return Err(SchemeError::ConditionViolated(format!("[G_{u}; xi] is rank deficient")));
            }
        }
        // Any K' blocks together have full rank.
        if binom(k, kp) <= CONDITION_SWEEP_LIMIT {
            let users: Vec<usize> = (0..k).collect();
            for set in subsets(&users, kp) {
                let parts: Vec<FieldMatrix> = set.iter().map(|&u| s.block(u)).collect();
                let refs: Vec<&FieldMatrix> = parts.iter().collect();
                if FieldMatrix::vstack(&refs)?.rank() < kp {
                    return Err(SchemeError::ConditionViolated(format!("blocks {set:?} rank deficient")));
                }
                for &j in &set {
                    s.phi(&set, j)?;
                }
            }
        }
        Ok(s)
    }

    fn block(&self, user: usize) -> FieldMatrix {
        let kp = self.params.k_active;
        self.g.select_rows(&(user * (kp - 1)..(user + 1) * (kp - 1)).collect::<Vec<_>>())
    }

    fn block_rows(&self, user: usize) -> std::ops::Range<usize> {
        let kp = self.params.k_active;
        user * (kp - 1)..(user + 1) * (kp - 1)
    }

    pub fn xi(&self) -> &[u32] {
        &self.xi
    }

    /// `phi_j` for active set `set`: in the span of every other active
    /// block and completing `G_j` to full rank. Nullspace basis vectors are
    /// tried in order.
    pub fn phi(&self, set: &[usize], j: usize) -> Result<Vec<u32>, SchemeError> {
        let kp = self.params.k_active;
        let others = without(set, j);
        let parts: Vec<&FieldMatrix> = others.iter().map(|&u| &self.nulls[u]).collect();
        let stacked = FieldMatrix::vstack(&parts)?;
        for cand in stacked.nullspace() {
            let mut m = self.block(j);
            m.push_row(&cand)?;
            if m.rank() == kp {
                return Ok(cand);
            }
        }
        Err(SchemeError::PhiNotFound(format!("user {j} in {set:?}")))
    }
}

impl Scheme for Ht3Pk {
    fn name(&self) -> String {
        "ht3_pk".into()
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
        formulas::ht3_pk_point(&self.params).expect("K' >= 3 checked at construction")
    }
    fn secret_space(&self) -> SecretSpace {
        SecretSpace::Keys
    }
    fn is_private(&self) -> bool {
        true
    }
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        let mut with_xi = self.g.clone();
        with_xi.push_row(&self.xi).unwrap();
        vec![MdsRequirement {
            label: "ht3_pk blocks with xi".into(),
            matrix: with_xi,
            k: self.params.k_active,
        }]
    }

    fn place(&self, library: &FileLibrary, secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let (k, n_files) = (self.params.k_total, self.params.n_files);
        let sub = split_library(library, self.subpacketization())?;
        let mut caches = Vec::with_capacity(k);
        for u in 0..k {
            let key = key_of(&secrets[u], self.field, n_files)?;
            let mut c = UserCache::new(secrets[u].clone());
            for row in self.block_rows(u) {
                for (n, f) in sub.iter().enumerate() {
                    c.push(Label::Piece { file: n, row }, f.left_mul_vec(self.g.row(row))?);
                }
            }
            c.push(Label::ExtraKey { index: 0 }, key_term(self.field, key, &sub, &self.xi)?);
            caches.push(c);
        }
        Ok(Placement {
            caches,
            server_secrets: secrets.to_vec(),
        })
    }

    fn deliver(
        &self,
        secrets: &[UserSecret],
        library: &FileLibrary,
        demand: &DemandVector,
    ) -> Result<DeliveryTranscript, SchemeError> {
        check_library(self, library)?;
        let f = self.field;
        let n_files = self.params.n_files;
        let sub = split_library(library, self.subpacketization())?;
        let q = queries(f, secrets, demand, n_files)?;
        let mut x = vec![0; self.params.b_factor];
        for (i, &j) in demand.active.iter().enumerate() {
            let phi = self.phi(&demand.active, j)?;
            f.axpy(&mut x, 1, &key_term(f, &q[i], &sub, &phi)?);
        }
        Ok(DeliveryTranscript {
            payload: vec![(
                Label::Multicast {
                    users: demand.active.clone(),
                },
                x,
            )],
            side_info: SideInfo {
                active: demand.active.clone(),
                multicast: Some(crate::model::MulticastInfo {
                    users: demand.active.clone(),
                    t: self.params.k_active - 1,
                    rows: q,
                    leaders: Vec::new(),
                }),
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
        let f = self.field;
        let n_files = self.params.n_files;
        let key = key_of(&cache.secret, f, n_files)?.to_vec();
        let info = transcript
            .side_info
            .multicast
            .as_ref()
            .ok_or_else(|| SchemeError::decode(user, "no query side information"))?;
        let active = &info.users;
        let own_rows: Vec<usize> = self.block_rows(user).collect();
        let piece = |n: usize, row: usize| {
            cache
                .get(&Label::Piece { file: n, row })
                .map(|d| d.to_vec())
                .ok_or_else(|| SchemeError::decode(user, format!("coded piece ({n}, {row}) not cached")))
        };
        // T(a, v) for v in span(G_user): v = lambda^T G_user.
        let own_t = self.block(user).transpose();
        let bilinear_own = |a: &[u32], v: &[u32]| -> Result<Vec<u32>, SchemeError> {
            let lambda = own_t
                .solve_vec(v)?
                .ok_or_else(|| SchemeError::decode(user, "phi outside own span"))?;
            let mut acc = vec![0; self.params.b_factor];
            for (n, &an) in a.iter().enumerate() {
                if an == 0 {
                    continue;
                }
                for (c, &row) in lambda.iter().zip(&own_rows) {
                    f.axpy(&mut acc, f.mul(an, *c), &piece(n, row)?);
                }
            }
            Ok(acc)
        };
        let mut x = transcript
            .get(&Label::Multicast { users: active.clone() })
            .ok_or_else(|| SchemeError::decode(user, "multicast missing"))?
            .to_vec();
        for (i, &j) in active.iter().enumerate() {
            if j != user {
                let phi = self.phi(active, j)?;
                f.axpy(&mut x, f.neg(1), &bilinear_own(&info.rows[i], &phi)?);
            }
        }
        // Remaining: T(e_d, phi_user) + T(p_user, phi_user). Split phi over
        // [G_user; xi] to evaluate the key part.
        let phi = self.phi(active, user)?;
        let mut with_xi = self.block(user);
        with_xi.push_row(&self.xi)?;
        let mu = with_xi
            .transpose()
            .solve_vec(&phi)?
            .ok_or_else(|| SchemeError::decode(user, "[G; xi] does not span phi"))?;
        let (mu_g, mu_xi) = mu.split_at(own_rows.len());
        let mut key_part = cache
            .get(&Label::ExtraKey { index: 0 })
            .ok_or_else(|| SchemeError::decode(user, "xi key missing"))?
            .iter()
            .map(|&v| f.mul(v, mu_xi[0]))
            .collect::<Vec<u32>>();
        for (n, &p) in key.iter().enumerate() {
            if p == 0 {
                continue;
            }
            for (c, &row) in mu_g.iter().zip(&own_rows) {
                f.axpy(&mut key_part, f.mul(p, *c), &piece(n, row)?);
            }
        }
        f.axpy(&mut x, f.neg(1), &key_part);
        let mut rows: Vec<Vec<u32>> = own_rows.iter().map(|&r| self.g.row(r).to_vec()).collect();
        let mut values: Vec<Vec<u32>> = own_rows.iter().map(|&r| piece(demand, r)).collect::<Result<_, _>>()?;
        rows.push(phi);
        values.push(x);
        solve_subfiles(user, f, rows, values)
    }

    fn omission_sound(&self, _transcript: &DeliveryTranscript) -> bool {
        true
    }
}

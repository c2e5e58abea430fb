use std::collections::HashMap;

use crate::bounds::formulas;
use crate::gf::{Field, FieldMatrix};
use crate::mds::{vandermonde, MdsSpec};
use crate::model::{
    binom, subset_rank, subsets, Combinations, DeliveryTranscript, DemandVector, FileLibrary, Label, Placement,
    SideInfo, SystemParams, TradeoffPoint, UserCache, UserSecret,
};
use crate::schemes::multicast::Multicast;
use crate::schemes::{
    check_library, check_subpacketization, key_of, resolve_field, solve_subfiles, split_library, MdsRequirement,
    Scheme, SchemeError, SecretSpace,
};

use super::pk_plus::{key_term, queries};

/// MDS-coded placement as in HT1 plus enough keys `T(p_j, xi)` for each user
/// to evaluate its key against any code row. Delivery multicasts
/// query-vector combinations among the active users.
pub struct Ht1Pk {
    params: SystemParams,
    field: Field,
    l: usize,
    g: FieldMatrix,
    /// Extra key rows per user, chosen greedily in lexicographic order.
    xi: Vec<Vec<usize>>,
    /// Per user: the code rows whose key terms it can evaluate directly,
    /// stacked; spans the whole space.
    span_rows: Vec<Vec<usize>>,
}

impl Ht1Pk {
    pub fn new(params: &SystemParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let (kp, k, t) = (params.k_active, params.k_total, params.t);
        if t > kp {
            return Err(SchemeError::Unsupported {
                scheme: "ht1_pk".into(),
                reason: format!("t={t} > K'={kp}"),
            });
        }
        let l = check_subpacketization("ht1_pk", binom(kp, t))?;
        let code_len = check_subpacketization("ht1_pk", binom(k, t))?;
        let field = resolve_field("ht1_pk", params, code_len as u32 + 1)?;
        let g = vandermonde(MdsSpec::new(l, code_len, field.modulus()))?;
        let mut xi = Vec::with_capacity(k);
        let mut span_rows = Vec::with_capacity(k);
        for u in 0..k {
            let mut own: Vec<usize> = Vec::new();
            let mut others: Vec<usize> = Vec::new();
            for (row, set) in Combinations::new(k, t).enumerate() {
                if set.contains(&u) {
                    own.push(row);
                } else {
                    others.push(row);
                }
            }
            let mut acc = g.select_rows(&own);
            let mut rank = acc.rank();
            let mut picked = Vec::new();
            for row in others {
                if rank == l {
                    break;
                }
                let mut trial = acc.clone();
                trial.push_row(g.row(row))?;
                let r = trial.rank();
                if r > rank {
                    acc = trial;
                    rank = r;
                    picked.push(row);
                }
            }
            if rank < l {
                return Err(SchemeError::InfeasibleXi(format!("user {u} reaches rank {rank} < {l}")));
            }
            let mut all = own.clone();
            all.extend(&picked);
            span_rows.push(all);
            xi.push(picked);
        }
        let mut params = params.clone();
        params.q = field.modulus();
        Ok(Ht1Pk {
            params,
            field,
            l,
            g,
            xi,
            span_rows,
        })
    }

    pub fn extra_key_rows(&self, user: usize) -> &[usize] {
        &self.xi[user]
    }
}

impl Scheme for Ht1Pk {
    fn name(&self) -> String {
        format!("ht1_pk(t={})", self.params.t)
    }
    fn params(&self) -> &SystemParams {
        &self.params
    }
    fn field(&self) -> Field {
        self.field
    }
    fn subpacketization(&self) -> usize {
        self.l
    }
    fn declared(&self) -> TradeoffPoint {
        formulas::ht1_pk_point(&self.params, self.params.t)
    }
    fn secret_space(&self) -> SecretSpace {
        SecretSpace::Keys
    }
    fn is_private(&self) -> bool {
        true
    }
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        vec![MdsRequirement {
            label: "ht1_pk generator".into(),
            matrix: self.g.clone(),
            k: self.l,
        }]
    }

    fn place(&self, library: &FileLibrary, secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let (k, t, n_files) = (self.params.k_total, self.params.t, self.params.n_files);
        let sub = split_library(library, self.l)?;
        let coded: Vec<FieldMatrix> = sub.iter().map(|f| self.g.mul(f)).collect::<Result<_, _>>()?;
        let mut caches = Vec::with_capacity(k);
        for u in 0..k {
            let key = key_of(&secrets[u], self.field, n_files)?;
            let mut c = UserCache::new(secrets[u].clone());
            for (row, set) in Combinations::new(k, t).enumerate() {
                if set.contains(&u) {
                    for (n, m) in coded.iter().enumerate() {
                        c.push(Label::Piece { file: n, row }, m.row(row).to_vec());
                    }
                }
            }
            for &row in &self.xi[u] {
                c.push(Label::Key { row }, key_term(self.field, key, &sub, self.g.row(row))?);
            }
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
        let (k, n_files, t) = (self.params.k_total, self.params.n_files, self.params.t);
        let sub = split_library(library, self.l)?;
        let rows = queries(self.field, secrets, demand, n_files)?;
        let mc = Multicast::new(self.field, n_files, demand.active.clone(), t, rows, &demand.active);
        let payload = mc.encode(self.params.b_factor, |n, set| {
            Ok(sub[n].left_mul_vec(self.g.row(subset_rank(set, k)))?)
        })?;
        Ok(DeliveryTranscript {
            payload,
            side_info: SideInfo {
                active: demand.active.clone(),
                multicast: Some(mc.info().clone()),
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
        let (k, n_files) = (self.params.k_total, self.params.n_files);
        let f = self.field;
        let key = key_of(&cache.secret, f, n_files)?.to_vec();
        let info = transcript
            .side_info
            .multicast
            .as_ref()
            .ok_or_else(|| SchemeError::decode(user, "no multicast side information"))?;
        let mc = Multicast::from_info(f, n_files, info);
        let piece = |n: usize, row: usize| {
            cache
                .get(&Label::Piece { file: n, row })
                .map(|d| d.to_vec())
                .ok_or_else(|| SchemeError::decode(user, format!("coded piece ({n}, {row}) not cached")))
        };
        let known = |n: usize, set: &[usize]| piece(n, subset_rank(set, k));

        // Key terms T(p, g_r) for the rows this user can evaluate directly.
        let mut basis_vals = Vec::with_capacity(self.span_rows[user].len());
        for &row in &self.span_rows[user] {
            let v = if self.xi[user].contains(&row) {
                cache
                    .get(&Label::Key { row })
                    .map(|d| d.to_vec())
                    .ok_or_else(|| SchemeError::decode(user, format!("extra key {row} missing")))?
            } else {
                let mut acc = vec![0; self.params.b_factor];
                for (n, &p) in key.iter().enumerate() {
                    if p != 0 {
                        f.axpy(&mut acc, p, &piece(n, row)?);
                    }
                }
                acc
            };
            basis_vals.push(v);
        }
        let basis_t = self.g.select_rows(&self.span_rows[user]).transpose();
        let mut key_cache: HashMap<usize, Vec<u32>> = HashMap::new();
        let mut key_at = |row: usize| -> Result<Vec<u32>, SchemeError> {
            if let Some(v) = key_cache.get(&row) {
                return Ok(v.clone());
            }
            let lambda = basis_t
                .solve_vec(self.g.row(row))?
                .ok_or_else(|| SchemeError::decode(user, "key span incomplete"))?;
            let mut acc = vec![0; self.params.b_factor];
            for (c, v) in lambda.iter().zip(&basis_vals) {
                f.axpy(&mut acc, *c, v);
            }
            key_cache.insert(row, acc.clone());
            Ok(acc)
        };

        let mut rows = Vec::with_capacity(self.l);
        let mut values = Vec::with_capacity(self.l);
        for set in subsets(&info.users, self.params.t) {
            if set.contains(&user) {
                let row = subset_rank(&set, k);
                values.push(piece(demand, row)?);
                rows.push(self.g.row(row).to_vec());
            }
        }
        for (s, x) in mc.messages_for(user, &transcript.payload, self.params.b_factor)? {
            let rest: Vec<usize> = s.iter().copied().filter(|&u| u != user).collect();
            let row = subset_rank(&rest, k);
            let mut v = mc.strip(user, &s, &x, known)?;
            f.axpy(&mut v, f.neg(1), &key_at(row)?);
            values.push(v);
            rows.push(self.g.row(row).to_vec());
        }
        solve_subfiles(user, f, rows, values)
    }
}

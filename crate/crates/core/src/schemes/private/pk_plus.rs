use crate::bounds::formulas;
use crate::gf::{Field, FieldMatrix};
use crate::model::{
    binom, subset_rank, Combinations, DeliveryTranscript, DemandVector, FileLibrary, Label, Placement, SideInfo,
    SystemParams, TradeoffPoint, UserCache, UserSecret,
};
use crate::schemes::multicast::Multicast;
use crate::schemes::{
    check_library, check_subpacketization, key_of, resolve_field, split_library, Scheme, SchemeError, SecretSpace,
};

/// Key term `sum_n p_n F_n[row]`.
pub(crate) fn key_term(field: Field, key: &[u32], sub: &[FieldMatrix], coeffs: &[u32]) -> Result<Vec<u32>, SchemeError> {
    let mut acc = vec![0; sub[0].cols()];
    for (n, &p) in key.iter().enumerate() {
        if p != 0 {
            field.axpy(&mut acc, p, &sub[n].left_mul_vec(coeffs)?);
        }
    }
    Ok(acc)
}

/// Query vectors `q_k = p_k + e_{d_k}` for the active users.
pub(crate) fn queries(
    field: Field,
    secrets: &[UserSecret],
    demand: &DemandVector,
    n_files: usize,
) -> Result<Vec<Vec<u32>>, SchemeError> {
    demand
        .active
        .iter()
        .zip(&demand.demands)
        .map(|(&u, &d)| {
            let mut q = key_of(&secrets[u], field, n_files)?.to_vec();
            q[d] = field.add(q[d], 1);
            Ok(q)
        })
        .collect()
}

/// Uncoded placement plus one key per uncached subfile index. Delivery
/// multicasts query-vector combinations instead of demanded subfiles.
pub struct PkPlus {
    params: SystemParams,
    field: Field,
    l: usize,
}

impl PkPlus {
    pub fn new(params: &SystemParams) -> Result<Self, SchemeError> {
        params.validate()?;
        if params.t > params.k_total {
            return Err(SchemeError::Unsupported {
                scheme: "pk_plus".into(),
                reason: format!("t={} > K={}", params.t, params.k_total),
            });
        }
        let l = check_subpacketization("pk_plus", binom(params.k_total, params.t))?;
        let field = resolve_field("pk_plus", params, 2)?;
        let mut params = params.clone();
        params.q = field.modulus();
        Ok(PkPlus { params, field, l })
    }
}

impl Scheme for PkPlus {
    fn name(&self) -> String {
        format!("pk_plus(t={})", self.params.t)
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
        formulas::pk_plus_point(&self.params, self.params.t)
    }
    fn secret_space(&self) -> SecretSpace {
        SecretSpace::Keys
    }
    fn is_private(&self) -> bool {
        true
    }

    fn place(&self, library: &FileLibrary, secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let (k, t, n_files) = (self.params.k_total, self.params.t, self.params.n_files);
        let sub = split_library(library, self.l)?;
        let mut caches = Vec::with_capacity(k);
        for u in 0..k {
            let key = key_of(&secrets[u], self.field, n_files)?;
            let mut c = UserCache::new(secrets[u].clone());
            for (row, set) in Combinations::new(k, t).enumerate() {
                if set.contains(&u) {
                    for (n, f) in sub.iter().enumerate() {
                        c.push(Label::Piece { file: n, row }, f.row(row).to_vec());
                    }
                } else {
                    let mut acc = vec![0; self.params.b_factor];
                    for (n, &p) in key.iter().enumerate() {
                        self.field.axpy(&mut acc, p, sub[n].row(row));
                    }
                    c.push(Label::Key { row }, acc);
                }
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
        let q = queries(self.field, secrets, demand, n_files)?;
        // Offline users repeat the first active user's query.
        let rows = (0..k)
            .map(|u| {
                let i = demand.active.iter().position(|&a| a == u).unwrap_or(0);
                q[i].clone()
            })
            .collect();
        let mc = Multicast::new(self.field, n_files, (0..k).collect(), t, rows, &demand.active);
        let payload = mc.encode(self.params.b_factor, |n, set| Ok(sub[n].row(subset_rank(set, k)).to_vec()))?;
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
        let k = self.params.k_total;
        let f = self.field;
        let info = transcript
            .side_info
            .multicast
            .as_ref()
            .ok_or_else(|| SchemeError::decode(user, "no multicast side information"))?;
        let mc = Multicast::from_info(f, self.params.n_files, info);
        let known = |n: usize, set: &[usize]| {
            cache
                .get(&Label::Piece {
                    file: n,
                    row: subset_rank(set, k),
                })
                .map(|d| d.to_vec())
                .ok_or_else(|| SchemeError::decode(user, format!("piece ({n}, {set:?}) not cached")))
        };
        let mut parts: Vec<Option<Vec<u32>>> = vec![None; self.l];
        for (row, set) in Combinations::new(k, self.params.t).enumerate() {
            if set.contains(&user) {
                parts[row] = Some(known(demand, &set)?);
            }
        }
        for (s, x) in mc.messages_for(user, &transcript.payload, self.params.b_factor)? {
            let rest: Vec<usize> = s.iter().copied().filter(|&u| u != user).collect();
            let row = subset_rank(&rest, k);
            let mut v = mc.strip(user, &s, &x, known)?;
            let key = cache
                .get(&Label::Key { row })
                .ok_or_else(|| SchemeError::decode(user, format!("key for row {row} missing")))?;
            f.axpy(&mut v, f.neg(1), key);
            parts[row] = Some(v);
        }
        let mut out = Vec::with_capacity(self.file_len());
        for (i, p) in parts.into_iter().enumerate() {
            out.extend(p.ok_or_else(|| SchemeError::decode(user, format!("subfile {i} not recovered")))?);
        }
        Ok(out)
    }
}

use crate::bounds::formulas;
use crate::gf::Field;
use crate::model::{
    binom, subset_rank, unit, Combinations, DeliveryTranscript, DemandVector, FileLibrary, Label, Placement,
    SideInfo, SystemParams, TradeoffPoint, UserCache, UserSecret,
};
use crate::schemes::multicast::Multicast;
use crate::schemes::{check_library, check_subpacketization, resolve_field, split_library, Scheme, SchemeError};

/// Uncoded placement over all K users; offline users are handed the first
/// active user's demand so the classical delivery applies unchanged.
pub struct YmaPlus {
    params: SystemParams,
    field: Field,
    l: usize,
}

impl YmaPlus {
    pub fn new(params: &SystemParams) -> Result<Self, SchemeError> {
        params.validate()?;
        if params.t > params.k_total {
            return Err(SchemeError::Unsupported {
                scheme: "yma_plus".into(),
                reason: format!("t={} > K={}", params.t, params.k_total),
            });
        }
        let l = check_subpacketization("yma_plus", binom(params.k_total, params.t))?;
        let field = resolve_field("yma_plus", params, 2)?;
        let mut params = params.clone();
        params.q = field.modulus();
        Ok(YmaPlus { params, field, l })
    }
}

impl Scheme for YmaPlus {
    fn name(&self) -> String {
        format!("yma_plus(t={})", self.params.t)
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
        formulas::yma_plus_point(&self.params, self.params.t)
    }

    fn place(&self, library: &FileLibrary, _secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let (k, t) = (self.params.k_total, self.params.t);
        let sub = split_library(library, self.l)?;
        let mut caches: Vec<UserCache> = (0..k).map(|_| UserCache::new(UserSecret::None)).collect();
        for (row, set) in Combinations::new(k, t).enumerate() {
            for &u in &set {
                for (n, f) in sub.iter().enumerate() {
                    caches[u].push(Label::Piece { file: n, row }, f.row(row).to_vec());
                }
            }
        }
        Ok(Placement {
            caches,
            server_secrets: vec![UserSecret::None; k],
        })
    }

    fn deliver(
        &self,
        _secrets: &[UserSecret],
        library: &FileLibrary,
        demand: &DemandVector,
    ) -> Result<DeliveryTranscript, SchemeError> {
        check_library(self, library)?;
        let (k, n_files, t) = (self.params.k_total, self.params.n_files, self.params.t);
        let sub = split_library(library, self.l)?;
        let first = demand.demands[0];
        let rows = (0..k)
            .map(|u| unit(n_files, demand.demand_of(u).unwrap_or(first)))
            .collect();
        let mc = Multicast::new(self.field, n_files, (0..k).collect(), t, rows, &demand.active);
        let payload = mc.encode(self.params.b_factor, |n, set| Ok(sub[n].row(subset_rank(set, k)).to_vec()))?;
        Ok(DeliveryTranscript {
            payload,
            side_info: SideInfo {
                active: demand.active.clone(),
                demands: Some(demand.demands.clone()),
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
        let info = transcript
            .side_info
            .multicast
            .as_ref()
            .ok_or_else(|| SchemeError::decode(user, "no multicast side information"))?;
        let mc = Multicast::from_info(self.field, self.params.n_files, info);
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
            parts[subset_rank(&rest, k)] = Some(mc.strip(user, &s, &x, known)?);
        }
        let mut out = Vec::with_capacity(self.file_len());
        for (i, p) in parts.into_iter().enumerate() {
            let p = p.ok_or_else(|| SchemeError::decode(user, format!("subfile {i} not recovered")))?;
            out.extend(p);
        }
        Ok(out)
    }
}

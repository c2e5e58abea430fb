use crate::bounds::formulas;
use crate::gf::{Field, FieldMatrix};
use crate::mds::{vandermonde, MdsSpec};
use crate::model::{
    binom, subset_rank, subsets, unit, Combinations, DeliveryTranscript, DemandVector, FileLibrary, Label, Placement,
    SideInfo, SystemParams, TradeoffPoint, UserCache, UserSecret,
};
use crate::schemes::multicast::Multicast;
use crate::schemes::{
    check_library, check_subpacketization, resolve_field, solve_subfiles, split_library, MdsRequirement, Scheme,
    SchemeError,
};

/// Each file is split into `C(K', t)` pieces and MDS-expanded to `C(K, t)`
/// coded pieces, one per `t`-subset of all users. Delivery runs the
/// classical multicast among the active users only.
pub struct Ht1 {
    params: SystemParams,
    field: Field,
    l: usize,
    /// `C(K, t) x C(K', t)`; row `i` belongs to the `i`-th `t`-subset.
    g: FieldMatrix,
}

impl Ht1 {
    pub fn new(params: &SystemParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let (kp, k, t) = (params.k_active, params.k_total, params.t);
        if t > kp {
            return Err(SchemeError::Unsupported {
                scheme: "ht1".into(),
                reason: format!("t={t} > K'={kp}"),
            });
        }
        let l = check_subpacketization("ht1", binom(kp, t))?;
        let code_len = check_subpacketization("ht1", binom(k, t))?;
        let field = resolve_field("ht1", params, code_len as u32 + 1)?;
        let g = vandermonde(MdsSpec::new(l, code_len, field.modulus()))?;
        let mut params = params.clone();
        params.q = field.modulus();
        Ok(Ht1 { params, field, l, g })
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.g
    }
}

impl Scheme for Ht1 {
    fn name(&self) -> String {
        format!("ht1(t={})", self.params.t)
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
        formulas::ht1_point(&self.params, self.params.t)
    }
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        vec![MdsRequirement {
            label: "ht1 generator".into(),
            matrix: self.g.clone(),
            k: self.l,
        }]
    }

    fn place(&self, library: &FileLibrary, _secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let (k, t) = (self.params.k_total, self.params.t);
        let coded: Vec<FieldMatrix> = split_library(library, self.l)?
            .iter()
            .map(|f| self.g.mul(f))
            .collect::<Result<_, _>>()?;
        let mut caches: Vec<UserCache> = (0..k).map(|_| UserCache::new(UserSecret::None)).collect();
        for (row, set) in Combinations::new(k, t).enumerate() {
            for &u in &set {
                for (n, c) in coded.iter().enumerate() {
                    caches[u].push(Label::Piece { file: n, row }, c.row(row).to_vec());
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
        let rows = demand.demands.iter().map(|&d| unit(n_files, d)).collect();
        let mc = Multicast::new(self.field, n_files, demand.active.clone(), t, rows, &demand.active);
        let payload = mc.encode(self.params.b_factor, |n, set| {
            let g = self.g.row(subset_rank(set, k));
            Ok(sub[n].left_mul_vec(g)?)
        })?;
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
                .ok_or_else(|| SchemeError::decode(user, format!("coded piece ({n}, {set:?}) not cached")))
        };
        let mut rows = Vec::with_capacity(self.l);
        let mut values = Vec::with_capacity(self.l);
        for set in subsets(&info.users, self.params.t) {
            if set.contains(&user) {
                values.push(known(demand, &set)?);
                rows.push(self.g.row(subset_rank(&set, k)).to_vec());
            }
        }
        for (s, x) in mc.messages_for(user, &transcript.payload, self.params.b_factor)? {
            let rest: Vec<usize> = s.iter().copied().filter(|&u| u != user).collect();
            values.push(mc.strip(user, &s, &x, known)?);
            rows.push(self.g.row(subset_rank(&rest, k)).to_vec());
        }
        solve_subfiles(user, self.field, rows, values)
    }
}

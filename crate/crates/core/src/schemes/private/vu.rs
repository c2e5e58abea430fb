use crate::gf::Field;
use crate::model::{
    DeliveryTranscript, DemandVector, FileLibrary, Placement, SideInfo, SystemParams, TradeoffPoint, UserCache,
    UserSecret,
};
use crate::schemes::{build_scheme, check_library, offset_of, MdsRequirement, Scheme, SchemeError, SecretSpace};

use super::ht_vu::{expanded_demand, public_offset};

/// Lifts a non-private scheme to a private one: the inner scheme runs with
/// `N` virtual users per real user, each real user caches the content of
/// one secretly chosen virtual slot, and delivery serves a full set of
/// cyclically shifted demands per active user.
pub struct VuWrap {
    params: SystemParams,
    inner: Box<dyn Scheme>,
    padded: bool,
}

impl VuWrap {
    /// `padded = false` pins every secret to zero, which leaks demands. It
    /// exists to exercise the privacy checker.
    pub fn new(inner_name: &str, params: &SystemParams, padded: bool) -> Result<Self, SchemeError> {
        params.validate()?;
        let n = params.n_files;
        let inner_params = SystemParams {
            k_active: params.k_active * n,
            k_total: params.k_total * n,
            ..params.clone()
        };
        let inner = build_scheme(inner_name, &inner_params)?;
        if inner.is_private() {
            return Err(SchemeError::Unsupported {
                scheme: format!("vu({inner_name})"),
                reason: "inner scheme must be non-private".into(),
            });
        }
        let mut params = params.clone();
        params.q = inner.field().modulus();
        params.t = inner.params().t;
        Ok(VuWrap { params, inner, padded })
    }

    pub fn inner(&self) -> &dyn Scheme {
        self.inner.as_ref()
    }
}

impl Scheme for VuWrap {
    fn name(&self) -> String {
        let base = format!("vu({})", self.inner.name());
        if self.padded {
            base
        } else {
            format!("{base}[no pad]")
        }
    }
    fn params(&self) -> &SystemParams {
        &self.params
    }
    fn field(&self) -> Field {
        self.inner.field()
    }
    fn subpacketization(&self) -> usize {
        self.inner.subpacketization()
    }
    fn declared(&self) -> TradeoffPoint {
        self.inner.declared()
    }
    fn secret_space(&self) -> SecretSpace {
        if self.padded {
            SecretSpace::Offsets
        } else {
            SecretSpace::PinnedOffset
        }
    }
    fn is_private(&self) -> bool {
        self.padded
    }
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        self.inner.mds_requirements()
    }

    fn place(&self, library: &FileLibrary, secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let n = self.params.n_files;
        let virt = vec![UserSecret::None; self.params.k_total * n];
        let inner = self.inner.place(library, &virt)?;
        let caches = secrets
            .iter()
            .take(self.params.k_total)
            .enumerate()
            .map(|(u, s)| {
                let slot = offset_of(s, n)?;
                Ok(UserCache {
                    segments: inner.caches[u * n + slot].segments.clone(),
                    secret: s.clone(),
                })
            })
            .collect::<Result<_, SchemeError>>()?;
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
        let n = self.params.n_files;
        let mut offsets = Vec::with_capacity(demand.active.len());
        let mut active = Vec::new();
        let mut demands = Vec::new();
        for (&u, &d) in demand.active.iter().zip(&demand.demands) {
            let off = public_offset(offset_of(&secrets[u], n)?, d, n);
            offsets.push(off);
            for slot in 0..n {
                active.push(u * n + slot);
                demands.push(expanded_demand(slot, off, n));
            }
        }
        let inner_demand = DemandVector::new(active, demands, self.inner.params())?;
        let virt = vec![UserSecret::None; self.params.k_total * n];
        let inner = self.inner.deliver(&virt, library, &inner_demand)?;
        Ok(DeliveryTranscript {
            payload: inner.payload,
            side_info: SideInfo {
                active: demand.active.clone(),
                offsets: Some(offsets),
                inner: Some(Box::new(inner.side_info)),
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
        let n = self.params.n_files;
        let slot = offset_of(&cache.secret, n)?;
        let inner_si = transcript
            .side_info
            .inner
            .as_ref()
            .ok_or_else(|| SchemeError::decode(user, "no inner side information"))?;
        let inner_cache = UserCache {
            segments: cache.segments.clone(),
            secret: UserSecret::None,
        };
        let inner_tr = DeliveryTranscript {
            payload: transcript.payload.clone(),
            side_info: (**inner_si).clone(),
        };
        self.inner.decode(user * n + slot, &inner_cache, &inner_tr, demand)
    }

    fn omission_sound(&self, transcript: &DeliveryTranscript) -> bool {
        match &transcript.side_info.inner {
            Some(si) => self.inner.omission_sound(&DeliveryTranscript {
                payload: Vec::new(),
                side_info: (**si).clone(),
            }),
            None => true,
        }
    }
}

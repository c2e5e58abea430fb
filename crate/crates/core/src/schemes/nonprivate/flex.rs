use std::collections::HashMap;
use std::sync::RwLock;

use crate::bounds::formulas;
use crate::gf::{Field, FieldMatrix};
use crate::mds::{vandermonde, MdsSpec};
use crate::model::{
    binom, unit, DeliveryTranscript, DemandVector, FileLibrary, Label, Placement, SideInfo, SystemParams,
    TradeoffPoint, UserCache, UserSecret,
};
use crate::schemes::multicast::Multicast;
use crate::schemes::{
    check_library, check_subpacketization, resolve_field, solve_subfiles, split_library, MdsRequirement, Scheme,
    SchemeError,
};

/// Largest `L` with `L < C(K'-1, t-1) * t / (t-1)`, for `2 <= t`.
pub fn flex_default_l(k_active: usize, t: usize) -> usize {
    let c = binom(k_active - 1, t - 1);
    // L (t-1) < c t
    let bound = c * t as u128;
    let l = (bound - 1) / (t as u128 - 1);
    l as usize
}

/// Flexible-memory scheme: user `k` stores `E_k F_n` for a `c x L` block
/// `E_k` of one big MDS code, with `c = C(K'-1, t-1)`. Messages carry
/// projections `p_T F_n` onto vectors `p_T` lying in every `span(E_k)`,
/// `k in T`. With `t = K'-1` and `L = K'` this is the HT3 point.
pub struct Flex {
    params: SystemParams,
    field: Field,
    l: usize,
    c: usize,
    /// `K c x L`, user `k` owns rows `k c .. (k+1) c`.
    e: FieldMatrix,
    /// Right-nullspace basis of each user's block, stacked as rows.
    nulls: Vec<FieldMatrix>,
    ht3: bool,
    /// Decoding vectors by user set, shared across deliveries.
    memo: RwLock<HashMap<Vec<usize>, Vec<u32>>>,
    /// Block coefficients by `(user, set)`.
    coeff_memo: RwLock<HashMap<(usize, Vec<usize>), Vec<u32>>>,
}

impl Flex {
    /// `l = None` picks the largest admissible subpacketization.
    pub fn new(params: &SystemParams, l: Option<usize>) -> Result<Self, SchemeError> {
        params.validate()?;
        let (kp, k, t) = (params.k_active, params.k_total, params.t);
        if kp < 3 || t < 2 || t >= kp {
            return Err(SchemeError::Unsupported {
                scheme: "flex".into(),
                reason: format!("needs 2 <= t <= K'-1, got t={t} K'={kp}"),
            });
        }
        let c = check_subpacketization("flex", binom(kp - 1, t - 1))?;
        let max_l = flex_default_l(kp, t);
        let l = l.unwrap_or(max_l);
        if l == 0 || l > max_l {
            return Err(SchemeError::SubpacketizationTooLarge(format!(
                "flex needs 1 <= L <= {max_l}, got {l}"
            )));
        }
        let l = check_subpacketization("flex", l as u128)?;
        let code_len = k * c;
        let field = resolve_field("flex", params, code_len.max(l) as u32 + 1)?;
        let e = vandermonde(MdsSpec::new(l, code_len.max(l), field.modulus()))?;
        let e = e.select_rows(&(0..code_len).collect::<Vec<_>>());
        let nulls = (0..k)
            .map(|u| {
                let block = e.select_rows(&(u * c..(u + 1) * c).collect::<Vec<_>>());
                let ns = block.nullspace();
                if ns.is_empty() {
                    FieldMatrix::zeros(field, 0, l)
                } else {
                    FieldMatrix::from_rows(field, &ns).unwrap()
                }
            })
            .collect();
        let mut params = params.clone();
        params.q = field.modulus();
        Ok(Flex {
            params,
            field,
            l,
            c,
            e,
            nulls,
            ht3: t == kp - 1 && l == kp,
            memo: RwLock::new(HashMap::new()),
            coeff_memo: RwLock::new(HashMap::new()),
        })
    }

    /// The `t = K'-1`, `L = K'` instance.
    pub fn ht3(params: &SystemParams) -> Result<Self, SchemeError> {
        if params.k_active < 3 {
            return Err(SchemeError::Unsupported {
                scheme: "ht3".into(),
                reason: format!("needs K' >= 3, got {}", params.k_active),
            });
        }
        let p = params.clone().with_t(params.k_active - 1);
        Self::new(&p, Some(params.k_active))
    }

    pub fn block_rows(&self, user: usize) -> std::ops::Range<usize> {
        user * self.c..(user + 1) * self.c
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.e
    }

    /// First basis vector of `cap_{k in T} span(E_k)`: the vectors
    /// orthogonal to every user's block nullspace.
    pub fn decoding_vector(&self, set: &[usize]) -> Result<Vec<u32>, SchemeError> {
        if let Some(v) = self.memo.read().unwrap().get(set) {
            return Ok(v.clone());
        }
        let v = self.compute_decoding_vector(set)?;
        self.memo.write().unwrap().insert(set.to_vec(), v.clone());
        Ok(v)
    }

    fn compute_decoding_vector(&self, set: &[usize]) -> Result<Vec<u32>, SchemeError> {
        let parts: Vec<&FieldMatrix> = set.iter().map(|&u| &self.nulls[u]).filter(|m| m.rows() > 0).collect();
        if parts.is_empty() {
            return Ok(unit(self.l, 0));
        }
        let stacked = FieldMatrix::vstack(&parts)?;
        stacked
            .nullspace()
            .into_iter()
            .next()
            .ok_or_else(|| SchemeError::DecodingVectorNotFound(format!("span intersection over {set:?} is trivial")))
    }

    /// Coefficients `lambda` with `lambda^T E_user = p_set`.
    fn block_coefficients(&self, user: usize, set: &[usize]) -> Result<Vec<u32>, SchemeError> {
        let key = (user, set.to_vec());
        if let Some(v) = self.coeff_memo.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.in_block(user, &self.decoding_vector(set)?)?;
        self.coeff_memo.write().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn in_block(&self, user: usize, v: &[u32]) -> Result<Vec<u32>, SchemeError> {
        let block = self.e.select_rows(&self.block_rows(user).collect::<Vec<_>>());
        block
            .transpose()
            .solve_vec(v)?
            .ok_or_else(|| SchemeError::decode(user, "decoding vector outside own span"))
    }
}

impl Scheme for Flex {
    fn name(&self) -> String {
        if self.ht3 {
            "ht3".into()
        } else {
            format!("flex(t={},L={})", self.params.t, self.l)
        }
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
        formulas::flex_point(&self.params, self.params.t, self.l)
    }
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        vec![MdsRequirement {
            label: format!("{} stacked blocks", self.name()),
            matrix: self.e.clone(),
            k: self.l.min(self.e.rows()),
        }]
    }

    fn place(&self, library: &FileLibrary, _secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let coded: Vec<FieldMatrix> = split_library(library, self.l)?
            .iter()
            .map(|f| self.e.mul(f))
            .collect::<Result<_, _>>()?;
        let caches = (0..self.params.k_total)
            .map(|u| {
                let mut c = UserCache::new(UserSecret::None);
                for row in self.block_rows(u) {
                    for (n, m) in coded.iter().enumerate() {
                        c.push(Label::Piece { file: n, row }, m.row(row).to_vec());
                    }
                }
                c
            })
            .collect();
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
        let n_files = self.params.n_files;
        let sub = split_library(library, self.l)?;
        let rows = demand.demands.iter().map(|&d| unit(n_files, d)).collect();
        let mc = Multicast::new(self.field, n_files, demand.active.clone(), self.params.t, rows, &demand.active);
        let payload = mc.encode(self.params.b_factor, |n, set| {
            Ok(sub[n].left_mul_vec(&self.decoding_vector(set)?)?)
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
        let f = self.field;
        let info = transcript
            .side_info
            .multicast
            .as_ref()
            .ok_or_else(|| SchemeError::decode(user, "no multicast side information"))?;
        let mc = Multicast::from_info(f, self.params.n_files, info);
        let own_rows: Vec<usize> = self.block_rows(user).collect();
        let cached = |n: usize| -> Result<Vec<Vec<u32>>, SchemeError> {
            own_rows
                .iter()
                .map(|&row| {
                    cache
                        .get(&Label::Piece { file: n, row })
                        .map(|d| d.to_vec())
                        .ok_or_else(|| SchemeError::decode(user, format!("piece ({n}, {row}) not cached")))
                })
                .collect()
        };
        let known = |n: usize, set: &[usize]| -> Result<Vec<u32>, SchemeError> {
            let lambda = self.block_coefficients(user, set)?;
            let pieces = cached(n)?;
            let mut acc = vec![0; self.params.b_factor];
            for (c, piece) in lambda.iter().zip(&pieces) {
                f.axpy(&mut acc, *c, piece);
            }
            Ok(acc)
        };
        let mut rows: Vec<Vec<u32>> = own_rows.iter().map(|&r| self.e.row(r).to_vec()).collect();
        let mut values = cached(demand)?;
        for (s, x) in mc.messages_for(user, &transcript.payload, self.params.b_factor)? {
            let rest: Vec<usize> = s.iter().copied().filter(|&u| u != user).collect();
            values.push(mc.strip(user, &s, &x, known)?);
            rows.push(self.decoding_vector(&rest)?);
        }
        solve_subfiles(user, f, rows, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_subpacketization() {
        assert_eq!(flex_default_l(3, 2), 3);
        assert_eq!(flex_default_l(4, 2), 5);
        assert_eq!(flex_default_l(4, 3), 4);
        assert_eq!(flex_default_l(5, 4), 5);
    }
}

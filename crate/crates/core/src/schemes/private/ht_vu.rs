use crate::bounds::formulas;
use crate::gf::{Field, FieldMatrix};
use crate::mds::{vandermonde, MdsSpec};
use crate::model::{
    DeliveryTranscript, DemandVector, FileLibrary, Label, Placement, SideInfo, SystemParams, TradeoffPoint, UserCache,
    UserSecret,
};
use crate::schemes::{
    check_library, check_subpacketization, offset_of, resolve_field, solve_subfiles, split_library, MdsRequirement,
    Scheme, SchemeError, SecretSpace,
};

/// Demand of slot `slot` of a real user whose public offset is `offset`:
/// the cyclic shift of `(0, .., N-1)` by `offset`.
pub fn expanded_demand(slot: usize, offset: usize, n_files: usize) -> usize {
    (slot + n_files - offset % n_files) % n_files
}

/// Offset `(tau - d) mod N` published for a user with secret `tau`.
pub fn public_offset(tau: usize, demand: usize, n_files: usize) -> usize {
    (tau + n_files - demand) % n_files
}

/// Direct private construction with `K'(N-1)+1` subfiles: every real user
/// owns `N` virtual slots and caches one coded piece of the file sum at the
/// slot picked by its secret.
pub struct HtVu {
    params: SystemParams,
    field: Field,
    l: usize,
    /// `K N x L`, row `u N + s` is slot `s` of user `u`.
    g: FieldMatrix,
}

impl HtVu {
    pub fn new(params: &SystemParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let (kp, k, n) = (params.k_active, params.k_total, params.n_files);
        if n < 2 {
            return Err(SchemeError::Unsupported {
                scheme: "ht_vu".into(),
                reason: "a single file has no demand to hide".into(),
            });
        }
        let l = check_subpacketization("ht_vu", (kp * (n - 1) + 1) as u128)?;
        let field = resolve_field("ht_vu", params, (k * n) as u32 + 1)?;
        let g = vandermonde(MdsSpec::new(l, k * n, field.modulus()))?;
        let mut params = params.clone();
        params.q = field.modulus();
        Ok(HtVu { params, field, l, g })
    }
}

impl Scheme for HtVu {
    fn name(&self) -> String {
        "ht_vu".into()
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
        formulas::ht_vu_point(&self.params).expect("N >= 2 checked at construction")
    }
    fn secret_space(&self) -> SecretSpace {
        SecretSpace::Offsets
    }
    fn is_private(&self) -> bool {
        true
    }
    fn mds_requirements(&self) -> Vec<MdsRequirement> {
        vec![MdsRequirement {
            label: "ht_vu generator".into(),
            matrix: self.g.clone(),
            k: self.l,
        }]
    }

    fn place(&self, library: &FileLibrary, secrets: &[UserSecret]) -> Result<Placement, SchemeError> {
        check_library(self, library)?;
        let f = self.field;
        let n_files = self.params.n_files;
        let sub = split_library(library, self.l)?;
        let mut caches = Vec::with_capacity(self.params.k_total);
        for (u, secret) in secrets.iter().enumerate().take(self.params.k_total) {
            let slot = offset_of(secret, n_files)?;
            let row = u * n_files + slot;
            let mut acc = vec![0; self.params.b_factor];
            for m in &sub {
                f.axpy(&mut acc, 1, &m.left_mul_vec(self.g.row(row))?);
            }
            let mut c = UserCache::new(secret.clone());
            c.push(Label::SumPiece { row }, acc);
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
        let n_files = self.params.n_files;
        let sub = split_library(library, self.l)?;
        let mut offsets = Vec::with_capacity(demand.active.len());
        let mut payload = Vec::new();
        for (&u, &d) in demand.active.iter().zip(&demand.demands) {
            let off = public_offset(offset_of(&secrets[u], n_files)?, d, n_files);
            offsets.push(off);
            for slot in 0..n_files {
                let row = u * n_files + slot;
                let skip = expanded_demand(slot, off, n_files);
                for (n, m) in sub.iter().enumerate() {
                    if n != skip {
                        payload.push((Label::Piece { file: n, row }, m.left_mul_vec(self.g.row(row))?));
                    }
                }
            }
        }
        Ok(DeliveryTranscript {
            payload,
            side_info: SideInfo {
                active: demand.active.clone(),
                offsets: Some(offsets),
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
        let slot = offset_of(&cache.secret, n_files)?;
        let own_row = user * n_files + slot;
        let mut own = cache
            .get(&Label::SumPiece { row: own_row })
            .ok_or_else(|| SchemeError::decode(user, "cached sum missing"))?
            .to_vec();
        for n in (0..n_files).filter(|&n| n != demand) {
            let x = transcript
                .get(&Label::Piece { file: n, row: own_row })
                .ok_or_else(|| SchemeError::decode(user, format!("piece ({n}, {own_row}) not sent")))?;
            f.axpy(&mut own, f.neg(1), x);
        }
        let mut rows = vec![self.g.row(own_row).to_vec()];
        let mut values = vec![own];
        for (label, x) in &transcript.payload {
            if let Label::Piece { file, row } = label {
                if *file == demand {
                    if *row == own_row {
                        return Err(SchemeError::decode(user, "own slot unexpectedly sent"));
                    }
                    rows.push(self.g.row(*row).to_vec());
                    values.push(x.clone());
                }
            }
        }
        if rows.len() != self.l {
            return Err(SchemeError::decode(
                user,
                format!("collected {} coded pieces, expected {}", rows.len(), self.l),
            ));
        }
        solve_subfiles(user, f, rows, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_hits_the_demand_at_the_secret_slot() {
        for n in 1..6 {
            for tau in 0..n {
                for d in 0..n {
                    let off = public_offset(tau, d, n);
                    assert_eq!(expanded_demand(tau, off, n), d);
                    let block: Vec<usize> = (0..n).map(|s| expanded_demand(s, off, n)).collect();
                    let mut sorted = block.clone();
                    sorted.sort();
                    assert_eq!(sorted, (0..n).collect::<Vec<_>>());
                }
            }
        }
        // zero offset gives the identity block
        assert_eq!((0..3).map(|s| expanded_demand(s, 0, 3)).collect::<Vec<_>>(), vec![0, 1, 2]);
    }
}

use std::collections::HashMap;

use serde::Serialize;

use super::StabError;
use crate::crystal::{CrystalSlice, PathCrystal, DEFAULT_LIMIT};
use crate::lattice::{depth_profile, weight_pairing, ElasticSubgraph, Gcm, PairingVector, RootVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionTerm {
    /// Offset `z` on `X_0`, in the order of `X_0`'s vertices.
    pub z: Vec<i64>,
    /// `b^w_{v - z}` on `X`.
    pub branching: u64,
    /// Highest weight of the `X_0` factor, as pairings on `X_0`.
    pub local_weight: PairingVector,
    /// Weight multiplicity of `z` in that `X_0` module.
    pub local: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
    /// Candidates `z ≤ v` on `X_0` that were examined.
    pub candidates: usize,
    /// Terms with nonzero branching multiplicity.
    pub terms: Vec<DecompositionTerm>,
}

/// Compares the weight multiplicity `w^w_v(X)` with its expansion over
/// `X_0`-isotypic components, `Σ_z b^w_{v-z} · w^{v_0+z}_{v_0}(X_0)`, both
/// sides by crystal counting.
pub fn check_weight_decomposition(gcm: &Gcm, x0: &ElasticSubgraph, w: &PairingVector, v: &RootVector) -> Result<DecompositionReport, StabError> {
    let full = PathCrystal::new(gcm, w)?.generate(Some(v), DEFAULT_LIMIT)?;
    let lhs = full.weight_multiplicity(v)?;
    let verts = x0.vertices();
    let branching = full.branching_table(verts);
    let sub = gcm.restrict(verts);
    let local_bound = v.restrict(verts);
    let mut local_slices: HashMap<PairingVector, CrystalSlice> = HashMap::new();

    let zs = local_bound.box_below();
    let mut terms = Vec::new();
    for z in &zs {
        let mut off = v.coeffs().to_vec();
        for (k, &i) in verts.iter().enumerate() {
            off[i] -= z[k];
        }
        let off = RootVector::new(off).expect("z is below v on X_0");
        let Some(&b) = branching.get(&off) else { continue };
        let local_weight = weight_pairing(w, &off, gcm).restrict(verts);
        let local = if verts.is_empty() {
            1
        } else {
            if !local_slices.contains_key(&local_weight) {
                let s = PathCrystal::new(&sub, &local_weight)?.generate(Some(&local_bound), DEFAULT_LIMIT)?;
                local_slices.insert(local_weight.clone(), s);
            }
            local_slices[&local_weight].weight_multiplicity(z)?
        };
        terms.push(DecompositionTerm { z: z.coeffs().to_vec(), branching: b, local_weight, local });
    }
    let rhs = terms.iter().map(|t| t.branching * t.local).sum();
    Ok(DecompositionReport { lhs, rhs, holds: lhs == rhs, candidates: zs.len(), terms })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub s: usize,
    /// Vectors `v ≤ v_scan` with `v ≤ s` on `X_0`.
    pub scanned: usize,
    pub nonzero: usize,
    /// Scanned vectors that are not deep for `X_0^{s+1}`.
    pub non_deep: usize,
    /// Non-deep vectors with nonzero branching multiplicity.
    pub violations: Vec<RootVector>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Scans every `v ≤ v_scan` bounded by `s` on `X_0` and records those with
/// `b^w_v ≠ 0` that fail to be deep for `X_0^{s+1}`.
pub fn check_depth_vanishing(gcm: &Gcm, x0: &ElasticSubgraph, w: &PairingVector, s: usize, v_scan: &RootVector) -> Result<VanishingReport, StabError> {
    let slice = PathCrystal::new(gcm, w)?.generate(Some(v_scan), DEFAULT_LIMIT)?;
    let table = slice.branching_table(x0.vertices());
    let inner = x0.interior(gcm, s + 1);
    let mut report = VanishingReport { s, scanned: 0, nonzero: 0, non_deep: 0, violations: Vec::new() };
    for v in v_scan.box_below() {
        if x0.vertices().iter().any(|&i| v[i] > s as i64) {
            continue;
        }
        report.scanned += 1;
        let nonzero = table.get(&v).is_some_and(|&b| b > 0);
        let deep = depth_profile(&v, gcm, &inner).deep;
        report.nonzero += nonzero as usize;
        report.non_deep += !deep as usize;
        if nonzero && !deep {
            report.violations.push(v);
        }
    }
    Ok(report)
}

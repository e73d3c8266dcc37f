use serde::Serialize;

use super::{depth_profile, ElasticSubgraph, Gcm, LatticeError, PairingVector, RootVector};

/// The diagram `X(m)` obtained by lengthening every elastic component `i` by
/// `m_i` vertices, together with the identification of the exterior.
///
/// Component `c_1..c_l` becomes `c'_1..c'_{l+m}`; the exterior attachments of
/// `c_1` move to `c'_1` and those of `c_l` to `c'_{l+m}`. A single-vertex
/// component sends its first exterior neighbor to `c'_1` and its second to
/// the far end.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionMap {
    pub source: Gcm,
    pub source_x0: ElasticSubgraph,
    pub target: Gcm,
    pub target_x0: ElasticSubgraph,
    pub m: Vec<usize>,
    /// `vertex_map[i]` is the image of source vertex `i` outside `X_0`.
    pub vertex_map: Vec<Option<usize>>,
    /// Expanded paths, aligned with `source_x0.components()`.
    pub target_components: Vec<Vec<usize>>,
}

pub fn expand(gcm: &Gcm, x0: &ElasticSubgraph, m: &[usize]) -> Result<ExpansionMap, LatticeError> {
    let comps = x0.components();
    if m.len() != comps.len() {
        return Err(LatticeError::ExpansionArity { expected: comps.len(), found: m.len() });
    }
    let n = gcm.rank();

    // new vertex order: each component's run sits where its first listed vertex was
    enum Slot {
        Old(usize),
        New(usize, usize),
    }
    let mut slots = Vec::new();
    for i in 0..n {
        match x0.component_of(i) {
            None => slots.push(Slot::Old(i)),
            Some((c, _)) => {
                let first_listed = *comps[c].iter().min().unwrap();
                if first_listed == i {
                    for k in 0..comps[c].len() + m[c] {
                        slots.push(Slot::New(c, k));
                    }
                }
            }
        }
    }
    let total = slots.len();
    let mut vertex_map = vec![None; n];
    let mut run_start = vec![0usize; comps.len()];
    for (pos, slot) in slots.iter().enumerate() {
        match *slot {
            Slot::Old(i) => vertex_map[i] = Some(pos),
            Slot::New(c, 0) => run_start[c] = pos,
            Slot::New(..) => {}
        }
    }

    let mut labels: Vec<String> = Vec::with_capacity(total);
    for slot in &slots {
        match *slot {
            Slot::Old(i) => labels.push(gcm.label(i).to_string()),
            Slot::New(c, k) => {
                let base = gcm.label(comps[c][0]);
                let mut l = format!("{base}.{}", k + 1);
                while gcm.labels().contains(&l) || labels.contains(&l) {
                    l.push('\'');
                }
                labels.push(l);
            }
        }
    }

    let mut mat = vec![vec![0i64; total]; total];
    for (p, row) in mat.iter_mut().enumerate() {
        row[p] = 2;
    }
    // exterior block
    for i in 0..n {
        for j in 0..n {
            if let (Some(a), Some(b)) = (vertex_map[i], vertex_map[j]) {
                if a != b {
                    mat[a][b] = gcm.entry(i, j);
                }
            }
        }
    }
    let join = |mat: &mut Vec<Vec<i64>>, a: usize, b: usize| {
        mat[a][b] = -1;
        mat[b][a] = -1;
    };
    for (c, path) in comps.iter().enumerate() {
        let len = path.len() + m[c];
        let start = run_start[c];
        for k in 0..len - 1 {
            join(&mut mat, start + k, start + k + 1);
        }
        let first_ext: Vec<usize> = gcm.neighbors(path[0]).filter(|&j| !x0.contains(j)).collect();
        let last = *path.last().unwrap();
        if path.len() == 1 {
            if let Some(&j) = first_ext.first() {
                join(&mut mat, start, vertex_map[j].unwrap());
            }
            if let Some(&j) = first_ext.get(1) {
                join(&mut mat, start + len - 1, vertex_map[j].unwrap());
            }
        } else {
            for &j in &first_ext {
                join(&mut mat, start, vertex_map[j].unwrap());
            }
            for j in gcm.neighbors(last).filter(|&j| !x0.contains(j)) {
                join(&mut mat, start + len - 1, vertex_map[j].unwrap());
            }
        }
    }

    let target = Gcm::with_labels(mat, labels)?;
    let target_verts: Vec<usize> = (0..comps.len())
        .flat_map(|c| run_start[c]..run_start[c] + comps[c].len() + m[c])
        .collect();
    let target_x0 = ElasticSubgraph::new(&target, &target_verts)?;
    debug_assert_eq!(target_x0.components().len(), comps.len());
    Ok(ExpansionMap {
        source: gcm.clone(),
        source_x0: x0.clone(),
        target,
        target_x0,
        m: m.to_vec(),
        vertex_map,
        target_components: (0..comps.len())
            .map(|c| (run_start[c]..run_start[c] + comps[c].len() + m[c]).collect())
            .collect(),
    })
}

impl ExpansionMap {
    /// Target path `c'_1..c'_{l+m}` of source component `c`.
    pub fn target_component(&self, c: usize) -> &[usize] {
        &self.target_components[c]
    }
}

/// Transport a weight vanishing on `X_0` to `X(m)`; zero on the expanded strings.
pub fn extend_weight(w: &PairingVector, e: &ExpansionMap) -> Result<PairingVector, LatticeError> {
    if let Some(&i) = e.source_x0.vertices().iter().find(|&&i| w[i] != 0) {
        return Err(LatticeError::NotVanishing(e.source.label(i).to_string()));
    }
    let mut out = vec![0i64; e.target.rank()];
    for (i, img) in e.vertex_map.iter().enumerate() {
        if let Some(p) = img {
            out[*p] = w[i];
        }
    }
    Ok(PairingVector::new(out))
}

/// Extend `v`, deep for `X_0^s`, to `X(m)`: exterior values transported, the
/// per-component depth on every interior and new vertex.
///
/// `s = None` asks for depth on all of `X_0`.
pub fn deep_extension(v: &RootVector, e: &ExpansionMap, s: Option<usize>) -> Result<RootVector, LatticeError> {
    let src = &e.source;
    let x0 = &e.source_x0;
    let interior = match s {
        Some(s) => x0.interior(src, s),
        None => x0.vertices().to_vec(),
    };
    let profile = depth_profile(v, src, &interior);
    if !profile.deep {
        return Err(LatticeError::NotDeep);
    }
    let mut out = vec![0i64; e.target.rank()];
    for (i, img) in e.vertex_map.iter().enumerate() {
        if let Some(p) = img {
            out[*p] = v[i];
        }
    }
    for (c, path) in x0.components().iter().enumerate() {
        let tpath = e.target_component(c);
        let inner: Vec<usize> =
            path.iter().enumerate().filter(|(_, i)| interior.contains(i)).map(|(k, _)| k).collect();
        if inner.is_empty() {
            if e.m[c] > 0 {
                return Err(LatticeError::EmptyInterior(src.label(path[0]).to_string()));
            }
            for (k, &i) in path.iter().enumerate() {
                out[tpath[k]] = v[i];
            }
            continue;
        }
        let lo = inner[0];
        let hi = *inner.last().unwrap();
        let sigma = v[path[lo]];
        for (k, &i) in path.iter().enumerate() {
            if k < lo {
                out[tpath[k]] = v[i];
            } else if k > hi {
                out[tpath[k + e.m[c]]] = v[i];
            }
        }
        for &t in &tpath[lo..=hi + e.m[c]] {
            out[t] = sigma;
        }
    }
    RootVector::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(labels: &[usize]) -> Vec<usize> {
        labels.iter().map(|l| l - 1).collect()
    }

    #[test]
    fn a3_middle_to_a5() {
        let g = Gcm::type_a(3);
        let x0 = ElasticSubgraph::new(&g, &[1]).unwrap();
        let e = expand(&g, &x0, &[2]).unwrap();
        assert_eq!(e.target.matrix(), Gcm::type_a(5).matrix());
        assert_eq!(e.target_x0.vertices(), &[1, 2, 3]);
        assert_eq!(e.vertex_map, vec![Some(0), None, Some(4)]);
    }

    #[test]
    fn zero_expansion_is_identity() {
        for (g, verts) in [(Gcm::type_a(5), idx(&[2, 3, 4])), (Gcm::type_d(5), vec![0, 1]), (Gcm::type_b(4), vec![0, 1])] {
            let x0 = ElasticSubgraph::new(&g, &verts).unwrap();
            let e = expand(&g, &x0, &vec![0; x0.components().len()]).unwrap();
            assert_eq!(e.target.matrix(), g.matrix());
            assert_eq!(e.target.symmetrizer(), g.symmetrizer());
        }
    }

    #[test]
    fn d4_leg_lengthened() {
        // D_4: center index 1, legs 0, 2, 3
        let g = Gcm::type_d(4);
        let x0 = ElasticSubgraph::new(&g, &[3]).unwrap();
        let e = expand(&g, &x0, &[3]).unwrap();
        assert_eq!(e.target.rank(), 7);
        let center = e.vertex_map[1].unwrap();
        assert_eq!(e.target.neighbors(center).count(), 3);
        let leg = e.target_component(0);
        assert_eq!(leg.len(), 4);
        assert_eq!(e.target.entry(center, leg[0]), -1);
        // the long leg makes this D_7
        assert!(crate::oracle::is_finite_type(&e.target));
    }

    #[test]
    fn b_series_grows_at_free_end() {
        let g = Gcm::type_b(3);
        let x0 = ElasticSubgraph::new(&g, &[0]).unwrap();
        let e = expand(&g, &x0, &[2]).unwrap();
        assert_eq!(e.target.rank(), 5);
        assert_eq!(e.target.symmetrizer().iter().filter(|&&d| d == 2).count(), 4);
    }

    #[test]
    fn extend_weight_examples() {
        let g = Gcm::type_a(5);
        let x0 = ElasticSubgraph::new(&g, &idx(&[2, 3, 4])).unwrap();
        let e = expand(&g, &x0, &[2]).unwrap();
        let w = PairingVector::new(vec![1, 0, 0, 0, 2]);
        assert_eq!(extend_weight(&w, &e).unwrap().values(), &[1, 0, 0, 0, 0, 0, 2]);
        assert!(extend_weight(&PairingVector::zero(5), &e).unwrap().is_zero());
        let bad = PairingVector::new(vec![0, 0, 1, 0, 0]);
        assert!(matches!(extend_weight(&bad, &e), Err(LatticeError::NotVanishing(_))));
    }

    #[test]
    fn deep_extension_examples() {
        let g = Gcm::type_a(5);
        let x0 = ElasticSubgraph::new(&g, &idx(&[2, 3, 4])).unwrap();
        let e = expand(&g, &x0, &[2]).unwrap();
        let v = RootVector::new(vec![2, 1, 1, 1, 3]).unwrap();
        assert_eq!(deep_extension(&v, &e, Some(0)).unwrap().coeffs(), &[2, 1, 1, 1, 1, 1, 3]);
        assert!(deep_extension(&RootVector::zero(5), &e, Some(0)).unwrap().is_zero());
        // X_0^0 = {3} here, a single vertex, so this vector is deep at s = 0
        let v = RootVector::new(vec![0, 1, 2, 1, 0]).unwrap();
        assert_eq!(deep_extension(&v, &e, Some(0)).unwrap().coeffs(), &[0, 1, 2, 2, 2, 1, 0]);
        assert!(matches!(deep_extension(&v, &e, None), Err(LatticeError::NotDeep)));

        let g = Gcm::type_a(7);
        let x0 = ElasticSubgraph::new(&g, &idx(&[2, 3, 4, 5, 6])).unwrap();
        let e = expand(&g, &x0, &[1]).unwrap();
        let v = RootVector::new(vec![0, 1, 2, 1, 2, 1, 0]).unwrap();
        assert!(matches!(deep_extension(&v, &e, Some(0)), Err(LatticeError::NotDeep)));
    }
}

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use super::{Gcm, LatticeError, RootVector};

/// A disjoint union of type-A strings inside a diagram, every incident Cartan
/// entry equal to -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ElasticSubgraph {
    rank: usize,
    vertices: Vec<usize>,
    components: Vec<Vec<usize>>,
    border: Vec<Vec<usize>>,
}

impl ElasticSubgraph {
    pub fn new(gcm: &Gcm, verts: &[usize]) -> Result<Self, LatticeError> {
        let n = gcm.rank();
        let set: BTreeSet<usize> = verts.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&v| v >= n) {
            return Err(LatticeError::VertexOutOfRange(bad));
        }
        for &i in &set {
            let nbrs: Vec<usize> = gcm.neighbors(i).collect();
            if nbrs.len() > 2 {
                return Err(LatticeError::NotElastic(format!(
                    "vertex {} has {} neighbors",
                    gcm.label(i),
                    nbrs.len()
                )));
            }
            for &j in &nbrs {
                if gcm.entry(i, j) != -1 || gcm.entry(j, i) != -1 {
                    return Err(LatticeError::NotElastic(format!(
                        "entry between {} and {} is not -1",
                        gcm.label(i),
                        gcm.label(j)
                    )));
                }
            }
        }

        let mut seen = BTreeSet::new();
        let mut components = Vec::new();
        for &start in &set {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            comp.insert(start);
            while let Some(i) = queue.pop_front() {
                for j in gcm.neighbors(i).filter(|j| set.contains(j)) {
                    if comp.insert(j) {
                        queue.push_back(j);
                    }
                }
            }
            seen.extend(comp.iter().copied());
            let inner_degree = |i: usize| gcm.neighbors(i).filter(|j| comp.contains(j)).count();
            let edges: usize = comp.iter().map(|&i| inner_degree(i)).sum::<usize>() / 2;
            if edges + 1 != comp.len() {
                return Err(LatticeError::NotElastic(format!(
                    "component containing {} is a cycle",
                    gcm.label(start)
                )));
            }
            // walk the path from its smallest endpoint
            let first = *comp.iter().find(|&&i| inner_degree(i) <= 1).expect("a path has an endpoint");
            let mut path = vec![first];
            let mut prev = usize::MAX;
            let mut cur = first;
            while let Some(next) = gcm.neighbors(cur).find(|&j| comp.contains(&j) && j != prev) {
                prev = cur;
                cur = next;
                path.push(cur);
            }
            components.push(path);
        }

        let border = components
            .iter()
            .map(|c| c.iter().copied().filter(|&i| gcm.neighbors(i).any(|j| !set.contains(&j))).collect())
            .collect();
        Ok(ElasticSubgraph { rank: n, vertices: set.into_iter().collect(), components, border })
    }

    pub fn empty(gcm: &Gcm) -> Self {
        ElasticSubgraph { rank: gcm.rank(), vertices: vec![], components: vec![], border: vec![] }
    }

    pub fn from_labels(gcm: &Gcm, labels: &[impl AsRef<str>]) -> Result<Self, LatticeError> {
        let verts = labels
            .iter()
            .map(|l| gcm.index_of(l.as_ref()).ok_or_else(|| LatticeError::UnknownLabel(l.as_ref().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(gcm, &verts)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.vertices.binary_search(&i).is_ok()
    }

    /// Components as paths, ordered by smallest vertex, each walked from its
    /// smaller endpoint.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn border(&self) -> &[Vec<usize>] {
        &self.border
    }

    pub fn component_of(&self, i: usize) -> Option<(usize, usize)> {
        self.components
            .iter()
            .enumerate()
            .find_map(|(c, path)| path.iter().position(|&x| x == i).map(|p| (c, p)))
    }

    /// Vertices of the subgraph more than `s` edges away from the border.
    pub fn interior(&self, gcm: &Gcm, s: usize) -> Vec<usize> {
        let dist = self.border_distance(gcm);
        self.vertices.iter().copied().filter(|&i| dist[i].is_none_or(|d| d > s)).collect()
    }

    /// Graph distance in the full diagram to the nearest border vertex; `None`
    /// when unreachable.
    pub fn border_distance(&self, gcm: &Gcm) -> Vec<Option<usize>> {
        let mut dist = vec![None; gcm.rank()];
        let mut queue = VecDeque::new();
        for &b in self.border.iter().flatten() {
            dist[b] = Some(0);
            queue.push_back(b);
        }
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            for j in gcm.neighbors(i) {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// Number of edges of component `c`.
    pub fn edge_count(&self, c: usize) -> usize {
        self.components[c].len().saturating_sub(1)
    }
}

/// Free-standing constructor.
pub fn elastic_subgraph(gcm: &Gcm, verts: &[usize]) -> Result<ElasticSubgraph, LatticeError> {
    ElasticSubgraph::new(gcm, verts)
}

/// Interior `X_0^s`.
pub fn interior(x0: &ElasticSubgraph, gcm: &Gcm, s: usize) -> Vec<usize> {
    x0.interior(gcm, s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthProfile {
    pub deep: bool,
    /// Connected components of the subgraph, each sorted.
    pub components: Vec<Vec<usize>>,
    /// Per-component constant values; empty when not deep.
    pub sigma: Vec<i64>,
}

impl DepthProfile {
    pub fn depth(&self) -> Option<i64> {
        self.deep.then(|| self.sigma.iter().copied().max().unwrap_or(0))
    }
}

/// Connected components of the induced subgraph on `verts`.
pub fn induced_components(gcm: &Gcm, verts: &[usize]) -> Vec<Vec<usize>> {
    let set: BTreeSet<usize> = verts.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in &set {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            for j in gcm.neighbors(i) {
                if set.contains(&j) && seen.insert(j) {
                    comp.push(j);
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Whether `v` is constant on each connected component of the subgraph `verts`.
pub fn depth_profile(v: &RootVector, gcm: &Gcm, verts: &[usize]) -> DepthProfile {
    let components = induced_components(gcm, verts);
    let mut sigma = Vec::with_capacity(components.len());
    let mut deep = true;
    for c in &components {
        let val = v[c[0]];
        if c.iter().any(|&i| v[i] != val) {
            deep = false;
            break;
        }
        sigma.push(val);
    }
    if !deep {
        sigma.clear();
    }
    DepthProfile { deep, components, sigma }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(labels: &[usize]) -> Vec<usize> {
        labels.iter().map(|l| l - 1).collect()
    }

    #[test]
    fn a5_middle_string() {
        let g = Gcm::type_a(5);
        let x0 = ElasticSubgraph::new(&g, &idx(&[2, 3, 4])).unwrap();
        assert_eq!(x0.components(), &[idx(&[2, 3, 4])]);
        assert_eq!(x0.border(), &[idx(&[2, 4])]);
    }

    #[test]
    fn b2_has_double_edge() {
        let g = Gcm::type_b(2);
        assert!(matches!(ElasticSubgraph::new(&g, &[0]), Err(LatticeError::NotElastic(_))));
        assert!(matches!(ElasticSubgraph::new(&g, &[1]), Err(LatticeError::NotElastic(_))));
    }

    #[test]
    fn a7_two_components() {
        let g = Gcm::type_a(7);
        let x0 = ElasticSubgraph::new(&g, &idx(&[2, 3, 5, 6])).unwrap();
        assert_eq!(x0.components().len(), 2);
        assert_eq!(x0.border(), &[idx(&[2, 3]), idx(&[5, 6])]);
    }

    #[test]
    fn reject_branch_vertex_and_cycle() {
        let d4 = Gcm::type_d(4);
        assert!(ElasticSubgraph::new(&d4, &[1]).is_err());
        let cyc = Gcm::new(vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]).unwrap();
        assert!(ElasticSubgraph::new(&cyc, &[0, 1, 2]).is_err());
        let aff = Gcm::new(vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert!(ElasticSubgraph::new(&aff, &[0]).is_err());
    }

    #[test]
    fn interior_a9() {
        let g = Gcm::type_a(9);
        let x0 = ElasticSubgraph::new(&g, &idx(&[2, 3, 4, 5, 6, 7, 8])).unwrap();
        assert_eq!(x0.interior(&g, 0), idx(&[3, 4, 5, 6, 7]));
        assert_eq!(x0.interior(&g, 2), idx(&[5]));
        assert!(x0.interior(&g, 3).is_empty());
        for s in 0..6 {
            let a: BTreeSet<_> = x0.interior(&g, s).into_iter().collect();
            let b: BTreeSet<_> = x0.interior(&g, s + 1).into_iter().collect();
            assert!(b.is_subset(&a));
        }
    }

    #[test]
    fn borderless_component_is_all_interior() {
        let g = Gcm::type_a(3);
        let x0 = ElasticSubgraph::new(&g, &[0, 1, 2]).unwrap();
        assert!(x0.border()[0].is_empty());
        assert_eq!(x0.interior(&g, 10), vec![0, 1, 2]);
    }

    #[test]
    fn depth_examples() {
        let b4 = Gcm::type_b(4);
        let spin = RootVector::new(vec![1, 2, 3, 4]).unwrap();
        assert!(!depth_profile(&spin, &b4, &[1, 2]).deep);

        let a5 = Gcm::type_a(5);
        let z = RootVector::zero(5);
        let p = depth_profile(&z, &a5, &[1, 3]);
        assert!(p.deep);
        assert_eq!(p.sigma, vec![0, 0]);

        let v = RootVector::new(vec![2, 1, 1, 1, 3]).unwrap();
        let p = depth_profile(&v, &a5, &idx(&[2, 3, 4]));
        assert!(p.deep);
        assert_eq!(p.sigma, vec![1]);
        assert_eq!(p.depth(), Some(1));
    }
}

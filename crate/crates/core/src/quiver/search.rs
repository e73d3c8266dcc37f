use serde::Serialize;

use super::linalg::Mat;
use super::rep::{Edge, FramedRep};
use super::QuiverError;
use crate::lattice::{ElasticSubgraph, Gcm};

#[derive(Clone, Debug, PartialEq, Eq)]
struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IMat {
    fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![0; rows * cols] }
    }

    fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    fn mul(&self, o: &IMat) -> IMat {
        let mut m = IMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                for j in 0..o.cols {
                    m.data[i * o.cols + j] += self.at(i, k) * o.at(k, j);
                }
            }
        }
        m
    }

    fn to_mat(&self) -> Mat {
        let rows: Vec<Vec<i64>> = (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect();
        if self.rows == 0 {
            Mat::zeros(0, self.cols)
        } else {
            Mat::from_i64(&rows)
        }
    }
}

/// Rank over `Q` of the columns of `blocks` laid side by side.
fn int_rank(rows: usize, blocks: &[&IMat]) -> usize {
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut m: Vec<Vec<i128>> = vec![Vec::with_capacity(cols); rows];
    for b in blocks {
        for (i, row) in m.iter_mut().enumerate() {
            row.extend((0..b.cols).map(|j| b.at(i, j) as i128));
        }
    }
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                for k in 0..cols {
                    m[r][k] = m[r][k] * a - m[rank][k] * b;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    /// Assignments satisfying the moment map and `ε = 0` on `X_0`.
    pub candidates: u64,
    /// The first candidate that is also nilpotent and stable, if any.
    #[serde(skip)]
    pub witness: Option<FramedRep>,
}

struct Search<'a> {
    gcm: &'a Gcm,
    v: &'a [usize],
    w: &'a [usize],
    in_x0: Vec<bool>,
    entries: &'a [i64],
    /// `(tail, head)` with `tail > head`, sorted by completion order.
    edges: Vec<(usize, usize)>,
    /// Vertices whose last edge is `edges[k]`.
    completes: Vec<Vec<usize>>,
    t: Vec<IMat>,
    x: Vec<IMat>,
    xbar: Vec<IMat>,
    candidates: u64,
    witness: Option<FramedRep>,
}

impl Search<'_> {
    fn vertex_ok(&self, k: usize) -> bool {
        let dim = self.v[k];
        let mut mm = IMat::zeros(dim, dim);
        let mut incoming: Vec<&IMat> = Vec::new();
        for (e, &(tail, head)) in self.edges.iter().enumerate() {
            if head == k {
                let p = self.x[e].mul(&self.xbar[e]);
                mm.data.iter_mut().zip(&p.data).for_each(|(a, b)| *a += b);
                incoming.push(&self.x[e]);
            }
            if tail == k {
                let p = self.xbar[e].mul(&self.x[e]);
                mm.data.iter_mut().zip(&p.data).for_each(|(a, b)| *a -= b);
                incoming.push(&self.xbar[e]);
            }
        }
        if mm.data.iter().any(|&a| a != 0) {
            return false;
        }
        !self.in_x0[k] || int_rank(dim, &incoming) == dim
    }

    fn fill(&mut self, which: Slot, k: usize) -> bool {
        let m = match which {
            Slot::T => &mut self.t[k],
            Slot::X => &mut self.x[k],
            Slot::XBar => &mut self.xbar[k],
        };
        // odometer over entries; false once every filling has been produced
        let base = self.entries.len();
        for d in m.data.iter_mut() {
            let pos = self.entries.iter().position(|e| e == d).unwrap();
            if pos + 1 < base {
                *d = self.entries[pos + 1];
                return true;
            }
            *d = self.entries[0];
        }
        false
    }

    fn reset(&mut self, which: Slot, k: usize) {
        let first = self.entries[0];
        let m = match which {
            Slot::T => &mut self.t[k],
            Slot::X => &mut self.x[k],
            Slot::XBar => &mut self.xbar[k],
        };
        m.data.iter_mut().for_each(|d| *d = first);
    }

    fn run_t(&mut self, k: usize) -> bool {
        if k == self.t.len() {
            return self.run_edge(0);
        }
        self.reset(Slot::T, k);
        loop {
            if self.run_t(k + 1) {
                return true;
            }
            if !self.fill(Slot::T, k) {
                return false;
            }
        }
    }

    fn run_edge(&mut self, e: usize) -> bool {
        if e == self.edges.len() {
            return self.leaf();
        }
        self.reset(Slot::X, e);
        loop {
            self.reset(Slot::XBar, e);
            loop {
                if self.completes[e].iter().all(|&k| self.vertex_ok(k)) && self.run_edge(e + 1) {
                    return true;
                }
                if !self.fill(Slot::XBar, e) {
                    break;
                }
            }
            if !self.fill(Slot::X, e) {
                return false;
            }
        }
    }

    fn leaf(&mut self) -> bool {
        self.candidates += 1;
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(tail, head))| Edge { tail, head, x: self.x[e].to_mat(), xbar: self.xbar[e].to_mat() })
            .collect();
        let t = self.t.iter().map(IMat::to_mat).collect();
        let r = FramedRep::new(self.gcm, self.v.to_vec(), self.w.to_vec(), edges, t).expect("shapes follow v and w");
        if r.check_nilpotent() && r.check_stable() {
            self.witness = Some(r);
            return true;
        }
        false
    }
}

#[derive(Clone, Copy)]
enum Slot {
    T,
    X,
    XBar,
}

/// Enumerates every representation with dimension vectors `(v, w)` whose
/// matrix entries lie in `entries`, pruning on the moment map and on
/// `ε_i = 0` for `i` in `X_0` vertex by vertex, and stops at the first one
/// that is also nilpotent and stable.
pub fn exhaustive_search(gcm: &Gcm, x0: &ElasticSubgraph, v: &[usize], w: &[usize], entries: &[i64]) -> Result<SearchReport, QuiverError> {
    let n = gcm.rank();
    if !gcm.is_simply_laced() {
        return Err(QuiverError::NotSimplyLaced);
    }
    if v.len() != n || w.len() != n || entries.is_empty() {
        return Err(QuiverError::Shape("v and w must match the rank and entries must be nonempty".into()));
    }
    let mut edges: Vec<(usize, usize)> =
        (0..n).flat_map(|i| gcm.neighbors(i).filter(move |&j| j > i).map(move |j| (j, i))).collect();
    edges.sort_by_key(|&(t, h)| (t.max(h), t.min(h)));
    let mut completes = vec![vec![]; edges.len()];
    let mut in_x0 = vec![false; n];
    for &i in x0.vertices() {
        in_x0[i] = true;
    }
    for k in 0..n {
        if let Some(last) = edges.iter().rposition(|&(t, h)| t == k || h == k) {
            completes[last].push(k);
        }
    }
    let mut s = Search {
        gcm,
        v,
        w,
        in_x0,
        entries,
        t: (0..n).map(|i| IMat::zeros(w[i], v[i])).collect(),
        x: edges.iter().map(|&(t, h)| IMat::zeros(v[h], v[t])).collect(),
        xbar: edges.iter().map(|&(t, h)| IMat::zeros(v[t], v[h])).collect(),
        edges,
        completes,
        candidates: 0,
        witness: None,
    };
    // isolated vertices have no edge to trigger their check
    let isolated_ok = (0..n).all(|k| gcm.neighbors(k).next().is_some() || !s.in_x0[k] || v[k] == 0);
    if isolated_ok {
        s.run_t(0);
    }
    Ok(SearchReport { v: v.to_vec(), w: w.to_vec(), candidates: s.candidates, witness: s.witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_segment_reps() {
        // the x-segment on A_3 framed at 1 is found
        let g = Gcm::type_a(3);
        let x0 = ElasticSubgraph::new(&g, &[1]).unwrap();
        let r = exhaustive_search(&g, &x0, &[1, 1, 1], &[1, 0, 0], &[-1, 0, 1]).unwrap();
        let wit = r.witness.unwrap();
        assert!(wit.is_nqr());
        assert_eq!(wit.epsilon_geom(1), 0);
    }

    #[test]
    fn non_deep_is_empty_on_a_short_string() {
        // ε = 0 at vertex 2 forces y ≠ 0, the moment map at 1 then kills x, and V_2 destabilizes
        let g = Gcm::type_a(4);
        let x0 = ElasticSubgraph::new(&g, &[1, 2]).unwrap();
        let r = exhaustive_search(&g, &x0, &[1, 1, 0, 0], &[1, 0, 0, 0], &[-1, 0, 1]).unwrap();
        assert!(r.witness.is_none());
    }

    #[test]
    fn int_rank_small() {
        let a = IMat { rows: 2, cols: 2, data: vec![1, 2, 2, 4] };
        let b = IMat { rows: 2, cols: 1, data: vec![0, 1] };
        assert_eq!(int_rank(2, &[&a]), 1);
        assert_eq!(int_rank(2, &[&a, &b]), 2);
        assert_eq!(int_rank(0, &[]), 0);
    }
}

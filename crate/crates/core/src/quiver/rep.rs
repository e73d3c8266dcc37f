use num::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{intersection, preimage, rat, span_sum, Mat, Rat};
use super::QuiverError;
use crate::lattice::Gcm;

/// One oriented edge with both maps: `x: V_tail -> V_head` and
/// `xbar: V_head -> V_tail`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub x: Mat,
    pub xbar: Mat,
}

/// A framed representation of the doubled quiver of a simply-laced diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramedRep {
    gcm: Gcm,
    v: Vec<usize>,
    w: Vec<usize>,
    edges: Vec<Edge>,
    t: Vec<Mat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMapCheck {
    pub holds: bool,
    /// First vertex with a nonzero defect.
    pub vertex: Option<usize>,
    /// Sum of absolute values of all defect entries.
    pub defect_norm: Rat,
}

fn check_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    for &(_, h) in edges {
        indeg[h] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(a) = stack.pop() {
        seen += 1;
        for &(t, h) in edges {
            if t == a {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
    }
    seen == n
}

impl FramedRep {
    pub fn new(gcm: &Gcm, v: Vec<usize>, w: Vec<usize>, edges: Vec<Edge>, t: Vec<Mat>) -> Result<Self, QuiverError> {
        let n = gcm.rank();
        if !gcm.is_simply_laced() {
            return Err(QuiverError::NotSimplyLaced);
        }
        if v.len() != n || w.len() != n || t.len() != n {
            return Err(QuiverError::Shape(format!("expected {n} entries in v, w and t")));
        }
        let mut expected: Vec<(usize, usize)> =
            (0..n).flat_map(|i| gcm.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j))).collect();
        let mut given: Vec<(usize, usize)> = edges.iter().map(|e| (e.tail.min(e.head), e.tail.max(e.head))).collect();
        expected.sort();
        given.sort();
        if expected != given {
            return Err(QuiverError::Shape("edges must list every diagram edge exactly once".into()));
        }
        for e in &edges {
            if e.x.shape() != (v[e.head], v[e.tail]) || e.xbar.shape() != (v[e.tail], v[e.head]) {
                return Err(QuiverError::Shape(format!("maps on edge {}->{} do not match v", e.tail, e.head)));
            }
        }
        for (i, ti) in t.iter().enumerate() {
            if ti.shape() != (w[i], v[i]) {
                return Err(QuiverError::Shape(format!("framing map at vertex {i} does not match (w, v)")));
            }
        }
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.tail, e.head)).collect();
        if !check_acyclic(n, &pairs) {
            return Err(QuiverError::CyclicOrientation);
        }
        Ok(FramedRep { gcm: gcm.clone(), v, w, edges, t })
    }

    /// All maps zero, every edge oriented toward the smaller index.
    pub fn zero(gcm: &Gcm, v: Vec<usize>, w: Vec<usize>) -> Result<Self, QuiverError> {
        let n = gcm.rank();
        if v.len() != n || w.len() != n {
            return Err(QuiverError::Shape(format!("expected {n} entries in v and w")));
        }
        let edges = (0..n)
            .flat_map(|i| gcm.neighbors(i).filter(move |&j| j > i).map(move |j| (j, i)))
            .map(|(tail, head)| Edge { tail, head, x: Mat::zeros(v[head], v[tail]), xbar: Mat::zeros(v[tail], v[head]) })
            .collect();
        let t = (0..n).map(|i| Mat::zeros(w[i], v[i])).collect();
        FramedRep::new(gcm, v, w, edges, t)
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    pub fn w(&self) -> &[usize] {
        &self.w
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn t(&self, i: usize) -> &Mat {
        &self.t[i]
    }

    pub fn rank(&self) -> usize {
        self.gcm.rank()
    }

    /// The map `V_a -> V_b` along the edge joining `a` and `b`.
    pub fn arrow(&self, a: usize, b: usize) -> Option<&Mat> {
        self.edges.iter().find_map(|e| match (e.tail == a && e.head == b, e.tail == b && e.head == a) {
            (true, _) => Some(&e.x),
            (_, true) => Some(&e.xbar),
            _ => None,
        })
    }

    pub fn set_arrow(&mut self, a: usize, b: usize, m: Mat) -> Result<(), QuiverError> {
        if m.shape() != (self.v[b], self.v[a]) {
            return Err(QuiverError::Shape(format!("map {a}->{b} must be {}x{}", self.v[b], self.v[a])));
        }
        for e in &mut self.edges {
            if e.tail == a && e.head == b {
                e.x = m;
                return Ok(());
            }
            if e.tail == b && e.head == a {
                e.xbar = m;
                return Ok(());
            }
        }
        Err(QuiverError::UnknownEdge(a, b))
    }

    pub fn set_t(&mut self, i: usize, m: Mat) -> Result<(), QuiverError> {
        if m.shape() != (self.w[i], self.v[i]) {
            return Err(QuiverError::Shape(format!("framing map at {i} must be {}x{}", self.w[i], self.v[i])));
        }
        self.t[i] = m;
        Ok(())
    }

    /// Arrows `(a, b, V_a -> V_b)` of the doubled quiver.
    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize, &Mat)> {
        self.edges.iter().flat_map(|e| [(e.tail, e.head, &e.x), (e.head, e.tail, &e.xbar)])
    }

    /// At each vertex `k`: `Σ_{head e = k} x_e x_ē - Σ_{tail e = k} x_ē x_e`.
    pub fn moment_map(&self, k: usize) -> Mat {
        let mut acc = Mat::zeros(self.v[k], self.v[k]);
        for e in &self.edges {
            if e.head == k {
                acc = &acc + &(&e.x * &e.xbar);
            }
            if e.tail == k {
                acc = &acc - &(&e.xbar * &e.x);
            }
        }
        acc
    }

    pub fn check_mm(&self) -> MomentMapCheck {
        let mut vertex = None;
        let mut norm = Rat::zero();
        for k in 0..self.rank() {
            let d = self.moment_map(k);
            if !d.is_zero() && vertex.is_none() {
                vertex = Some(k);
            }
            for x in d.data() {
                norm += x.abs();
            }
        }
        MomentMapCheck { holds: vertex.is_none(), vertex, defect_norm: norm }
    }

    /// Every path of length `Σ v` acts by zero, checked through the images of
    /// all paths of each length.
    pub fn check_nilpotent(&self) -> bool {
        let n = self.rank();
        let mut layer: Vec<Mat> = (0..n).map(|i| Mat::identity(self.v[i])).collect();
        let total: usize = self.v.iter().sum();
        for _ in 0..=total {
            if layer.iter().all(|s| s.cols() == 0) {
                return true;
            }
            let mut next: Vec<Mat> = (0..n).map(|i| Mat::zeros(self.v[i], 0)).collect();
            for (a, b, m) in self.arrows() {
                if layer[a].cols() > 0 {
                    next[b] = span_sum(&next[b], &(m * &layer[a]));
                }
            }
            layer = next;
        }
        layer.iter().all(|s| s.cols() == 0)
    }

    /// Largest arrow-invariant family inside `ker t`.
    pub fn destabilizing_family(&self) -> Vec<Mat> {
        let n = self.rank();
        let mut s: Vec<Mat> = (0..n).map(|i| self.t[i].kernel()).collect();
        loop {
            let mut changed = false;
            for (a, b, m) in self.arrows() {
                let keep = intersection(&s[a], &preimage(m, &s[b]));
                if keep.cols() < s[a].cols() {
                    s[a] = keep;
                    changed = true;
                }
            }
            if !changed {
                return s;
            }
        }
    }

    pub fn check_stable(&self) -> bool {
        self.destabilizing_family().iter().all(|s| s.cols() == 0)
    }

    /// Codimension in `V_i` of the images of all arrows into `i`.
    pub fn epsilon_geom(&self, i: usize) -> usize {
        let mut span = Mat::zeros(self.v[i], 0);
        for (_, b, m) in self.arrows() {
            if b == i {
                span = span_sum(&span, m);
            }
        }
        self.v[i] - span.cols()
    }

    pub fn epsilon_profile(&self) -> Vec<usize> {
        (0..self.rank()).map(|i| self.epsilon_geom(i)).collect()
    }

    /// Moment map, nilpotency and stability together.
    pub fn is_nqr(&self) -> bool {
        self.check_mm().holds && self.check_nilpotent() && self.check_stable()
    }

    /// Transport along `g_i: V_i -> V_i`; `t` becomes `t g^{-1}`.
    pub fn conjugate(&self, g: &[Mat]) -> Result<FramedRep, QuiverError> {
        let inv: Vec<Mat> = g
            .iter()
            .map(|m| m.inverse().ok_or_else(|| QuiverError::Shape("basis change is not invertible".into())))
            .collect::<Result<_, _>>()?;
        let mut out = self.clone();
        for e in &mut out.edges {
            e.x = &(&g[e.head] * &e.x) * &inv[e.tail];
            e.xbar = &(&g[e.tail] * &e.xbar) * &inv[e.head];
        }
        for (i, t) in out.t.iter_mut().enumerate() {
            *t = &*t * &inv[i];
        }
        Ok(out)
    }

    /// Conjugate by seeded random invertible integer matrices.
    pub fn random_basis_change(&self, seed: u64) -> FramedRep {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: Vec<Mat> = self
            .v
            .iter()
            .map(|&d| loop {
                let rows: Vec<Vec<i64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-2..=2)).collect()).collect();
                let m = if d == 0 { Mat::zeros(0, 0) } else { Mat::from_i64(&rows) };
                if m.inverse().is_some() {
                    break m;
                }
            })
            .collect();
        self.conjugate(&g).expect("matrices were checked invertible")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RepDoc::from(self)).expect("rep serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, QuiverError> {
        let doc: RepDoc = serde_json::from_str(s).map_err(|e| QuiverError::Json(e.to_string()))?;
        doc.try_into()
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MatDoc {
    rows: usize,
    cols: usize,
    data: Vec<String>,
}

impl From<&Mat> for MatDoc {
    fn from(m: &Mat) -> Self {
        MatDoc { rows: m.rows(), cols: m.cols(), data: m.data().iter().map(|x| x.to_string()).collect() }
    }
}

impl TryFrom<&MatDoc> for Mat {
    type Error = QuiverError;
    fn try_from(d: &MatDoc) -> Result<Self, QuiverError> {
        let data = d
            .data
            .iter()
            .map(|s| s.parse::<Rat>().map_err(|_| QuiverError::Json(format!("bad rational {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Mat::from_rows(d.rows, d.cols, data).ok_or_else(|| QuiverError::Json("matrix data length mismatch".into()))
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    tail: usize,
    head: usize,
    x: MatDoc,
    xbar: MatDoc,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RepDoc {
    schema_version: u32,
    diagram: Vec<Vec<i64>>,
    labels: Vec<String>,
    v: Vec<usize>,
    w: Vec<usize>,
    edges: Vec<EdgeDoc>,
    t: Vec<MatDoc>,
}

impl From<&FramedRep> for RepDoc {
    fn from(r: &FramedRep) -> Self {
        RepDoc {
            schema_version: 1,
            diagram: r.gcm.matrix().to_vec(),
            labels: r.gcm.labels().to_vec(),
            v: r.v.clone(),
            w: r.w.clone(),
            edges: r
                .edges
                .iter()
                .map(|e| EdgeDoc { tail: e.tail, head: e.head, x: (&e.x).into(), xbar: (&e.xbar).into() })
                .collect(),
            t: r.t.iter().map(MatDoc::from).collect(),
        }
    }
}

impl TryFrom<RepDoc> for FramedRep {
    type Error = QuiverError;
    fn try_from(d: RepDoc) -> Result<Self, QuiverError> {
        if d.schema_version != 1 {
            return Err(QuiverError::Json(format!("unsupported schema_version {}", d.schema_version)));
        }
        let gcm = Gcm::with_labels(d.diagram, d.labels)?;
        let edges = d
            .edges
            .iter()
            .map(|e| Ok(Edge { tail: e.tail, head: e.head, x: (&e.x).try_into()?, xbar: (&e.xbar).try_into()? }))
            .collect::<Result<Vec<_>, QuiverError>>()?;
        let t = d.t.iter().map(Mat::try_from).collect::<Result<Vec<_>, _>>()?;
        FramedRep::new(&gcm, d.v, d.w, edges, t)
    }
}

/// Shorthand for a `rows x cols` matrix from integer rows.
pub fn int_mat(rows: usize, cols: usize, entries: &[i64]) -> Mat {
    Mat::from_rows(rows, cols, entries.iter().map(|&x| rat(x)).collect()).expect("entry count matches shape")
}

use serde::{Deserialize, Serialize};

use super::linalg::{intersection, projections, span_sum, Mat};
use super::rep::{Edge, FramedRep};
use super::QuiverError;
use crate::lattice::{ElasticSubgraph, Gcm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    /// `x` carries `u_k` to `u_{k-1}`; the sink `u_start` is framed.
    X,
    /// `y` carries `u_k` to `u_{k+1}`; the sink `u_end` is framed.
    Y,
}

/// An interval of basis vectors on an `A_n` string, one per vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn x(start: usize, end: usize) -> Self {
        Segment { kind: SegmentKind::X, start, end }
    }

    pub fn y(start: usize, end: usize) -> Self {
        Segment { kind: SegmentKind::Y, start, end }
    }
}

/// Direct sum of segment representations on `A_len`, oriented toward the
/// smaller index so that `x` is the forward map of every edge.
pub fn build_string_rep(len: usize, pattern: &[Segment]) -> Result<FramedRep, QuiverError> {
    for s in pattern {
        if s.start > s.end || s.end >= len {
            return Err(QuiverError::InconsistentPattern(format!("interval [{}, {}] on a string of {len}", s.start, s.end)));
        }
    }
    let gcm = Gcm::type_a(len);
    let mut v = vec![0usize; len];
    let mut w = vec![0usize; len];
    // basis slots per vertex and framing slots per sink, in pattern order
    let mut slot = vec![vec![]; pattern.len()];
    let mut frame = vec![0usize; pattern.len()];
    for (k, s) in pattern.iter().enumerate() {
        for (i, vi) in v.iter_mut().enumerate().take(s.end + 1).skip(s.start) {
            slot[k].push((i, *vi));
            *vi += 1;
        }
        let sink = match s.kind {
            SegmentKind::X => s.start,
            SegmentKind::Y => s.end,
        };
        frame[k] = w[sink];
        w[sink] += 1;
    }
    let mut x: Vec<Mat> = (1..len).map(|i| Mat::zeros(v[i - 1], v[i])).collect();
    let mut y: Vec<Mat> = (1..len).map(|i| Mat::zeros(v[i], v[i - 1])).collect();
    let mut t: Vec<Mat> = (0..len).map(|i| Mat::zeros(w[i], v[i])).collect();
    let one = super::linalg::rat(1);
    for (k, s) in pattern.iter().enumerate() {
        let pos = |i: usize| slot[k][i - s.start].1;
        for i in s.start + 1..=s.end {
            match s.kind {
                SegmentKind::X => x[i - 1][(pos(i - 1), pos(i))] = one.clone(),
                SegmentKind::Y => y[i - 1][(pos(i), pos(i - 1))] = one.clone(),
            }
        }
        let sink = match s.kind {
            SegmentKind::X => s.start,
            SegmentKind::Y => s.end,
        };
        t[sink][(frame[k], pos(sink))] = one.clone();
    }
    let edges = x
        .into_iter()
        .zip(y)
        .enumerate()
        .map(|(k, (x, xbar))| Edge { tail: k + 1, head: k, x, xbar })
        .collect();
    FramedRep::new(&gcm, v, w, edges, t)
}

/// `(im x^s)_j` and `(im y^s)_j` at a vertex of an elastic string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringDecomposition {
    pub vertex: usize,
    pub s: usize,
    pub im_x: Mat,
    pub im_y: Mat,
}

/// Position of `j` in its elastic path, `x` pointing toward position 0.
fn locate(x0: &ElasticSubgraph, j: usize) -> Result<(&[usize], usize), QuiverError> {
    let (c, p) = x0
        .component_of(j)
        .ok_or_else(|| QuiverError::PreconditionViolated(format!("vertex {j} is not in the elastic subgraph")))?;
    Ok((&x0.components()[c], p))
}

fn compose(r: &FramedRep, walk: &[usize]) -> Mat {
    let mut m = Mat::identity(r.v()[walk[0]]);
    for pair in walk.windows(2) {
        m = r.arrow(pair[0], pair[1]).expect("walk follows edges") * &m;
    }
    m
}

/// `x^s: V_{path[p+s]} -> V_{path[p]}`; zero from a trivial space when the
/// path ends first.
fn x_power_into(r: &FramedRep, path: &[usize], p: usize, s: usize) -> Mat {
    if p + s >= path.len() {
        return Mat::zeros(r.v()[path[p]], 0);
    }
    let walk: Vec<usize> = (p..=p + s).rev().map(|k| path[k]).collect();
    compose(r, &walk)
}

fn y_power_into(r: &FramedRep, path: &[usize], p: usize, s: usize) -> Mat {
    if p < s {
        return Mat::zeros(r.v()[path[p]], 0);
    }
    let walk: Vec<usize> = (p - s..=p).map(|k| path[k]).collect();
    compose(r, &walk)
}

/// `x^s: V_{path[p]} -> V_{path[p-s]}`, `None` off the end of the path.
fn x_power_from(r: &FramedRep, path: &[usize], p: usize, s: usize) -> Option<Mat> {
    (p >= s).then(|| compose(r, &(p - s..=p).rev().map(|k| path[k]).collect::<Vec<_>>()))
}

fn y_power_from(r: &FramedRep, path: &[usize], p: usize, s: usize) -> Option<Mat> {
    (p + s < path.len()).then(|| compose(r, &(p..=p + s).map(|k| path[k]).collect::<Vec<_>>()))
}

fn violated(what: &str) -> QuiverError {
    QuiverError::PreconditionViolated(what.to_string())
}

/// Checks every hypothesis of the decomposition except the vertex position.
fn check_string_hypotheses(r: &FramedRep, x0: &ElasticSubgraph, s: usize) -> Result<(), QuiverError> {
    if !r.check_mm().holds {
        return Err(violated("moment map"));
    }
    if !r.check_nilpotent() {
        return Err(violated("nilpotency"));
    }
    if !r.check_stable() {
        return Err(violated("stability"));
    }
    for &i in x0.vertices() {
        if r.v()[i] > s {
            return Err(violated(&format!("v at vertex {i} exceeds s = {s}")));
        }
        if r.epsilon_geom(i) != 0 {
            return Err(violated(&format!("epsilon at vertex {i} is nonzero")));
        }
    }
    Ok(())
}

pub fn string_decompose(r: &FramedRep, x0: &ElasticSubgraph, j: usize, s: usize) -> Result<StringDecomposition, QuiverError> {
    if s == 0 {
        return Err(violated("s must be positive"));
    }
    if !x0.interior(r.gcm(), s).contains(&j) {
        return Err(violated(&format!("vertex {j} is not in the depth-{s} interior")));
    }
    check_string_hypotheses(r, x0, s)?;
    decompose_unchecked(r, x0, j, s)
}

fn decompose_unchecked(r: &FramedRep, x0: &ElasticSubgraph, j: usize, s: usize) -> Result<StringDecomposition, QuiverError> {
    let (path, p) = locate(x0, j)?;
    let vj = r.v()[j];
    let im_x = x_power_into(r, path, p, s).image();
    let im_y = y_power_into(r, path, p, s).image();
    if im_x.cols() + im_y.cols() != vj || span_sum(&im_x, &im_y).cols() != vj {
        return Err(QuiverError::DecompositionFailed(format!("images of x^{s} and y^{s} do not split V at vertex {j}")));
    }
    let ker_x = x_power_from(r, path, p, s).map_or_else(|| Mat::identity(vj), |m| m.kernel());
    let ker_y = y_power_from(r, path, p, s).map_or_else(|| Mat::identity(vj), |m| m.kernel());
    if intersection(&ker_x, &ker_y).cols() != 0 {
        return Err(QuiverError::DecompositionFailed(format!("ker x^{s} and ker y^{s} meet at vertex {j}")));
    }
    let loops = [
        ("x^s y^s", x_power_into(r, path, p, s), y_power_from(r, path, p, s)),
        ("y^s x^s", y_power_into(r, path, p, s), x_power_from(r, path, p, s)),
    ];
    for (name, into, from) in loops {
        if let Some(from) = from {
            if !(&into * &from).is_zero() {
                return Err(QuiverError::DecompositionFailed(format!("{name} is nonzero at vertex {j}")));
            }
        }
    }
    Ok(StringDecomposition { vertex: j, s, im_x, im_y })
}

/// Split vertex `i` of an elastic string into `i'` (keeping the label and the
/// edge toward the start of the path) and `i''` (inserted at index `i + 1`)
/// joined by a new edge `d`.
pub fn stretch(r: &FramedRep, x0: &ElasticSubgraph, i: usize, s: usize) -> Result<(FramedRep, ElasticSubgraph), QuiverError> {
    let gcm = r.gcm();
    if s == 0 || !x0.interior(gcm, s + 1).contains(&i) {
        return Err(violated(&format!("vertex {i} is not in the depth-{} interior", s + 1)));
    }
    let dec = string_decompose(r, x0, i, s)?;
    if r.w()[i] != 0 {
        return Err(violated(&format!("framing at vertex {i} is nonzero")));
    }
    let (path, p) = locate(x0, i)?;
    let (prev, next) = (path[p - 1], path[p + 1]);
    let n = gcm.rank();
    let up = |k: usize| if k > i { k + 1 } else { k };
    let (ip, ipp) = (i, i + 1);

    let nmap = r.arrow(prev, i).unwrap() * r.arrow(i, prev).unwrap();
    let (pa, pb) = projections(&dec.im_x, &dec.im_y).expect("decomposition is direct");
    let x_d = &pa + &(&nmap * &pb);
    let y_d = &(&nmap * &pa) + &pb;

    let mut mat = vec![vec![0i64; n + 1]; n + 1];
    for a in 0..n {
        for b in 0..n {
            mat[up(a)][up(b)] = gcm.entry(a, b);
        }
    }
    mat[ipp][ipp] = 2;
    for k in 0..=n {
        if k != ipp {
            mat[ipp][k] = 0;
            mat[k][ipp] = 0;
        }
    }
    let nx = up(next);
    mat[ip][nx] = 0;
    mat[nx][ip] = 0;
    for (a, b) in [(ipp, nx), (ip, ipp)] {
        mat[a][b] = -1;
        mat[b][a] = -1;
    }
    let mut labels: Vec<String> = (0..n).map(|k| gcm.label(k).to_string()).collect();
    let mut new_label = format!("{}''", gcm.label(i));
    while labels.contains(&new_label) {
        new_label.push('\'');
    }
    labels.insert(ipp, new_label);
    let target = Gcm::with_labels(mat, labels)?;

    let mut v: Vec<usize> = r.v().to_vec();
    v.insert(ipp, r.v()[i]);
    let mut w: Vec<usize> = r.w().to_vec();
    w.insert(ipp, 0);
    let mut edges: Vec<Edge> = r
        .edges()
        .iter()
        .map(|e| {
            let relabel = |k: usize| if (k == i) && (e.tail == next || e.head == next) { ipp } else { up(k) };
            Edge { tail: relabel(e.tail), head: relabel(e.head), x: e.x.clone(), xbar: e.xbar.clone() }
        })
        .collect();
    edges.push(Edge { tail: ipp, head: ip, x: x_d, xbar: y_d });
    let mut t: Vec<Mat> = (0..n).map(|k| r.t(k).clone()).collect();
    t.insert(ipp, Mat::zeros(0, r.v()[i]));
    let out = FramedRep::new(&target, v, w, edges, t)?;
    let verts: Vec<usize> = x0.vertices().iter().map(|&k| up(k)).chain([ipp]).collect();
    let x0p = ElasticSubgraph::new(&target, &verts)?;
    Ok((out, x0p))
}

/// Inverse of [`stretch`]: removes `d = (i', i'')`, identifying `V_{i''}`
/// with `V_{i'}` through `x_d` on `(im x^s)_{i''}` and through `y_d^{-1}` on
/// `(im y^s)_{i''}`.
pub fn contract(r: &FramedRep, x0: &ElasticSubgraph, d: (usize, usize), s: usize) -> Result<(FramedRep, ElasticSubgraph), QuiverError> {
    let (ip, ipp) = d;
    let gcm = r.gcm();
    let nc = |m: String| QuiverError::NotContractible(m);
    let (path, p) = locate(x0, ip).map_err(|e| nc(e.to_string()))?;
    if path.get(p + 1) != Some(&ipp) {
        return Err(nc(format!("{ipp} does not follow {ip} along the elastic string")));
    }
    if p == 0 || p + 2 >= path.len() {
        return Err(nc("the edge must be interior to its string".into()));
    }
    if r.w()[ipp] != 0 || gcm.neighbors(ipp).count() != 2 {
        return Err(nc(format!("vertex {ipp} carries framing or extra edges")));
    }
    let next = path[p + 2];
    let vd = r.v()[ip];
    if r.v()[ipp] != vd {
        return Err(nc("dimensions differ across d".into()));
    }
    let x_d = r.arrow(ipp, ip).unwrap();
    let y_d = r.arrow(ip, ipp).unwrap();
    let a2 = x_power_into(r, path, p + 1, s).image();
    let b1 = y_power_into(r, path, p, s).image();
    let a1 = x_d * &a2;
    let b2 = y_d * &b1;
    if a1.rank() != a2.cols() {
        return Err(nc("x_d is not injective on im x^s".into()));
    }
    if b2.rank() != b1.cols() {
        return Err(nc("y_d is not injective on im y^s".into()));
    }
    let src = a2.hcat(&b2);
    let dst = a1.hcat(&b1);
    let src_inv = src.inverse().ok_or_else(|| nc("im x^s and im y^s do not split V_{i''}".into()))?;
    let phi = &dst * &src_inv;
    let phi_inv = phi.inverse().ok_or_else(|| nc("im x^s and im y^s do not split V_{i'}".into()))?;

    let n = gcm.rank();
    let down = |k: usize| if k > ipp { k - 1 } else { k };
    let keep: Vec<usize> = (0..n).filter(|&k| k != ipp).collect();
    let mut mat = vec![vec![0i64; n - 1]; n - 1];
    for &a in &keep {
        for &b in &keep {
            mat[down(a)][down(b)] = gcm.entry(a, b);
        }
    }
    mat[down(ip)][down(next)] = -1;
    mat[down(next)][down(ip)] = -1;
    let labels: Vec<String> = keep.iter().map(|&k| gcm.label(k).to_string()).collect();
    let target = Gcm::with_labels(mat, labels)?;

    let v: Vec<usize> = keep.iter().map(|&k| r.v()[k]).collect();
    let w: Vec<usize> = keep.iter().map(|&k| r.w()[k]).collect();
    let mut edges = Vec::new();
    for e in r.edges() {
        let touches = |k: usize| e.tail == k || e.head == k;
        if touches(ip) && touches(ipp) {
            continue;
        }
        if touches(ipp) {
            let (x, xbar) = if e.tail == ipp {
                (&e.x * &phi_inv, &phi * &e.xbar)
            } else {
                (&phi * &e.x, &e.xbar * &phi_inv)
            };
            let tail = if e.tail == ipp { ip } else { e.tail };
            let head = if e.head == ipp { ip } else { e.head };
            edges.push(Edge { tail: down(tail), head: down(head), x, xbar });
        } else {
            edges.push(Edge { tail: down(e.tail), head: down(e.head), x: e.x.clone(), xbar: e.xbar.clone() });
        }
    }
    let t: Vec<Mat> = keep.iter().map(|&k| r.t(k).clone()).collect();
    let out = FramedRep::new(&target, v, w, edges, t)?;
    let verts: Vec<usize> = x0.vertices().iter().filter(|&&k| k != ipp).map(|&k| down(k)).collect();
    let x0c = ElasticSubgraph::new(&target, &verts)?;
    Ok((out, x0c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interior_string(len: usize) -> (Gcm, ElasticSubgraph) {
        let g = Gcm::type_a(len);
        let verts: Vec<usize> = (1..len - 1).collect();
        let x0 = ElasticSubgraph::new(&g, &verts).unwrap();
        (g, x0)
    }

    #[test]
    fn empty_and_single_segments() {
        let z = build_string_rep(4, &[]).unwrap();
        assert!(z.v().iter().all(|&d| d == 0));
        assert!(z.is_nqr());

        let r = build_string_rep(5, &[Segment::x(1, 3)]).unwrap();
        assert_eq!(r.v(), &[0, 1, 1, 1, 0]);
        assert_eq!(r.w(), &[0, 1, 0, 0, 0]);
        assert_eq!(r.epsilon_profile(), vec![0, 0, 0, 1, 0]);
        assert!(r.is_nqr());

        let r = build_string_rep(5, &[Segment::y(0, 2)]).unwrap();
        assert_eq!(r.epsilon_profile(), vec![1, 0, 0, 0, 0]);
        assert!(r.is_nqr());
        assert!(matches!(build_string_rep(3, &[Segment::x(2, 1)]), Err(QuiverError::InconsistentPattern(_))));
        assert!(matches!(build_string_rep(3, &[Segment::y(0, 3)]), Err(QuiverError::InconsistentPattern(_))));
    }

    #[test]
    fn crossing_segments_satisfy_mm() {
        let r = build_string_rep(6, &[Segment::x(0, 4), Segment::y(1, 5)]).unwrap();
        assert!(r.check_mm().holds);
        assert!(r.is_nqr());
        assert_eq!(r.v(), &[1, 2, 2, 2, 2, 1]);
    }

    #[test]
    fn decomposition_of_depth_one_string() {
        // A_9 with X_0 = {2..8}
        let (_, x0) = interior_string(9);
        let r = build_string_rep(9, &[Segment::x(0, 8)]).unwrap();
        let d = string_decompose(&r, &x0, 4, 1).unwrap();
        assert_eq!((d.im_x.cols(), d.im_y.cols()), (1, 0));
        let zero = build_string_rep(9, &[]).unwrap();
        let d = string_decompose(&zero, &x0, 4, 1).unwrap();
        assert_eq!((d.im_x.cols(), d.im_y.cols()), (0, 0));
        assert!(matches!(string_decompose(&r, &x0, 2, 1), Err(QuiverError::PreconditionViolated(_))));
    }

    #[test]
    fn decomposition_with_both_summands() {
        let (_, x0) = interior_string(11);
        let r = build_string_rep(11, &[Segment::x(0, 10), Segment::y(0, 10)]).unwrap();
        let d = string_decompose(&r.random_basis_change(9), &x0, 5, 2).unwrap();
        assert_eq!((d.im_x.cols(), d.im_y.cols()), (1, 1));
        assert!(matches!(string_decompose(&r, &x0, 5, 1), Err(QuiverError::PreconditionViolated(_))));
    }

    #[test]
    fn stretch_then_contract() {
        let (_, x0) = interior_string(9);
        let r = build_string_rep(9, &[Segment::x(0, 8), Segment::x(0, 0), Segment::y(8, 8)]).unwrap();
        for rep in [r.clone(), r.random_basis_change(1)] {
            let (st, x0p) = stretch(&rep, &x0, 4, 1).unwrap();
            assert_eq!(st.rank(), 10);
            assert!(st.is_nqr());
            let mut expected = rep.epsilon_profile();
            expected.insert(5, 0);
            assert_eq!(st.epsilon_profile(), expected);
            let (back, x0c) = contract(&st, &x0p, (4, 5), 1).unwrap();
            assert_eq!(back, rep);
            assert_eq!(x0c, x0);
        }
    }

    #[test]
    fn stretch_zero_rep() {
        let (_, x0) = interior_string(9);
        let z = build_string_rep(9, &[]).unwrap();
        let (st, x0p) = stretch(&z, &x0, 4, 1).unwrap();
        assert!(st.v().iter().all(|&d| d == 0));
        assert_eq!(contract(&st, &x0p, (4, 5), 1).unwrap().0, z);
    }

    #[test]
    fn contract_rejects_degenerate_edge() {
        let (_, x0) = interior_string(9);
        let r = build_string_rep(9, &[Segment::x(0, 8)]).unwrap();
        let (mut st, x0p) = stretch(&r, &x0, 4, 1).unwrap();
        st.set_arrow(5, 4, Mat::zeros(1, 1)).unwrap();
        assert!(matches!(contract(&st, &x0p, (4, 5), 1), Err(QuiverError::NotContractible(_))));
    }
}

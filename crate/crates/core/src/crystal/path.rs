use std::fmt;

use num::rational::Ratio;
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lattice::{Gcm, PairingVector, RootVector};

use super::CrystalError;

pub type Q = Ratio<i64>;

/// A piecewise-linear Littelmann path `t -> t·μ - Σ_j o_j(t) α_j`, stored by
/// its breakpoints in root-offset coordinates.
///
/// Values are always canonical: times strictly increase from 0 to 1, and no
/// two consecutive segments are collinear.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LSPath {
    times: Vec<Q>,
    offsets: Vec<Vec<Q>>,
}

impl LSPath {
    /// The straight path to the highest weight.
    pub fn straight(rank: usize) -> Self {
        LSPath { times: vec![Q::zero(), Q::one()], offsets: vec![vec![Q::zero(); rank]; 2] }
    }

    /// Builds a path from raw breakpoints and canonicalizes it.
    pub fn from_breakpoints(times: Vec<Q>, offsets: Vec<Vec<Q>>) -> Result<Self, CrystalError> {
        let bad = |msg: &str| Err(CrystalError::MalformedPath(msg.to_string()));
        if times.len() < 2 || times.len() != offsets.len() {
            return bad("need at least two breakpoints with matching offsets");
        }
        let rank = offsets[0].len();
        if offsets.iter().any(|o| o.len() != rank) {
            return bad("ragged offsets");
        }
        if !times[0].is_zero() || !times.last().unwrap().is_one() {
            return bad("times must run from 0 to 1");
        }
        if times.windows(2).any(|w| w[0] > w[1]) {
            return bad("times must be nondecreasing");
        }
        if offsets[0].iter().any(|o| !o.is_zero()) {
            return bad("path must start at offset 0");
        }
        let mut p = LSPath { times, offsets };
        p.canonicalize();
        Ok(p)
    }

    pub fn times(&self) -> &[Q] {
        &self.times
    }

    pub fn offsets(&self) -> &[Vec<Q>] {
        &self.offsets
    }

    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    pub fn rank(&self) -> usize {
        self.offsets[0].len()
    }

    /// Offset at time 1 if it is a nonnegative integer vector.
    pub fn endpoint(&self) -> Option<RootVector> {
        let last = self.offsets.last().unwrap();
        if last.iter().any(|q| !q.is_integer()) {
            return None;
        }
        RootVector::new(last.iter().map(|q| q.to_integer()).collect()).ok()
    }

    /// `h_i(t) = t μ_i - Σ_j C_ij o_j(t)` at every breakpoint.
    pub fn heights(&self, gcm: &Gcm, mu: &PairingVector, i: usize) -> Vec<Q> {
        self.times
            .iter()
            .zip(&self.offsets)
            .map(|(t, o)| pairing_at(gcm, mu, i, t, o))
            .collect()
    }

    fn canonicalize(&mut self) {
        let mut times: Vec<Q> = Vec::with_capacity(self.times.len());
        let mut offsets: Vec<Vec<Q>> = Vec::with_capacity(self.times.len());
        for (t, o) in self.times.drain(..).zip(self.offsets.drain(..)) {
            if times.last() == Some(&t) {
                continue;
            }
            if times.len() >= 2 {
                let k = times.len();
                if collinear(&times[k - 2], &offsets[k - 2], &times[k - 1], &offsets[k - 1], &t, &o) {
                    times.pop();
                    offsets.pop();
                }
            }
            times.push(t);
            offsets.push(o);
        }
        self.times = times;
        self.offsets = offsets;
    }

    /// Offsets with coordinate `i` shifted by `sign * c_k` at each breakpoint.
    fn shifted(times: Vec<Q>, mut offsets: Vec<Vec<Q>>, i: usize, shift: &[Q], sign: i64) -> LSPath {
        for (o, c) in offsets.iter_mut().zip(shift) {
            o[i] += c * sign;
        }
        let mut p = LSPath { times, offsets };
        p.canonicalize();
        p
    }

    pub fn corrupt_for_testing(&mut self, i: usize, by: Q) {
        let last = self.offsets.len() - 1;
        self.offsets[last][i] += by;
    }
}

fn pairing_at(gcm: &Gcm, mu: &PairingVector, i: usize, t: &Q, o: &[Q]) -> Q {
    let mut h = t * mu[i];
    for (j, oj) in o.iter().enumerate() {
        let c = gcm.entry(i, j);
        if c != 0 {
            h -= oj * c;
        }
    }
    h
}

fn collinear(ta: &Q, oa: &[Q], tb: &Q, ob: &[Q], tc: &Q, oc: &[Q]) -> bool {
    let d1 = tb - ta;
    let d2 = tc - tb;
    oa.iter().zip(ob).zip(oc).all(|((a, b), c)| (b - a) * d2 == (c - b) * d1)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Raise,
    Lower,
}

/// Refine `path` at every time where `h_i` crosses one of `levels` strictly
/// inside a segment; returns the refined breakpoints with their heights.
fn refine(path: &LSPath, h: &[Q], levels: [Q; 2]) -> (Vec<Q>, Vec<Vec<Q>>, Vec<Q>) {
    let mut times = Vec::with_capacity(path.times.len() + 2);
    let mut offsets = Vec::with_capacity(path.times.len() + 2);
    let mut hs = Vec::with_capacity(path.times.len() + 2);
    for k in 0..path.times.len() {
        times.push(path.times[k]);
        offsets.push(path.offsets[k].clone());
        hs.push(h[k]);
        if k + 1 == path.times.len() {
            break;
        }
        let (a, b) = (h[k], h[k + 1]);
        let mut crossings: Vec<Q> = levels
            .iter()
            .filter(|&&l| (a < l && l < b) || (b < l && l < a))
            .map(|&l| (l - a) / (b - a))
            .collect();
        crossings.sort();
        crossings.dedup();
        let dt = path.times[k + 1] - path.times[k];
        for frac in crossings {
            times.push(path.times[k] + dt * frac);
            offsets.push(
                path.offsets[k]
                    .iter()
                    .zip(&path.offsets[k + 1])
                    .map(|(x, y)| x + (y - x) * frac)
                    .collect(),
            );
            hs.push(a + (b - a) * frac);
        }
    }
    (times, offsets, hs)
}

fn clamp01(q: Q) -> Q {
    if q.is_negative() {
        Q::zero()
    } else if q > Q::one() {
        Q::one()
    } else {
        q
    }
}

fn root_operator(gcm: &Gcm, mu: &PairingVector, x: &LSPath, i: usize, op: Op) -> Option<LSPath> {
    let h = x.heights(gcm, mu, i);
    let m = *h.iter().min().unwrap();
    let end = *h.last().unwrap();
    match op {
        Op::Raise if m > -Q::one() => return None,
        Op::Lower if end - m < Q::one() => return None,
        _ => {}
    }
    let (times, offsets, hs) = refine(x, &h, [m, m + 1]);
    let n = hs.len();
    let mut shift = vec![Q::zero(); n];
    match op {
        Op::Raise => {
            let mut run = hs[0];
            for k in 0..n {
                run = run.min(hs[k]);
                shift[k] = clamp01(m + 1 - run);
            }
        }
        Op::Lower => {
            let mut run = hs[n - 1];
            for k in (0..n).rev() {
                run = run.min(hs[k]);
                shift[k] = clamp01(run - m);
            }
        }
    }
    let sign = if op == Op::Raise { -1 } else { 1 };
    Some(LSPath::shifted(times, offsets, i, &shift, sign))
}

/// Kashiwara raising operator `ẽ_i`.
pub fn e_op(gcm: &Gcm, mu: &PairingVector, x: &LSPath, i: usize) -> Option<LSPath> {
    root_operator(gcm, mu, x, i, Op::Raise)
}

/// Kashiwara lowering operator `f̃_i`.
pub fn f_op(gcm: &Gcm, mu: &PairingVector, x: &LSPath, i: usize) -> Option<LSPath> {
    root_operator(gcm, mu, x, i, Op::Lower)
}

/// `ε_i = -min_t h_i(t)` (the minimum is a nonpositive integer on LS paths).
pub fn epsilon(gcm: &Gcm, mu: &PairingVector, x: &LSPath, i: usize) -> i64 {
    let m = x.heights(gcm, mu, i).into_iter().min().unwrap();
    (-m.floor()).to_integer().max(0)
}

/// `φ_i = ε_i + h_i(1)`.
pub fn phi(gcm: &Gcm, mu: &PairingVector, x: &LSPath, i: usize) -> i64 {
    let h = x.heights(gcm, mu, i);
    let m = h.iter().min().unwrap().floor();
    (h.last().unwrap() - m).to_integer()
}

impl fmt::Debug for LSPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LSPath[")?;
        for (k, (t, o)) in self.times.iter().zip(&self.offsets).enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{t}:")?;
            for (j, q) in o.iter().enumerate() {
                write!(f, "{}{q}", if j == 0 { "" } else { "," })?;
            }
        }
        write!(f, "]")
    }
}

fn q_to_string(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub(crate) fn q_from_str(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.trim().parse::<i64>().ok()?, q.trim().parse::<i64>().ok()?);
            (q != 0).then(|| Q::new(p, q))
        }
        None => s.trim().parse::<i64>().ok().map(Q::from_integer),
    }
}

// Serialized as a list of breakpoints `[t, o_1, ..., o_n]`, rationals as "p/q".
impl Serialize for LSPath {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .times
            .iter()
            .zip(&self.offsets)
            .map(|(t, o)| std::iter::once(t).chain(o).map(q_to_string).collect())
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LSPath {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(de)?;
        let mut times = Vec::with_capacity(rows.len());
        let mut offsets = Vec::with_capacity(rows.len());
        for row in rows {
            let mut qs = row.iter().map(|s| q_from_str(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))));
            times.push(qs.next().ok_or_else(|| D::Error::custom("empty breakpoint"))??);
            offsets.push(qs.collect::<Result<Vec<_>, _>>()?);
        }
        LSPath::from_breakpoints(times, offsets).map_err(D::Error::custom)
    }
}

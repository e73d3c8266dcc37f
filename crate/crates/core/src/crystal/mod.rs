//! Littelmann path realization of highest-weight crystals, truncated
//! generation and the crystal-counting multiplicities.
//!
//! Paths are stored as root offsets from the highest weight, so everything
//! needed from the weight lattice is recovered through the Cartan matrix and
//! degenerate diagrams need no realization.

mod cache;
mod path;
mod verify;

use std::collections::{BTreeMap, HashSet};

use crate::lattice::{weight_pairing, ElasticSubgraph, Gcm, PairingVector, RootVector};

pub use cache::{cache_key, CacheStats, CrystalCache};
pub use path::{e_op, epsilon, f_op, phi, LSPath, Q};
pub use verify::{verify_crystal_axioms, AxiomReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrystalError {
    #[error("highest weight is not dominant")]
    NotDominant,
    #[error("vector length {found} does not match rank {expected}")]
    Length { expected: usize, found: usize },
    #[error("query offset lies outside the generated bound")]
    OutsideBound,
    #[error("crystal generation exceeded {0} elements")]
    TooLarge(usize),
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("cache: {0}")]
    Cache(String),
}

/// The crystal `B(μ)` of a symmetrizable GCM, queried through its path model.
#[derive(Clone, Debug)]
pub struct PathCrystal {
    gcm: Gcm,
    mu: PairingVector,
}

impl PathCrystal {
    pub fn new(gcm: &Gcm, mu: &PairingVector) -> Result<Self, CrystalError> {
        if mu.len() != gcm.rank() {
            return Err(CrystalError::Length { expected: gcm.rank(), found: mu.len() });
        }
        if !mu.is_dominant() {
            return Err(CrystalError::NotDominant);
        }
        Ok(PathCrystal { gcm: gcm.clone(), mu: mu.clone() })
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    pub fn mu(&self) -> &PairingVector {
        &self.mu
    }

    pub fn highest_path(&self) -> LSPath {
        LSPath::straight(self.gcm.rank())
    }

    pub fn e(&self, x: &LSPath, i: usize) -> Option<LSPath> {
        e_op(&self.gcm, &self.mu, x, i)
    }

    pub fn f(&self, x: &LSPath, i: usize) -> Option<LSPath> {
        f_op(&self.gcm, &self.mu, x, i)
    }

    pub fn epsilon(&self, x: &LSPath, i: usize) -> i64 {
        epsilon(&self.gcm, &self.mu, x, i)
    }

    pub fn phi(&self, x: &LSPath, i: usize) -> i64 {
        phi(&self.gcm, &self.mu, x, i)
    }

    /// Pairings of `wt(x)`.
    pub fn weight(&self, x: &LSPath) -> Option<PairingVector> {
        x.endpoint().map(|v| weight_pairing(&self.mu, &v, &self.gcm))
    }

    /// BFS from the highest path, discarding anything whose endpoint offset
    /// exceeds `bound`; `None` generates the whole crystal, stopping with an
    /// error past `limit` elements.
    pub fn generate(&self, bound: Option<&RootVector>, limit: usize) -> Result<CrystalSlice, CrystalError> {
        let n = self.gcm.rank();
        if let Some(b) = bound {
            if b.len() != n {
                return Err(CrystalError::Length { expected: n, found: b.len() });
            }
        }
        let top = self.highest_path();
        let mut seen: HashSet<LSPath> = HashSet::from([top.clone()]);
        let mut elements = vec![top];
        let mut frontier = 0..1;
        // each f̃_i raises the offset height by exactly one, so BFS layers are heights
        while !frontier.is_empty() {
            let start = elements.len();
            for k in frontier.clone() {
                for i in 0..n {
                    if let Some(b) = bound {
                        if elements[k].offsets().last().unwrap()[i] >= Q::from_integer(b[i]) {
                            continue;
                        }
                    }
                    if let Some(y) = self.f(&elements[k], i) {
                        if seen.insert(y.clone()) {
                            elements.push(y);
                            if elements.len() > limit {
                                return Err(CrystalError::TooLarge(limit));
                            }
                        }
                    }
                }
            }
            frontier = start..elements.len();
        }
        let endpoints = elements
            .iter()
            .map(|x| x.endpoint().ok_or_else(|| CrystalError::MalformedPath("non-integral endpoint".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CrystalSlice {
            crystal: self.clone(),
            bound: bound.cloned(),
            elements,
            endpoints,
        })
    }
}

pub const DEFAULT_LIMIT: usize = 5_000_000;

/// All elements of `B(μ)` with endpoint offset `<= bound`, in BFS order.
#[derive(Clone, Debug)]
pub struct CrystalSlice {
    crystal: PathCrystal,
    bound: Option<RootVector>,
    elements: Vec<LSPath>,
    endpoints: Vec<RootVector>,
}

impl CrystalSlice {
    pub(crate) fn from_parts(crystal: PathCrystal, bound: Option<RootVector>, elements: Vec<LSPath>) -> Result<Self, CrystalError> {
        let endpoints = elements
            .iter()
            .map(|x| x.endpoint().ok_or_else(|| CrystalError::MalformedPath("non-integral endpoint".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CrystalSlice { crystal, bound, elements, endpoints })
    }

    pub fn crystal(&self) -> &PathCrystal {
        &self.crystal
    }

    pub fn bound(&self) -> Option<&RootVector> {
        self.bound.as_ref()
    }

    pub fn elements(&self) -> &[LSPath] {
        &self.elements
    }

    pub fn endpoints(&self) -> &[RootVector] {
        &self.endpoints
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &LSPath) -> bool {
        self.elements.contains(x)
    }

    fn check_query(&self, v: &RootVector) -> Result<(), CrystalError> {
        let n = self.crystal.gcm.rank();
        if v.len() != n {
            return Err(CrystalError::Length { expected: n, found: v.len() });
        }
        match &self.bound {
            Some(b) if !v.is_below(b) => Err(CrystalError::OutsideBound),
            _ => Ok(()),
        }
    }

    fn count_where(&self, v: &RootVector, pred: impl Fn(&LSPath) -> bool) -> Result<u64, CrystalError> {
        self.check_query(v)?;
        Ok(self
            .elements
            .iter()
            .zip(&self.endpoints)
            .filter(|(x, end)| *end == v && pred(x))
            .count() as u64)
    }

    /// `dim V(μ)_{μ - v}`.
    pub fn weight_multiplicity(&self, v: &RootVector) -> Result<u64, CrystalError> {
        self.count_where(v, |_| true)
    }

    /// Multiplicity of `V(μ + ν - v)` in `V(μ) ⊗ V(ν)`, `y = ω(ν)`.
    pub fn tensor_multiplicity(&self, y: &PairingVector, v: &RootVector) -> Result<u64, CrystalError> {
        let n = self.crystal.gcm.rank();
        if !y.is_dominant() {
            return Err(CrystalError::NotDominant);
        }
        self.count_where(v, |x| (0..n).all(|i| self.crystal.epsilon(x, i) <= y[i]))
    }

    /// Multiplicity of the `g_0 + t` highest weight `μ - v` in `V(μ)`.
    pub fn branching_multiplicity(&self, v: &RootVector, x0: &[usize]) -> Result<u64, CrystalError> {
        self.count_where(v, |x| x0.iter().all(|&i| self.crystal.epsilon(x, i) == 0))
    }

    pub fn weight_table(&self) -> BTreeMap<RootVector, u64> {
        let mut out = BTreeMap::new();
        for end in &self.endpoints {
            *out.entry(end.clone()).or_insert(0) += 1;
        }
        out
    }

    /// `v -> c` for every `v` in the slice.
    pub fn tensor_table(&self, y: &PairingVector) -> BTreeMap<RootVector, u64> {
        let n = self.crystal.gcm.rank();
        let mut out = BTreeMap::new();
        for (x, end) in self.elements.iter().zip(&self.endpoints) {
            if (0..n).all(|i| self.crystal.epsilon(x, i) <= y[i]) {
                *out.entry(end.clone()).or_insert(0) += 1;
            }
        }
        out
    }

    /// `v -> b` for every `v` in the slice.
    pub fn branching_table(&self, x0: &[usize]) -> BTreeMap<RootVector, u64> {
        let mut out = BTreeMap::new();
        for (x, end) in self.elements.iter().zip(&self.endpoints) {
            if x0.iter().all(|&i| self.crystal.epsilon(x, i) == 0) {
                *out.entry(end.clone()).or_insert(0) += 1;
            }
        }
        out
    }
}

pub fn highest_path(gcm: &Gcm, mu: &PairingVector) -> Result<LSPath, CrystalError> {
    Ok(PathCrystal::new(gcm, mu)?.highest_path())
}

pub fn generate(gcm: &Gcm, mu: &PairingVector, bound: &RootVector) -> Result<CrystalSlice, CrystalError> {
    PathCrystal::new(gcm, mu)?.generate(Some(bound), DEFAULT_LIMIT)
}

pub fn weight_multiplicity(gcm: &Gcm, mu: &PairingVector, v: &RootVector) -> Result<u64, CrystalError> {
    generate(gcm, mu, v)?.weight_multiplicity(v)
}

pub fn tensor_multiplicity(gcm: &Gcm, w: &PairingVector, y: &PairingVector, v: &RootVector) -> Result<u64, CrystalError> {
    if !y.is_dominant() {
        return Err(CrystalError::NotDominant);
    }
    generate(gcm, w, v)?.tensor_multiplicity(y, v)
}

pub fn branching_multiplicity(gcm: &Gcm, w: &PairingVector, v: &RootVector, x0: &ElasticSubgraph) -> Result<u64, CrystalError> {
    generate(gcm, w, v)?.branching_multiplicity(v, x0.vertices())
}

//! Classical finite-type machinery kept independent of the path model:
//! Freudenthal multiplicities, the Weyl dimension formula and brute-force
//! tensor and Levi branching decompositions.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::lattice::{ElasticSubgraph, Gcm, PairingVector, RootVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("Cartan matrix is not of finite type")]
    NotFiniteType,
    #[error("weight is not dominant")]
    NotDominant,
    #[error("vector length {found} does not match rank {expected}")]
    Length { expected: usize, found: usize },
}

/// Positive definiteness of `(d_i C_ij)` by exact elimination.
pub fn is_finite_type(gcm: &Gcm) -> bool {
    let n = gcm.rank();
    let d = gcm.symmetrizer();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(BigInt::from(d[i] * gcm.entry(i, j)))).collect())
        .collect();
    // leading minors are positive iff every pivot of unpivoted elimination is
    for k in 0..n {
        if !a[k][k].is_positive() {
            return false;
        }
        for r in k + 1..n {
            let f = &a[r][k] / &a[k][k];
            if f.is_zero() {
                continue;
            }
            for c in k..n {
                let t = &f * &a[k][c];
                a[r][c] -= t;
            }
        }
    }
    true
}

pub fn positive_roots(gcm: &Gcm) -> Result<Vec<RootVector>, OracleError> {
    if !is_finite_type(gcm) {
        return Err(OracleError::NotFiniteType);
    }
    let n = gcm.rank();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    let mut out = Vec::new();
    while let Some(v) = queue.pop_front() {
        for i in 0..n {
            let cv: i64 = (0..n).map(|j| gcm.entry(i, j) * v[j]).sum();
            let mut w = v.clone();
            w[i] -= cv;
            if w.iter().all(|&x| x >= 0) && w.iter().any(|&x| x > 0) && seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
        out.push(v);
    }
    out.sort_by_key(|v| (v.iter().sum::<i64>(), std::cmp::Reverse(v.clone())));
    Ok(out.into_iter().map(|v| RootVector::new(v).unwrap()).collect())
}

/// Weight multiplicities of `V(μ)` keyed by offset `v` (weight `μ - Σ v_i α_i`).
pub type Character = BTreeMap<RootVector, u64>;

/// A finite root system together with a per-instance memo of characters.
#[derive(Debug)]
pub struct FiniteRootSystem {
    gcm: Gcm,
    positive_roots: Vec<RootVector>,
    characters: Mutex<HashMap<PairingVector, Arc<Character>>>,
}

impl Clone for FiniteRootSystem {
    fn clone(&self) -> Self {
        FiniteRootSystem {
            gcm: self.gcm.clone(),
            positive_roots: self.positive_roots.clone(),
            characters: Mutex::new(self.characters.lock().unwrap().clone()),
        }
    }
}

impl FiniteRootSystem {
    pub fn new(gcm: &Gcm) -> Result<Self, OracleError> {
        Ok(FiniteRootSystem {
            gcm: gcm.clone(),
            positive_roots: positive_roots(gcm)?,
            characters: Mutex::new(HashMap::new()),
        })
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    pub fn positive_roots(&self) -> &[RootVector] {
        &self.positive_roots
    }

    /// `ρ(α_i^∨) = 1` for every vertex.
    pub fn rho_pairings(&self) -> PairingVector {
        PairingVector::new(vec![1; self.gcm.rank()])
    }

    /// `(a, b)` for root-lattice vectors, with `(α_i, α_j) = d_i C_ij`.
    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        let n = self.gcm.rank();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i] * self.gcm.form(i, j) * b[j]).sum()
    }

    fn check(&self, mu: &PairingVector) -> Result<(), OracleError> {
        if mu.len() != self.gcm.rank() {
            return Err(OracleError::Length { expected: self.gcm.rank(), found: mu.len() });
        }
        if !mu.is_dominant() {
            return Err(OracleError::NotDominant);
        }
        Ok(())
    }

    /// `(λ, a)` where `λ` has pairings `p`: `Σ a_i d_i p_i`.
    fn pair(&self, p: &[i64], a: &[i64]) -> i64 {
        let d = self.gcm.symmetrizer();
        (0..p.len()).map(|i| a[i] * d[i] * p[i]).sum()
    }

    fn pairings_at(&self, mu: &[i64], gamma: &[i64]) -> Vec<i64> {
        let n = self.gcm.rank();
        (0..n).map(|i| mu[i] - (0..n).map(|j| self.gcm.entry(i, j) * gamma[j]).sum::<i64>()).collect()
    }

    /// Reflect `μ - γ` into the dominant chamber; `None` if it leaves `μ - Q_+`.
    fn to_dominant(&self, mu: &[i64], gamma: &[i64]) -> Option<Vec<i64>> {
        let mut g = gamma.to_vec();
        loop {
            let p = self.pairings_at(mu, &g);
            match p.iter().position(|&x| x < 0) {
                None => return Some(g),
                Some(i) => {
                    g[i] += p[i];
                    if g[i] < 0 {
                        return None;
                    }
                }
            }
        }
    }

    fn freudenthal_memo(&self, mu: &[i64], gamma: &[i64], memo: &mut HashMap<Vec<i64>, u64>) -> u64 {
        let Some(g) = self.to_dominant(mu, gamma) else {
            return 0;
        };
        if g.iter().all(|&x| x == 0) {
            return 1;
        }
        if let Some(&m) = memo.get(&g) {
            return m;
        }
        let d = self.gcm.symmetrizer();
        let n = self.gcm.rank();
        let cg: Vec<i64> = (0..n).map(|i| (0..n).map(|j| self.gcm.entry(i, j) * g[j]).sum()).collect();
        let lhs: i128 = (0..n).map(|i| (g[i] * d[i] * (2 * mu[i] + 2 - cg[i])) as i128).sum();
        let mut rhs: i128 = 0;
        for a in &self.positive_roots {
            let a = a.coeffs();
            let mut k = 1;
            loop {
                let gk: Vec<i64> = (0..n).map(|i| g[i] - k * a[i]).collect();
                if gk.iter().any(|&x| x < 0) {
                    break;
                }
                let m = self.freudenthal_memo(mu, &gk, memo);
                if m > 0 {
                    let cgk: Vec<i64> = (0..n).map(|i| (0..n).map(|j| self.gcm.entry(i, j) * gk[j]).sum()).collect();
                    let term: i64 = (0..n).map(|i| a[i] * d[i] * (mu[i] - cgk[i])).sum();
                    rhs += 2 * m as i128 * term as i128;
                }
                k += 1;
            }
        }
        let m = if lhs <= 0 {
            0
        } else {
            debug_assert_eq!(rhs % lhs, 0);
            (rhs / lhs) as u64
        };
        memo.insert(g, m);
        m
    }

    pub fn freudenthal(&self, mu: &PairingVector, v: &RootVector) -> Result<u64, OracleError> {
        self.check(mu)?;
        if v.len() != mu.len() {
            return Err(OracleError::Length { expected: mu.len(), found: v.len() });
        }
        Ok(self.freudenthal_memo(mu.values(), v.coeffs(), &mut HashMap::new()))
    }

    pub fn weyl_dim(&self, mu: &PairingVector) -> Result<u64, OracleError> {
        self.check(mu)?;
        let shifted: Vec<i64> = mu.values().iter().map(|x| x + 1).collect();
        let ones = vec![1; mu.len()];
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for a in &self.positive_roots {
            num *= self.pair(&shifted, a.coeffs());
            den *= self.pair(&ones, a.coeffs());
        }
        let q: BigInt = num / den;
        Ok(u64::try_from(q).expect("dimension fits in u64"))
    }

    /// Full character of `V(μ)`, memoized on this instance.
    pub fn character(&self, mu: &PairingVector) -> Result<Arc<Character>, OracleError> {
        self.check(mu)?;
        if let Some(c) = self.characters.lock().unwrap().get(mu) {
            return Ok(c.clone());
        }
        let n = self.gcm.rank();
        let mut memo = HashMap::new();
        let mut out = Character::new();
        let mut queue = VecDeque::from([vec![0i64; n]]);
        let mut seen: HashSet<Vec<i64>> = HashSet::from([vec![0i64; n]]);
        while let Some(g) = queue.pop_front() {
            let m = self.freudenthal_memo(mu.values(), &g, &mut memo);
            if m == 0 {
                continue;
            }
            for i in 0..n {
                let mut h = g.clone();
                h[i] += 1;
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
            out.insert(RootVector::new(g).unwrap(), m);
        }
        let out = Arc::new(out);
        self.characters.lock().unwrap().insert(mu.clone(), out.clone());
        Ok(out)
    }

    /// `V(μ) ⊗ V(ν) = ⊕ V(λ)^{c_λ}` by convolving characters and peeling off
    /// highest weights.
    pub fn tensor_decompose_brute(&self, mu: &PairingVector, nu: &PairingVector) -> Result<BTreeMap<PairingVector, u64>, OracleError> {
        let cm = self.character(mu)?;
        let cn = self.character(nu)?;
        let mut prod: BTreeMap<RootVector, i64> = BTreeMap::new();
        for (a, x) in cm.iter() {
            for (b, y) in cn.iter() {
                *prod.entry(a + b).or_insert(0) += (x * y) as i64;
            }
        }
        let top: Vec<i64> = mu.values().iter().zip(nu.values()).map(|(a, b)| a + b).collect();
        let mut out = BTreeMap::new();
        while let Some(off) = lowest_positive(&prod) {
            let lambda = PairingVector::new(self.pairings_at(&top, off.coeffs()));
            let c = prod[&off];
            let ch = self.character(&lambda).expect("highest remaining weight is dominant");
            for (g, m) in ch.iter() {
                let e = prod.entry(&off + g).or_insert(0);
                *e -= c * *m as i64;
            }
            prod.retain(|_, x| *x != 0);
            out.insert(lambda, c as u64);
        }
        debug_assert!(prod.values().all(|&x| x == 0));
        Ok(out)
    }

    /// `g_0 + t` highest weights of `V(μ)` for the Levi of `x0`, keyed by
    /// offset `v` (weight `μ - Σ v_i α_i`).
    pub fn branching_brute(&self, mu: &PairingVector, x0: &ElasticSubgraph) -> Result<BTreeMap<RootVector, u64>, OracleError> {
        let full = self.character(mu)?;
        let verts = x0.vertices();
        if verts.is_empty() {
            return Ok((*full).clone());
        }
        let sub = FiniteRootSystem::new(&self.gcm.restrict(verts))?;
        let mut rest: BTreeMap<RootVector, i64> = full.iter().map(|(k, v)| (k.clone(), *v as i64)).collect();
        let mut out = BTreeMap::new();
        while let Some(off) = lowest_positive(&rest) {
            let c = rest[&off];
            let p = self.pairings_at(mu.values(), off.coeffs());
            let local = PairingVector::new(verts.iter().map(|&i| p[i]).collect());
            let ch = sub.character(&local).expect("Levi highest weight is dominant on x0");
            for (g, m) in ch.iter() {
                let mut shift = off.coeffs().to_vec();
                for (k, &i) in verts.iter().enumerate() {
                    shift[i] += g[k];
                }
                *rest.entry(RootVector::new(shift).unwrap()).or_insert(0) -= c * *m as i64;
            }
            rest.retain(|_, x| *x != 0);
            out.insert(off, c as u64);
        }
        Ok(out)
    }
}

fn lowest_positive(table: &BTreeMap<RootVector, i64>) -> Option<RootVector> {
    table.iter().filter(|(_, &x)| x > 0).min_by_key(|(k, _)| (k.height(), (*k).clone())).map(|(k, _)| k.clone())
}

pub fn freudenthal(gcm: &Gcm, mu: &PairingVector, v: &RootVector) -> Result<u64, OracleError> {
    FiniteRootSystem::new(gcm)?.freudenthal(mu, v)
}

pub fn weyl_dim(gcm: &Gcm, mu: &PairingVector) -> Result<u64, OracleError> {
    FiniteRootSystem::new(gcm)?.weyl_dim(mu)
}

pub fn tensor_decompose_brute(gcm: &Gcm, mu: &PairingVector, nu: &PairingVector) -> Result<BTreeMap<PairingVector, u64>, OracleError> {
    FiniteRootSystem::new(gcm)?.tensor_decompose_brute(mu, nu)
}

pub fn branching_brute(gcm: &Gcm, mu: &PairingVector, x0: &ElasticSubgraph) -> Result<BTreeMap<RootVector, u64>, OracleError> {
    FiniteRootSystem::new(gcm)?.branching_brute(mu, x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[i64]) -> PairingVector {
        PairingVector::new(v.to_vec())
    }

    fn rv(v: &[i64]) -> RootVector {
        RootVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn finite_type_classification() {
        assert!(is_finite_type(&Gcm::type_a(3)));
        assert!(is_finite_type(&Gcm::type_b(4)));
        assert!(is_finite_type(&Gcm::type_d(5)));
        assert!(is_finite_type(&Gcm::new(vec![vec![2, -1], vec![-3, 2]]).unwrap()));
        assert!(!is_finite_type(&Gcm::new(vec![vec![2, -2], vec![-2, 2]]).unwrap()));
        assert!(!is_finite_type(&Gcm::new(vec![vec![2, -3], vec![-3, 2]]).unwrap()));
    }

    #[test]
    fn root_counts() {
        let count = |g: Gcm| positive_roots(&g).unwrap().len();
        assert_eq!(count(Gcm::type_a(2)), 3);
        assert_eq!(count(Gcm::type_a(3)), 6);
        assert_eq!(count(Gcm::type_b(2)), 4);
        assert_eq!(count(Gcm::type_b(3)), 9);
        assert_eq!(count(Gcm::type_c(3)), 9);
        assert_eq!(count(Gcm::type_d(4)), 12);
        assert_eq!(count(Gcm::new(vec![vec![2, -1], vec![-3, 2]]).unwrap()), 6);
        let a2: Vec<Vec<i64>> = positive_roots(&Gcm::type_a(2)).unwrap().iter().map(|r| r.coeffs().to_vec()).collect();
        assert_eq!(a2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(positive_roots(&Gcm::new(vec![vec![2, -2], vec![-2, 2]]).unwrap()), Err(OracleError::NotFiniteType));
    }

    #[test]
    fn weyl_dimensions() {
        let a2 = FiniteRootSystem::new(&Gcm::type_a(2)).unwrap();
        assert_eq!(a2.weyl_dim(&pv(&[1, 1])).unwrap(), 8);
        assert_eq!(a2.weyl_dim(&pv(&[0, 0])).unwrap(), 1);
        assert_eq!(a2.weyl_dim(&pv(&[3, 0])).unwrap(), 10);
        let b2 = FiniteRootSystem::new(&Gcm::type_b(2)).unwrap();
        assert_eq!(b2.weyl_dim(&pv(&[0, 1])).unwrap(), 4);
        assert_eq!(b2.weyl_dim(&pv(&[1, 0])).unwrap(), 5);
        assert_eq!(b2.weyl_dim(&pv(&[1, 1])).unwrap(), 16);
        let g2 = FiniteRootSystem::new(&Gcm::new(vec![vec![2, -1], vec![-3, 2]]).unwrap()).unwrap();
        let mut dims = [g2.weyl_dim(&pv(&[1, 0])).unwrap(), g2.weyl_dim(&pv(&[0, 1])).unwrap()];
        dims.sort();
        assert_eq!(dims, [7, 14]);
        assert_eq!(weyl_dim(&Gcm::type_d(4), &pv(&[0, 1, 0, 0])).unwrap(), 28);
        assert_eq!(a2.weyl_dim(&pv(&[-1, 0])), Err(OracleError::NotDominant));
    }

    #[test]
    fn freudenthal_examples() {
        let a2 = FiniteRootSystem::new(&Gcm::type_a(2)).unwrap();
        assert_eq!(a2.freudenthal(&pv(&[1, 1]), &rv(&[1, 1])).unwrap(), 2);
        assert_eq!(a2.freudenthal(&pv(&[1, 1]), &rv(&[0, 0])).unwrap(), 1);
        assert_eq!(a2.freudenthal(&pv(&[1, 1]), &rv(&[3, 0])).unwrap(), 0);
        // sl_3 (2,2): zero weight has multiplicity 3
        assert_eq!(a2.freudenthal(&pv(&[2, 2]), &rv(&[2, 2])).unwrap(), 3);
        assert_eq!(freudenthal(&Gcm::type_a(1), &pv(&[2]), &rv(&[1])).unwrap(), 1);
    }

    #[test]
    fn characters_sum_to_dimension() {
        for (g, mu) in [
            (Gcm::type_a(2), vec![2, 1]),
            (Gcm::type_b(2), vec![1, 1]),
            (Gcm::type_b(3), vec![0, 1, 1]),
            (Gcm::type_c(3), vec![1, 0, 1]),
            (Gcm::type_d(4), vec![1, 0, 1, 1]),
            (Gcm::new(vec![vec![2, -1], vec![-3, 2]]).unwrap(), vec![1, 1]),
        ] {
            let f = FiniteRootSystem::new(&g).unwrap();
            let mu = pv(&mu);
            let total: u64 = f.character(&mu).unwrap().values().sum();
            assert_eq!(total, f.weyl_dim(&mu).unwrap(), "{g:?} {mu:?}");
        }
    }

    #[test]
    fn tensor_examples() {
        let a1 = tensor_decompose_brute(&Gcm::type_a(1), &pv(&[1]), &pv(&[1])).unwrap();
        assert_eq!(a1, BTreeMap::from([(pv(&[0]), 1), (pv(&[2]), 1)]));
        let b2 = tensor_decompose_brute(&Gcm::type_b(2), &pv(&[0, 1]), &pv(&[0, 1])).unwrap();
        assert_eq!(b2.get(&pv(&[0, 0])), Some(&1));
        let f = FiniteRootSystem::new(&Gcm::type_a(2)).unwrap();
        let ad = f.tensor_decompose_brute(&pv(&[1, 1]), &pv(&[1, 1])).unwrap();
        assert_eq!(ad.get(&pv(&[1, 1])), Some(&2));
        let dim: u64 = ad.iter().map(|(l, c)| c * f.weyl_dim(l).unwrap()).sum();
        assert_eq!(dim, 64);
    }

    #[test]
    fn branching_examples() {
        let g = Gcm::type_a(2);
        let f = FiniteRootSystem::new(&g).unwrap();
        let mu = pv(&[1, 1]);
        let x0 = ElasticSubgraph::new(&g, &[1]).unwrap();
        let b = f.branching_brute(&mu, &x0).unwrap();
        assert_eq!(b.get(&rv(&[0, 0])), Some(&1));
        assert_eq!(b.get(&rv(&[1, 1])), Some(&1));
        assert_eq!(b.values().sum::<u64>(), 4);
        let none = f.branching_brute(&mu, &ElasticSubgraph::empty(&g)).unwrap();
        assert_eq!(&none, &*f.character(&mu).unwrap());
    }
}

use std::fmt;
use std::ops::{Add, Index};

use serde::{Deserialize, Serialize};

use super::{Gcm, LatticeError};

/// Coroot pairings `i -> λ(α_i^∨)` of a weight.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PairingVector(Vec<i64>);

/// Simple-root coefficients of a root-lattice element in the positive cone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct RootVector(Vec<i64>);

impl PairingVector {
    pub fn new(values: Vec<i64>) -> Self {
        PairingVector(values)
    }

    pub fn zero(n: usize) -> Self {
        PairingVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn restrict(&self, verts: &[usize]) -> PairingVector {
        PairingVector(verts.iter().map(|&i| self.0[i]).collect())
    }
}

impl RootVector {
    pub fn new(coeffs: Vec<i64>) -> Result<Self, LatticeError> {
        if let Some(i) = coeffs.iter().position(|&c| c < 0) {
            return Err(LatticeError::NegativeRootCoefficient(i));
        }
        Ok(RootVector(coeffs))
    }

    pub fn zero(n: usize) -> Self {
        RootVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        RootVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `self <= other`.
    pub fn is_below(&self, other: &RootVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self - other` if it stays in the positive cone.
    pub fn checked_sub(&self, other: &RootVector) -> Option<RootVector> {
        let v: Vec<i64> = self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect();
        RootVector::new(v).ok()
    }

    pub fn restrict(&self, verts: &[usize]) -> RootVector {
        RootVector(verts.iter().map(|&i| self.0[i]).collect())
    }

    /// All `u` with `0 <= u <= self`, in lexicographic order.
    pub fn box_below(&self) -> Vec<RootVector> {
        let mut out = vec![Vec::with_capacity(self.len())];
        for &c in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=c).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(RootVector).collect()
    }
}

impl TryFrom<Vec<i64>> for RootVector {
    type Error = LatticeError;
    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        RootVector::new(v)
    }
}

impl From<RootVector> for Vec<i64> {
    fn from(v: RootVector) -> Self {
        v.0
    }
}

impl Index<usize> for PairingVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Index<usize> for RootVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add for &RootVector {
    type Output = RootVector;
    fn add(self, rhs: &RootVector) -> RootVector {
        RootVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for &PairingVector {
    type Output = PairingVector;
    fn add(self, rhs: &PairingVector) -> PairingVector {
        PairingVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for PairingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{:?}", self.0)
    }
}

impl fmt::Debug for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{:?}", self.0)
    }
}

/// `i -> Σ_j C_ij v_j`; the pairing vector of the root-lattice element `v`.
pub fn omega_of_root(v: &[i64], gcm: &Gcm) -> PairingVector {
    let n = gcm.rank();
    PairingVector((0..n).map(|i| (0..n).map(|j| gcm.entry(i, j) * v[j]).sum()).collect())
}

/// Pairings of the weight `μ - α^{-1}(v)`.
pub fn weight_pairing(mu: &PairingVector, v: &RootVector, gcm: &Gcm) -> PairingVector {
    let cv = omega_of_root(v.coeffs(), gcm);
    PairingVector(mu.0.iter().zip(cv.0).map(|(a, b)| a - b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_a1() {
        assert_eq!(omega_of_root(&[1], &Gcm::type_a(1)).values(), &[2]);
    }

    #[test]
    fn omega_b4_spin() {
        // 2ω_4 = α_1 + 2α_2 + 3α_3 + 4α_4
        assert_eq!(omega_of_root(&[1, 2, 3, 4], &Gcm::type_b(4)).values(), &[0, 0, 0, 2]);
    }

    #[test]
    fn omega_zero() {
        assert!(omega_of_root(&[0; 5], &Gcm::type_d(5)).is_zero());
    }

    #[test]
    fn root_vector_rejects_negative() {
        assert!(RootVector::new(vec![1, -1]).is_err());
        assert!(serde_json::from_str::<RootVector>("[0,-2]").is_err());
    }

    #[test]
    fn box_enumeration() {
        let b = RootVector::new(vec![1, 2]).unwrap().box_below();
        assert_eq!(b.len(), 6);
        assert!(b.iter().all(|u| u.is_below(&RootVector::new(vec![1, 2]).unwrap())));
    }
}

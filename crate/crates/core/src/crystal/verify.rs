use std::collections::HashSet;

use num::Zero;
use serde::Serialize;

use super::{CrystalSlice, LSPath, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element: usize,
    pub vertex: usize,
    pub kind: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub elements: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the crystal axioms on every element and vertex of a slice: the
/// partial-inverse law, weight shifts, `φ_i - ε_i = <wt, α_i^∨>`, agreement of
/// `ε_i` with iterated `ẽ_i`, LS integrality, and closure under `ẽ_i`.
pub fn verify_crystal_axioms(slice: &CrystalSlice) -> AxiomReport {
    let crystal = slice.crystal();
    let gcm = crystal.gcm();
    let mu = crystal.mu();
    let n = gcm.rank();
    let members: HashSet<&LSPath> = slice.elements().iter().collect();
    let mut report = AxiomReport { elements: slice.len(), ..Default::default() };
    let mut flag = |element: usize, vertex: usize, kind: &str| {
        report.violations.push(Violation { element, vertex, kind: kind.to_string() });
    };
    let mut checks = 0usize;

    for (k, x) in slice.elements().iter().enumerate() {
        checks += 1;
        let Some(end) = x.endpoint() else {
            flag(k, 0, "endpoint offset is not a nonnegative integer vector");
            continue;
        };
        if x.offsets()[0].iter().any(|q| !q.is_zero()) || !x.times()[0].is_zero() {
            flag(k, 0, "path does not start at the origin");
        }
        let wt = crystal.weight(x).expect("integral endpoint");
        for i in 0..n {
            checks += 1;
            let h = x.heights(gcm, mu, i);
            for j in 1..h.len().saturating_sub(1) {
                if h[j] < h[j - 1] && h[j] < h[j + 1] && !h[j].is_integer() {
                    flag(k, i, "local minimum of the height function is not an integer");
                }
            }
            let eps = crystal.epsilon(x, i);
            let ph = crystal.phi(x, i);
            if ph - eps != wt[i] {
                flag(k, i, "phi - epsilon differs from the weight pairing");
            }

            let mut count = 0;
            let mut cur = x.clone();
            while let Some(up) = crystal.e(&cur, i) {
                count += 1;
                cur = up;
                if count > eps + 1 {
                    break;
                }
            }
            if count != eps {
                flag(k, i, "epsilon disagrees with iterated raising");
            }

            if let Some(y) = crystal.f(x, i) {
                if crystal.e(&y, i).as_ref() != Some(x) {
                    flag(k, i, "e(f(x)) != x");
                }
                let mut expected = end.coeffs().to_vec();
                expected[i] += 1;
                if y.endpoint().map(|e| e.coeffs().to_vec()) != Some(expected.clone()) {
                    flag(k, i, "f does not lower the weight by one simple root");
                }
                let within = slice.bound().is_none_or(|b| expected.iter().zip(b.coeffs()).all(|(a, b)| a <= b));
                if within && !members.contains(&y) {
                    flag(k, i, "slice not closed under f within the bound");
                }
            }
            if let Some(z) = crystal.e(x, i) {
                if crystal.f(&z, i).as_ref() != Some(x) {
                    flag(k, i, "f(e(x)) != x");
                }
                if !members.contains(&z) {
                    flag(k, i, "slice not closed under e");
                }
                let last = z.offsets().last().unwrap()[i];
                if last != x.offsets().last().unwrap()[i] - Q::from_integer(1) {
                    flag(k, i, "e does not raise the weight by one simple root");
                }
            } else if eps != 0 {
                flag(k, i, "e kills an element with positive epsilon");
            }
        }
    }
    report.checks = checks;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::PathCrystal;
    use crate::lattice::{Gcm, PairingVector, RootVector};

    fn slice(g: Gcm, mu: &[i64], bound: Option<&[i64]>) -> CrystalSlice {
        let c = PathCrystal::new(&g, &PairingVector::new(mu.to_vec())).unwrap();
        let b = bound.map(|b| RootVector::new(b.to_vec()).unwrap());
        c.generate(b.as_ref(), 100_000).unwrap()
    }

    #[test]
    fn small_slices_are_clean() {
        for s in [
            slice(Gcm::type_a(1), &[4], None),
            slice(Gcm::type_a(2), &[2, 1], None),
            slice(Gcm::type_b(2), &[1, 1], None),
            slice(Gcm::type_b(2), &[0, 3], None),
            slice(Gcm::type_c(3), &[1, 0, 1], None),
            slice(Gcm::new(vec![vec![2, -1], vec![-3, 2]]).unwrap(), &[1, 1], None),
        ] {
            let r = verify_crystal_axioms(&s);
            assert!(r.is_clean(), "{:?}", r.violations);
        }
    }

    #[test]
    fn truncated_slice_is_closed_under_e() {
        let s = slice(Gcm::type_a(3), &[1, 1, 1], Some(&[1, 2, 1]));
        assert!(verify_crystal_axioms(&s).is_clean());
    }

    #[test]
    fn corrupted_element_is_witnessed() {
        let s = slice(Gcm::type_a(2), &[1, 1], None);
        let mut elems = s.elements().to_vec();
        elems[3].corrupt_for_testing(0, Q::from_integer(1));
        let bad = CrystalSlice::from_parts(s.crystal().clone(), None, elems).unwrap();
        assert!(!verify_crystal_axioms(&bad).is_clean());
    }
}

//! Smith normal form over the integers.

use super::{Gcm, PairingVector};

/// `left * input * right = diag`, with `left` and `right` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub left: Vec<Vec<i128>>,
    pub diag: Vec<Vec<i128>>,
    pub right: Vec<Vec<i128>>,
}

impl SmithForm {
    /// Invariant factors `d_1 | d_2 | ...` (zeros included).
    pub fn invariant_factors(&self) -> Vec<i128> {
        let k = self.diag.len().min(self.diag.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.diag[i][i]).collect()
    }
}

pub fn smith_normal_form(input: &[Vec<i64>]) -> SmithForm {
    let rows = input.len();
    let cols = input.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i128>> = input.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut left = identity(rows);
    let mut right = identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs());
            let Some((pi, pj)) = pivot else {
                return finish(left, a, right);
            };
            a.swap(t, pi);
            left.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in right.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    row_axpy(&mut a, i, t, -q);
                    row_axpy(&mut left, i, t, -q);
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    col_axpy(&mut a, j, t, -q);
                    col_axpy(&mut right, j, t, -q);
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % a[t][t] != 0));
            match bad {
                Some(i) => {
                    row_axpy(&mut a, t, i, 1);
                    row_axpy(&mut left, t, i, 1);
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in left[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    finish(left, a, right)
}

fn finish(left: Vec<Vec<i128>>, diag: Vec<Vec<i128>>, right: Vec<Vec<i128>>) -> SmithForm {
    SmithForm { left, diag, right }
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

// row[dst] += k * row[src]
fn row_axpy(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    let srow = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(srow) {
        *x += k * s;
    }
}

// col[dst] += k * col[src]
fn col_axpy(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    for row in m.iter_mut() {
        row[dst] += k * row[src];
    }
}

/// Whether `C v = w` has an integer solution, i.e. `w` is the pairing vector of
/// some element of the root lattice.
pub fn in_root_lattice(w: &PairingVector, gcm: &Gcm) -> bool {
    let snf = smith_normal_form(gcm.matrix());
    let n = gcm.rank();
    let uw: Vec<i128> = (0..n)
        .map(|i| (0..n).map(|j| snf.left[i][j] * w[j] as i128).sum())
        .collect();
    (0..n).all(|i| {
        let d = snf.diag[i][i];
        if d == 0 {
            uw[i] == 0
        } else {
            uw[i] % d == 0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::omega_of_root;

    fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        (0..a.len())
            .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn a2_invariant_factors() {
        let snf = smith_normal_form(Gcm::type_a(2).matrix());
        assert_eq!(snf.invariant_factors(), vec![1, 3]);
    }

    #[test]
    fn factorization_holds() {
        for g in [Gcm::type_a(4), Gcm::type_b(3), Gcm::type_d(4)] {
            let snf = smith_normal_form(g.matrix());
            let m: Vec<Vec<i128>> = g.matrix().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
            assert_eq!(matmul(&matmul(&snf.left, &m), &snf.right), snf.diag);
            let f = snf.invariant_factors();
            for w in f.windows(2) {
                assert!(w[0] > 0 && w[1] % w[0] == 0);
            }
        }
        // affine A_1: degenerate
        let aff = Gcm::new(vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert_eq!(smith_normal_form(aff.matrix()).invariant_factors(), vec![2, 0]);
    }

    #[test]
    fn root_lattice_membership() {
        let a2 = Gcm::type_a(2);
        assert!(in_root_lattice(&PairingVector::new(vec![2, -1]), &a2));
        assert!(!in_root_lattice(&PairingVector::new(vec![1, 0]), &a2));
        assert!(in_root_lattice(&PairingVector::new(vec![0, 0, 0, 2]), &Gcm::type_b(4)));
        assert!(!in_root_lattice(&PairingVector::new(vec![0, 0, 0, 1]), &Gcm::type_b(4)));
        // degenerate: w must lie in the image of C
        let aff = Gcm::new(vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert!(in_root_lattice(&PairingVector::new(vec![2, -2]), &aff));
        assert!(!in_root_lattice(&PairingVector::new(vec![1, 0]), &aff));
        assert!(!in_root_lattice(&PairingVector::new(vec![2, 0]), &aff));
    }

    #[test]
    fn soundness_exhaustive_small() {
        for g in [Gcm::type_a(3), Gcm::type_b(3), Gcm::type_c(2), Gcm::new(vec![vec![2, -3], vec![-3, 2]]).unwrap()] {
            let n = g.rank();
            let mut v = vec![0i64; n];
            loop {
                assert!(in_root_lattice(&omega_of_root(&v, &g), &g));
                let mut k = 0;
                while k < n {
                    v[k] += 1;
                    if v[k] <= 3 {
                        break;
                    }
                    v[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
    }
}

use std::collections::VecDeque;
use std::fmt;

use num::integer::Integer;
use num::rational::Ratio;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::LatticeError;

/// A validated, symmetrizable generalized Cartan matrix.
///
/// Convention: `entry(i, j)` is the pairing of the simple root `j` against the
/// simple coroot `i`, so the pairing vector of a root-lattice element `v` is
/// the matrix product `C v`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gcm {
    entries: Vec<Vec<i64>>,
    symmetrizer: Vec<i64>,
    labels: Vec<String>,
}

impl Gcm {
    /// Validates `matrix` with default labels `"1".."n"`.
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let labels = (1..=matrix.len()).map(|i| i.to_string()).collect();
        Self::with_labels(matrix, labels)
    }

    pub fn with_labels(matrix: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self, LatticeError> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(LatticeError::NotSquare);
        }
        if labels.len() != n {
            return Err(LatticeError::LabelCount { expected: n, found: labels.len() });
        }
        for (a, la) in labels.iter().enumerate() {
            if labels[..a].contains(la) {
                return Err(LatticeError::DuplicateLabel(la.clone()));
            }
        }
        for i in 0..n {
            if matrix[i][i] != 2 {
                return Err(LatticeError::NotGcm(format!("diagonal entry ({i},{i}) is {}", matrix[i][i])));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if matrix[i][j] > 0 {
                    return Err(LatticeError::NotGcm(format!("positive off-diagonal entry at ({i},{j})")));
                }
                if (matrix[i][j] == 0) != (matrix[j][i] == 0) {
                    return Err(LatticeError::NotGcm(format!("asymmetric zero pattern at ({i},{j})")));
                }
            }
        }
        let symmetrizer = canonical_symmetrizer(&matrix)?;
        Ok(Gcm { entries: matrix, symmetrizer, labels })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Off-diagonal nonzero entries in row `i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank()).filter(move |&j| j != i && self.entries[i][j] != 0)
    }

    pub fn is_simply_laced(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &c)| i == j || c == 0 || c == -1))
    }

    /// Principal submatrix on `verts` (in the given order).
    pub fn restrict(&self, verts: &[usize]) -> Gcm {
        let matrix = verts
            .iter()
            .map(|&i| verts.iter().map(|&j| self.entries[i][j]).collect())
            .collect();
        let labels = verts.iter().map(|&i| self.labels[i].clone()).collect();
        Gcm::with_labels(matrix, labels).expect("principal submatrix of a GCM is a GCM")
    }

    /// Symmetrized bilinear form on simple roots, `(a_i, a_j) = d_i C_ij`.
    pub fn form(&self, i: usize, j: usize) -> i64 {
        self.symmetrizer[i] * self.entries[i][j]
    }

    /// Type A_n with vertices labelled 1..n.
    pub fn type_a(n: usize) -> Gcm {
        let mut m = vec![vec![0; n]; n];
        for i in 0..n {
            m[i][i] = 2;
            if i + 1 < n {
                m[i][i + 1] = -1;
                m[i + 1][i] = -1;
            }
        }
        Gcm::new(m).expect("A_n is a GCM")
    }

    /// Type B_n: vertex n is the short root, `C[n][n-1] = -2`.
    pub fn type_b(n: usize) -> Gcm {
        assert!(n >= 2);
        let mut m = Self::type_a(n).entries;
        m[n - 1][n - 2] = -2;
        Gcm::new(m).expect("B_n is a GCM")
    }

    /// Type C_n: vertex n is the long root, `C[n-1][n] = -2`.
    pub fn type_c(n: usize) -> Gcm {
        assert!(n >= 2);
        let mut m = Self::type_a(n).entries;
        m[n - 2][n - 1] = -2;
        Gcm::new(m).expect("C_n is a GCM")
    }

    /// Type D_n: a path 1..n-2 with n-1 and n both attached to n-2.
    pub fn type_d(n: usize) -> Gcm {
        assert!(n >= 4);
        let mut m = Self::type_a(n).entries;
        m[n - 2][n - 1] = 0;
        m[n - 1][n - 2] = 0;
        m[n - 3][n - 1] = -1;
        m[n - 1][n - 3] = -1;
        Gcm::new(m).expect("D_n is a GCM")
    }
}

impl fmt::Debug for Gcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gcm")
            .field("labels", &self.labels)
            .field("entries", &self.entries)
            .field("symmetrizer", &self.symmetrizer)
            .finish()
    }
}

/// Free-standing form of GCM validation.
pub fn validate_gcm(matrix: Vec<Vec<i64>>) -> Result<Gcm, LatticeError> {
    Gcm::new(matrix)
}

/// Positive integer `d` with `d_i C_ij = d_j C_ji`, gcd 1 on each indecomposable block.
fn canonical_symmetrizer(m: &[Vec<i64>]) -> Result<Vec<i64>, LatticeError> {
    let n = m.len();
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; n];
    let mut out = vec![0i64; n];
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(Ratio::one());
        let mut block = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].unwrap();
            for j in 0..n {
                if i == j || m[i][j] == 0 {
                    continue;
                }
                // d_j = d_i C_ij / C_ji
                let dj = di * Ratio::new(m[i][j], m[j][i]);
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        block.push(j);
                        queue.push_back(j);
                    }
                    Some(existing) if existing != dj => return Err(LatticeError::NotSymmetrizable),
                    Some(_) => {}
                }
            }
        }
        let lcm = block.iter().fold(1i64, |acc, &i| acc.lcm(d[i].unwrap().denom()));
        let ints: Vec<i64> = block.iter().map(|&i| (d[i].unwrap() * lcm).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x));
        for (&i, v) in block.iter().zip(ints) {
            debug_assert!(v.is_positive());
            out[i] = v / g;
        }
    }
    // every pair, not only spanning-tree edges, must satisfy the relation
    for i in 0..n {
        for j in 0..n {
            if out[i] * m[i][j] != out[j] * m[j][i] {
                return Err(LatticeError::NotSymmetrizable);
            }
        }
    }
    debug_assert!(out.iter().all(|x| !x.is_zero()));
    Ok(out)
}

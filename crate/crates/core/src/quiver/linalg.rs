//! Dense matrices over `Q` and the subspace operations the quiver predicates
//! need. Subspaces are represented by a matrix whose columns form a basis.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Rat>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Mat { rows, cols, data })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Mat { rows: r, cols: c, data: rows.iter().flat_map(|row| row.iter().map(|&x| rat(x))).collect() }
    }

    /// Column vectors stacked side by side; `rows` fixes the height when empty.
    pub fn from_columns(rows: usize, cols: &[Vec<Rat>]) -> Self {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Rat] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn vcat(&self, other: &Mat) -> Mat {
        self.transpose().hcat(&other.transpose()).transpose()
    }

    pub fn pow(&self, k: usize) -> Mat {
        assert_eq!(self.rows, self.cols);
        (0..k).fold(Mat::identity(self.rows), |acc, _| &acc * self)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip();
            for c in col..m.cols {
                m[(row, c)] = &m[(row, c)] * &inv;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let f = m[(r, col)].clone();
                    for c in col..m.cols {
                        let t = &f * &m[(row, c)];
                        m[(r, c)] -= t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the column space, taken from the pivot columns.
    pub fn image(&self) -> Mat {
        let (_, piv) = self.rref();
        let cols: Vec<Vec<Rat>> = piv.iter().map(|&j| self.column(j)).collect();
        Mat::from_columns(self.rows, &cols)
    }

    pub fn kernel(&self) -> Mat {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let cols: Vec<Vec<Rat>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (k, &p) in piv.iter().enumerate() {
                    v[p] = -r[(k, f)].clone();
                }
                v
            })
            .collect();
        Mat::from_columns(self.cols, &cols)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (r, piv) = self.hcat(&Mat::identity(n)).rref();
        if piv.iter().filter(|&&p| p < n).count() < n {
            return None;
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Solves `self · X = b` for `X`, if consistent.
    pub fn solve(&self, b: &Mat) -> Option<Mat> {
        let (r, piv) = self.hcat(b).rref();
        if piv.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.cols, b.cols);
        for (k, &p) in piv.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = r[(k, self.cols + j)].clone();
            }
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut m = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    m[(i, j)] += t;
                }
            }
        }
        m
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape());
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape());
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Basis of `U + W` inside a common ambient space.
pub fn span_sum(u: &Mat, w: &Mat) -> Mat {
    u.hcat(w).image()
}

/// Rows spanning the annihilator of the column space of `u`.
fn annihilator(u: &Mat) -> Mat {
    u.transpose().kernel().transpose()
}

pub fn intersection(u: &Mat, w: &Mat) -> Mat {
    let n = u.rows();
    if u.cols() == 0 || w.cols() == 0 {
        return Mat::zeros(n, 0);
    }
    let eqs = annihilator(u).vcat(&annihilator(w));
    if eqs.rows() == 0 {
        return Mat::identity(n);
    }
    eqs.kernel()
}

/// `{ z : a z ∈ span(s) }`.
pub fn preimage(a: &Mat, s: &Mat) -> Mat {
    let ann = annihilator(s);
    if ann.rows() == 0 {
        return Mat::identity(a.cols());
    }
    (&ann * a).kernel()
}

pub fn contains(u: &Mat, z: &Mat) -> bool {
    u.hcat(z).rank() == u.rank()
}

pub fn same_subspace(u: &Mat, w: &Mat) -> bool {
    let r = u.rank();
    r == w.rank() && u.hcat(w).rank() == r
}

/// Projections onto `A` along `B` and onto `B` along `A`, for `V = A ⊕ B`.
pub fn projections(a: &Mat, b: &Mat) -> Option<(Mat, Mat)> {
    let basis = a.hcat(b);
    let inv = basis.inverse()?;
    let n = basis.rows();
    let mut pa = Mat::zeros(n, n);
    let mut pb = Mat::zeros(n, n);
    for i in 0..n {
        if i < a.cols() {
            pa[(i, i)] = Rat::one();
        } else {
            pb[(i, i)] = Rat::one();
        }
    }
    Some((&(&basis * &pa) * &inv, &(&basis * &pb) * &inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> Mat {
        Mat::from_i64(rows)
    }

    #[test]
    fn rank_kernel_image() {
        let a = m(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.cols(), 1);
        assert!((&a * &k).is_zero());
        assert_eq!(a.image().cols(), 2);
        assert_eq!(Mat::zeros(3, 0).rank(), 0);
        assert_eq!(Mat::zeros(0, 2).kernel().cols(), 2);
    }

    #[test]
    fn inverse_and_solve() {
        let a = m(&[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Mat::identity(2));
        assert!(m(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
        let x = a.solve(&m(&[vec![3], vec![2]])).unwrap();
        assert_eq!(x, m(&[vec![1], vec![1]]));
        assert!(m(&[vec![1, 1], vec![1, 1]]).solve(&m(&[vec![1], vec![2]])).is_none());
        assert_eq!(Mat::identity(0).inverse(), Some(Mat::identity(0)));
    }

    #[test]
    fn subspace_operations() {
        let e1 = m(&[vec![1], vec![0], vec![0]]);
        let e12 = m(&[vec![1, 0], vec![0, 1], vec![0, 0]]);
        let e23 = m(&[vec![0, 0], vec![1, 0], vec![0, 1]]);
        let i = intersection(&e12, &e23);
        assert_eq!(i.cols(), 1);
        assert!(same_subspace(&i, &m(&[vec![0], vec![1], vec![0]])));
        assert_eq!(span_sum(&e12, &e23).cols(), 3);
        assert!(contains(&e12, &e1));
        // preimage of span(e1) under the shift e2 -> e1
        let shift = m(&[vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(preimage(&shift, &e1).cols(), 3);
        assert_eq!(preimage(&shift, &Mat::zeros(3, 0)).cols(), 2);
    }

    #[test]
    fn projections_split() {
        let a = m(&[vec![1], vec![1]]);
        let b = m(&[vec![1], vec![-1]]);
        let (pa, pb) = projections(&a, &b).unwrap();
        assert_eq!(&pa + &pb, Mat::identity(2));
        assert_eq!(&pa * &pa, pa);
        assert!((&pa * &b).is_zero());
        assert!(projections(&a, &a).is_none());
    }
}

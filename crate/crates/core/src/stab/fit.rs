use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::StabError;
use crate::quiver::Mat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub m: Vec<usize>,
    pub expected: u64,
    pub predicted: String,
}

/// An exact interpolating polynomial in the expansion lengths.
///
/// `holdout_verified` is false exactly when `mismatches` is nonempty; such a
/// fit reproduces its nodes but not the remaining samples and must not be
/// read as describing them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyFit {
    pub variables: Vec<usize>,
    #[serde(serialize_with = "ser_coefficients")]
    pub coefficients: BTreeMap<Vec<usize>, BigRational>,
    pub degree_bound: Vec<usize>,
    pub nodes: Vec<Vec<usize>>,
    pub holdouts: Vec<Vec<usize>>,
    pub holdout_verified: bool,
    pub mismatches: Vec<Mismatch>,
}

fn ser_coefficients<S: Serializer>(c: &BTreeMap<Vec<usize>, BigRational>, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Term<'a> {
        exponent: &'a [usize],
        value: String,
    }
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for (e, q) in c {
        seq.serialize_element(&Term { exponent: e, value: q.to_string() })?;
    }
    seq.end()
}

fn monomial(exponent: &[usize], m: &[usize]) -> BigRational {
    exponent
        .iter()
        .zip(m)
        .map(|(&e, &x)| num::pow(BigRational::from_integer(BigInt::from(x)), e))
        .fold(BigRational::one(), |a, b| a * b)
}

impl PolyFit {
    pub fn eval(&self, m: &[usize]) -> BigRational {
        self.coefficients.iter().map(|(e, c)| c * monomial(e, m)).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Highest exponent of each variable with a nonzero coefficient.
    pub fn multidegree(&self) -> Vec<usize> {
        let mut d = vec![0; self.variables.len()];
        for e in self.coefficients.keys() {
            for (a, &b) in d.iter_mut().zip(e) {
                *a = (*a).max(b);
            }
        }
        d
    }

    /// Coefficient of the monomial with this exponent.
    pub fn coefficient(&self, exponent: &[usize]) -> BigRational {
        self.coefficients.get(exponent).cloned().unwrap_or_else(BigRational::zero)
    }
}

fn product(axes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    axes.iter().fold(vec![vec![]], |acc, vals| {
        acc.into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect()
    })
}

/// Interpolates `samples` on the tensor grid formed by the smallest
/// `d_c + 1` values of each axis and checks the result on every other sample.
pub fn fit_polynomial(samples: &BTreeMap<Vec<usize>, u64>, degree_bound: &[usize]) -> Result<PolyFit, StabError> {
    let k = degree_bound.len();
    if let Some(m) = samples.keys().find(|m| m.len() != k) {
        return Err(StabError::InsufficientGrid(format!("sample {m:?} has {} coordinates, expected {k}", m.len())));
    }
    let axes: Vec<Vec<usize>> = (0..k)
        .map(|c| {
            let vals: BTreeSet<usize> = samples.keys().map(|m| m[c]).collect();
            vals.into_iter().take(degree_bound[c] + 1).collect::<Vec<_>>()
        })
        .collect();
    for (c, vals) in axes.iter().enumerate() {
        if vals.len() < degree_bound[c] + 1 {
            return Err(StabError::InsufficientGrid(format!("axis {c} has {} values, needs {}", vals.len(), degree_bound[c] + 1)));
        }
    }
    let nodes = product(&axes);
    if let Some(p) = nodes.iter().find(|p| !samples.contains_key(*p)) {
        return Err(StabError::InsufficientGrid(format!("grid point {p:?} is missing")));
    }
    let holdouts: Vec<Vec<usize>> = samples.keys().filter(|m| !nodes.contains(m)).cloned().collect();
    for (c, vals) in axes.iter().enumerate() {
        if !holdouts.iter().any(|m| !vals.contains(&m[c])) {
            return Err(StabError::InsufficientGrid(format!("no holdout point beyond the nodes on axis {c}")));
        }
    }

    let exponents = product(&degree_bound.iter().map(|&d| (0..=d).collect()).collect::<Vec<_>>());
    let n = nodes.len();
    let mut vander = Vec::with_capacity(n * n);
    for p in &nodes {
        vander.extend(exponents.iter().map(|e| monomial(e, p)));
    }
    let a = Mat::from_rows(n, n, vander).expect("square system");
    let b = Mat::from_columns(n, &[nodes.iter().map(|p| BigRational::from_integer(BigInt::from(samples[p]))).collect()]);
    let x = a.solve(&b).expect("tensor grids with distinct nodes are unisolvent");
    let coefficients = exponents
        .into_iter()
        .enumerate()
        .map(|(r, e)| (e, x[(r, 0)].clone()))
        .filter(|(_, c)| !c.is_zero())
        .collect();

    let mut fit = PolyFit {
        variables: (0..k).collect(),
        coefficients,
        degree_bound: degree_bound.to_vec(),
        nodes,
        holdouts,
        holdout_verified: false,
        mismatches: Vec::new(),
    };
    fit.mismatches = fit
        .holdouts
        .iter()
        .filter_map(|m| {
            let p = fit.eval(m);
            let want = BigRational::from_integer(BigInt::from(samples[m]));
            (p != want).then(|| Mismatch { m: m.clone(), expected: samples[m], predicted: p.to_string() })
        })
        .collect();
    fit.holdout_verified = fit.mismatches.is_empty();
    Ok(fit)
}

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Experiment, ExperimentConfig, PointSource, Quantity, SCHEMA_VERSION};
use super::fit::{fit_polynomial, PolyFit};
use super::StabError;
use crate::crystal::{verify_crystal_axioms, CrystalCache, CrystalSlice, PathCrystal, DEFAULT_LIMIT};
use crate::lattice::{deep_extension, expand, extend_weight, weight_pairing, ElasticSubgraph, Gcm, PairingVector, RootVector};
use crate::oracle::{is_finite_type, FiniteRootSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub m: Vec<usize>,
    /// Edges of each expanded elastic component.
    pub edges: Vec<usize>,
    pub rank: usize,
    pub v: RootVector,
    pub deep: bool,
    /// Per-component depth; empty when not deep.
    pub sigma: Vec<i64>,
    pub value: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axiom_violations: Option<usize>,
}

impl GridPoint {
    /// Whether every component has at least `2σ + 1` edges.
    pub fn past_threshold(&self) -> bool {
        self.deep && self.sigma.iter().zip(&self.edges).all(|(&s, &e)| e as i64 >= 2 * s + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabReport {
    pub schema_version: u32,
    pub quantity: Quantity,
    /// Labels of the base elastic components.
    pub components: Vec<Vec<String>>,
    /// `2σ_c + 1` per component when every grid point is deep with the same depth.
    pub threshold: Option<Vec<usize>>,
    pub deep: bool,
    pub table: Vec<GridPoint>,
    /// Grid points meeting the edge threshold.
    pub stable_points: usize,
    /// The table is constant and nonempty on the points past the threshold.
    pub stabilized: bool,
    pub stable_value: Option<u64>,
    /// The table takes a single value over the whole grid.
    pub constant_on_grid: bool,
    pub margin: usize,
    /// Past-threshold points span at least `margin` values on every axis.
    pub margin_met: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<PolyFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
    /// `Some(true)` when every cross-checked point agrees with the oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_agrees: Option<bool>,
}

/// Per-component depth of `v`: the value on the interior of each component
/// (`X_0^s`, or all of `X_0`), falling back to the component maximum when
/// the interior is empty. `None` when some interior is not constant.
pub fn component_depths(v: &RootVector, gcm: &Gcm, x0: &ElasticSubgraph, s: Option<usize>) -> Option<Vec<i64>> {
    let inner = match s {
        Some(s) => x0.interior(gcm, s),
        None => x0.vertices().to_vec(),
    };
    x0.components()
        .iter()
        .map(|comp| {
            let vals: Vec<i64> = comp.iter().filter(|i| inner.contains(i)).map(|&i| v[i]).collect();
            match vals.first() {
                None => Some(comp.iter().map(|&i| v[i]).max().unwrap_or(0)),
                Some(&a) => vals.iter().all(|&b| b == a).then_some(a),
            }
        })
        .collect()
}

fn slice_for(cache: Option<&CrystalCache>, gcm: &Gcm, w: &PairingVector, bound: &RootVector) -> Result<CrystalSlice, StabError> {
    let crystal = PathCrystal::new(gcm, w)?;
    Ok(match cache {
        Some(c) => c.get_or_generate(&crystal, bound)?,
        None => crystal.generate(Some(bound), DEFAULT_LIMIT)?,
    })
}

fn oracle_value(q: Quantity, gcm: &Gcm, x0: &ElasticSubgraph, w: &PairingVector, y: Option<&PairingVector>, v: &RootVector) -> Result<Option<u64>, StabError> {
    if !is_finite_type(gcm) {
        return Ok(None);
    }
    let sys = FiniteRootSystem::new(gcm)?;
    Ok(Some(match q {
        Quantity::Weight => sys.freudenthal(w, v)?,
        Quantity::Branching => sys.branching_brute(w, x0)?.get(v).copied().unwrap_or(0),
        Quantity::Tensor => {
            let y = y.expect("validated");
            let lambda = weight_pairing(&(w + y), v, gcm);
            sys.tensor_decompose_brute(w, y)?.get(&lambda).copied().unwrap_or(0)
        }
    }))
}

fn run_point(exp: &Experiment, m: &[usize], src: &PointSource, cache: Option<&CrystalCache>) -> Result<GridPoint, StabError> {
    let e = expand(&exp.gcm, &exp.x0, m)?;
    let w = extend_weight(&exp.w, &e)?;
    let y = exp.y.as_ref().map(|y| extend_weight(y, &e)).transpose()?;
    let v = match src {
        PointSource::Extend(v) => deep_extension(v, &e, exp.depth_s).map_err(|err| StabError::Invalid {
            field: "v".into(),
            message: format!("{err}; non-deep vectors need an explicit v_by_m table"),
        })?,
        PointSource::Explicit(v) => v.clone(),
    };
    let (gcm, x0) = (&e.target, &e.target_x0);
    let sigma = component_depths(&v, gcm, x0, exp.depth_s);
    let slice = slice_for(cache, gcm, &w, &v)?;
    let value = match exp.quantity {
        Quantity::Weight => slice.weight_multiplicity(&v)?,
        Quantity::Branching => slice.branching_multiplicity(&v, x0.vertices())?,
        Quantity::Tensor => slice.tensor_multiplicity(y.as_ref().expect("validated"), &v)?,
    };
    let oracle = if exp.cross_check { oracle_value(exp.quantity, gcm, x0, &w, y.as_ref(), &v)? } else { None };
    let axiom_violations = exp.verify_axioms.then(|| verify_crystal_axioms(&slice).violations.len());
    Ok(GridPoint {
        m: m.to_vec(),
        edges: (0..x0.components().len()).map(|c| x0.edge_count(c)).collect(),
        rank: gcm.rank(),
        v,
        deep: sigma.is_some(),
        sigma: sigma.unwrap_or_default(),
        value,
        oracle,
        axiom_violations,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<StabReport, StabError> {
    run_experiment_with(cfg, None)
}

/// Evaluates every grid point (in parallel, reported in grid order) and
/// judges stabilization against the `2σ + 1` edge threshold.
pub fn run_experiment_with(cfg: &ExperimentConfig, cache: Option<&CrystalCache>) -> Result<StabReport, StabError> {
    let exp = cfg.validate()?;
    let table: Vec<GridPoint> =
        exp.points.par_iter().map(|(m, src)| run_point(&exp, m, src, cache)).collect::<Result<_, _>>()?;
    Ok(summarize(&exp, table))
}

fn summarize(exp: &Experiment, table: Vec<GridPoint>) -> StabReport {
    let k = exp.x0.components().len();
    let deep = table.iter().all(|p| p.deep);
    let threshold = (deep && table.windows(2).all(|w| w[0].sigma == w[1].sigma))
        .then(|| table.first().map(|p| p.sigma.iter().map(|&s| (2 * s + 1) as usize).collect()))
        .flatten();
    let past: Vec<&GridPoint> = table.iter().filter(|p| p.past_threshold()).collect();
    let stabilized = !past.is_empty() && past.iter().all(|p| p.value == past[0].value);
    let margin_met = (0..k).all(|c| {
        let mut vals: Vec<usize> = past.iter().map(|p| p.m[c]).collect();
        vals.sort_unstable();
        vals.dedup();
        vals.len() >= exp.margin
    }) && !past.is_empty();
    let (fit, fit_error) = if exp.quantity == Quantity::Weight && !past.is_empty() {
        let sigma = &past[0].sigma;
        if past.iter().all(|p| &p.sigma == sigma) {
            let samples: BTreeMap<Vec<usize>, u64> = past.iter().map(|p| (p.m.clone(), p.value)).collect();
            let bound: Vec<usize> = sigma.iter().map(|&s| s as usize).collect();
            match fit_polynomial(&samples, &bound) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            }
        } else {
            (None, Some("depth varies across the grid".into()))
        }
    } else {
        (None, None)
    };
    let checked: Vec<&GridPoint> = table.iter().filter(|p| p.oracle.is_some()).collect();
    let oracle_agrees = (!checked.is_empty()).then(|| checked.iter().all(|p| p.oracle == Some(p.value)));
    StabReport {
        schema_version: SCHEMA_VERSION,
        quantity: exp.quantity,
        components: exp.x0.components().iter().map(|c| c.iter().map(|&i| exp.gcm.label(i).to_string()).collect()).collect(),
        threshold,
        deep,
        stable_points: past.len(),
        stabilized,
        stable_value: stabilized.then(|| past[0].value),
        constant_on_grid: table.windows(2).all(|w| w[0].value == w[1].value),
        margin: exp.margin,
        margin_met,
        fit,
        fit_error,
        oracle_agrees,
        table,
    }
}

impl StabReport {
    /// The grid table, one row per point.
    pub fn to_csv(&self) -> String {
        let k = self.components.len();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["schema_version".to_string()];
        header.extend((1..=k).map(|c| format!("m{c}")));
        header.extend((1..=k).map(|c| format!("edges{c}")));
        header.extend(["deep", "past_threshold", "value", "oracle"].map(String::from));
        w.write_record(&header).expect("in-memory write");
        for p in &self.table {
            let mut row = vec![self.schema_version.to_string()];
            row.extend(p.m.iter().map(ToString::to_string));
            row.extend(p.edges.iter().map(ToString::to_string));
            row.push(p.deep.to_string());
            row.push(p.past_threshold().to_string());
            row.push(p.value.to_string());
            row.push(p.oracle.map(|o| o.to_string()).unwrap_or_default());
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn values(&self) -> Vec<u64> {
        self.table.iter().map(|p| p.value).collect()
    }
}

use serde::{Deserialize, Serialize};

use super::StabError;
use crate::lattice::{ElasticSubgraph, Gcm, PairingVector, RootVector};

pub const SCHEMA_VERSION: u32 = 1;

fn invalid(field: impl Into<String>, message: impl Into<String>) -> StabError {
    StabError::Invalid { field: field.into(), message: message.into() }
}

/// A diagram given either by Cartan type (`"A3"`, `"B4"`, `"C2"`, `"D5"`) or
/// by an explicit matrix, with optional vertex labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSpec {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl DiagramSpec {
    pub fn named(kind: &str) -> Self {
        DiagramSpec { kind: Some(kind.to_string()), ..Default::default() }
    }

    pub fn from_gcm(gcm: &Gcm) -> Self {
        DiagramSpec { kind: None, matrix: Some(gcm.matrix().to_vec()), labels: Some(gcm.labels().to_vec()) }
    }

    pub fn build(&self) -> Result<Gcm, StabError> {
        let matrix = match (&self.kind, &self.matrix) {
            (Some(_), Some(_)) => return Err(invalid("diagram", "give either type or matrix, not both")),
            (None, None) => return Err(invalid("diagram", "missing type or matrix")),
            (Some(k), None) => named_type(k).ok_or_else(|| invalid("diagram.type", format!("unknown Cartan type {k:?}")))?,
            (None, Some(m)) => m.clone(),
        };
        let gcm = match &self.labels {
            Some(l) => Gcm::with_labels(matrix, l.clone()),
            None => Gcm::new(matrix),
        };
        gcm.map_err(|e| {
            let field = if self.kind.is_some() { "diagram.labels" } else { "diagram.matrix" };
            invalid(field, e.to_string())
        })
    }
}

fn named_type(kind: &str) -> Option<Vec<Vec<i64>>> {
    let (letter, rank) = kind.split_at_checked(1)?;
    let n: usize = rank.parse().ok()?;
    let gcm = match letter {
        "A" if n >= 1 => Gcm::type_a(n),
        "B" if n >= 2 => Gcm::type_b(n),
        "C" if n >= 2 => Gcm::type_c(n),
        "D" if n >= 4 => Gcm::type_d(n),
        _ => return None,
    };
    Some(gcm.matrix().to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Tensor,
    Branching,
    Weight,
}

/// Inclusive range of expansion lengths for one elastic component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub from: usize,
    pub to: usize,
}

/// An explicit root vector on the expanded diagram `X(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridVector {
    pub m: Vec<usize>,
    pub v: Vec<i64>,
}

/// One stabilization experiment: a diagram with an elastic subgraph, the
/// pairing data `w` (and `y` for tensor products) on the base diagram, and
/// either a base `v` carried along by deep extension or an explicit `v` for
/// each grid point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub diagram: DiagramSpec,
    /// Vertex labels of the elastic subgraph.
    pub elastic: Vec<String>,
    pub quantity: Quantity,
    pub w: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_by_m: Option<Vec<GridVector>>,
    /// One range per elastic component, in component order.
    #[serde(default)]
    pub m_grid: Vec<AxisRange>,
    /// Depth is read on `X_0^s`; absent means all of `X_0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_s: Option<usize>,
    #[serde(default = "default_margin")]
    pub margin: usize,
    /// Compare every finite-type grid point against the Weyl-group oracle.
    #[serde(default)]
    pub cross_check: bool,
    /// Run the crystal axiom checker on every generated slice.
    #[serde(default)]
    pub verify_axioms: bool,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_margin() -> usize {
    3
}

#[derive(Clone, Debug)]
pub(crate) enum PointSource {
    /// Extend the base vector to `X(m)`.
    Extend(RootVector),
    /// Use this vector on `X(m)` as given.
    Explicit(RootVector),
}

/// A configuration after validation, ready to run.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub(crate) gcm: Gcm,
    pub(crate) x0: ElasticSubgraph,
    pub(crate) quantity: Quantity,
    pub(crate) w: PairingVector,
    pub(crate) y: Option<PairingVector>,
    pub(crate) points: Vec<(Vec<usize>, PointSource)>,
    pub(crate) depth_s: Option<usize>,
    pub(crate) margin: usize,
    pub(crate) cross_check: bool,
    pub(crate) verify_axioms: bool,
}

impl Experiment {
    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    pub fn elastic(&self) -> &ElasticSubgraph {
        &self.x0
    }

    pub fn grid(&self) -> impl Iterator<Item = &[usize]> {
        self.points.iter().map(|(m, _)| m.as_slice())
    }
}

fn pairing(field: &str, values: &[i64], gcm: &Gcm, x0: &ElasticSubgraph) -> Result<PairingVector, StabError> {
    if values.len() != gcm.rank() {
        return Err(invalid(field, format!("expected {} entries, found {}", gcm.rank(), values.len())));
    }
    if values.iter().any(|&x| x < 0) {
        return Err(invalid(field, "must be dominant"));
    }
    if let Some(&i) = x0.vertices().iter().find(|&&i| values[i] != 0) {
        return Err(invalid(field, format!("must vanish on the elastic subgraph, nonzero at {}", gcm.label(i))));
    }
    Ok(PairingVector::new(values.to_vec()))
}

fn root(field: &str, values: &[i64], rank: usize) -> Result<RootVector, StabError> {
    if values.len() != rank {
        return Err(invalid(field, format!("expected {rank} entries, found {}", values.len())));
    }
    RootVector::new(values.to_vec()).map_err(|e| invalid(field, e.to_string()))
}

fn cartesian(ranges: &[AxisRange]) -> Vec<Vec<usize>> {
    ranges.iter().fold(vec![vec![]], |acc, r| {
        acc.into_iter()
            .flat_map(|p| {
                (r.from..=r.to).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect()
    })
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, StabError> {
        serde_json::from_str(text).map_err(|e| invalid(json_field(&e), e.to_string()))
    }

    pub fn validate(&self) -> Result<Experiment, StabError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid("schema_version", format!("unsupported version {}", self.schema_version)));
        }
        let gcm = self.diagram.build()?;
        let x0 = ElasticSubgraph::from_labels(&gcm, &self.elastic).map_err(|e| invalid("elastic", e.to_string()))?;
        let w = pairing("w", &self.w, &gcm, &x0)?;
        let y = match (self.quantity, &self.y) {
            (Quantity::Tensor, Some(y)) => Some(pairing("y", y, &gcm, &x0)?),
            (Quantity::Tensor, None) => return Err(invalid("y", "required for the tensor quantity")),
            (_, Some(_)) => return Err(invalid("y", "only meaningful for the tensor quantity")),
            (_, None) => None,
        };
        let k = x0.components().len();
        let points = match (&self.v, &self.v_by_m) {
            (Some(_), Some(_)) => return Err(invalid("v", "give either v or v_by_m, not both")),
            (None, None) => return Err(invalid("v", "missing v or v_by_m")),
            (Some(v), None) => {
                let v = root("v", v, gcm.rank())?;
                if self.m_grid.len() != k {
                    return Err(invalid("m_grid", format!("expected {k} ranges, found {}", self.m_grid.len())));
                }
                if let Some(c) = self.m_grid.iter().position(|r| r.from > r.to) {
                    return Err(invalid(format!("m_grid[{c}]"), "empty range"));
                }
                cartesian(&self.m_grid).into_iter().map(|m| (m, PointSource::Extend(v.clone()))).collect::<Vec<_>>()
            }
            (None, Some(table)) => {
                if table.is_empty() {
                    return Err(invalid("v_by_m", "empty grid"));
                }
                if !self.m_grid.is_empty() {
                    return Err(invalid("m_grid", "the grid is taken from v_by_m"));
                }
                let mut out: Vec<(Vec<usize>, PointSource)> = Vec::with_capacity(table.len());
                for (p, gv) in table.iter().enumerate() {
                    if gv.m.len() != k {
                        return Err(invalid(format!("v_by_m[{p}].m"), format!("expected {k} lengths")));
                    }
                    if out.iter().any(|(m, _)| *m == gv.m) {
                        return Err(invalid(format!("v_by_m[{p}].m"), "duplicate grid point"));
                    }
                    let rank = gcm.rank() + gv.m.iter().sum::<usize>();
                    let v = root(&format!("v_by_m[{p}].v"), &gv.v, rank)?;
                    out.push((gv.m.clone(), PointSource::Explicit(v)));
                }
                out
            }
        };
        Ok(Experiment {
            gcm,
            x0,
            quantity: self.quantity,
            w,
            y,
            points,
            depth_s: self.depth_s,
            margin: self.margin,
            cross_check: self.cross_check,
            verify_axioms: self.verify_axioms,
        })
    }
}

/// Best-effort name of the field a serde error points at.
pub fn json_field(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(rest) = msg.split(marker).nth(1) {
            if let Some(name) = rest.split('`').next() {
                return name.to_string();
            }
        }
    }
    "$".to_string()
}

//! Framed representations of doubled quivers over `Q`: the moment-map,
//! nilpotency and stability predicates, the `ε` statistic, segment normal
//! forms on strings and the edge stretch/contract bijection.

pub mod linalg;
mod rep;
mod search;
mod string;

pub use linalg::{Mat, Rat};
pub use rep::{int_mat, Edge, FramedRep, MomentMapCheck};
pub use search::{exhaustive_search, SearchReport};
pub use string::{build_string_rep, contract, string_decompose, stretch, Segment, SegmentKind, StringDecomposition};

use crate::lattice::LatticeError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuiverError {
    #[error("diagram is not simply laced")]
    NotSimplyLaced,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("orientation has an oriented cycle")]
    CyclicOrientation,
    #[error("no edge joins {0} and {1}")]
    UnknownEdge(usize, usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("inconsistent pattern: {0}")]
    InconsistentPattern(String),
    #[error("not contractible: {0}")]
    NotContractible(String),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

//! Stabilization experiments: multiplicities tabulated over expanded
//! diagrams, exact polynomial fits, and the identities tying weight
//! multiplicities to branching.

mod checks;
mod config;
mod experiment;
mod fit;

pub use checks::{check_depth_vanishing, check_weight_decomposition, DecompositionReport, DecompositionTerm, VanishingReport};
pub use config::{json_field, AxisRange, DiagramSpec, Experiment, ExperimentConfig, GridVector, Quantity, SCHEMA_VERSION};
pub use experiment::{component_depths, run_experiment, run_experiment_with, GridPoint, StabReport};
pub use fit::{fit_polynomial, Mismatch, PolyFit};

use crate::crystal::CrystalError;
use crate::lattice::LatticeError;
use crate::oracle::OracleError;

#[derive(Debug, thiserror::Error)]
pub enum StabError {
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

//! Crystal-counting multiplicities for symmetrizable Kac-Moody algebras and
//! the machinery for stabilization experiments along elastic subdiagrams.

pub mod crystal;
pub mod lattice;
pub mod oracle;
pub mod quiver;
pub mod stab;

pub use crystal::{CrystalCache, CrystalError, CrystalSlice, LSPath, PathCrystal};
pub use lattice::{ElasticSubgraph, ExpansionMap, Gcm, LatticeError, PairingVector, RootVector};
pub use oracle::{FiniteRootSystem, OracleError};
pub use quiver::{FramedRep, QuiverError};
pub use stab::{ExperimentConfig, PolyFit, StabError, StabReport};

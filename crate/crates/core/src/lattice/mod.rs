//! Generalized Cartan matrices, elastic subgraphs and their expansion, and the
//! weight/root coordinate maps.

mod elastic;
mod expand;
mod gcm;
mod snf;
mod vectors;

pub use elastic::{depth_profile, elastic_subgraph, induced_components, interior, DepthProfile, ElasticSubgraph};
pub use expand::{deep_extension, expand, extend_weight, ExpansionMap};
pub use gcm::{validate_gcm, Gcm};
pub use snf::{in_root_lattice, smith_normal_form, SmithForm};
pub use vectors::{omega_of_root, weight_pairing, PairingVector, RootVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("not a generalized Cartan matrix: {0}")]
    NotGcm(String),
    #[error("no positive symmetrizer exists")]
    NotSymmetrizable,
    #[error("expected {expected} vertex labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown vertex label {0:?}")]
    UnknownLabel(String),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("subgraph is not elastic: {0}")]
    NotElastic(String),
    #[error("expansion needs {expected} lengths, got {found}")]
    ExpansionArity { expected: usize, found: usize },
    #[error("weight does not vanish on the elastic subgraph (vertex {0})")]
    NotVanishing(String),
    #[error("root vector is not deep")]
    NotDeep,
    #[error("component starting at {0} has empty interior and cannot carry a depth")]
    EmptyInterior(String),
    #[error("negative root coefficient at vertex index {0}")]
    NegativeRootCoefficient(usize),
    #[error("vector length {found} does not match rank {expected}")]
    Length { expected: usize, found: usize },
}

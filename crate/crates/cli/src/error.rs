use kacstab::crystal::CrystalError;
use kacstab::lattice::LatticeError;
use kacstab::oracle::OracleError;
use kacstab::quiver::QuiverError;
use kacstab::stab::StabError;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation { field: field.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Validation { field, message } => {
                json!({"schema_version": 1, "error": "validation", "field": field, "message": message})
            }
            CliError::Internal(m) => json!({"schema_version": 1, "error": "internal", "message": m}),
        }
    }
}

impl From<StabError> for CliError {
    fn from(e: StabError) -> Self {
        match e {
            StabError::Invalid { field, message } => CliError::Validation { field, message },
            StabError::InsufficientGrid(m) => CliError::invalid("samples", m),
            StabError::Lattice(e) => e.into(),
            StabError::Crystal(e) => e.into(),
            StabError::Oracle(e) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::invalid("input", e)
    }
}

impl From<CrystalError> for CliError {
    fn from(e: CrystalError) -> Self {
        match e {
            CrystalError::NotDominant | CrystalError::Length { .. } | CrystalError::OutsideBound => CliError::invalid("input", e),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<QuiverError> for CliError {
    fn from(e: QuiverError) -> Self {
        match e {
            QuiverError::DecompositionFailed(_) => CliError::Internal(e.to_string()),
            QuiverError::Json(m) => CliError::invalid("rep", m),
            other => CliError::invalid("rep", other),
        }
    }
}

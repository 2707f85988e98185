use liesym::geometry::{GeometryError, IntegrationError};
use liesym::io::LoadError;
use liesym::liealg::LieError;
use liesym::optimal::OptimalError;
use liesym::symexpr::KernelError;
use liesym::symmetry::SymmetryError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Load(_) | CliError::Usage(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::NotASymmetry(_) => CliError::Verification(e.to_string()),
            SymmetryError::Geometry(g) => g.into(),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Kernel(_) | GeometryError::Jet(_) => CliError::Unsupported(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::Unsupported(e.to_string())
    }
}

impl From<LieError> for CliError {
    fn from(e: LieError) -> Self {
        match e {
            LieError::NonClosure { .. } | LieError::DependentBasis | LieError::Inconsistent(_) => {
                CliError::Verification(e.to_string())
            }
            LieError::DimensionMismatch { .. } | LieError::Index(_) => CliError::Usage(e.to_string()),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<OptimalError> for CliError {
    fn from(e: OptimalError) -> Self {
        match e {
            OptimalError::ZeroVector | OptimalError::Arity { .. } => CliError::Usage(e.to_string()),
            OptimalError::Lie(l) => l.into(),
            OptimalError::Shape(_) => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<IntegrationError> for CliError {
    fn from(e: IntegrationError) -> Self {
        match e {
            IntegrationError::InitialState { .. } | IntegrationError::BadStep | IntegrationError::Unbound(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

use thiserror::Error;

use crate::implicit::ConstraintSolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("variable `{0}` is not bound")]
    Unbound(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular Lagrangian: smallest singular value {min_sv:e} vs largest {max_sv:e} of the velocity Hessian")]
    SingularLagrangian { min_sv: f64, max_sv: f64 },

    #[error("singular constraint Jacobian: smallest singular value {min_sv:e} vs largest {max_sv:e}; pin the undetermined multipliers")]
    SingularConstraintJacobian { min_sv: f64, max_sv: f64 },

    #[error("constraint solve did not converge: residual {:e} after {} iterations", .0.residual_norm, .0.iterations)]
    NoConvergence(Box<ConstraintSolveReport>),

    #[error("constraint consistency lost at step {step}: residual {residual:e}")]
    ConsistencyLost { step: usize, residual: f64 },

    #[error("multipliers violate the restricted constraint: residual {residual:e}")]
    ConstraintViolated { residual: f64 },

    #[error("reduced trajectory is not a solution: defect {defect:e}")]
    ReducedNotASolution { defect: f64 },

    #[error("branch lost at q = {q}: {reason}")]
    BranchLoss { q: f64, reason: String },

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    /// An error inside one field of a configuration.
    #[error("{pointer}: {source}")]
    Field { pointer: String, source: Box<Error> },
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownIdentifier(_) => "UnknownIdentifier",
            Error::Unbound(_) => "Unbound",
            Error::Domain(_) => "DomainError",
            Error::Dimension(_) => "DimensionMismatch",
            Error::SingularLagrangian { .. } => "SingularLagrangian",
            Error::SingularConstraintJacobian { .. } => "SingularConstraintJacobian",
            Error::NoConvergence(_) => "NoConvergence",
            Error::ConsistencyLost { .. } => "ConsistencyLost",
            Error::ConstraintViolated { .. } => "ConstraintViolated",
            Error::ReducedNotASolution { .. } => "ReducedNotASolution",
            Error::BranchLoss { .. } => "BranchLoss",
            Error::Schema { .. } => "SchemaError",
            Error::Io(_) => "IoError",
            Error::Field { source, .. } => source.kind(),
        }
    }

    /// Errors caused by user input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        if let Error::Field { source, .. } = self {
            return source.is_usage();
        }
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownIdentifier(_)
                | Error::Unbound(_)
                | Error::Schema { .. }
                | Error::Io(_)
                | Error::Dimension(_)
        )
    }

    pub(crate) fn at(self, pointer: impl Into<String>) -> Self {
        Error::Field {
            pointer: pointer.into(),
            source: Box::new(self),
        }
    }

    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

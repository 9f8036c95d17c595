use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("trace is {trace}, expected 1")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(
        "outcome {outcome} has vanishing probability but nonzero derivative at theta = {theta}; \
         evaluate at an offset theta"
    )]
    DegeneratePoint { outcome: usize, theta: f64 },

    #[error("capability limit: {0}")]
    Capability(String),

    #[error("objective returned a non-finite value ({value}) at evaluation {evaluation}")]
    NonFiniteObjective { value: f64, evaluation: usize },

    #[error("state spec error at `{path}`: {message}")]
    Spec { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

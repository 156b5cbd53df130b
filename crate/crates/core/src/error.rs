use thiserror::Error;

/// Errors raised by the solver, oracles and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample {value} at coordinate {coord:?}")]
    NonFinite { coord: Vec<f64>, value: f64 },

    #[error("no interface in domain")]
    NoInterface,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("norm is not axis-separable; use the lax_friedrichs scheme instead")]
    NonSeparableNorm,

    #[error("fast sweeping did not converge after {sweeps} sweeps (residual {residual:e})")]
    SweepNotConverged { sweeps: usize, residual: f64 },

    #[error("non-finite state at step {step}, node {node}")]
    NumericalFailure { step: usize, node: usize },

    #[error("compact mask selects no nodes")]
    EmptyMask,

    #[error("requested time {requested} is beyond the run horizon; rerun with t_final >= {requested}")]
    TimeOutOfRange { requested: f64 },

    #[error("H not coercive enough at slope_cap {0}")]
    NotCoercive(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("expression error at offset {offset}: {message}")]
    Expression { offset: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::NonFinite { .. } => "non_finite_sample",
            Error::NoInterface => "no_interface",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NonSeparableNorm => "non_separable_norm",
            Error::SweepNotConverged { .. } => "sweep_not_converged",
            Error::NumericalFailure { .. } => "numerical_failure",
            Error::EmptyMask => "empty_mask",
            Error::TimeOutOfRange { .. } => "time_out_of_range",
            Error::NotCoercive(_) => "not_coercive",
            Error::Parse { .. } => "parse",
            Error::Expression { .. } => "expression",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Whether the failure came from the numerics rather than from the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure { .. } | Error::SweepNotConverged { .. } | Error::NotCoercive(_)
        )
    }
}

use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown method `{name}`; available: {available}")]
    UnknownMethod { name: String, available: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no positive root found in (0, {r_max}] for {what}")]
    NoPositiveRoot { what: String, r_max: f64 },

    #[error("denominator vanishes in {0}")]
    SingularDenominator(String),

    #[error("unsupported order {order} for {what}")]
    UnsupportedOrder { what: String, order: usize },

    #[error("order {order} outside the supported range 1..={max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("singular matrix in {0}")]
    SingularMatrix(String),

    #[error("method `{method}` cannot be used here: {reason}")]
    ClassMismatch { method: String, reason: String },

    #[error("implicit stage solve residual {residual:e} exceeds {bound:e}")]
    SolverResidual { residual: f64, bound: f64 },

    #[error("history holds {got} states, method needs {need}")]
    HistoryLength { got: usize, need: usize },

    #[error("numerical blow-up at step {step}, stage {stage}")]
    BlowUp { step: usize, stage: usize },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 3 for numerical blow-up, 2 for every validation failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BlowUp { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

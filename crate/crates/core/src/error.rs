use rrs_lp::{LpError, MilpError};

#[derive(thiserror::Error, Debug)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("job {job} appears in more than one swap")]
    OverlappingSwaps { job: usize },
    #[error("invalid uncertainty set: {0}")]
    InvalidUncertainty(String),
    #[error("LP returned a fractional value {value} for {var} after perturbed re-solve")]
    IntegralityViolation { var: String, value: f64 },
    #[error("LP unexpectedly {status}: {context}")]
    LpStatus { status: &'static str, context: String },
    #[error("oracle size guard: {0}")]
    OracleGuard(String),
    #[error("input {row} violated by {amount}")]
    InfeasibleInput { row: String, amount: f64 },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<(), CoreError> {
    if expected == got {
        Ok(())
    } else {
        Err(CoreError::Dimension { expected, got })
    }
}

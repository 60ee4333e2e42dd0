use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("empty table: x must be at least 1")]
    EmptyTable,

    #[error("undefined distribution: {0}")]
    UndefinedDistribution(String),

    #[error("insufficient decay: |phi| = {magnitude:.3e} at tau = {tau:.3e} (law may have large atoms)")]
    InsufficientDecay { tau: f64, magnitude: f64 },

    #[error("tail unknown: {0}")]
    TailUnknown(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("guard {0:.3e} exceeds 0.1; distance would be meaningless")]
    GuardTooLarge(f64),

    #[error("aliasing risk: max omega {max_omega} >= theta points {points}")]
    AliasingRisk { max_omega: u32, points: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("corrupt or mismatched dump: {0}")]
    BadDump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

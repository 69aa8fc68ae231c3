use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("{0} is not a supported prime modulus")]
    BadModulus(u32),
    #[error("cannot invert zero")]
    ZeroInversion,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("domain of size {0} exceeds the dense limit")]
    DomainTooLarge(usize),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    EnumerationBudget { needed: usize, budget: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("wire error: {0}")]
    Wire(String),
    #[error("payload is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("state is not normalized (norm^2 = {0})")]
    Unnormalized(f64),
    #[error("character set violates the spectral sandwich: {0}")]
    Sandwich(String),
    #[error("budget exhausted after {0} attempts")]
    BudgetExhausted(usize),
    #[error("average-case premise violated: mean success {mean:.4} < alpha {alpha:.4}")]
    PremiseViolated { mean: f64, alpha: f64 },
    #[error("amplitude {found:.4} is below the promised lower bound {bound:.4}")]
    AmplitudeBelowBound { found: f64, bound: f64 },
    #[error("invalid failure policy: {0}")]
    Policy(String),
    #[error("empty target set")]
    EmptyTarget,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("instance too large for exhaustive enumeration: {n}^{m} exceeds {limit}")]
    InstanceTooLarge { n: usize, m: usize, limit: u64 },

    /// Inputs broke a declared prediction contract (value above the
    /// predicted maximum, for instance).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A mathematical invariant that must hold on valid input failed.
    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    /// An adversary observed a decision its construction rules out.
    #[error("adversary assertion failed: {0}")]
    AdversaryAssertion(String),

    /// An adaptive construction ran out of its step budget.
    #[error("step budget exhausted after {steps} goods: {detail}")]
    BudgetExhausted { steps: usize, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures that signal a broken theorem or a bug rather than
    /// bad input.
    pub fn is_invariant_breach(&self) -> bool {
        matches!(self, Error::InvariantBreach(_) | Error::AdversaryAssertion(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

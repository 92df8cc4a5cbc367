use thiserror::Error;

/// Errors produced by the fingerprinting library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("{what} needs {required} enumeration steps, budget is {budget}{hint}")]
    BudgetExceeded {
        what: &'static str,
        required: String,
        budget: u64,
        hint: &'static str,
    },

    #[error("no code with distance >= {target} found in {tries} tries (best distance {best})")]
    ConstructionFailure {
        target: usize,
        tries: usize,
        best: usize,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("numerical invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn budget(what: &'static str, required: impl ToString, budget: u64) -> Self {
        Error::BudgetExceeded {
            what,
            required: required.to_string(),
            budget,
            hint: "",
        }
    }

    pub(crate) fn budget_mc(what: &'static str, required: impl ToString, budget: u64) -> Self {
        Error::BudgetExceeded {
            what,
            required: required.to_string(),
            budget,
            hint: "; use Monte Carlo mode instead",
        }
    }
}

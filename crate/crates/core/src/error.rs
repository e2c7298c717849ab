use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("factorization of {n} exceeded the Pollard-rho budget of {budget} iterations")]
    FactorizationBudgetExceeded { n: u128, budget: u64 },

    #[error("integer overflow: {0}")]
    Overflow(&'static str),

    #[error("weighted average multiplicity is undefined for a unit (empty factorization)")]
    EmptyFactorization,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("abscissa {a} is not above the critical abscissa {a_crit}")]
    BelowCritical { a: f64, a_crit: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("|f| = {magnitude:e} on the contour near {re} + {im}i; move the boundary")]
    BoundaryZero { re: f64, im: f64, magnitude: f64 },

    #[error("{a} + {b} != {c}")]
    NotATriple { a: u128, b: u128, c: u128 },

    #[error("entries are not pairwise coprime")]
    NotCoprime,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by a computational budget or a solver that
    /// did not converge, as opposed to invalid input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::FactorizationBudgetExceeded { .. }
                | Error::BudgetExceeded(_)
                | Error::NoConvergence(_)
                | Error::BoundaryZero { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p-adic precision must be at least 1")]
    ZeroPrecision,
    #[error("element with valuation {valuation} is not invertible at precision {precision}")]
    NotInvertible { valuation: u32, precision: u32 },
    #[error("inexact division: p-adic valuation {valuation} is below the requested shift {requested}")]
    InexactDivision { valuation: u32, requested: u32 },
    #[error("series has no unit pivot term; not invertible at this precision")]
    SeriesNotInvertible,
    #[error("series window too small: enlarge max_exp (need at least {needed}, have {max_exp})")]
    WindowTooSmall { needed: i64, max_exp: i64 },
    #[error("geometric inversion did not stabilize within {budget} rounds; enlarge max_exp")]
    InversionBudgetExhausted { budget: u32 },
    #[error("truncation floor must be <= -1, got {0}")]
    InvalidFloor(i64),
    #[error("root iteration did not converge within {budget} steps at precision {precision}")]
    NonConvergence { budget: u32, precision: u32 },
    #[error("residual after convergence has valuation {valuation}, expected at least {precision}")]
    ResidualTooLow { valuation: u32, precision: u32 },
    #[error("fixed-point and Newton solves disagree at p = {p}, precision {precision}")]
    MethodDisagreement { p: u64, precision: u32 },
    #[error("index out of range: {what} = {got}, allowed {allowed}")]
    IndexOutOfRange {
        what: &'static str,
        got: u64,
        allowed: String,
    },
    #[error("brute-force enumeration infeasible: rank {rank} or index exponent {m} outside rank <= 6, m <= 8")]
    BruteForceInfeasible { rank: u32, m: u32 },
    #[error("brute-force enumeration exceeded the budget of {budget} bases")]
    BruteForceBudget { budget: u64 },
    #[error("malformed series document: {0}")]
    MalformedSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = LotteryError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LotteryError {
    #[error("{name} = {value} is outside {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{what} does not fit in a 64-bit ticket count")]
    Overflow { what: &'static str },

    #[error(
        "exact rational mode is limited to N <= {max_n} and T <= {max_t} (got N = {n}, T = {t})"
    )]
    CostGuard {
        n: u64,
        t: u64,
        max_n: u64,
        max_t: u64,
    },

    #[error("W(z)/(1+W(z)) is singular at the branch point z = {0}")]
    Singularity(f64),

    #[error("index {index} outside {lo}..={hi}")]
    OutOfRange { index: u64, lo: u64, hi: u64 },

    #[error("closed form lost all digits to cancellation (condition {condition:e}) and S0 = {s0} is too large for the high-precision fallback")]
    IllConditioned { condition: f64, s0: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LotteryError {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        LotteryError::Domain {
            name,
            value,
            expected,
        }
    }
}

use thiserror::Error;

use crate::sequence::Nat;

#[derive(Debug, Error)]
pub enum Error {
    /// The shared per-call evaluation budget ran out. Surfaces divergent or
    /// astronomically expensive computations instead of hanging.
    #[error("evaluation budget exhausted after {used} point evaluations")]
    BudgetExhausted { used: u64 },

    /// The recursion guard tripped. Same failure class as budget exhaustion:
    /// the run would not have completed within any reasonable resources.
    #[error("recursion depth cap {cap} exceeded")]
    DepthCapExceeded { cap: u32 },

    #[error("parse error at byte {pos}: expected {expected}, found {found}")]
    Parse {
        pos: usize,
        expected: String,
        found: String,
    },

    #[error("coloring produced {value} at index {index}; colors must be 0 or 1")]
    NotAColor { index: Nat, value: Nat },

    #[error("claimed run of length {len} cannot force a contradiction below {n}")]
    RunTooShort { len: usize, n: Nat },

    #[error("subset space C({points}, {l}) exceeds the configured work cap {cap}")]
    HorizonTooLarge { points: Nat, l: u64, cap: u64 },

    #[error("black-box rule failed: {0}")]
    Rule(String),

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("malformed certificate: {0}")]
    Certificate(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Resource-exhaustion errors map to a dedicated process exit code.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. } | Error::DepthCapExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Internal control flow for engine recursion. A `Early` value unwinds a
/// vertical round whose steering value dropped; it is caught by the driver
/// that installed the matching token and never escapes the public API.
#[derive(Debug)]
pub(crate) enum Flow {
    Fail(Error),
    Early(EarlyExit),
}

#[derive(Debug)]
pub(crate) struct EarlyExit {
    pub token: u64,
    /// Position chosen by the scan over the terminal round's witness.
    pub t: usize,
}

impl From<Error> for Flow {
    fn from(e: Error) -> Self {
        Flow::Fail(e)
    }
}

impl Flow {
    pub(crate) fn into_error(self) -> Error {
        match self {
            Flow::Fail(e) => e,
            Flow::Early(_) => Error::Internal("uncaught early exit".into()),
        }
    }
}

pub(crate) type FlowResult<T> = std::result::Result<T, Flow>;

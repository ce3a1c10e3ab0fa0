use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The input is outside the operation's domain (bad argument, bad range).
    #[error("invalid input: {0}")]
    Domain(String),

    /// A configured memory or size budget would be exceeded.
    #[error("resource limit exceeded: {what} needs {needed}, budget is {budget}")]
    Resource {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    /// An enumeration budget ran out before the work finished. Never a
    /// silent pass: the caller must raise the budget or shrink the input.
    #[error("{what}: budget of {budget} exhausted after {spent} evaluations")]
    Budget {
        what: &'static str,
        budget: u64,
        spent: u64,
    },

    /// A value left the exact-integer range.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// An omega window failed its sum-freeness certificate: `w1 + w2`
    /// lands back inside the window.
    #[error("window is not sum-free: {w1} + {w2} = {sum} lies in the window")]
    WindowNotSumFree { w1: u32, w2: u32, sum: u32 },

    /// A documented precondition was violated; the message carries a witness.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two independent evaluation routes disagreed beyond their combined
    /// error bounds, or a certified quantity contradicts a monotonic
    /// expectation.
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    /// A cache file failed structural validation.
    #[error("cache format error at byte {offset}: {what}")]
    Format { offset: u64, what: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

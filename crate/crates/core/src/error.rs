use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("invalid probability mass {value} at index {index}")]
    InvalidMass { index: usize, value: f64 },

    #[error("masses sum to {sum:.17}, expected 1 within 1e-12")]
    NotNormalized { sum: f64 },

    #[error("alphabet mismatch: expected {expected} symbols, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("output symbol {symbol} is unreachable from every input")]
    UnreachableOutput { symbol: usize },

    #[error("{name} = {value} is outside its admissible range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("invalid type: {0}")]
    InvalidType(String),

    #[error("cannot preserve a support of {support} symbols with only {n} samples")]
    SupportNotPreservable { support: usize, n: u32 },

    #[error("{what} needs {required} items, exceeding the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: f64,
        budget: f64,
    },

    #[error("mutual information is zero; the exponent is +inf")]
    ZeroCapacity,

    #[error("codebook has no bin partition")]
    MissingBins,

    #[error("numerical failure: {0}")]
    Numerical(String),
}

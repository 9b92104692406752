use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("parameter `{0}` has no assigned value")]
    MissingParameter(String),

    #[error("denominator vanishes at the given assignment")]
    VanishingDenominator,

    #[error("cannot parse scalar `{text}`: {reason}")]
    ScalarParse { text: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("algebra is not nilpotent: lower series stabilises at dimension {stable_dim}")]
    NotNilpotent { stable_dim: usize },

    #[error("matrix is not nilpotent")]
    MatrixNotNilpotent,

    #[error("algebra has no elements outside its square")]
    EmptyComplement,

    #[error(
        "characteristic sequence {partition:?} does not match chain length {chain} of the witness"
    )]
    SequenceMismatch { partition: Vec<usize>, chain: usize },

    #[error("invalid family parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("singular base change")]
    SingularBaseChange,

    #[error("extended map is not bijective (images span dimension {rank} of {dim})")]
    NotBijective { rank: usize, dim: usize },

    #[error("schema error at {location}: {reason}")]
    Schema { location: String, reason: String },

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

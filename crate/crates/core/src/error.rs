use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("word must contain at least one bit")]
    EmptyWord,

    #[error("invalid bit character {0:?}")]
    InvalidBit(char),

    #[error("pair vector is not consistent with any word")]
    InconsistentPairVector,

    #[error("code needs at least two words, got {0}")]
    CodeTooSmall(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("no code of length {length} satisfies the constraints")]
    Infeasible { length: usize },

    #[error("no code found up to length {r_max}")]
    Exhausted { r_max: usize },

    #[error("function is not {rho}-pair-locally binary (ball around {word} has {size} values)")]
    NotPairLocallyBinary {
        rho: u32,
        word: String,
        size: usize,
    },

    #[error("bad base code: {0}")]
    BadBaseCode(String),

    #[error("value {0} is not in the image of the function")]
    ValueNotInImage(i64),

    #[error("duplicate message {0}")]
    DuplicateMessage(String),

    #[error("ambiguous decoding: nearest messages map to values {values:?}")]
    Ambiguous { values: Vec<i64> },

    #[error("parse error: {0}")]
    Parse(String),
}

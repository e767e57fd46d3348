use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported characteristic {0}: need a prime 7 < p < 256")]
    UnsupportedCharacteristic(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("F_{0}^{1} is too large for this operation")]
    FieldTooLarge(u32, usize),
    #[error("{n} does not divide the group order {order}")]
    OrderNotDividing { n: u128, order: u128 },
    #[error("no embedding of degree {from} into degree {into}")]
    NoEmbedding { from: usize, into: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("all invariants are zero")]
    AllZeroInvariants,
    #[error("invalid stratum: {0}")]
    InvalidStratum(String),
    #[error("automorphism template check failed: {0}")]
    TemplateVerification(String),
    #[error("group closure exceeded {0} elements")]
    ClosureOverflow(usize),
    #[error("twist coefficients are not rational")]
    CoefficientsNotRational,
    #[error("bucket overflow: more than {0} keys in one bucket")]
    BucketOverflow(usize),
    #[error("incomplete census: {found} of {expected} classes")]
    IncompleteCensus { found: u64, expected: u64 },
    #[error("malformed database: {0}")]
    MalformedDb(String),
    #[error("key not found")]
    KeyNotFound,
    #[error("internal error: {0}")]
    Internal(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("field of order {q} exceeds the table limit {limit}")]
    FieldTooLarge { q: u64, limit: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("GF({p}^{small}) is not a subfield of GF({p}^{big})")]
    NotASubfield { p: u32, small: u32, big: u32 },
    #[error("multiplicative characters are not defined at zero")]
    ZeroArgumentToMulChar,
    #[error("naive enumeration is capped at q <= {cap} (got q = {q})")]
    FieldTooLargeForNaive { q: u64, cap: u64 },
    #[error("direct convolution is capped at q - 1 <= {cap} (got q - 1 = {len})")]
    FieldTooLargeForConv { len: u64, cap: u64 },
    #[error("Gauss table does not match the requested field or additive character")]
    MissingGaussTable,
    #[error("operation requires characteristic {expected}, got {got}")]
    UnsupportedCharacteristic { expected: u32, got: u32 },
    #[error("moment order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: u32, max: u32 },
    #[error("sequence needs at least {need} values, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("empirical sample is empty")]
    EmptySample,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cache entry is corrupt: {0}")]
    CorruptCache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Resource-limit errors, as opposed to domain errors.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::FieldTooLarge { .. }
                | Error::FieldTooLargeForNaive { .. }
                | Error::FieldTooLargeForConv { .. }
                | Error::OrderTooLarge { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::EvenCharacteristic => "EvenCharacteristic",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::ZeroInverse => "ZeroInverse",
            Error::NotASubfield { .. } => "NotASubfield",
            Error::ZeroArgumentToMulChar => "ZeroArgumentToMulChar",
            Error::FieldTooLargeForNaive { .. } => "FieldTooLargeForNaive",
            Error::FieldTooLargeForConv { .. } => "FieldTooLargeForConv",
            Error::MissingGaussTable => "MissingGaussTable",
            Error::UnsupportedCharacteristic { .. } => "UnsupportedCharacteristic",
            Error::OrderTooLarge { .. } => "OrderTooLarge",
            Error::TooShort { .. } => "TooShort",
            Error::EmptySample => "EmptySample",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::CorruptCache(_) => "CorruptCache",
            Error::Io(_) => "Io",
        }
    }
}

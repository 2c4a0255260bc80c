use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall in two families: validation errors (bad inputs, mismatched
/// alphabets, unsupported orders) and numeric guard violations (an
/// enumeration that would be too large to carry out exactly). The CLI maps
/// the first family to exit status 2 and the second to 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("unsupported order {alpha} for {op}")]
    UnsupportedOrder { op: &'static str, alpha: String },

    #[error("tsallis divergence is unbounded at infinite order; use d_infinity instead")]
    TsallisAtInfinity,

    #[error("invalid argument `{field}`: {msg}")]
    InvalidArgument { field: String, msg: String },

    #[error("guard exceeded: {what} = {value} > {limit}")]
    Guard {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("typical set is empty (n = {n}, eps = {eps})")]
    EmptyTypicalSet { n: usize, eps: f64 },

    #[error("sequence {0} is not a member of the typical set")]
    NotMember(u64),

    #[error("bin (m = {m}, f = {f}) is empty")]
    EmptyBin { m: u64, f: u64 },

    #[error("no source member carries bin index f = {0}")]
    EmptyF(u64),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid_arg(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field: field.into(),
            msg: msg.into(),
        }
    }

    /// True for numeric guard violations (enumeration too large).
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

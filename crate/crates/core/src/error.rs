use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial is not in the image of d/dx")]
    NotInImage,

    #[error("recursion inconsistent at k = {k}: {detail}")]
    RecursionInconsistent { k: i32, detail: String },

    #[error("series is not a quasimodular form of weight <= {max_weight}: {detail}")]
    NotRecognized { max_weight: i64, detail: String },

    #[error("q-order {have} too small for recognition, need at least {need}")]
    InsufficientOrder { need: usize, have: usize },

    #[error("degenerate spectrum: {first} and {second} are not separated by the commuting family")]
    DegenerateSpectrum { first: String, second: String },

    #[error("cache validation failed: {0}")]
    CacheInvalid(String),

    #[error("malformed json: {0}")]
    Json(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

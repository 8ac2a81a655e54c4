use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid interval [{a}, {b}]: endpoints must be finite with a < b")]
    Interval { a: f64, b: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("derivative order {requested} out of range (jet holds orders 0..={available})")]
    OrderOutOfRange { requested: usize, available: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// The characteristic matrix of the problem is (numerically) singular.
    #[error("problem is not uniquely solvable: |det| = {det:e}, condition estimate = {condition:e}")]
    NotUniquelySolvable { det: f64, condition: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown {kind} strategy `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn dims(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

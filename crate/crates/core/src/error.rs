use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point fell outside the bounding box of a defining function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument error: {0}")]
    Argument(String),

    /// A domain or frame could not be built (empty zero set, vanishing gradient, ...).
    #[error("construction error: {0}")]
    Construction(String),

    #[error("spec error in field `{field}`: {message}")]
    Spec { field: String, message: String },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("convergence error: {0}")]
    Convergence(String),

    /// Two distinct nearest boundary points: the query lies near the medial axis.
    #[error("ambiguous projection: distances {d1:.3e} and {d2:.3e} at separated boundary points")]
    Ambiguity { d1: f64, d2: f64 },

    #[error("singular point: {0}")]
    Singular(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence(_)
                | Error::Ambiguity { .. }
                | Error::Singular(_)
                | Error::Accuracy(_)
                | Error::Sampling(_)
        )
    }

    pub fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
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

use crate::expr::ExprError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{what} does not hold (residual {residual:.3e})")]
    Precondition { what: String, residual: f64 },
    #[error("found only {found} of {wanted} admissible sample points after {tried} draws")]
    Sampling {
        wanted: usize,
        found: usize,
        tried: usize,
    },
    #[error("numeric domain error: {0}")]
    Numeric(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the numbers rather than by the input text.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Expr(ExprError::Domain(_)) | Error::Numeric(_) | Error::Sampling { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("undefined asymptotic form: {0}")]
    UndefinedForm(String),
    #[error("singular block: {0}")]
    SingularBlock(String),
    #[error("ill-conditioned pivot: {0}")]
    Conditioning(String),
    #[error("region error: {0}")]
    Region(String),
    #[error("indeterminate sign: {0}")]
    Indeterminate(String),
    #[error("abscissa violation: {0}")]
    Abscissa(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

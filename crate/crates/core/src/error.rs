use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid window system: {0}")]
    InvalidWindowSystem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not self-adjoint (max asymmetry {0:.3e})")]
    NotSelfAdjoint(f64),

    #[error("eigensolver did not converge")]
    EigenNonConvergence,

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotSelfAdjoint(_) | Error::EigenNonConvergence | Error::DegenerateKernel(_)
        )
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, actual })
    }
}

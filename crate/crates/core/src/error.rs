use thiserror::Error;

pub type Result<T> = std::result::Result<T, SbmError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SbmError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid parameters: {0}")]
    Parameter(String),

    /// A block `(a, b)` has a zero denominator, i.e. the labeling leaves
    /// community `a` (or `b`) too small to define a block probability.
    #[error("degenerate block ({0}, {1}): empty or singleton community")]
    DegenerateBlock(usize, usize),

    #[error("constant undefined: {0}")]
    Undefined(String),

    #[error("search space too large: {size:.3e} labelings exceeds the limit of {limit:.0e}")]
    SearchSpace { size: f64, limit: f64 },

    #[error("no labeling satisfies the size constraint: {0}")]
    Infeasible(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SbmError {
    fn from(e: std::io::Error) -> Self {
        SbmError::Io(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("series has constant term {0}, expected {1}")]
    ConstantTerm(String, String),
    #[error("not a Lie element: word {0} cannot lead a Lie polynomial")]
    NotLie(String),
    #[error("substitution image for generator {0} has a weight-0 term")]
    WeightZeroImage(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("positivity violated: {0}")]
    Positivity(String),
    #[error("tangential condition violated for z{0}: {1}")]
    NotTangential(usize, String),
    #[error("element is not in the image of ad({0}) at weight {1}")]
    NotInAdImage(String, u32),
    #[error("inconsistent linear system at weight {weight}: {detail}")]
    Inconsistent { weight: u32, detail: String },
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

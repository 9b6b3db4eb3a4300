use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidSpec(String),

    #[error("singular input: {0}")]
    SingularInput(&'static str),

    #[error("recurrence index {n} outside 0..={max}")]
    IndexOutOfRange { n: i64, max: i64 },

    #[error("{operation} requires M = {required}, got M = {actual}")]
    WrongMode {
        operation: &'static str,
        required: &'static str,
        actual: u32,
    },

    #[error("zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("degenerate resultant: {0}")]
    DegenerateResultant(String),

    #[error("matrix is not rank deficient (smallest/largest singular value = {ratio:e})")]
    NotRankDeficient { ratio: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("integration step underflow at r = {re} {im:+}i")]
    StepUnderflow { re: f64, im: f64 },

    #[error("coupling d is unsolved; a numeric value is required here")]
    UnsolvedCoupling,
}

pub type Result<T> = std::result::Result<T, Error>;

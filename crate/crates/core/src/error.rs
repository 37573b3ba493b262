use thiserror::Error;

/// Errors raised by the numerical layers of the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("composite dimension {dim} exceeds the configured maximum {max}")]
    Sizing { dim: usize, max: usize },

    #[error("numerical error in {context}: {detail}")]
    Numerical {
        context: &'static str,
        detail: String,
    },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below floor {floor:e}")]
    Positivity { eigenvalue: f64, floor: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "step-size guard violated: h*(max|e|+J0+J1) = {product:e} is not below {limit} (strict mode)"
    )]
    Stability { product: f64, limit: f64 },

    #[error("resonance discriminant vanishes; critical J1 = {critical_j1:e}")]
    BranchSingularity { critical_j1: f64 },

    #[error("precondition `{condition}` does not hold (measured {measured:e})")]
    Precondition {
        condition: &'static str,
        measured: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

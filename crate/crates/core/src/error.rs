use thiserror::Error;

/// Errors produced by the solver and its input layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("exponent at byte {pos} is not a non-negative integer")]
    BadExponent { pos: usize },
    #[error("polynomial of degree {degree} exceeds the basis degree {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("vector length {got} does not match basis size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial system is empty")]
    EmptySystem,
    #[error("degree bound {d} is below the system degree {system}")]
    DegreeTooLow { d: usize, system: usize },
    #[error("coefficient matrix is zero")]
    ZeroCoefficientMatrix,
    #[error("pseudoinverse failed: all singular values are below the cutoff")]
    PseudoinverseFailure,
    #[error("face collapsed to dimension 0: the moment problem is infeasible")]
    FaceCollapsed,
    #[error(
        "reduced primal is not strictly feasible (min eigenvalue {min_eig:.3e}, max {max_eig:.3e}, residual {residual:.3e}); the face may have been cut too far"
    )]
    NotPositiveDefinite { min_eig: f64, max_eig: f64, residual: f64 },
    #[error("outer iteration {iteration}: {source}")]
    Stage {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("outer loop did not stabilise within {0} iterations")]
    NoFixedPoint(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

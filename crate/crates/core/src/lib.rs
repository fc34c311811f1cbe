//! Truncated real radical ideals from maximum-rank moment matrices.
//!
//! Given a polynomial system `F` and a degree bound `d`, [`real_radical`]
//! returns a basis of the polynomials of degree `≤ d` in the real radical of
//! `⟨F⟩`. Each stage solves an SDP feasibility problem over truncated moment
//! matrices for a maximum-rank solution: facial reduction shrinks the problem
//! to its minimal face, and Douglas–Rachford iterations solve both the
//! auxiliary (exposing vector) problems and the reduced primal.
//!
//! The numerical core is generic over [`Real`] (`f32`, `f64`); the `*64`
//! aliases below are what the CLI and the reference tests use.

pub mod config;
pub mod drsolver;
pub mod error;
pub mod examples;
pub mod facialred;
pub mod linalg;
pub mod momentprob;
pub mod polysys;
pub mod projops;
pub mod radical;
pub mod report;
pub mod scalar;

pub use config::SolverConfig;
pub use drsolver::{dr_solve, dr_step, DRConfig, DRResult, DRStatus};
pub use error::{Error, Result};
pub use facialred::{
    build_auxiliary, find_exposing_vector, first_exposing_vector, reduce_to_minimal_face, restrict_operator,
    solve_max_rank, FRTrace, Face, MaxRankSolution,
};
pub use momentprob::{build_moment_problem, residual, LinearOperator, MomentProblem};
pub use polysys::{
    coeff_matrix, parse_polynomial, parse_system, poly_of, prolong, vec_of, Monomial, MonomialBasis, Polynomial,
};
pub use projops::{numerical_nullspace, numerical_rank, project_affine, project_psd, EigenDecomposition};
pub use radical::{
    completeness_check, completeness_threshold, extract_kernel, ideal_closure, real_radical, KernelBasis, RadicalReport,
};
pub use scalar::Real;

pub type Polynomial64 = Polynomial<f64>;
pub type Polynomial32 = Polynomial<f32>;
pub type LinearOperator64 = LinearOperator<f64>;
pub type LinearOperator32 = LinearOperator<f32>;
pub type MomentProblem64 = MomentProblem<f64>;
pub type DRResult64 = DRResult<f64>;
pub type Face64 = Face<f64>;
pub type KernelBasis64 = KernelBasis<f64>;
pub type RadicalReport64 = RadicalReport<f64>;

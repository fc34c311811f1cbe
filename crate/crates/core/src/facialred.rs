//! Facial reduction: shrink the PSD cone to the minimal face containing the
//! feasible set, then solve the reduced, strictly feasible problem for a
//! maximum-rank solution.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::drsolver::{dr_solve, DRStatus};
use crate::error::{Error, Result};
use crate::linalg::{orthonormal_columns, pseudoinverse, unvec_rows};
use crate::momentprob::{LinearOperator, MomentProblem, PINV_CUTOFF};
use crate::projops::{numerical_nullspace, numerical_rank, EigenDecomposition};
use crate::scalar::Real;

/// The face `{U M Uᵀ : M ⪰ 0}` of the PSD cone.
#[derive(Clone, Debug)]
pub struct Face<T: Real> {
    /// `k × r`, orthonormal columns.
    pub u: DMatrix<T>,
}

impl<T: Real> Face<T> {
    pub fn full(k: usize) -> Self {
        Face {
            u: DMatrix::identity(k, k),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.u.nrows()
    }

    /// `U M Uᵀ`.
    pub fn lift(&self, m: &DMatrix<T>) -> DMatrix<T> {
        &self.u * m * self.u.transpose()
    }
}

/// Per-solve record of the reduction path and the DR work spent on it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FRTrace {
    /// `k`, then the face dimension after each reduction.
    pub face_sizes: Vec<usize>,
    /// Residual of each accepted auxiliary solve.
    pub aux_residuals: Vec<f64>,
    /// DR iterations of each accepted auxiliary solve.
    pub aux_iterations: Vec<usize>,
    /// Rank bound each accepted auxiliary solve was run at.
    pub aux_ranks: Vec<usize>,
    /// Residual of the reduced primal solve.
    pub reduced_residual: f64,
    pub primal_iterations: usize,
    pub polish_iterations: usize,
    /// `‖𝒜(X) − b‖` of the returned matrix against the full operator.
    pub primal_residual: f64,
    pub final_rank: usize,
    /// Iterations of the successful stages.
    pub dr_iterations: usize,
    /// Iterations including failed auxiliary attempts.
    pub dr_iterations_total: usize,
}

impl FRTrace {
    /// Number of reductions performed, counting the initial `BBᵀ` step.
    pub fn reductions(&self) -> usize {
        self.face_sizes.len().saturating_sub(1)
    }
}

/// Operator `M ↦ [⟨UᵀAᵢU, M⟩]` on `r × r` matrices, same right-hand side.
pub fn restrict_operator<T: Real>(op: &LinearOperator<T>, u: &DMatrix<T>) -> Result<LinearOperator<T>> {
    if u.nrows() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: u.nrows(),
        });
    }
    let ut = u.transpose();
    let mats = op.mats().iter().map(|a| &ut * a * u).collect();
    LinearOperator::new(u.ncols(), mats, op.rhs().clone())
}

/// `Z = BBᵀ`.
pub fn first_exposing_vector<T: Real>(b: &DMatrix<T>) -> Result<DMatrix<T>> {
    if b.iter().all(|v| *v == T::zero()) {
        return Err(Error::ZeroCoefficientMatrix);
    }
    Ok(b * b.transpose())
}

/// The auxiliary problem `{Z ⪰ 0 : L vec(Z) = R}` with
/// `L = [bᵀ(Aᵀ)†; I − Aᵀ(Aᵀ)†; vec(I)ᵀ]` and `R = [0; 0; 1]`. Its solutions
/// are exactly the `Z = 𝒜*y ⪰ 0` with `bᵀy = 0` and `trace Z = 1`.
pub fn build_auxiliary<T: Real>(op: &LinearOperator<T>) -> Result<LinearOperator<T>> {
    let r = op.dim();
    let r2 = r * r;
    let at = op.matrix_rep().transpose();
    let (at_pinv, _) = pseudoinverse(&at, PINV_CUTOFF)?;
    let first = op.rhs().transpose() * &at_pinv;
    let middle = DMatrix::identity(r2, r2) - &at * &at_pinv;
    let mut mats = Vec::with_capacity(r2 + 2);
    let mut rhs = Vec::with_capacity(r2 + 2);
    mats.push(unvec_rows(&first.transpose(), r));
    rhs.push(T::zero());
    for row in middle.row_iter() {
        mats.push(unvec_rows(&row.transpose(), r));
        rhs.push(T::zero());
    }
    mats.push(DMatrix::identity(r, r));
    rhs.push(T::one());
    LinearOperator::new(r, mats, DVector::from_vec(rhs))
}

/// Result of one exposing-vector search.
#[derive(Clone, Debug)]
pub struct ExposingSearch<T: Real> {
    /// `None` when every attempt failed: the face is taken as minimal.
    pub z: Option<DMatrix<T>>,
    pub residual: f64,
    /// Iterations of the accepted attempt.
    pub iterations: usize,
    /// Iterations over all attempts.
    pub total_iterations: usize,
    pub rank: usize,
    pub history: Vec<f64>,
}

/// Solves the auxiliary problem of `op` by DR. Ranks requested for `step`
/// are tried first; after that, each stalled attempt cuts the rank to the
/// numerical rank of its best iterate (or halves it, rounding up, when no gap is visible),
/// at most `cfg.max_rank_cuts` times.
pub fn find_exposing_vector<T: Real>(
    op: &LinearOperator<T>,
    cfg: &SolverConfig,
    step: usize,
) -> Result<ExposingSearch<T>> {
    let aux = build_auxiliary(op)?;
    let k = op.dim();
    let mut scheduled: VecDeque<usize> = cfg.overrides_for(step).into();
    let mut rank = k;
    let mut cuts = 0;
    let mut out = ExposingSearch {
        z: None,
        residual: f64::INFINITY,
        iterations: 0,
        total_iterations: 0,
        rank,
        history: Vec::new(),
    };
    loop {
        if let Some(r) = scheduled.pop_front() {
            rank = r.clamp(1, k);
        }
        let res = dr_solve(&aux, &cfg.dr(rank), None)?;
        out.total_iterations += res.iterations;
        out.history.extend_from_slice(&res.history);
        let accepted = res.status == DRStatus::Converged || res.residual.as_f64() <= cfg.aux_accept_tol;
        out.residual = out.residual.min(res.residual.as_f64());
        if accepted {
            out.residual = res.residual.as_f64();
            out.iterations = res.iterations;
            out.rank = rank;
            out.z = Some(res.y);
            return Ok(out);
        }
        if !scheduled.is_empty() {
            continue;
        }
        if cuts >= cfg.max_rank_cuts {
            break;
        }
        let eig = EigenDecomposition::new(&res.y);
        let values: Vec<T> = eig.values.iter().map(|v| v.max(T::zero())).collect();
        let mut next = numerical_rank(&values, cfg.gap_factor, cfg.abs_floor);
        if next >= rank {
            next = rank.div_ceil(2);
        }
        if next == 0 || next == rank {
            break;
        }
        rank = next;
        cuts += 1;
    }
    Ok(out)
}

/// Outcome of [`reduce_to_minimal_face`].
#[derive(Clone, Debug)]
pub struct Reduction<T: Real> {
    pub face: Face<T>,
    /// The original operator restricted to the face, with numerically
    /// redundant constraints removed.
    pub op: LinearOperator<T>,
    pub trace: FRTrace,
    pub history: Vec<f64>,
}

fn reduce_face<T: Real>(
    op0: &LinearOperator<T>,
    face: &Face<T>,
    z: &DMatrix<T>,
    cfg: &SolverConfig,
) -> Result<Option<(Face<T>, LinearOperator<T>)>> {
    let v = numerical_nullspace(z, cfg.nullspace_tol);
    if v.ncols() == 0 {
        return Err(Error::FaceCollapsed);
    }
    if v.ncols() == face.dim() {
        return Ok(None);
    }
    let u = orthonormal_columns(&(&face.u * v), 1e-8)?;
    if u.ncols() == 0 {
        return Err(Error::FaceCollapsed);
    }
    let op = restrict_operator(op0, &u)?.compressed(cfg.compress_tol)?;
    Ok(Some((Face { u }, op)))
}

/// Reduces `problem` to its minimal face: first with `Z = BBᵀ`, then with
/// exposing vectors from the auxiliary problem until none is found.
pub fn reduce_to_minimal_face<T: Real>(problem: &MomentProblem<T>, cfg: &SolverConfig) -> Result<Reduction<T>> {
    cfg.validate()?;
    let op0 = &problem.op;
    let k = op0.dim();
    let mut trace = FRTrace {
        face_sizes: vec![k],
        ..Default::default()
    };
    let mut history = Vec::new();
    let z1 = first_exposing_vector(&problem.coeffs)?;
    let full = Face::full(k);
    let (mut face, mut op) = match reduce_face(op0, &full, &z1, cfg)? {
        Some(next) => next,
        None => (full, op0.compressed(cfg.compress_tol)?),
    };
    if face.dim() < k {
        trace.face_sizes.push(face.dim());
    }
    let mut step = 2;
    while face.dim() > 1 {
        let search = find_exposing_vector(&op, cfg, step)?;
        trace.dr_iterations_total += search.total_iterations;
        history.extend_from_slice(&search.history);
        let Some(z) = search.z else { break };
        let Some((next_face, next_op)) = reduce_face(op0, &face, &z, cfg)? else {
            break;
        };
        trace.aux_residuals.push(search.residual);
        trace.aux_iterations.push(search.iterations);
        trace.aux_ranks.push(search.rank);
        trace.dr_iterations += search.iterations;
        face = next_face;
        op = next_op;
        trace.face_sizes.push(face.dim());
        step += 1;
    }
    Ok(Reduction {
        face,
        op,
        trace,
        history,
    })
}

/// A maximum-rank solution `X = U P Uᵀ` of the moment problem.
#[derive(Clone, Debug)]
pub struct MaxRankSolution<T: Real> {
    pub x: DMatrix<T>,
    pub face: Face<T>,
    /// Reduced solution on the minimal face.
    pub p: DMatrix<T>,
    pub trace: FRTrace,
    /// Residuals of every DR iteration run, in order.
    pub history: Vec<f64>,
}

/// Facial reduction followed by a full-rank DR solve on the minimal face.
/// The lifted solution is refined by a short DR run on the full operator at
/// the same rank.
pub fn solve_max_rank<T: Real>(problem: &MomentProblem<T>, cfg: &SolverConfig) -> Result<MaxRankSolution<T>> {
    let Reduction {
        face,
        op,
        mut trace,
        mut history,
    } = reduce_to_minimal_face(problem, cfg)?;
    let r = face.dim();
    let primal = dr_solve(&op, &cfg.dr(r), None)?;
    history.extend_from_slice(&primal.history);
    trace.primal_iterations = primal.iterations;
    trace.reduced_residual = primal.residual.as_f64();
    let eig = EigenDecomposition::new(&primal.y);
    let (min_eig, max_eig) = (eig.min(), eig.max());
    if !(max_eig > T::zero() && min_eig >= T::of(cfg.pd_tol) * max_eig) {
        return Err(Error::NotPositiveDefinite {
            min_eig: min_eig.as_f64(),
            max_eig: max_eig.as_f64(),
            residual: primal.residual.as_f64(),
        });
    }
    let mut x = face.lift(&primal.y);
    let mut residual = problem.op.residual(&x);
    let polish_cfg = crate::drsolver::DRConfig {
        max_iters: cfg.polish_iters.max(1),
        ..cfg.dr(r)
    };
    let polished = dr_solve(&problem.op, &polish_cfg, Some(&x))?;
    history.extend_from_slice(&polished.history);
    trace.polish_iterations = polished.iterations;
    if polished.residual < residual {
        residual = polished.residual;
        x = polished.y;
    }
    trace.primal_residual = residual.as_f64();
    trace.final_rank = r;
    trace.dr_iterations += trace.primal_iterations + trace.polish_iterations;
    trace.dr_iterations_total += trace.primal_iterations + trace.polish_iterations;
    Ok(MaxRankSolution {
        x,
        face,
        p: primal.y,
        trace,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{orthonormality_defect, random_symmetric, vec_rows};
    use crate::momentprob::build_moment_problem;
    use crate::polysys::parse_polynomial;

    fn random_orthonormal(k: usize, r: usize, seed: u64) -> DMatrix<f64> {
        let g = random_symmetric::<f64>(k, seed) + DMatrix::identity(k, k) * 0.01;
        let g = g.columns(0, r).into_owned();
        orthonormal_columns(&g, 1e-12).unwrap()
    }

    #[test]
    fn restriction_with_identity_is_unchanged() {
        let mats: Vec<DMatrix<f64>> = (0..3).map(|s| random_symmetric(4, s)).collect();
        let op = LinearOperator::new(4, mats, DVector::from_element(3, 1.0)).unwrap();
        let r = restrict_operator(&op, &DMatrix::identity(4, 4)).unwrap();
        assert_eq!(r.matrix_rep(), op.matrix_rep());
    }

    #[test]
    fn restriction_commutes_with_lift() {
        let mats: Vec<DMatrix<f64>> = (0..4).map(|s| random_symmetric(5, s)).collect();
        let op = LinearOperator::new(5, mats, DVector::zeros(4)).unwrap();
        let u = random_orthonormal(5, 3, 11);
        assert!(orthonormality_defect(&u) < 1e-12);
        let m = random_symmetric::<f64>(3, 2);
        let m = &m * m.transpose();
        let r = restrict_operator(&op, &u).unwrap();
        let lifted = &u * &m * u.transpose();
        assert!((op.apply(&lifted) - r.apply(&m)).amax() < 1e-12);
        assert!(restrict_operator(&op, &DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn first_exposing_vector_examples() {
        let mut b = DMatrix::<f64>::zeros(4, 1);
        b[0] = 1.0;
        let z = first_exposing_vector(&b).unwrap();
        assert_eq!(numerical_nullspace(&z, 1e-8).ncols(), 3);
        assert!(matches!(
            first_exposing_vector(&DMatrix::<f64>::zeros(3, 1)),
            Err(Error::ZeroCoefficientMatrix)
        ));
    }

    #[test]
    fn auxiliary_rows_encode_range_and_trace() {
        let mats: Vec<DMatrix<f64>> = (0..3).map(|s| random_symmetric(3, 20 + s)).collect();
        let op = LinearOperator::new(3, mats, DVector::from_vec(vec![1.0, 0.5, -0.2])).unwrap();
        let aux = build_auxiliary(&op).unwrap();
        assert_eq!(aux.len(), 9 + 2);
        // Z = 𝒜*y with bᵀy = 0, scaled to unit trace, satisfies L vec(Z) = R
        let y = DVector::from_vec(vec![0.2, 0.4, 2.0]);
        let z = op.adjoint(&y);
        let z = &z / z.trace();
        assert!(aux.residual(&z) < 1e-12);
        // the last constraint is the trace
        let id = DMatrix::identity(3, 3);
        assert!((aux.mats().last().unwrap() - id).amax() < 1e-15);
        // a matrix outside range(𝒜*) is not feasible
        let w = random_symmetric::<f64>(3, 99);
        let w = &w / w.trace();
        assert!(aux.residual(&w) > 1e-3);
    }

    #[test]
    fn slater_feasible_has_no_exposing_vector() {
        // trace(X) = 3 on 3×3: X = I is interior
        let op = LinearOperator::new(3, vec![DMatrix::identity(3, 3)], DVector::from_element(1, 3.0)).unwrap();
        let cfg = SolverConfig {
            max_dr_iters: 3000,
            ..Default::default()
        };
        let s = find_exposing_vector(&op, &cfg, 2).unwrap();
        assert!(s.z.is_none());
    }

    #[test]
    fn marginal_instance_yields_exposing_vector() {
        // X₂₂ = 0 forces the face {X : X e₂ = 0}
        let mut a = DMatrix::<f64>::zeros(2, 2);
        a[(1, 1)] = 1.0;
        let mut n = DMatrix::<f64>::zeros(2, 2);
        n[(0, 0)] = 1.0;
        let op = LinearOperator::new(2, vec![n, a], DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let s = find_exposing_vector(&op, &SolverConfig::default(), 2).unwrap();
        let z = s.z.expect("exposing vector");
        let feasible = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!((z.component_mul(&feasible)).sum().abs() < 1e-8);
        assert!((z.trace() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn example_one() {
        let f = vec![parse_polynomial::<f64>("(x+y)*(x^2+y^2+2)", 2).unwrap()];
        let p = build_moment_problem(&f, 3).unwrap();
        let s = solve_max_rank(&p, &SolverConfig::default()).unwrap();
        assert_eq!(s.trace.face_sizes, vec![10, 9, 4]);
        assert_eq!(s.trace.final_rank, 4);
        assert!(s.trace.primal_residual <= 1e-12, "{}", s.trace.primal_residual);
        let xy = DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((&s.x * xy).norm() < 1e-8);
        assert_eq!(vec_rows(&s.x).len(), 100);
    }
}

//! The SDP feasibility problem `{X ∈ 𝒮ᵏ : 𝒜(X) = b, BᵀX = 0, X ⪰ 0}` whose
//! feasible points are PSD truncated moment matrices annihilated by a system.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, trace_product, vec_rows};
use crate::polysys::{coeff_matrix, system_degree, MonomialBasis, Polynomial};
use crate::scalar::Real;

/// Relative singular-value cutoff for the cached pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-11;

/// Cached affine projection `vec X ↦ (I − A†A) vec X + A†b`, with `A†A`
/// formed from an orthonormal basis of the row space of `A`.
#[derive(Clone, Debug)]
pub(crate) struct AffineProjector<T: Real> {
    pub(crate) proj: DMatrix<T>,
    pub(crate) shift: DVector<T>,
    pub(crate) rank: usize,
}

/// A linear map `𝒮ᵏ → ℝˡ`, `X ↦ [⟨A₁,X⟩, …, ⟨A_l,X⟩]`, together with its
/// right-hand side `b`.
#[derive(Clone, Debug)]
pub struct LinearOperator<T: Real> {
    dim: usize,
    mats: Vec<DMatrix<T>>,
    rhs: DVector<T>,
    projector: OnceLock<Result<AffineProjector<T>>>,
}

impl<T: Real> LinearOperator<T> {
    /// Builds an operator on `dim × dim` matrices. Constraint matrices are
    /// symmetrised on the way in.
    pub fn new(dim: usize, mats: Vec<DMatrix<T>>, rhs: DVector<T>) -> Result<Self> {
        if mats.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: mats.len(),
                got: rhs.len(),
            });
        }
        for m in &mats {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        let mats = mats.iter().map(linalg::symmetrize).collect();
        Ok(LinearOperator {
            dim,
            mats,
            rhs,
            projector: OnceLock::new(),
        })
    }

    /// Side length `k` of the matrices the operator acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of constraints `l`.
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[DMatrix<T>] {
        &self.mats
    }

    pub fn rhs(&self) -> &DVector<T> {
        &self.rhs
    }

    pub fn apply(&self, x: &DMatrix<T>) -> DVector<T> {
        DVector::from_iterator(self.mats.len(), self.mats.iter().map(|a| trace_product(a, x)))
    }

    /// `𝒜*y = Σ yᵢ Aᵢ`.
    pub fn adjoint(&self, y: &DVector<T>) -> DMatrix<T> {
        assert_eq!(y.len(), self.mats.len());
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (a, &yi) in self.mats.iter().zip(y.iter()) {
            out += a * yi;
        }
        out
    }

    /// `l × k²` matrix whose row `i` is the row-major `vec(Aᵢ)`.
    pub fn matrix_rep(&self) -> DMatrix<T> {
        let k2 = self.dim * self.dim;
        let mut rep = DMatrix::zeros(self.mats.len(), k2);
        for (i, a) in self.mats.iter().enumerate() {
            rep.set_row(i, &vec_rows(a).transpose());
        }
        rep
    }

    /// `‖𝒜(X) − b‖₂`.
    pub fn residual(&self, x: &DMatrix<T>) -> T {
        (self.apply(x) - &self.rhs).norm()
    }

    pub(crate) fn projector(&self) -> Result<&AffineProjector<T>> {
        self.projector
            .get_or_init(|| {
                let rep = self.matrix_rep();
                let (pinv, rows) = linalg::pseudoinverse_with_row_space(&rep, PINV_CUTOFF)?;
                let k2 = self.dim * self.dim;
                let proj = DMatrix::identity(k2, k2) - &rows * rows.transpose();
                let shift = &pinv * &self.rhs;
                Ok(AffineProjector {
                    proj,
                    shift,
                    rank: rows.ncols(),
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Numerical rank of the matrix representation.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.projector()?.rank)
    }

    /// An equivalent operator with only the numerically significant
    /// constraints: rows `σᵢ vᵢᵀ` of the SVD `A = U Σ Vᵀ` for
    /// `σᵢ > rel_tol · σ_max`, with right-hand side `Uᵀb`.
    ///
    /// Constraints that are pure rounding noise (typical after restricting
    /// to an approximately computed face) would otherwise be enforced
    /// exactly by the projection.
    pub fn compressed(&self, rel_tol: f64) -> Result<Self> {
        let rep = self.matrix_rep();
        if rep.nrows() == 0 {
            return Ok(self.clone());
        }
        let svd = linalg::svd(rep)?;
        let smax = svd.singular_values.max();
        if smax <= T::zero() {
            return Err(Error::PseudoinverseFailure);
        }
        let cut = smax * T::of(rel_tol);
        let u = svd.u.as_ref().expect("u requested");
        let v_t = svd.v_t.as_ref().expect("v_t requested");
        let mut mats = Vec::new();
        let mut rhs = Vec::new();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s > cut {
                let row = v_t.row(i).transpose() * s;
                mats.push(linalg::unvec_rows(&row, self.dim));
                rhs.push(u.column(i).dot(&self.rhs));
            }
        }
        LinearOperator::new(self.dim, mats, DVector::from_vec(rhs))
    }

    /// CSV dump of `[matrix_rep | b]`, one constraint per line.
    pub fn to_csv(&self) -> String {
        let rep = self.matrix_rep();
        let mut s = String::new();
        for i in 0..rep.nrows() {
            for v in rep.row(i).iter() {
                let _ = write!(s, "{v},");
            }
            let _ = writeln!(s, "{}", self.rhs[i]);
        }
        s
    }
}

/// `‖𝒜(X) − b‖₂`.
pub fn residual<T: Real>(op: &LinearOperator<T>, x: &DMatrix<T>) -> T {
    op.residual(x)
}

/// The moment SDP for a system at degree `d`.
#[derive(Clone, Debug)]
pub struct MomentProblem<T: Real> {
    /// Normalisation, moment-structure and kernel constraints, in that order.
    pub op: LinearOperator<T>,
    pub basis: MonomialBasis,
    /// Coefficient matrix of the system, `k × m`.
    pub coeffs: DMatrix<T>,
    pub structure_constraints: usize,
    pub kernel_constraints: usize,
}

impl<T: Real> MomentProblem<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn sym_unit<T: Real>(k: usize, i: usize, j: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(k, k);
    let h = T::of(0.5);
    m[(i, j)] += h;
    m[(j, i)] += h;
    m
}

/// Normalisation `X₀₀ = 1` followed by one equality per non-canonical cell
/// `(i ≤ j)` tying it to the first cell with the same monomial product.
pub fn moment_structure<T: Real>(basis: &MonomialBasis) -> (Vec<DMatrix<T>>, Vec<T>) {
    let k = basis.len();
    let mut mats = Vec::new();
    let mut rhs = Vec::new();
    let mut e00 = DMatrix::zeros(k, k);
    e00[(0, 0)] = T::one();
    mats.push(e00);
    rhs.push(T::one());
    let mut canonical = HashMap::new();
    for i in 0..k {
        for j in i..k {
            let gamma = basis.monomial(i).mul(basis.monomial(j));
            match canonical.get(&gamma) {
                None => {
                    canonical.insert(gamma, (i, j));
                }
                Some(&(a, b)) => {
                    mats.push(sym_unit::<T>(k, i, j) - sym_unit::<T>(k, a, b));
                    rhs.push(T::zero());
                }
            }
        }
    }
    (mats, rhs)
}

/// Builds `{X : 𝒜(X) = b, BᵀX = 0, X ⪰ 0}` for `system` at degree `d`.
///
/// Kernel constraints `(X bⱼ)_β = 0` are encoded as the symmetric matrices
/// `(bⱼ e_βᵀ + e_β bⱼᵀ)/2`; exact duplicates are dropped.
pub fn build_moment_problem<T: Real>(system: &[Polynomial<T>], d: usize) -> Result<MomentProblem<T>> {
    let nvars = system.first().ok_or(Error::EmptySystem)?.nvars();
    if system.iter().all(Polynomial::is_zero) {
        return Err(Error::EmptySystem);
    }
    let sd = system_degree(system);
    if sd > d {
        return Err(Error::DegreeOverflow { degree: sd, max: d });
    }
    let basis = MonomialBasis::new(nvars, d);
    let coeffs = coeff_matrix(system, &basis)?;
    let k = basis.len();
    let (mut mats, mut rhs) = moment_structure::<T>(&basis);
    let structure_constraints = mats.len() - 1;
    let mut kernel: Vec<DMatrix<T>> = Vec::new();
    for col in coeffs.column_iter() {
        if col.iter().all(|c| *c == T::zero()) {
            continue;
        }
        for beta in 0..k {
            let mut m = DMatrix::zeros(k, k);
            let h = T::of(0.5);
            for (a, &c) in col.iter().enumerate() {
                m[(a, beta)] += c * h;
                m[(beta, a)] += c * h;
            }
            if !kernel.contains(&m) {
                kernel.push(m);
            }
        }
    }
    let kernel_constraints = kernel.len();
    rhs.extend(std::iter::repeat_n(T::zero(), kernel.len()));
    mats.extend(kernel);
    let op = LinearOperator::new(k, mats, DVector::from_vec(rhs))?;
    Ok(MomentProblem {
        op,
        basis,
        coeffs,
        structure_constraints,
        kernel_constraints,
    })
}

//! Projections onto the rank-constrained PSD cone and onto affine sets,
//! plus eigenvalue-based rank and nullspace utilities.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::Result;
use crate::linalg::{symmetrize, unvec_rows, vec_rows};
use crate::momentprob::LinearOperator;
use crate::scalar::Real;

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T: Real> {
    pub values: DVector<T>,
    pub vectors: DMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    /// Decomposes the symmetric part of `x`.
    pub fn new(x: &DMatrix<T>) -> Self {
        let k = x.nrows();
        if k == 0 {
            return EigenDecomposition {
                values: DVector::zeros(0),
                vectors: DMatrix::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(symmetrize(x));
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = DVector::from_iterator(k, order.iter().map(|&i| eig.eigenvalues[i]));
        let vectors = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
        EigenDecomposition { values, vectors }
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        self.reconstruct_with(self.values.as_slice())
    }

    fn reconstruct_with(&self, values: &[T]) -> DMatrix<T> {
        let k = self.vectors.nrows();
        let mut out = DMatrix::zeros(k, k);
        for (i, &v) in values.iter().enumerate() {
            if v != T::zero() {
                let c = self.vectors.column(i);
                out.ger(v, &c, &c, T::one());
            }
        }
        symmetrize(&out)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().next().unwrap_or_else(T::zero)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().last().unwrap_or_else(T::zero)
    }
}

/// Nearest PSD matrix of rank at most `r`: keeps the `r` largest positive
/// eigenvalues and zeroes the rest. Eigenvalues exactly equal to the `r`-th
/// kept value are kept as well.
pub fn project_psd<T: Real>(x: &DMatrix<T>, r: usize) -> DMatrix<T> {
    let eig = EigenDecomposition::new(x);
    let mut kept: Vec<T> = eig.values.iter().map(|&v| v.max(T::zero())).collect();
    if r == 0 {
        kept.iter_mut().for_each(|v| *v = T::zero());
    } else if r < kept.len() {
        let last = kept[r - 1];
        for v in kept.iter_mut().skip(r) {
            if *v != last {
                *v = T::zero();
            }
        }
    }
    eig.reconstruct_with(&kept)
}

/// Orthogonal projection onto `{X : 𝒜(X) = b}` via the cached pseudoinverse.
pub fn project_affine<T: Real>(x: &DMatrix<T>, op: &LinearOperator<T>) -> Result<DMatrix<T>> {
    assert_eq!(x.nrows(), op.dim());
    let p = op.projector()?;
    let v = &p.proj * vec_rows(x) + &p.shift;
    Ok(symmetrize(&unvec_rows(&v, op.dim())))
}

/// Orthonormal basis of the eigenvectors of `z` with eigenvalue
/// `< tol · max(1, λ_max)`.
pub fn numerical_nullspace<T: Real>(z: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let eig = EigenDecomposition::new(z);
    let cut = T::of(tol) * eig.max().max(T::one());
    let cols: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] < cut).collect();
    DMatrix::from_fn(z.nrows(), cols.len(), |i, j| eig.vectors[(i, cols[j])])
}

/// Number of leading values kept before a value drops below
/// `abs_floor · values[0]` or falls by more than `gap_factor` relative to
/// its predecessor. `values` must be sorted descending.
pub fn numerical_rank<T: Real>(values: &[T], gap_factor: f64, abs_floor: f64) -> usize {
    let Some(&first) = values.first() else {
        return 0;
    };
    if first <= T::zero() {
        return 0;
    }
    let floor = first * T::of(abs_floor);
    let gap = T::of(gap_factor);
    let mut r = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < floor || (i > 0 && v < gap * values[i - 1]) {
            break;
        }
        r += 1;
    }
    r
}

//! Dense helpers shared by the projection and facial-reduction code.

use nalgebra::{DMatrix, DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major vectorisation `[a₁₁, a₁₂, …, a₁ₖ, a₂₁, …, aₖₖ]`.
pub fn vec_rows<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    let (r, c) = m.shape();
    DVector::from_fn(r * c, |idx, _| m[(idx / c, idx % c)])
}

/// Inverse of [`vec_rows`] for a square `k × k` matrix.
pub fn unvec_rows<T: Real>(v: &DVector<T>, k: usize) -> DMatrix<T> {
    assert_eq!(v.len(), k * k);
    DMatrix::from_fn(k, k, |i, j| v[i * k + j])
}

pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::of(0.5)
}

/// Trace inner product `⟨A, B⟩ = Σᵢⱼ aᵢⱼ bᵢⱼ`.
pub fn trace_product<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.component_mul(b).sum()
}

/// Thin SVD with `u` and `v_t`, checked by reconstruction. The factors
/// come from faer; nalgebra's bidiagonal iteration is the fallback, as it
/// occasionally returns inconsistent factors on rank-deficient input.
pub(crate) fn svd<T: Real>(m: DMatrix<T>) -> Result<SVD<T, nalgebra::Dyn, nalgebra::Dyn>> {
    let scale = m.amax().max(T::one());
    let accept = |svd: &SVD<T, nalgebra::Dyn, nalgebra::Dyn>| {
        let (Some(u), Some(v_t)) = (svd.u.as_ref(), svd.v_t.as_ref()) else {
            return false;
        };
        let recon = u * DMatrix::from_diagonal(&svd.singular_values) * v_t;
        (recon - &m).amax() <= T::of(1e-10) * scale
    };
    if let Some(svd) = faer_svd(&m) {
        if accept(&svd) {
            return Ok(svd);
        }
    }
    for factor in [1.0, 5.0, 50.0, 500.0] {
        let eps = T::default_epsilon() * T::of(factor);
        if let Some(svd) = SVD::try_new(m.clone(), true, true, eps, 0) {
            if accept(&svd) {
                return Ok(svd);
            }
        }
    }
    Err(Error::PseudoinverseFailure)
}

fn faer_svd<T: Real>(m: &DMatrix<T>) -> Option<SVD<T, nalgebra::Dyn, nalgebra::Dyn>> {
    let (rows, cols) = m.shape();
    let a = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)].as_f64());
    let f = a.thin_svd().ok()?;
    let (u, s, v) = (f.U(), f.S().column_vector(), f.V());
    let r = rows.min(cols);
    Some(SVD {
        u: Some(DMatrix::from_fn(rows, r, |i, j| T::of(u[(i, j)]))),
        v_t: Some(DMatrix::from_fn(r, cols, |i, j| T::of(v[(j, i)]))),
        singular_values: DVector::from_fn(r, |i, _| T::of(s[i])),
    })
}

/// Moore–Penrose pseudoinverse keeping singular values above
/// `rel_cut · σ_max`. Returns the pseudoinverse and the retained rank.
pub fn pseudoinverse<T: Real>(m: &DMatrix<T>, rel_cut: f64) -> Result<(DMatrix<T>, usize)> {
    let (pinv, rows) = pseudoinverse_with_row_space(m, rel_cut)?;
    Ok((pinv, rows.ncols()))
}

/// Pseudoinverse as in [`pseudoinverse`] together with an orthonormal basis
/// of the retained row space, one basis vector per column.
pub(crate) fn pseudoinverse_with_row_space<T: Real>(m: &DMatrix<T>, rel_cut: f64) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok((DMatrix::zeros(cols, rows), DMatrix::zeros(cols, 0)));
    }
    let svd = svd(m.clone())?;
    let smax = svd.singular_values.max();
    if smax <= T::zero() {
        return Err(Error::PseudoinverseFailure);
    }
    let cut = smax * T::of(rel_cut);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    let mut pinv = DMatrix::zeros(cols, rows);
    for &i in &keep {
        pinv += (v_t.row(i).transpose() * u.column(i).transpose()) / svd.singular_values[i];
    }
    let basis = DMatrix::from_fn(cols, keep.len(), |i, j| v_t[(keep[j], i)]);
    Ok((pinv, basis))
}

/// Orthonormal basis of the column space, dropping directions with singular
/// value `≤ rel_tol · max(1, σ_max)`.
pub fn orthonormal_columns<T: Real>(m: &DMatrix<T>, rel_tol: f64) -> Result<DMatrix<T>> {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return Ok(DMatrix::zeros(rows, 0));
    }
    let svd = svd(m.clone())?;
    let smax = svd.singular_values.max();
    let cut = T::of(rel_tol) * smax.max(T::one());
    let u = svd.u.as_ref().expect("u requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    Ok(DMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])]))
}

/// Seeded random symmetric matrix with unit Frobenius norm.
pub fn random_symmetric<T: Real>(k: usize, seed: u64) -> DMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
    let s: DMatrix<f64> = (&g + g.transpose()) * 0.5;
    let n = s.norm();
    let s = if n > 0.0 { s / n } else { s };
    s.map(T::of)
}

/// `‖I − UᵀU‖_max`, how far the columns of `u` are from orthonormal.
pub fn orthonormality_defect<T: Real>(u: &DMatrix<T>) -> T {
    let g = u.transpose() * u - DMatrix::identity(u.ncols(), u.ncols());
    g.amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorisation_is_row_major() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(vec_rows(&m).as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(unvec_rows(&vec_rows(&m), 2), m);
    }

    #[test]
    fn pseudoinverse_of_rank_deficient() {
        let a = DMatrix::<f64>::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (p, r) = pseudoinverse(&a, 1e-11).unwrap();
        assert_eq!(r, 1);
        assert_eq!(p.shape(), (2, 3));
        assert!((p[(0, 0)] - 1.0).abs() < 1e-14);
        assert!(p.iter().enumerate().all(|(i, v)| i == 0 || v.abs() < 1e-14));
        assert!(matches!(
            pseudoinverse(&DMatrix::<f64>::zeros(2, 2), 1e-11),
            Err(Error::PseudoinverseFailure)
        ));
    }

    #[test]
    fn pseudoinverse_with_repeated_columns() {
        // rank 2, columns repeated up to sign and scale
        let v = DVector::<f64>::from_vec(vec![0.1472, -0.0456, -0.0413, 0.3489]);
        let v = &v / v.norm();
        let vv = vec_rows(&(&v * v.transpose()));
        let id = vec_rows(&DMatrix::<f64>::identity(4, 4));
        let a = DMatrix::from_columns(&[vv.clone(), id, -vv.clone(), vv * 0.3]);
        let (p, r) = pseudoinverse(&a, 1e-11).unwrap();
        assert_eq!(r, 2);
        assert!((&a * &p * &a - &a).amax() < 1e-12);
        assert!((&p * &a * &p - &p).amax() < 1e-12);
    }

    #[test]
    fn penrose_conditions() {
        let a: DMatrix<f64> = random_symmetric::<f64>(5, 3).columns(0, 3).into_owned();
        let (p, _) = pseudoinverse(&a, 1e-11).unwrap();
        assert!((&a * &p * &a - &a).amax() < 1e-12);
        assert!((&p * &a * &p - &p).amax() < 1e-10);
    }

    #[test]
    fn orthonormal_basis_drops_dependent_columns() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let q = orthonormal_columns(&m, 1e-10).unwrap();
        assert_eq!(q.ncols(), 2);
        assert!(orthonormality_defect(&q) < 1e-14);
    }

    #[test]
    fn random_symmetric_is_deterministic() {
        let a = random_symmetric::<f64>(4, 9);
        assert_eq!(a, random_symmetric::<f64>(4, 9));
        assert_eq!(a, a.transpose());
        assert!((a.norm() - 1.0).abs() < 1e-14);
    }
}

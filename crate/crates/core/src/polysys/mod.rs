//! Multivariate polynomials, the graded monomial basis, and the
//! polynomial ↔ coefficient-vector correspondence.

mod basis;
mod monomial;
mod parse;
mod polynomial;

pub use basis::{binomial, MonomialBasis};
pub use monomial::{variable_name, Monomial};
pub use parse::{parse_polynomial, parse_system};
pub use polynomial::{Polynomial, DROP_TOL};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficient vector of `p` in `basis`: entry `i` is the coefficient of
/// `basis.monomial(i)`.
pub fn vec_of<T: Real>(p: &Polynomial<T>, basis: &MonomialBasis) -> Result<DVector<T>> {
    check_arity(p, basis)?;
    let mut v = DVector::zeros(basis.len());
    for (m, &c) in p.terms() {
        let i = basis.position(m).ok_or(Error::DegreeOverflow {
            degree: m.degree(),
            max: basis.degree(),
        })?;
        v[i] = c;
    }
    Ok(v)
}

/// The polynomial `Σ v_α x^α`.
pub fn poly_of<T: Real>(v: &DVector<T>, basis: &MonomialBasis) -> Result<Polynomial<T>> {
    if v.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: v.len(),
        });
    }
    Ok(Polynomial::from_terms(
        basis.nvars(),
        v.iter().enumerate().map(|(i, &c)| (basis.monomial(i).clone(), c)),
    ))
}

/// Maximum degree over a system; zero polynomials are ignored.
pub fn system_degree<T: Real>(system: &[Polynomial<T>]) -> usize {
    system.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
}

/// All products `x^γ · f` with `|γ| + deg f ≤ d`, `f`-major and `γ` in basis
/// order, with exact duplicates removed.
pub fn prolong<T: Real>(system: &[Polynomial<T>], d: usize) -> Result<Vec<Polynomial<T>>> {
    let sd = system_degree(system);
    if d < sd {
        return Err(Error::DegreeTooLow { d, system: sd });
    }
    let mut out: Vec<Polynomial<T>> = Vec::new();
    for f in system {
        let Some(deg) = f.degree() else { continue };
        let multipliers = MonomialBasis::new(f.nvars(), d - deg);
        for g in multipliers.monomials() {
            let p = f.mul_monomial(g);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// `k × m` matrix whose column `j` is `vec_of(system[j])`.
pub fn coeff_matrix<T: Real>(system: &[Polynomial<T>], basis: &MonomialBasis) -> Result<DMatrix<T>> {
    let mut b = DMatrix::zeros(basis.len(), system.len());
    for (j, f) in system.iter().enumerate() {
        b.set_column(j, &vec_of(f, basis)?);
    }
    Ok(b)
}

fn check_arity<T: Real>(p: &Polynomial<T>, basis: &MonomialBasis) -> Result<()> {
    if p.nvars() != basis.nvars() {
        return Err(Error::DimensionMismatch {
            expected: basis.nvars(),
            got: p.nvars(),
        });
    }
    Ok(())
}

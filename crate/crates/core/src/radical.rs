//! The outer loop: solve for a maximum-rank moment matrix, read off its
//! kernel, close the kernel under degree-bounded multiplication, and repeat
//! until the kernel is already closed.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::facialred::{solve_max_rank, FRTrace};
use crate::linalg::orthonormal_columns;
use crate::momentprob::build_moment_problem;
use crate::polysys::{binomial, poly_of, prolong, system_degree, vec_of, MonomialBasis, Polynomial};
use crate::projops::{numerical_nullspace, EigenDecomposition};
use crate::scalar::Real;

/// Relative singular-value cutoff when orthonormalising spans.
const SPAN_TOL: f64 = 1e-8;
/// Generator coefficients below this are treated as rounding noise.
const CHOP_TOL: f64 = 1e-9;

/// Polynomials whose coefficient vectors span the kernel of a moment matrix.
#[derive(Clone, Debug)]
pub struct KernelBasis<T: Real> {
    pub polys: Vec<Polynomial<T>>,
    /// Orthonormal coefficient vectors, one column per polynomial.
    pub vectors: DMatrix<T>,
    pub basis: MonomialBasis,
}

impl<T: Real> KernelBasis<T> {
    /// Orthonormalises the coefficient vectors of `polys`.
    pub fn from_polys(polys: &[Polynomial<T>], basis: &MonomialBasis) -> Result<Self> {
        let mut m = DMatrix::zeros(basis.len(), polys.len());
        for (j, p) in polys.iter().enumerate() {
            m.set_column(j, &vec_of(p, basis)?);
        }
        Self::from_vectors(orthonormal_columns(&m, SPAN_TOL)?, basis)
    }

    fn from_vectors(vectors: DMatrix<T>, basis: &MonomialBasis) -> Result<Self> {
        let polys = vectors
            .column_iter()
            .map(|c| poly_of(&c.into_owned(), basis))
            .collect::<Result<_>>()?;
        Ok(KernelBasis {
            polys,
            vectors,
            basis: basis.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    /// Distance from `vec_of(p)` to the span.
    pub fn distance(&self, p: &Polynomial<T>) -> Result<T> {
        let v = vec_of(p, &self.basis)?;
        let proj = &self.vectors * (self.vectors.transpose() * &v);
        Ok((v - proj).norm())
    }
}

/// Eigenvectors of `m` with eigenvalue `< ker_tol · λ_max`, as polynomials.
pub fn extract_kernel<T: Real>(m: &DMatrix<T>, basis: &MonomialBasis, ker_tol: f64) -> Result<KernelBasis<T>> {
    if m.nrows() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: m.nrows(),
        });
    }
    let eig = EigenDecomposition::new(m);
    let cut = T::of(ker_tol) * eig.max();
    let cols: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] < cut).collect();
    let vectors = DMatrix::from_fn(m.nrows(), cols.len(), |i, j| eig.vectors[(i, cols[j])]);
    KernelBasis::from_vectors(vectors, basis)
}

/// Orthonormal basis of the polynomials of degree `≤ e` in the span of the
/// orthonormal columns `s`.
fn span_up_to<T: Real>(s: &DMatrix<T>, basis: &MonomialBasis, e: usize, tol: f64) -> Result<DMatrix<T>> {
    let low = basis.count_up_to(e);
    let k = basis.len();
    if s.ncols() == 0 || low == k {
        return Ok(s.clone());
    }
    let high = s.rows(low, k - low).into_owned();
    let gram = high.transpose() * &high;
    // singular values of `high` below tol ⇔ Gram eigenvalues below tol²
    let null = numerical_nullspace(&gram, tol * tol);
    let mut r = s * null;
    r.rows_mut(low, k - low).fill(T::zero());
    orthonormal_columns(&r, SPAN_TOL)
}

/// `x^γ · v` for a coefficient vector `v` of degree `≤ d − |γ|`.
fn shift<T: Real>(v: &[T], gamma: usize, basis: &MonomialBasis) -> nalgebra::DVector<T> {
    let mut out = nalgebra::DVector::zeros(basis.len());
    for (i, &c) in v.iter().enumerate() {
        if c != T::zero() {
            let p = basis.product_position(i, gamma).expect("degree checked by caller");
            out[p] += c;
        }
    }
    out
}

fn prolong_span<T: Real>(s: &DMatrix<T>, basis: &MonomialBasis, tol: f64) -> Result<DMatrix<T>> {
    let d = basis.degree();
    let mut cols: Vec<nalgebra::DVector<T>> = s.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..d {
        let se = span_up_to(s, basis, e, tol)?;
        for gamma in 1..basis.count_up_to(d - e) {
            for c in se.column_iter() {
                cols.push(shift(c.as_slice(), gamma, basis));
            }
        }
    }
    orthonormal_columns(&DMatrix::from_columns(&cols), tol)
}

/// Prolong–project fixed point of the span of `s` at the degree of `basis`.
fn closure_span<T: Real>(s: &DMatrix<T>, basis: &MonomialBasis, tol: f64) -> Result<DMatrix<T>> {
    let mut cur = orthonormal_columns(s, SPAN_TOL)?;
    if cur.ncols() == 0 {
        return Ok(cur);
    }
    loop {
        let next = prolong_span(&cur, basis, tol)?;
        if next.ncols() == cur.ncols() {
            return Ok(next);
        }
        cur = next;
    }
}

/// Smallest span containing `kernel` that is closed under multiplication by
/// monomials within the degree bound. Returns the closure and whether it is
/// strictly larger than `kernel`.
pub fn ideal_closure<T: Real>(kernel: &KernelBasis<T>, tol: f64) -> Result<(KernelBasis<T>, bool)> {
    let c = closure_span(&kernel.vectors, &kernel.basis, tol)?;
    let grew = c.ncols() > kernel.dim();
    Ok((KernelBasis::from_vectors(c, &kernel.basis)?, grew))
}

/// Positions sorted leading-monomial first: descending degree, then
/// descending lex within a degree.
fn leading_first(basis: &MonomialBasis) -> Vec<usize> {
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| basis.monomial(b).grlex_cmp(basis.monomial(a)));
    order
}

/// Reduced row echelon form of the rows `vᵀ` (columns of `s`), pivoting
/// in `order`.
fn rref<T: Real>(s: &DMatrix<T>, order: &[usize]) -> Vec<nalgebra::DVector<T>> {
    let mut rows: Vec<nalgebra::DVector<T>> = s.column_iter().map(|c| c.into_owned()).collect();
    let tol = T::of(SPAN_TOL);
    let mut done = 0;
    for &col in order {
        if done == rows.len() {
            break;
        }
        let (p, pv) = (done..rows.len())
            .map(|i| (i, rows[i][col].abs()))
            .fold((done, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv <= tol {
            continue;
        }
        rows.swap(done, p);
        let pivot = rows[done][col];
        rows[done] /= pivot;
        let pr = rows[done].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != done {
                let f = row[col];
                if f != T::zero() {
                    row.axpy(-f, &pr, T::one());
                }
            }
        }
        done += 1;
    }
    rows.truncate(done);
    rows
}

fn chop<T: Real>(v: &mut nalgebra::DVector<T>) {
    let tol = T::of(CHOP_TOL);
    v.iter_mut().filter(|c| c.abs() < tol).for_each(|c| *c = T::zero());
}

/// Low-degree polynomials whose closure regenerates the span of `span`:
/// candidates come from the row-reduced `S_{≤e}` for ascending `e`, and a
/// candidate is kept only if the closure of those already kept misses it.
/// Each generator has leading coefficient one.
pub fn reduced_generators<T: Real>(span: &KernelBasis<T>, tol: f64) -> Result<Vec<Polynomial<T>>> {
    let basis = &span.basis;
    let order = leading_first(basis);
    let mut kept: Vec<nalgebra::DVector<T>> = Vec::new();
    let mut closed = DMatrix::zeros(basis.len(), 0);
    for e in 0..=basis.degree() {
        if closed.ncols() >= span.dim() {
            break;
        }
        let se = span_up_to(&span.vectors, basis, e, tol)?;
        for mut row in rref(&se, &order) {
            chop(&mut row);
            let resid = &row - &closed * (closed.transpose() * &row);
            if resid.norm() <= T::of(tol) * row.norm() {
                continue;
            }
            kept.push(row);
            closed = closure_span(&DMatrix::from_columns(&kept), basis, tol)?;
        }
    }
    kept.iter().map(|v| poly_of(v, basis).map(|p| p.monic())).collect()
}

/// `binom(d + n − 1, n − 1) − 1`.
pub fn completeness_threshold(d: usize, n: usize) -> usize {
    binomial(d + n - 1, n - 1).saturating_sub(1)
}

/// Number of independent degree-exactly-`d` polynomials in the closure of
/// `generators` at degree `d`.
pub fn top_degree_count<T: Real>(generators: &[Polynomial<T>], d: usize, n: usize, tol: f64) -> Result<usize> {
    let basis = MonomialBasis::new(n, d);
    let k = KernelBasis::from_polys(generators, &basis)?;
    let c = closure_span(&k.vectors, &basis, tol)?;
    if d == 0 {
        return Ok(c.ncols());
    }
    let lower = span_up_to(&c, &basis, d - 1, tol)?;
    Ok(c.ncols() - lower.ncols())
}

/// `Some(true)` when the variety is known to be real positive dimensional
/// and the top-degree count meets [`completeness_threshold`]; `None` when
/// no conclusion can be drawn.
pub fn completeness_check<T: Real>(
    generators: &[Polynomial<T>],
    d: usize,
    n: usize,
    positive_dim: bool,
) -> Result<Option<bool>> {
    if generators.is_empty() || !positive_dim || n == 0 {
        return Ok(None);
    }
    let s = top_degree_count(generators, d, n, 1e-6)?;
    Ok((s == completeness_threshold(d, n)).then_some(true))
}

/// Outcome of [`real_radical`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct RadicalReport<T: Real> {
    pub nvars: usize,
    pub degree: usize,
    /// Reduced generators of the truncated real radical.
    pub generators: Vec<Polynomial<T>>,
    /// Dimension of the final kernel, i.e. of the truncated radical.
    pub kernel_dim: usize,
    /// One trace per outer iteration.
    pub fr_traces: Vec<FRTrace>,
    pub outer_iterations: usize,
    /// The final kernel was closed under degree-bounded multiplication.
    pub ideal_like: bool,
    pub final_rank: usize,
    pub residual: f64,
    /// Spectrum of the final moment matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Successful-stage DR iterations over all outer iterations.
    pub dr_iterations: usize,
    pub completeness: Option<bool>,
    pub completeness_count: Option<usize>,
    pub completeness_threshold: Option<usize>,
}

/// Everything [`real_radical`] computes, including the final moment matrix.
#[derive(Clone, Debug)]
pub struct RadicalRun<T: Real> {
    pub report: RadicalReport<T>,
    pub moment: DMatrix<T>,
    pub kernel: KernelBasis<T>,
    pub history: Vec<f64>,
}

fn check_system<T: Real>(system: &[Polynomial<T>], d: usize) -> Result<usize> {
    let n = system.first().ok_or(Error::EmptySystem)?.nvars();
    if let Some(p) = system.iter().find(|p| p.nvars() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.nvars(),
        });
    }
    if system.iter().all(Polynomial::is_zero) {
        return Err(Error::EmptySystem);
    }
    let sd = system_degree(system);
    if d < sd {
        return Err(Error::DegreeTooLow { d, system: sd });
    }
    Ok(n)
}

/// Basis of the degree-`≤ d` part of the real radical of `⟨system⟩`.
pub fn real_radical<T: Real>(system: &[Polynomial<T>], d: usize, cfg: &SolverConfig) -> Result<RadicalReport<T>> {
    run_real_radical(system, d, cfg, false).map(|r| r.report)
}

/// As [`real_radical`], keeping the moment matrix and DR history. With
/// `positive_dim` set the completeness test is applied.
pub fn run_real_radical<T: Real>(
    system: &[Polynomial<T>],
    d: usize,
    cfg: &SolverConfig,
    positive_dim: bool,
) -> Result<RadicalRun<T>> {
    cfg.validate()?;
    let n = check_system(system, d)?;
    let basis = MonomialBasis::new(n, d);
    let mut current = prolong(system, d)?;
    let mut traces = Vec::new();
    let mut history = Vec::new();
    for iteration in 1..=cfg.max_outer {
        let stage = |e: Error| Error::Stage {
            iteration,
            source: Box::new(e),
        };
        let problem = build_moment_problem(&current, d).map_err(stage)?;
        let sol = solve_max_rank(&problem, cfg).map_err(stage)?;
        history.extend_from_slice(&sol.history);
        let kernel = extract_kernel(&sol.x, &basis, cfg.ker_tol).map_err(stage)?;
        let (closure, grew) = ideal_closure(&kernel, cfg.closure_tol).map_err(stage)?;
        traces.push(sol.trace.clone());
        if grew {
            current = closure.polys;
            continue;
        }
        let generators = reduced_generators(&kernel, cfg.closure_tol)?;
        let eigenvalues = EigenDecomposition::new(&sol.x)
            .values
            .iter()
            .map(|v| v.as_f64())
            .collect();
        let (completeness, count, threshold) = if positive_dim && n > 0 {
            let s = top_degree_count(&generators, d, n, cfg.closure_tol)?;
            let t = completeness_threshold(d, n);
            ((s == t).then_some(true), Some(s), Some(t))
        } else {
            (None, None, None)
        };
        let report = RadicalReport {
            nvars: n,
            degree: d,
            generators,
            kernel_dim: kernel.dim(),
            outer_iterations: iteration,
            ideal_like: true,
            final_rank: sol.trace.final_rank,
            residual: sol.trace.primal_residual,
            eigenvalues,
            dr_iterations: traces.iter().map(|t| t.dr_iterations).sum(),
            fr_traces: traces,
            completeness,
            completeness_count: count,
            completeness_threshold: threshold,
        };
        return Ok(RadicalRun {
            report,
            moment: sol.x,
            kernel,
            history,
        });
    }
    Err(Error::NoFixedPoint(cfg.max_outer))
}

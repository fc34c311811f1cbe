//! Douglas–Rachford splitting between the rank-`r` PSD set and an affine set.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random_symmetric;
use crate::momentprob::LinearOperator;
use crate::projops::{project_affine, project_psd};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DRConfig {
    pub max_iters: usize,
    pub res_tol: f64,
    /// Iterations between the two best-residual values compared by the
    /// stall test.
    pub stall_window: usize,
    /// Stalled when the best residual has not dropped below
    /// `stall_factor` times its value `stall_window` iterations ago.
    pub stall_factor: f64,
    /// Rank bound of the PSD projection.
    pub rank: usize,
    pub seed: u64,
}

impl Default for DRConfig {
    fn default() -> Self {
        crate::SolverConfig::default().dr(usize::MAX)
    }
}

impl DRConfig {
    pub fn validate(&self) -> Result<()> {
        if self.res_tol.is_nan() || self.res_tol <= 0.0 {
            return Err(Error::Config(format!("res_tol must be positive, got {}", self.res_tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.stall_factor > 0.0 && self.stall_factor < 1.0) {
            return Err(Error::Config(format!(
                "stall_factor must lie in (0, 1), got {}",
                self.stall_factor
            )));
        }
        if self.stall_window == 0 {
            return Err(Error::Config("stall_window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DRStatus {
    Converged,
    Stalled,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct DRResult<T: Real> {
    /// PSD-side iterate with the smallest residual seen.
    pub y: DMatrix<T>,
    /// Last governing iterate, for warm restarts.
    pub x: DMatrix<T>,
    /// Residual of `y`.
    pub residual: T,
    pub iterations: usize,
    pub status: DRStatus,
    /// Residual after every iteration.
    pub history: Vec<f64>,
}

/// One DR update. Returns `(X_new, P_psd(X, r))`.
pub fn dr_step<T: Real>(x: &DMatrix<T>, op: &LinearOperator<T>, r: usize) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let y = project_psd(x, r);
    let refl = &y * T::of(2.0) - x;
    let z = project_affine(&refl, op)? * T::of(2.0) - &refl;
    let x_new = (x + z) * T::of(0.5);
    Ok((x_new, y))
}

/// `I + 0.1 N` with `N` a seeded symmetric matrix of unit norm.
pub fn initial_point<T: Real>(k: usize, seed: u64) -> DMatrix<T> {
    DMatrix::identity(k, k) + random_symmetric::<T>(k, seed) * T::of(0.1)
}

pub fn dr_solve<T: Real>(op: &LinearOperator<T>, cfg: &DRConfig, x0: Option<&DMatrix<T>>) -> Result<DRResult<T>> {
    cfg.validate()?;
    let k = op.dim();
    let mut x = match x0 {
        Some(x0) if x0.shape() != (k, k) => {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: x0.nrows(),
            })
        }
        Some(x0) => x0.clone(),
        None => initial_point(k, cfg.seed),
    };
    let rank = cfg.rank.min(k);
    let tol = T::of(cfg.res_tol);
    let mut best: Option<(T, DMatrix<T>)> = None;
    let mut history = Vec::new();
    // prefix_min[i] = smallest residual among the first i + 1 iterations
    let mut prefix_min: Vec<T> = Vec::new();
    let mut status = DRStatus::BudgetExhausted;
    for it in 1..=cfg.max_iters {
        let (x_new, y) = dr_step(&x, op, rank)?;
        x = x_new;
        let res = op.residual(&y);
        history.push(res.as_f64());
        let improved = best.as_ref().is_none_or(|(b, _)| res < *b);
        if improved {
            best = Some((res, y));
        }
        let current = best.as_ref().map(|(b, _)| *b).expect("set above");
        prefix_min.push(current);
        if res <= tol {
            status = DRStatus::Converged;
            break;
        }
        if it > cfg.stall_window && current > prefix_min[it - 1 - cfg.stall_window] * T::of(cfg.stall_factor) {
            status = DRStatus::Stalled;
            break;
        }
    }
    let (residual, y) = best.expect("max_iters ≥ 1");
    Ok(DRResult {
        y,
        x,
        residual,
        iterations: history.len(),
        status,
        history,
    })
}

//! Solver configuration shared by every stage.

use serde::{Deserialize, Serialize};

use crate::drsolver::DRConfig;
use crate::error::{Error, Result};

/// Tolerances, budgets and heuristics for [`crate::real_radical`] and
/// [`crate::solve_max_rank`]. Every field has a default; see
/// [`SolverConfig::default`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// DR stops once `‖𝒜(Y) − b‖ ≤ res_tol`.
    pub res_tol: f64,
    pub max_dr_iters: usize,
    pub stall_window: usize,
    pub stall_factor: f64,
    /// Relative drop between consecutive eigenvalues treated as a rank gap.
    pub gap_factor: f64,
    /// Eigenvalues below `abs_floor · λ_max` do not count towards the rank.
    pub abs_floor: f64,
    /// Kernel eigenvalue threshold, relative to `λ_max`.
    pub ker_tol: f64,
    /// Minimum `λ_min / λ_max` of the reduced primal solution.
    pub pd_tol: f64,
    pub max_outer: usize,
    pub seed: u64,
    /// `(step, rank)` pairs: ranks tried first for the auxiliary solve of
    /// reduction step `step` (`step = 2` is the first auxiliary solve).
    pub rank_overrides: Vec<(usize, usize)>,
    /// Stalled auxiliary solves with residual below this still expose a face.
    pub aux_accept_tol: f64,
    /// Relative singular-value cutoff when compressing restricted operators.
    pub compress_tol: f64,
    /// Nullspace threshold for exposing vectors, relative to `max(1, λ_max)`.
    pub nullspace_tol: f64,
    /// Automatic rank cuts per auxiliary solve.
    pub max_rank_cuts: usize,
    /// Singular-value threshold used by the ideal closure.
    pub closure_tol: f64,
    /// Iteration budget for the final full-operator refinement.
    pub polish_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            res_tol: 1e-13,
            max_dr_iters: 20_000,
            stall_window: 500,
            stall_factor: 0.5,
            gap_factor: 1e-3,
            abs_floor: 1e-8,
            ker_tol: 1e-6,
            pd_tol: 1e-7,
            max_outer: 10,
            seed: 0,
            rank_overrides: Vec::new(),
            aux_accept_tol: 1e-10,
            compress_tol: 1e-9,
            nullspace_tol: 1e-8,
            max_rank_cuts: 3,
            closure_tol: 1e-6,
            polish_iters: 2000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("res_tol", self.res_tol),
            ("gap_factor", self.gap_factor),
            ("abs_floor", self.abs_floor),
            ("ker_tol", self.ker_tol),
            ("pd_tol", self.pd_tol),
            ("aux_accept_tol", self.aux_accept_tol),
            ("compress_tol", self.compress_tol),
            ("nullspace_tol", self.nullspace_tol),
            ("closure_tol", self.closure_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_outer == 0 {
            return Err(Error::Config("max_outer must be at least 1".into()));
        }
        if let Some(&(step, rank)) = self.rank_overrides.iter().find(|(s, r)| *s < 2 || *r == 0) {
            return Err(Error::Config(format!(
                "rank override {step}:{rank}: step must be ≥ 2 and rank ≥ 1"
            )));
        }
        self.dr(1).validate()
    }

    /// DR settings at rank `rank`.
    pub fn dr(&self, rank: usize) -> DRConfig {
        DRConfig {
            max_iters: self.max_dr_iters,
            res_tol: self.res_tol,
            stall_window: self.stall_window,
            stall_factor: self.stall_factor,
            rank,
            seed: self.seed,
        }
    }

    /// Ranks requested for reduction step `step`, in the order given.
    pub fn overrides_for(&self, step: usize) -> Vec<usize> {
        self.rank_overrides
            .iter()
            .filter(|(s, _)| *s == step)
            .map(|&(_, r)| r)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let c = SolverConfig {
            res_tol: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            stall_factor: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            rank_overrides: vec![(1, 3)],
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn overrides_keep_order() {
        let c = SolverConfig {
            rank_overrides: vec![(2, 3), (3, 4), (2, 2)],
            ..Default::default()
        };
        assert_eq!(c.overrides_for(2), vec![3, 2]);
        assert!(c.overrides_for(4).is_empty());
    }
}

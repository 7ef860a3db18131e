//! Independent numerical checks of the closed-form solver.
//!
//! The minimisers here never call into [`crate::solver`] to find a
//! candidate; they only ask it for the closed-form distance to compute the
//! reported gap. Candidate search is restricted to states co-diagonal with
//! `rho`, and that restriction is itself checked separately by
//! [`rotation_test`].

mod audit;
mod descent;
mod grid;
mod simplex;

use serde::Serialize;

use crate::linalg::state::DensityMatrix;
use crate::scalar::Real;
use crate::solver::Metric;

pub use audit::{
    majorization_audit, majorization_audit_state, rotation_margin, rotation_test,
    MajorizationReport, RotationReport,
};
pub use descent::{descent_oracle, DescentConfig};
pub use grid::{
    grid_gap_bound, grid_oracle, grid_oracle_on_supports, GridConfig, MAX_DIM as GRID_MAX_DIM,
    MAX_RANK as GRID_MAX_RANK, MAX_RESOLUTION as GRID_MAX_RESOLUTION,
};
pub use simplex::project_to_simplex;

/// Instance identification carried in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceDescriptor {
    pub spectrum: Vec<f64>,
    pub dim: usize,
    pub rank_bound: usize,
    pub seed: Option<u64>,
}

impl InstanceDescriptor {
    pub fn new<T: Real>(rho: &DensityMatrix<T>, rank_bound: usize, seed: Option<u64>) -> Self {
        Self {
            spectrum: rho.eigenvalues().iter().map(|v| v.to_f64_lossy()).collect(),
            dim: rho.dim(),
            rank_bound,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport<T> {
    pub instance: InstanceDescriptor,
    pub metric: Metric,
    /// Metric distance from `rho` to `best_candidate`, recomputed on matrices.
    pub oracle_distance: T,
    pub closed_form_distance: T,
    /// `oracle_distance - closed_form_distance`; never below `-1e-9` unless the
    /// closed form is wrong.
    pub gap: T,
    /// Largest gap the search method can leave at the true optimum (grid
    /// discretisation or descent tolerance).
    pub gap_bound: T,
    pub best_candidate: DensityMatrix<T>,
    /// Eigenvalue-index support of the best candidate.
    pub best_support: Vec<usize>,
    pub candidates_evaluated: u64,
    /// Candidate spectra (indexed like rho's eigenvalues) within the
    /// near-optimal window of the best, capped in length.
    pub near_optimal: Vec<Vec<T>>,
    /// Total number of candidates in the near-optimal window (not capped).
    pub near_optimal_count: u64,
    /// Descent restarts that hit the iteration cap.
    pub failed_restarts: usize,
}

/// Flat, `f64` summary for serialisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub instance: InstanceDescriptor,
    pub metric: Metric,
    pub oracle_distance: f64,
    pub closed_form_distance: f64,
    pub gap: f64,
    pub gap_bound: f64,
    pub best_candidate_spectrum: Vec<f64>,
    pub best_support: Vec<usize>,
    pub candidates_evaluated: u64,
    pub near_optimal_count: u64,
    pub failed_restarts: usize,
}

impl<T: Real> OracleReport<T> {
    pub fn summary(&self) -> OracleSummary {
        OracleSummary {
            instance: self.instance.clone(),
            metric: self.metric,
            oracle_distance: self.oracle_distance.to_f64_lossy(),
            closed_form_distance: self.closed_form_distance.to_f64_lossy(),
            gap: self.gap.to_f64_lossy(),
            gap_bound: self.gap_bound.to_f64_lossy(),
            best_candidate_spectrum: self
                .best_candidate
                .eigenvalues()
                .iter()
                .map(|v| v.to_f64_lossy())
                .collect(),
            best_support: self.best_support.clone(),
            candidates_evaluated: self.candidates_evaluated,
            near_optimal_count: self.near_optimal_count,
            failed_restarts: self.failed_restarts,
        }
    }
}

/// Distance between `rho` (eigenvalues `lambda`) and the co-diagonal state with
/// eigenvalue `x[k]` on eigenvector `support[k]` and zero elsewhere.
pub(crate) fn codiagonal_distance<T: Real>(
    metric: Metric,
    lambda: &[T],
    support: &[usize],
    x: &[T],
) -> T {
    let mut in_support = vec![false; lambda.len()];
    for &i in support {
        in_support[i] = true;
    }
    let outside = lambda
        .iter()
        .zip(&in_support)
        .filter(|(_, &s)| !s)
        .map(|(&l, _)| l);
    match metric {
        Metric::HilbertSchmidt => {
            let inside: T = support
                .iter()
                .zip(x)
                .map(|(&i, &v)| (v - lambda[i]).powi(2))
                .sum();
            inside + outside.map(|l| l * l).sum::<T>()
        }
        Metric::Trace => {
            let inside: T = support
                .iter()
                .zip(x)
                .map(|(&i, &v)| (v - lambda[i]).abs())
                .sum();
            (inside + outside.map(T::abs).sum::<T>()) * T::lit(0.5)
        }
    }
}

/// Lexicographic k-subsets of `0..n`.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

//! Seeded battery cross-checking a closed-form solver against the oracles.
//!
//! Instance `k` of dimension `d` is drawn from seed
//! `seed + 1000 * d + k`: a Haar eigenbasis, a uniformly random rank, and a
//! flat Dirichlet spectrum on that many entries. For every rank bound and
//! both metrics the battery checks:
//!
//! * `oracle_gap`: each oracle's best distance minus the closed form lies in
//!   `[-gap_tolerance, gap_bound + gap_tolerance]` (grid only for `R <= 4`);
//! * `hs_uniqueness`: descent's Hilbert–Schmidt optimum equals the closed-form
//!   state entry-wise;
//! * `trace_family`: every near-optimal descent candidate for the trace
//!   distance belongs to the optimal family;
//! * `monotonicity`: optimal distances are non-increasing in `R` and exactly
//!   zero from the rank of the instance on;
//! * `rotation`: rotating a random candidate away from rho's eigenbasis never
//!   lowers the distance;
//! * `majorization`: spectra majorise diagonals (one audit per battery).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::matrix::Matrix;
use crate::linalg::state::DensityMatrix;
use crate::oracle::{
    descent_oracle, grid_oracle, majorization_audit, rotation_test, DescentConfig, GridConfig,
    InstanceDescriptor, MajorizationReport, OracleReport, GRID_MAX_RANK,
};
use crate::random::{random_density, rng};
use crate::solver::{optimal_distance, solve_hs, trace_family, Metric};
use crate::tolerance::Tolerances;

use rand::Rng;

/// The solver under test.
pub trait ClosedForm {
    fn distance(
        &self,
        rho: &DensityMatrix<f64>,
        r: usize,
        metric: Metric,
        tol: &Tolerances<f64>,
    ) -> Result<f64>;

    /// The Hilbert–Schmidt optimum.
    fn hs_state(
        &self,
        rho: &DensityMatrix<f64>,
        r: usize,
        tol: &Tolerances<f64>,
    ) -> Result<Matrix<f64>>;
}

/// The crate's own closed-form solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactClosedForm;

impl ClosedForm for ExactClosedForm {
    fn distance(
        &self,
        rho: &DensityMatrix<f64>,
        r: usize,
        metric: Metric,
        tol: &Tolerances<f64>,
    ) -> Result<f64> {
        optimal_distance(rho, r, metric, tol)
    }

    fn hs_state(
        &self,
        rho: &DensityMatrix<f64>,
        r: usize,
        tol: &Tolerances<f64>,
    ) -> Result<Matrix<f64>> {
        Ok(solve_hs(rho, r, tol)?.sigma_star.matrix().clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    pub dims: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    /// Haar unitaries per instance and metric.
    pub rotation_trials: usize,
    pub majorization_dim: usize,
    pub majorization_trials: usize,
    /// Allowed amount by which an oracle may beat the closed form.
    pub gap_tolerance: f64,
    pub hs_match_tolerance: f64,
    pub family_tolerance: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            dims: (2..=8).collect(),
            instances: 50,
            seed: 0,
            rotation_trials: 1000,
            majorization_dim: 6,
            majorization_trials: 1000,
            gap_tolerance: 1e-9,
            hs_match_tolerance: 1e-5,
            family_tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: &'static str,
    pub instance: InstanceDescriptor,
    pub metric: Option<Metric>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CheckTally {
    pub runs: u64,
    pub failures: u64,
    /// Most negative margin seen (gap, rotation) or largest deviation seen
    /// (uniqueness, family), depending on the check.
    pub worst: f64,
}

impl CheckTally {
    fn record(&mut self, ok: bool, value: f64, worse: fn(f64, f64) -> f64) {
        self.worst = if self.runs == 0 {
            value
        } else {
            worse(self.worst, value)
        };
        self.runs += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Tallies {
    pub grid_gap: CheckTally,
    pub descent_gap: CheckTally,
    pub hs_uniqueness: CheckTally,
    pub trace_family: CheckTally,
    pub monotonicity: CheckTally,
    pub rotation: CheckTally,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub instances: usize,
    pub tallies: Tallies,
    pub majorization: MajorizationReport,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// Instance `k` of dimension `d`.
pub fn battery_instance(
    d: usize,
    k: usize,
    seed: u64,
    tol: &Tolerances<f64>,
) -> Result<(DensityMatrix<f64>, u64)> {
    let s = seed.wrapping_add(1000 * d as u64 + k as u64);
    let mut g = rng(s);
    let rank = g.random_range(1..=d);
    Ok((random_density(d, rank, &mut g, tol)?, s))
}

pub fn run_battery(
    closed_form: &dyn ClosedForm,
    cfg: &BatteryConfig,
    grid: &GridConfig,
    descent: &DescentConfig,
    tol: &Tolerances<f64>,
) -> Result<BatteryReport> {
    let mut tallies = Tallies::default();
    let mut failures = Vec::new();
    let mut count = 0;
    for &d in &cfg.dims {
        for k in 0..cfg.instances {
            let (rho, seed) = battery_instance(d, k, cfg.seed, tol)?;
            check_instance(
                closed_form,
                &rho,
                seed,
                cfg,
                grid,
                descent,
                tol,
                &mut tallies,
                &mut failures,
            )?;
            count += 1;
        }
    }
    let majorization = majorization_audit::<f64>(
        cfg.majorization_dim,
        cfg.majorization_trials,
        cfg.seed,
        cfg.gap_tolerance,
        tol,
    )?;
    let passed = failures.is_empty() && majorization.passed;
    Ok(BatteryReport {
        instances: count,
        tallies,
        majorization,
        failures,
        passed,
    })
}

#[allow(clippy::too_many_arguments)]
fn check_instance(
    closed_form: &dyn ClosedForm,
    rho: &DensityMatrix<f64>,
    seed: u64,
    cfg: &BatteryConfig,
    grid: &GridConfig,
    descent: &DescentConfig,
    tol: &Tolerances<f64>,
    tallies: &mut Tallies,
    failures: &mut Vec<Failure>,
) -> Result<()> {
    let d = rho.dim();
    let rank = rho.rank(tol.rank);
    let gap_tol = cfg.gap_tolerance;
    let descriptor = |r: usize| InstanceDescriptor::new(rho, r, Some(seed));

    for metric in Metric::ALL {
        let mut previous = f64::INFINITY;
        for r in 1..=d {
            let closed = closed_form.distance(rho, r, metric, tol)?;

            let mono_ok = closed <= previous && ((closed == 0.0) == (r >= rank));
            let step = if previous.is_finite() {
                closed - previous
            } else {
                0.0
            };
            tallies.monotonicity.record(mono_ok, step, f64::max);
            if !mono_ok {
                failures.push(Failure {
                    check: "monotonicity",
                    instance: descriptor(r),
                    metric: Some(metric),
                    detail: format!("distance {closed:e} after {previous:e}, rank {rank}"),
                });
            }
            previous = closed;

            let mut gap_check = |name: &'static str,
                                 rep: &OracleReport<f64>,
                                 tally: &mut CheckTally| {
                let gap = rep.oracle_distance - closed;
                let ok = gap >= -gap_tol && gap <= rep.gap_bound + gap_tol;
                tally.record(ok, gap, f64::min);
                if !ok {
                    failures.push(Failure {
                        check: name,
                        instance: descriptor(r),
                        metric: Some(metric),
                        detail: format!(
                            "oracle {:e}, closed form {closed:e}, gap {gap:e} outside [-{gap_tol:e}, {:e}]",
                            rep.oracle_distance,
                            rep.gap_bound + gap_tol
                        ),
                    });
                }
            };

            if r <= GRID_MAX_RANK {
                let cfg_grid = GridConfig {
                    seed: Some(seed),
                    ..*grid
                };
                let rep = grid_oracle(rho, r, metric, &cfg_grid, tol)?;
                gap_check("grid_gap", &rep, &mut tallies.grid_gap);
            }

            let cfg_descent = DescentConfig {
                seed: seed.wrapping_mul(31).wrapping_add(r as u64),
                ..*descent
            };
            let rep = descent_oracle(rho, r, metric, &cfg_descent, tol)?;
            gap_check("descent_gap", &rep, &mut tallies.descent_gap);

            match metric {
                Metric::HilbertSchmidt => {
                    let expected = closed_form.hs_state(rho, r, tol)?;
                    let dev = rep.best_candidate.matrix().sub(&expected)?.max_abs();
                    let ok = dev <= cfg.hs_match_tolerance;
                    tallies.hs_uniqueness.record(ok, dev, f64::max);
                    if !ok {
                        failures.push(Failure {
                            check: "hs_uniqueness",
                            instance: descriptor(r),
                            metric: Some(metric),
                            detail: format!("descent optimum differs from closed form by {dev:e}"),
                        });
                    }
                }
                Metric::Trace => {
                    let family = trace_family(rho, r, tol)?;
                    let mut worst = 0.0f64;
                    for spectrum in &rep.near_optimal {
                        let state = DensityMatrix::from_eigenpairs(
                            spectrum.clone(),
                            rho.spectrum().vectors().to_vec(),
                            tol,
                        )?;
                        worst = worst.max(family.membership(&state, Default::default())?.worst());
                    }
                    let ok = worst <= cfg.family_tolerance;
                    tallies.trace_family.record(ok, worst, f64::max);
                    if !ok {
                        failures.push(Failure {
                            check: "trace_family",
                            instance: descriptor(r),
                            metric: Some(metric),
                            detail: format!(
                                "near-optimal candidate violates membership by {worst:e}"
                            ),
                        });
                    }
                }
            }
        }

        if cfg.rotation_trials > 0 {
            let mut g = rng(seed ^ 0x5eed);
            let sigma_rank = g.random_range(1..=d);
            let sigma = random_density(d, sigma_rank, &mut g, tol)?;
            let rep = rotation_test(rho, &sigma, metric, cfg.rotation_trials, seed, gap_tol, tol)?;
            tallies
                .rotation
                .record(rep.passed, rep.min_margin, f64::min);
            if !rep.passed {
                failures.push(Failure {
                    check: "rotation",
                    instance: descriptor(sigma_rank),
                    metric: Some(metric),
                    detail: format!(
                        "margin {:e} at trial {} for a candidate of rank {sigma_rank}",
                        rep.min_margin, rep.worst_trial
                    ),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_passes() {
        let cfg = BatteryConfig {
            dims: vec![2, 3, 4],
            instances: 3,
            rotation_trials: 20,
            majorization_trials: 20,
            ..BatteryConfig::default()
        };
        let rep = run_battery(
            &ExactClosedForm,
            &cfg,
            &GridConfig::with_resolution(40),
            &DescentConfig::default(),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(rep.passed, "{:#?}", rep.failures);
        assert_eq!(rep.instances, 9);
        assert!(rep.tallies.grid_gap.runs > 0 && rep.tallies.trace_family.runs > 0);
    }

    #[test]
    fn instances_are_reproducible() {
        let t = Tolerances::default();
        let (a, sa) = battery_instance(5, 3, 7, &t).unwrap();
        let (b, sb) = battery_instance(5, 3, 7, &t).unwrap();
        assert_eq!(sa, sb);
        assert_eq!(a, b);
    }
}

//! Classical simulation of variational principal component analysis.
//!
//! A trial state of rank at most `R` is prepared as the system marginal of a
//! pure state on `system ⊗ ancilla` with an `R`-dimensional ancilla. The
//! amplitudes are the variational parameters (real and imaginary parts
//! interleaved, system index major), and the Hilbert–Schmidt cost
//! `Tr(rho^2) + Tr(sigma^2) - 2 Tr(rho sigma)` is minimised by gradient
//! descent. The minimiser's eigenvectors are the principal components of
//! `rho`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::format_number;
use crate::linalg::matrix::{inner, Matrix};
use crate::linalg::partial_trace::{gram, partial_trace, TraceOut};
use crate::linalg::state::DensityMatrix;
use crate::random::{gaussian, rng};
use crate::scalar::{c, Real, C};
use crate::solver::{solve_hs_distance, trace_family, Metric};
use crate::tolerance::Tolerances;

/// Largest number of amplitudes (`d_sys * d_anc`) the optimiser accepts.
pub const MAX_AMPLITUDES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct PurificationAnsatz<T> {
    d_sys: usize,
    d_anc: usize,
    params: Vec<T>,
}

impl<T: Real> PurificationAnsatz<T> {
    pub fn new(d_sys: usize, d_anc: usize, params: Vec<T>) -> Result<Self> {
        if d_sys == 0 || d_anc == 0 {
            return Err(Error::EmptyDimension);
        }
        if params.len() != 2 * d_sys * d_anc {
            return Err(Error::LengthMismatch {
                left: 2 * d_sys * d_anc,
                right: params.len(),
            });
        }
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite parameter {bad}"
            )));
        }
        if params.iter().all(|p| p.is_zero()) {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            d_sys,
            d_anc,
            params,
        })
    }

    /// I.i.d. Gaussian parameters.
    pub fn random<R: Rng + ?Sized>(d_sys: usize, d_anc: usize, rng: &mut R) -> Result<Self> {
        let params = (0..2 * d_sys * d_anc).map(|_| gaussian(rng)).collect();
        Self::new(d_sys, d_anc, params)
    }

    /// A purification of `sigma`'s top `d_anc` eigenpairs: ancilla column `k`
    /// holds `sqrt(mu_k) v_k`.
    pub fn from_state(sigma: &DensityMatrix<T>, d_anc: usize) -> Result<Self> {
        let d_sys = sigma.dim();
        if d_anc == 0 || d_anc > d_sys {
            return Err(Error::RankOutOfRange {
                rank: d_anc,
                dim: d_sys,
            });
        }
        let spec = sigma.spectrum();
        let mut params = vec![T::zero(); 2 * d_sys * d_anc];
        for k in 0..d_anc {
            let w = spec.values()[k].max(T::zero()).sqrt();
            for (i, z) in spec.vector(k).iter().enumerate() {
                let idx = 2 * (i * d_anc + k);
                params[idx] = w * z.re;
                params[idx + 1] = w * z.im;
            }
        }
        Self::new(d_sys, d_anc, params)
    }

    pub fn d_sys(&self) -> usize {
        self.d_sys
    }

    pub fn d_anc(&self) -> usize {
        self.d_anc
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    /// Normalised amplitude vector.
    pub fn amplitudes(&self) -> Vec<C<T>> {
        let n = self.params.iter().map(|&p| p * p).sum::<T>().sqrt();
        self.params
            .chunks_exact(2)
            .map(|p| c(p[0] / n, p[1] / n))
            .collect()
    }
}

/// Reduced state on the system after discarding the ancilla.
pub fn prepare_state<T: Real>(
    ansatz: &PurificationAnsatz<T>,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    partial_trace(
        &ansatz.amplitudes(),
        ansatz.d_sys,
        ansatz.d_anc,
        TraceOut::Ancilla,
        tol,
    )
}

/// The three estimands of the cost and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostTerms<T> {
    pub purity_rho: T,
    pub purity_sigma: T,
    /// `Re Tr(rho sigma)`.
    pub overlap: T,
    pub total: T,
}

impl<T: Real> CostTerms<T> {
    fn from_parts(purity_rho: T, purity_sigma: T, overlap: T) -> Self {
        Self {
            purity_rho,
            purity_sigma,
            overlap,
            total: purity_rho + purity_sigma - T::lit(2.0) * overlap,
        }
    }
}

pub fn cost<T: Real>(
    rho: &DensityMatrix<T>,
    ansatz: &PurificationAnsatz<T>,
) -> Result<CostTerms<T>> {
    Ok(Objective::new(rho, ansatz.d_sys, ansatz.d_anc)?.terms(&ansatz.params))
}

/// Gradient of the cost with respect to the parameters.
pub fn gradient<T: Real>(rho: &DensityMatrix<T>, ansatz: &PurificationAnsatz<T>) -> Result<Vec<T>> {
    Ok(Objective::new(rho, ansatz.d_sys, ansatz.d_anc)?
        .gradient(&ansatz.params)
        .1)
}

struct Objective<'a, T> {
    rho: &'a Matrix<T>,
    purity_rho: T,
    d_sys: usize,
    d_anc: usize,
}

impl<'a, T: Real> Objective<'a, T> {
    fn new(rho: &'a DensityMatrix<T>, d_sys: usize, d_anc: usize) -> Result<Self> {
        if rho.dim() != d_sys {
            return Err(Error::DimMismatch {
                left: rho.dim(),
                right: d_sys,
            });
        }
        Ok(Self {
            rho: rho.matrix(),
            purity_rho: rho.purity(),
            d_sys,
            d_anc,
        })
    }

    /// Unnormalised amplitude matrix and its squared norm.
    fn amplitude(&self, params: &[T]) -> (Matrix<T>, T) {
        let m = Matrix::from_fn(self.d_sys, self.d_anc, |i, a| {
            let k = 2 * (i * self.d_anc + a);
            c(params[k], params[k + 1])
        });
        let n = params.iter().map(|&p| p * p).sum();
        (m, n)
    }

    fn sigma(&self, m: &Matrix<T>, n: T) -> Matrix<T> {
        gram(m).scale(T::one() / n)
    }

    fn terms_of(&self, sigma: &Matrix<T>) -> CostTerms<T> {
        let overlap = self
            .rho
            .as_slice()
            .iter()
            .zip(sigma.as_slice())
            .map(|(r, s)| (r * s.conj()).re)
            .sum();
        CostTerms::from_parts(self.purity_rho, sigma.frobenius_sqr(), overlap)
    }

    fn terms(&self, params: &[T]) -> CostTerms<T> {
        let (m, n) = self.amplitude(params);
        self.terms_of(&self.sigma(&m, n))
    }

    /// `grad = (2/n) [G M - Tr(G sigma) M]` with `G = 2 (sigma - rho)`, split
    /// into real and imaginary parts.
    fn gradient(&self, params: &[T]) -> (CostTerms<T>, Vec<T>) {
        let (m, n) = self.amplitude(params);
        let sigma = self.sigma(&m, n);
        let terms = self.terms_of(&sigma);
        let two = T::lit(2.0);
        let g = sigma.sub(self.rho).expect("matching dimensions").scale(two);
        let tr_g_sigma = two * (terms.purity_sigma - terms.overlap);
        let gm = g.matmul(&m).expect("matching dimensions");
        let scale = two / n;
        let mut grad = Vec::with_capacity(params.len());
        for (gz, mz) in gm.as_slice().iter().zip(m.as_slice()) {
            let z = (*gz - *mz * tr_g_sigma) * scale;
            grad.push(z.re);
            grad.push(z.im);
        }
        (terms, grad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Every line search starts from `initial_step`.
    Backtracking,
    /// Line searches start from the Barzilai–Borwein step of the last move.
    BarzilaiBorwein,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    pub step_rule: StepRule,
    pub initial_step: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub max_halvings: usize,
    /// Stop a restart once the gradient norm falls to this.
    pub grad_tol: f64,
    /// Allowed excess of the final cost over the closed-form optimum.
    pub convergence_tol: f64,
    /// Standard deviation of additive Gaussian noise on each cost term seen
    /// by the line search. Zero disables it.
    pub cost_noise: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            restarts: 5,
            seed: 0,
            step_rule: StepRule::BarzilaiBorwein,
            initial_step: 1.0,
            armijo: 1e-4,
            max_halvings: 60,
            grad_tol: 1e-10,
            convergence_tol: 1e-6,
            cost_noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalRun<T> {
    /// Cost after each accepted step of the best restart, starting with the
    /// initial cost.
    pub cost_history: Vec<T>,
    pub final_params: Vec<T>,
    pub final_state: DensityMatrix<T>,
    pub final_cost: T,
    pub closed_form_distance: T,
    pub closed_form_gap: T,
    /// Accepted steps in the best restart.
    pub iterations: usize,
    pub converged: bool,
    pub best_restart: usize,
    pub restarts: usize,
    pub rank_bound: usize,
}

/// `f64` view of a run for serialisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationalRecord {
    pub dim: usize,
    pub rank_bound: usize,
    pub converged: bool,
    pub iterations: usize,
    pub restarts: usize,
    pub best_restart: usize,
    pub final_cost: f64,
    pub closed_form_distance: f64,
    pub closed_form_gap: f64,
    pub final_spectrum: Vec<f64>,
    pub final_state: Vec<Vec<[f64; 2]>>,
    pub final_params: Vec<f64>,
    pub cost_history: Vec<f64>,
}

impl<T: Real> VariationalRun<T> {
    pub fn record(&self) -> VariationalRecord {
        let f = |v: &[T]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>();
        VariationalRecord {
            dim: self.final_state.dim(),
            rank_bound: self.rank_bound,
            converged: self.converged,
            iterations: self.iterations,
            restarts: self.restarts,
            best_restart: self.best_restart,
            final_cost: self.final_cost.to_f64_lossy(),
            closed_form_distance: self.closed_form_distance.to_f64_lossy(),
            closed_form_gap: self.closed_form_gap.to_f64_lossy(),
            final_spectrum: f(self.final_state.eigenvalues()),
            final_state: self
                .final_state
                .matrix()
                .to_rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()])
                        .collect()
                })
                .collect(),
            final_params: f(&self.final_params),
            cost_history: f(&self.cost_history),
        }
    }

    /// `iteration,cost` rows.
    pub fn cost_history_csv(&self) -> String {
        let mut out = String::from("iteration,cost\n");
        for (i, v) in self.cost_history.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", format_number(v.to_f64_lossy())));
        }
        out
    }
}

struct Restart<T> {
    params: Vec<T>,
    history: Vec<T>,
    iterations: usize,
}

/// Best of `cfg.restarts` gradient-descent runs from Gaussian starting
/// points (restart `k` seeded with `cfg.seed + k`).
///
/// Hitting `max_iters` is not an error: the best parameters found are
/// returned with `converged == false`.
pub fn optimize<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    cfg: &OptimizerConfig,
    tol: &Tolerances<T>,
) -> Result<VariationalRun<T>> {
    let d = rho.dim();
    if r == 0 || r > d {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    if d * r > MAX_AMPLITUDES {
        return Err(Error::BudgetExceeded(format!(
            "variational simulation limited to {MAX_AMPLITUDES} amplitudes (got {})",
            d * r
        )));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is required".into(),
        ));
    }
    let objective = Objective::new(rho, d, r)?;
    let optimum = solve_hs_distance(rho, r, tol)?;

    let mut best: Option<(T, usize, Restart<T>)> = None;
    for k in 0..cfg.restarts {
        let run = run_restart(&objective, cfg, cfg.seed.wrapping_add(k as u64))?;
        let final_cost = objective.terms(&run.params).total;
        if best.as_ref().is_none_or(|(c, _, _)| final_cost < *c) {
            best = Some((final_cost, k, run));
        }
    }
    let (final_cost, best_restart, run) = best.expect("at least one restart");
    let ansatz = PurificationAnsatz::new(d, r, run.params)?;
    let final_state = prepare_state(&ansatz, tol)?;
    let gap = final_cost - optimum;
    Ok(VariationalRun {
        cost_history: run.history,
        final_params: ansatz.params,
        final_state,
        final_cost,
        closed_form_distance: optimum,
        closed_form_gap: gap,
        iterations: run.iterations,
        converged: gap <= T::lit(cfg.convergence_tol),
        best_restart,
        restarts: cfg.restarts,
        rank_bound: r,
    })
}

fn run_restart<T: Real>(
    objective: &Objective<'_, T>,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<Restart<T>> {
    let mut g = rng(seed);
    let mut params =
        PurificationAnsatz::<T>::random(objective.d_sys, objective.d_anc, &mut g)?.params;
    let noise = (cfg.cost_noise > 0.0)
        .then(|| Normal::new(0.0, cfg.cost_noise))
        .transpose()
        .map_err(|e| Error::InvalidArgument(format!("cost noise: {e}")))?;
    let mut observe = |terms: CostTerms<T>| match &noise {
        None => terms.total,
        Some(dist) => {
            let mut jitter = || T::lit(dist.sample(&mut g));
            CostTerms::from_parts(
                terms.purity_rho + jitter(),
                terms.purity_sigma + jitter(),
                terms.overlap + jitter(),
            )
            .total
        }
    };

    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let (terms, mut grad) = objective.gradient(&params);
    let mut current = observe(terms);
    let mut history = vec![current];
    let mut iterations = 0;
    let mut step = T::lit(cfg.initial_step);
    let armijo = T::lit(cfg.armijo);
    let grad_tol = T::lit(cfg.grad_tol);
    let max_step = T::lit(1e6);

    while iterations < cfg.max_iters {
        let g2 = dot(&grad, &grad);
        if g2.sqrt() <= grad_tol {
            break;
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<T> = params
                .iter()
                .zip(&grad)
                .map(|(&p, &gi)| p - t * gi)
                .collect();
            let value = observe(objective.terms(&trial));
            if value <= current - armijo * t * g2 {
                accepted = Some((trial, value));
                break;
            }
            t *= T::lit(0.5);
        }
        let Some((next, value)) = accepted else {
            break;
        };
        let (_, next_grad) = objective.gradient(&next);
        step = match cfg.step_rule {
            StepRule::Backtracking => T::lit(cfg.initial_step),
            StepRule::BarzilaiBorwein => {
                let s: Vec<T> = next.iter().zip(&params).map(|(&a, &b)| a - b).collect();
                let y: Vec<T> = next_grad.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > T::zero() {
                    (dot(&s, &s) / sy).min(max_step)
                } else {
                    T::lit(cfg.initial_step)
                }
            }
        };
        params = next;
        grad = next_grad;
        current = value;
        history.push(current);
        iterations += 1;
    }
    Ok(Restart {
        params,
        history,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponent<T> {
    pub value: T,
    pub vector: Vec<C<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponents<T> {
    /// Top-`R` eigenpairs, descending.
    pub components: Vec<PrincipalComponent<T>>,
    /// Some adjacent pair among the returned eigenvalues (or the last
    /// returned and the first discarded) is within the degeneracy tolerance,
    /// so the ordering or the subspace is not determined by the spectrum.
    pub order_ambiguous: bool,
}

impl<T: Real> PrincipalComponents<T> {
    /// `|<e_i(rho), v_i>|` for each component.
    pub fn overlaps_with(&self, rho: &DensityMatrix<T>) -> Result<Vec<T>> {
        if rho.dim() != self.components.first().map_or(0, |p| p.vector.len()) {
            return Err(Error::DimMismatch {
                left: rho.dim(),
                right: self.components.first().map_or(0, |p| p.vector.len()),
            });
        }
        Ok(self
            .components
            .iter()
            .enumerate()
            .map(|(i, p)| inner(rho.spectrum().vector(i), &p.vector).norm())
            .collect())
    }
}

pub fn extract_principal_components<T: Real>(
    sigma: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<PrincipalComponents<T>> {
    let d = sigma.dim();
    if r == 0 || r > d {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    let spec = sigma.spectrum();
    let values = spec.values();
    let last = if r < d { r } else { r - 1 };
    let order_ambiguous = (0..last).any(|i| values[i] - values[i + 1] <= tol.degeneracy);
    Ok(PrincipalComponents {
        components: (0..r)
            .map(|i| PrincipalComponent {
                value: values[i],
                vector: spec.vector(i).to_vec(),
            })
            .collect(),
        order_ambiguous,
    })
}

/// `mu_i - lambda_i` for the top `r` eigenvalues of `sigma` and `rho`. For
/// the Hilbert–Schmidt optimum these are all equal.
pub fn eigenvalue_shifts<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    r: usize,
) -> Result<Vec<T>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    if r == 0 || r > rho.dim() {
        return Err(Error::RankOutOfRange {
            rank: r,
            dim: rho.dim(),
        });
    }
    Ok(sigma.eigenvalues()[..r]
        .iter()
        .zip(&rho.eigenvalues()[..r])
        .map(|(&s, &l)| s - l)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MisorderedMember<T> {
    /// Weights on rho's leading eigenvectors, in rho's order.
    pub weights: Vec<T>,
    pub state: DensityMatrix<T>,
    /// First `i` with `weights[i] < weights[i + 1]`.
    pub swapped: (usize, usize),
    pub trace_distance: T,
    pub optimal_trace_distance: T,
    /// Hilbert–Schmidt distance of the member, above the HS optimum.
    pub hs_distance: T,
    pub hs_optimum: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MisorderingReport<T> {
    Found(MisorderedMember<T>),
    /// Every trace-optimal member keeps rho's eigenvalue order because the
    /// slack does not exceed the smallest adjacent gap among the leading
    /// eigenvalues (or there is no pair to swap).
    NoMisorderedMember {
        slack: T,
        min_gap: T,
    },
}

const MISORDER_SAMPLES: u64 = 1000;

/// Looks for a trace-distance optimum whose eigenvalue order disagrees with
/// rho's leading order. Tries the canonical member with the closest adjacent
/// pair swapped, then seeded samples from the family, then the member that
/// puts all slack on the lower of that pair.
pub fn misordering_demo<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<MisorderingReport<T>> {
    let family = trace_family(rho, r, tol)?;
    let bounds = family.lower_bounds().to_vec();
    let slack = family.slack();
    let Some((pair, min_gap)) = (0..r.saturating_sub(1))
        .map(|i| (i, bounds[i] - bounds[i + 1]))
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite gaps"))
    else {
        return Ok(MisorderingReport::NoMisorderedMember {
            slack,
            min_gap: T::infinity(),
        });
    };
    if slack <= min_gap {
        return Ok(MisorderingReport::NoMisorderedMember { slack, min_gap });
    }

    let inversion = |w: &[T]| (0..w.len() - 1).find(|&i| w[i] < w[i + 1]);
    let share = slack / T::from_usize_lossy(r);
    let mut mirror: Vec<T> = bounds.iter().map(|&l| l + share).collect();
    mirror.swap(pair, pair + 1);

    let mut candidates = vec![mirror];
    for k in 0..MISORDER_SAMPLES {
        let sample = family.sample(seed.wrapping_add(k), tol)?;
        let w: Vec<T> = family.eigenbasis().diagonal_of(sample.matrix())?[..r].to_vec();
        if inversion(&w).is_some() {
            candidates.push(w);
            break;
        }
    }
    let mut extremal = bounds.clone();
    extremal[pair + 1] += slack;
    candidates.push(extremal);

    let weights = candidates
        .into_iter()
        .find(|w| inversion(w).is_some() && w.iter().zip(&bounds).all(|(&m, &l)| m >= l - tol.sum))
        .expect("the extremal member is misordered whenever slack exceeds the gap");
    let i = inversion(&weights).expect("checked above");
    let state = family.state_with_weights(&weights, tol)?;
    Ok(MisorderingReport::Found(MisorderedMember {
        swapped: (i, i + 1),
        trace_distance: Metric::Trace.distance(rho, &state)?,
        optimal_trace_distance: family.optimal_distance(),
        hs_distance: Metric::HilbertSchmidt.distance(rho, &state)?,
        hs_optimum: solve_hs_distance(rho, r, tol)?,
        weights,
        state,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{naive_rescale, solve_hs};

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn rho_tilde() -> DensityMatrix<f64> {
        DensityMatrix::from_diag(&[0.41, 0.39, 0.2, 0.0], &tol()).unwrap()
    }

    fn unit_params(d_sys: usize, d_anc: usize, entries: &[(usize, usize, f64)]) -> Vec<f64> {
        let mut p = vec![0.0; 2 * d_sys * d_anc];
        for &(i, a, v) in entries {
            p[2 * (i * d_anc + a)] = v;
        }
        p
    }

    #[test]
    fn product_ansatz_is_pure() {
        let a = PurificationAnsatz::new(3, 2, unit_params(3, 2, &[(0, 0, 2.5)])).unwrap();
        let s = prepare_state(&a, &tol()).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-15);
        assert!((s.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn balanced_entangled_ansatz() {
        let a =
            PurificationAnsatz::new(4, 2, unit_params(4, 2, &[(0, 0, 1.0), (1, 1, 1.0)])).unwrap();
        let s = prepare_state(&a, &tol()).unwrap();
        let diag = s.matrix().diagonal_re();
        for (got, want) in diag.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_ansatz_rejected() {
        assert!(matches!(
            PurificationAnsatz::new(2, 1, vec![0.0; 4]),
            Err(Error::ZeroVector)
        ));
        assert!(PurificationAnsatz::new(2, 1, vec![1.0; 3]).is_err());
        assert!(PurificationAnsatz::<f64>::new(2, 0, vec![]).is_err());
        assert!(PurificationAnsatz::new(1, 1, vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn cost_hand_values() {
        let rho = rho_tilde();
        let star = solve_hs(&rho, 2, &tol()).unwrap().sigma_star;
        let a = PurificationAnsatz::from_state(&star, 2).unwrap();
        assert!((cost(&rho, &a).unwrap().total - 0.06).abs() < 1e-12);
        let naive = naive_rescale(&rho, 2, &tol()).unwrap();
        let a = PurificationAnsatz::from_state(&naive, 2).unwrap();
        assert!((cost(&rho, &a).unwrap().total - 0.0600125).abs() < 1e-12);
        let exact = PurificationAnsatz::from_state(&rho, 3).unwrap();
        assert!(cost(&rho, &exact).unwrap().total.abs() < 1e-15);
    }

    #[test]
    fn gradient_vanishes_at_optimum() {
        let rho = rho_tilde();
        let star = solve_hs(&rho, 2, &tol()).unwrap().sigma_star;
        let a = PurificationAnsatz::from_state(&star, 2).unwrap();
        let g = gradient(&rho, &a).unwrap();
        assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-12);
    }

    #[test]
    fn optimize_recovers_comparison_optimum() {
        let rho = rho_tilde();
        let run = optimize(&rho, 2, &OptimizerConfig::default(), &tol()).unwrap();
        assert!(run.converged, "gap {}", run.closed_form_gap);
        assert!(run.closed_form_gap <= 1e-6);
        let ev = run.final_state.eigenvalues();
        assert!((ev[0] - 0.51).abs() < 1e-2 && (ev[1] - 0.49).abs() < 1e-2);
        assert!(run.cost_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(
            (cost(
                &rho,
                &PurificationAnsatz::new(4, 2, run.final_params.clone()).unwrap()
            )
            .unwrap()
            .total
                - run.final_cost)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn zero_iterations_reports_initial_gap() {
        let cfg = OptimizerConfig {
            max_iters: 0,
            ..OptimizerConfig::default()
        };
        let run = optimize(&rho_tilde(), 2, &cfg, &tol()).unwrap();
        assert!(!run.converged);
        assert_eq!(run.iterations, 0);
        assert_eq!(run.cost_history.len(), 1);
        assert!((run.closed_form_gap - (run.cost_history[0] - 0.06)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_components_match_rho() {
        let rho = rho_tilde();
        let star = solve_hs(&rho, 2, &tol()).unwrap().sigma_star;
        let pcs = extract_principal_components(&star, 2, &tol()).unwrap();
        assert!(!pcs.order_ambiguous);
        for o in pcs.overlaps_with(&rho).unwrap() {
            assert!((o - 1.0).abs() < 1e-15);
        }
        let mixed = DensityMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0], &tol()).unwrap();
        assert!(
            extract_principal_components(&mixed, 2, &tol())
                .unwrap()
                .order_ambiguous
        );
    }

    #[test]
    fn misordering_examples() {
        let rho = rho_tilde();
        let MisorderingReport::Found(m) = misordering_demo(&rho, 2, 0, &tol()).unwrap() else {
            panic!("expected a misordered member");
        };
        assert!((m.weights[0] - 0.49).abs() < 1e-12 && (m.weights[1] - 0.51).abs() < 1e-12);
        assert_eq!(m.swapped, (0, 1));
        assert!((m.trace_distance - 0.2).abs() < 1e-12);
        assert!(m.hs_distance > m.hs_optimum);

        let small = DensityMatrix::from_diag(&[0.6, 0.3, 0.1], &tol()).unwrap();
        assert!(matches!(
            misordering_demo(&small, 2, 0, &tol()).unwrap(),
            MisorderingReport::NoMisorderedMember { .. }
        ));
        assert!(matches!(
            misordering_demo(&rho, 4, 0, &tol()).unwrap(),
            MisorderingReport::NoMisorderedMember { .. }
        ));
    }
}

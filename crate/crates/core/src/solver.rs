//! Closed-form rank-constrained approximation of a density matrix.
//!
//! For a state `rho = sum_i l_i |e_i><e_i|` (eigenvalues non-increasing) and a
//! rank bound `R`, let `P_R` project onto the `R` leading eigenvectors,
//! `tau_R = P_R rho P_R` and `s = 1 - Tr tau_R` (the truncated weight).
//!
//! * Hilbert–Schmidt: the unique optimum is `tau_R + (s / R) P_R`, at distance
//!   `sum_{i>R} l_i^2 + s^2 / R`.
//! * Trace distance: the same state is optimal, at distance `s`, but so is
//!   every state diagonal in the leading eigenvectors whose eigenvalues
//!   dominate `l_1..l_R` entry-wise ([`TraceOptimalFamily`]).
//!
//! Eigenvalues at or below `rank` tolerance are treated as exact zeros, so
//! `R >= rank(rho)` gives distance exactly `0`. The truncated weight is
//! computed as the tail sum `sum_{i>R} l_i`, which equals `1 - Tr tau_R` for a
//! unit-trace input without the cancellation error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigh::{eigh, weighted_outer_sum, Spectrum};
use crate::linalg::matrix::Matrix;
use crate::linalg::metrics::{hs_distance, trace_distance};
use crate::linalg::state::{DensityMatrix, HermitianOperator};
use crate::random::{rng, uniform_spacings};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[serde(alias = "hs")]
    HilbertSchmidt,
    Trace,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::HilbertSchmidt, Metric::Trace];

    pub fn short_name(self) -> &'static str {
        match self {
            Metric::HilbertSchmidt => "hs",
            Metric::Trace => "trace",
        }
    }

    /// The metric evaluated on two states.
    pub fn distance<T: Real>(self, rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
        match self {
            Metric::HilbertSchmidt => hs_distance(rho, sigma),
            Metric::Trace => trace_distance(rho, sigma),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hs" | "hilbert-schmidt" | "hilbert_schmidt" => Ok(Metric::HilbertSchmidt),
            "trace" | "tr" => Ok(Metric::Trace),
            other => Err(Error::InvalidArgument(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SolverWarning {
    /// `l_R` and `l_{R+1}` coincide within the degeneracy tolerance, so the
    /// leading eigenspace is not unique; the eigensolver's order was used.
    DegenerateBoundary { rank: usize, gap: f64 },
}

impl fmt::Display for SolverWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverWarning::DegenerateBoundary { rank, gap } => write!(
                f,
                "degenerate boundary: eigenvalues {rank} and {} differ by {gap:e}; principal subspace is ambiguous",
                rank + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QlrapSolution<T> {
    pub metric: Metric,
    pub rank_bound: usize,
    pub sigma_star: DensityMatrix<T>,
    pub distance_star: T,
    /// Spectrum of the input state.
    pub eigenbasis: Spectrum<T>,
    /// `1 - Tr tau_R`; the normalisation shift is `truncated_weight / R`.
    pub truncated_weight: T,
    pub warnings: Vec<SolverWarning>,
}

impl<T: Real> QlrapSolution<T> {
    pub fn normalization_shift(&self) -> T {
        self.truncated_weight / T::from_usize_lossy(self.rank_bound)
    }
}

fn check_rank(r: usize, d: usize) -> Result<()> {
    if r == 0 || r > d {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    Ok(())
}

/// Eigenvalues of `rho` with sub-`rank`-tolerance entries set to zero.
fn effective_values<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances<T>) -> Vec<T> {
    rho.eigenvalues()
        .iter()
        .map(|&v| if v <= tol.rank { T::zero() } else { v })
        .collect()
}

fn tail_sum<T: Real>(values: &[T], r: usize) -> T {
    values[r..].iter().fold(T::zero(), |acc, &v| acc + v)
}

/// Closed-form optimal Hilbert–Schmidt distance for a non-increasing spectrum.
pub fn hs_optimum_from_spectrum<T: Real>(values: &[T], r: usize) -> Result<T> {
    check_rank(r, values.len())?;
    let slack = tail_sum(values, r);
    let truncated: T = values[r..].iter().map(|&v| v * v).sum();
    Ok(truncated + slack * slack / T::from_usize_lossy(r))
}

/// Closed-form optimal trace distance for a non-increasing spectrum.
pub fn trace_optimum_from_spectrum<T: Real>(values: &[T], r: usize) -> Result<T> {
    check_rank(r, values.len())?;
    Ok(tail_sum(values, r))
}

fn boundary_warnings<T: Real>(values: &[T], r: usize, tol: &Tolerances<T>) -> Vec<SolverWarning> {
    let mut out = Vec::new();
    if r < values.len() && values[r - 1] > tol.rank {
        let gap = values[r - 1] - values[r];
        if gap <= tol.degeneracy {
            out.push(SolverWarning::DegenerateBoundary {
                rank: r,
                gap: gap.to_f64_lossy(),
            });
        }
    }
    out
}

/// `tau_R = P_R rho P_R`: positive, trace `sum_{i<=R} l_i`, generally not a
/// state.
pub fn truncate<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<HermitianOperator<T>> {
    check_rank(r, rho.dim())?;
    let values = effective_values(rho, tol);
    let spec = rho.spectrum();
    let m = weighted_outer_sum(&values[..r], &spec.vectors()[..r]);
    HermitianOperator::new(m, tol.herm)
}

fn canonical_state<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<(DensityMatrix<T>, Vec<T>, T)> {
    check_rank(r, rho.dim())?;
    let values = effective_values(rho, tol);
    let slack = tail_sum(&values, r);
    let shift = slack / T::from_usize_lossy(r);
    let sigma_values: Vec<T> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| if i < r { v + shift } else { T::zero() })
        .collect();
    let sigma =
        DensityMatrix::from_eigenpairs(sigma_values, rho.spectrum().vectors().to_vec(), tol)?;
    Ok((sigma, values, slack))
}

/// Unique Hilbert–Schmidt optimum `tau_R + N_R`.
pub fn solve_hs<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<QlrapSolution<T>> {
    let (sigma, values, slack) = canonical_state(rho, r, tol)?;
    Ok(QlrapSolution {
        metric: Metric::HilbertSchmidt,
        rank_bound: r,
        sigma_star: sigma,
        distance_star: hs_optimum_from_spectrum(&values, r)?,
        eigenbasis: rho.spectrum().clone(),
        truncated_weight: slack,
        warnings: boundary_warnings(&values, r, tol),
    })
}

/// `sum_{i>R} l_i^2 + R ((1 - sum_{i<=R} l_i) / R)^2`.
pub fn solve_hs_distance<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<T> {
    hs_optimum_from_spectrum(&effective_values(rho, tol), r)
}

/// The canonical trace-distance optimum; the same state as [`solve_hs`].
pub fn solve_trace_canonical<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<QlrapSolution<T>> {
    let (sigma, values, slack) = canonical_state(rho, r, tol)?;
    Ok(QlrapSolution {
        metric: Metric::Trace,
        rank_bound: r,
        sigma_star: sigma,
        distance_star: trace_optimum_from_spectrum(&values, r)?,
        eigenbasis: rho.spectrum().clone(),
        truncated_weight: slack,
        warnings: boundary_warnings(&values, r, tol),
    })
}

/// `1 - Tr[P_R rho] = sum_{i>R} l_i`.
pub fn solve_trace_distance<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<T> {
    trace_optimum_from_spectrum(&effective_values(rho, tol), r)
}

pub fn solve<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    metric: Metric,
    tol: &Tolerances<T>,
) -> Result<QlrapSolution<T>> {
    match metric {
        Metric::HilbertSchmidt => solve_hs(rho, r, tol),
        Metric::Trace => solve_trace_canonical(rho, r, tol),
    }
}

pub fn optimal_distance<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    metric: Metric,
    tol: &Tolerances<T>,
) -> Result<T> {
    match metric {
        Metric::HilbertSchmidt => solve_hs_distance(rho, r, tol),
        Metric::Trace => solve_trace_distance(rho, r, tol),
    }
}

/// `tau_R / Tr tau_R`: multiplicative renormalisation of the truncation.
/// Never better than [`solve_hs`] in Hilbert–Schmidt distance.
pub fn naive_rescale<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    check_rank(r, rho.dim())?;
    let values = effective_values(rho, tol);
    let kept: T = values[..r].iter().copied().sum();
    if kept <= tol.rank {
        return Err(Error::ZeroTrace);
    }
    let scaled = values
        .iter()
        .enumerate()
        .map(|(i, &v)| if i < r { v / kept } else { T::zero() })
        .collect();
    DensityMatrix::from_eigenpairs(scaled, rho.spectrum().vectors().to_vec(), tol)
}

/// The set of trace-distance optima: states `sum_{i<=R} m_i |e_i><e_i|` with
/// `m_i >= l_i` and unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOptimalFamily<T> {
    basis: Spectrum<T>,
    rank_bound: usize,
    lower_bounds: Vec<T>,
    slack: T,
    degeneracy_tol: T,
}

/// Measured violations of each membership condition; all zero for an exact
/// member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership<T> {
    /// Largest off-diagonal modulus of sigma in rho's eigenbasis.
    pub off_diagonal: T,
    /// Largest weight outside the leading `R` eigenvectors.
    pub outside_support: T,
    /// Largest `l_i - m_i` over the leading indices.
    pub bound_deficit: T,
    pub trace_error: T,
}

impl<T: Real> Membership<T> {
    pub fn worst(&self) -> T {
        self.off_diagonal
            .max(self.outside_support)
            .max(self.bound_deficit)
            .max(self.trace_error)
    }

    pub fn holds(&self, tol: T) -> bool {
        self.worst() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MembershipOptions {
    /// Accept any basis within degenerate eigenspaces of rho, not only the
    /// computed eigenvectors.
    pub allow_block_rotation: bool,
}

pub fn trace_family<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    tol: &Tolerances<T>,
) -> Result<TraceOptimalFamily<T>> {
    check_rank(r, rho.dim())?;
    let values = effective_values(rho, tol);
    Ok(TraceOptimalFamily {
        basis: rho.spectrum().clone(),
        rank_bound: r,
        lower_bounds: values[..r].to_vec(),
        slack: tail_sum(&values, r),
        degeneracy_tol: tol.degeneracy,
    })
}

impl<T: Real> TraceOptimalFamily<T> {
    pub fn rank_bound(&self) -> usize {
        self.rank_bound
    }

    pub fn lower_bounds(&self) -> &[T] {
        &self.lower_bounds
    }

    /// Weight free to distribute above the lower bounds. Equal to the
    /// optimal trace distance.
    pub fn slack(&self) -> T {
        self.slack
    }

    pub fn optimal_distance(&self) -> T {
        self.slack
    }

    pub fn eigenbasis(&self) -> &Spectrum<T> {
        &self.basis
    }

    /// The state `sum_i weights[i] |e_i><e_i|` over the leading eigenvectors.
    /// Membership is not checked.
    pub fn state_with_weights(
        &self,
        weights: &[T],
        tol: &Tolerances<T>,
    ) -> Result<DensityMatrix<T>> {
        if weights.len() != self.rank_bound {
            return Err(Error::LengthMismatch {
                left: self.rank_bound,
                right: weights.len(),
            });
        }
        let mut values = weights.to_vec();
        values.resize(self.basis.dim(), T::zero());
        DensityMatrix::from_eigenpairs(values, self.basis.vectors().to_vec(), tol)
    }

    /// `tau_R + N_R`, the member with uniformly distributed slack.
    pub fn canonical(&self, tol: &Tolerances<T>) -> Result<DensityMatrix<T>> {
        let shift = self.slack / T::from_usize_lossy(self.rank_bound);
        let w: Vec<T> = self.lower_bounds.iter().map(|&l| l + shift).collect();
        self.state_with_weights(&w, tol)
    }

    pub fn membership(
        &self,
        sigma: &DensityMatrix<T>,
        opts: MembershipOptions,
    ) -> Result<Membership<T>> {
        let d = self.basis.dim();
        if sigma.dim() != d {
            return Err(Error::DimMismatch {
                left: d,
                right: sigma.dim(),
            });
        }
        let s = self.basis.rotate_into(sigma.matrix())?;
        let r = self.rank_bound;
        let trace_error = (sigma.matrix().trace().re - T::one()).abs();

        let blocks: Vec<Vec<usize>> = if opts.allow_block_rotation {
            degenerate_blocks(self.basis.values(), self.degeneracy_tol)
        } else {
            (0..d).map(|i| vec![i]).collect()
        };
        let mut block_of = vec![0usize; d];
        for (b, idx) in blocks.iter().enumerate() {
            for &i in idx {
                block_of[i] = b;
            }
        }

        let mut off_diagonal = T::zero();
        for i in 0..d {
            for j in 0..d {
                if i != j && block_of[i] != block_of[j] {
                    off_diagonal = off_diagonal.max(s[(i, j)].norm());
                }
            }
        }

        let mut outside_support = T::zero();
        let mut bound_deficit = T::zero();
        for block in &blocks {
            let leading: Vec<usize> = block.iter().copied().filter(|&i| i < r).collect();
            // weights of sigma within the block, in the block's own eigenbasis
            let weights = if block.len() == 1 {
                vec![s[(block[0], block[0])].re]
            } else {
                let sub = Matrix::from_fn(block.len(), block.len(), |a, b| s[(block[a], block[b])]);
                eigh(&sub)?.values().to_vec()
            };
            let bound = leading
                .iter()
                .map(|&i| self.lower_bounds[i])
                .fold(T::infinity(), T::min);
            for (k, &w) in weights.iter().enumerate() {
                if k < leading.len() {
                    bound_deficit = bound_deficit.max(bound - w);
                } else {
                    outside_support = outside_support.max(w.abs());
                }
            }
        }

        Ok(Membership {
            off_diagonal,
            outside_support,
            bound_deficit,
            trace_error,
        })
    }

    /// Whether `sigma` is an optimal trace-distance approximation: diagonal
    /// in rho's computed eigenbasis, supported on the leading `R`
    /// eigenvectors, dominating the lower bounds, unit trace.
    pub fn contains(&self, sigma: &DensityMatrix<T>, tol: T) -> Result<bool> {
        Ok(self
            .membership(sigma, MembershipOptions::default())?
            .holds(tol))
    }

    pub fn contains_with(
        &self,
        sigma: &DensityMatrix<T>,
        tol: T,
        opts: MembershipOptions,
    ) -> Result<bool> {
        Ok(self.membership(sigma, opts)?.holds(tol))
    }

    /// Random member: slack split over the leading eigenvectors uniformly on
    /// the simplex.
    pub fn sample(&self, seed: u64, tol: &Tolerances<T>) -> Result<DensityMatrix<T>> {
        let mut g = rng(seed);
        let extra = uniform_spacings(self.rank_bound, self.slack, &mut g);
        let w: Vec<T> = self
            .lower_bounds
            .iter()
            .zip(&extra)
            .map(|(&l, &e)| l + e)
            .collect();
        self.state_with_weights(&w, tol)
    }
}

pub fn trace_family_contains<T: Real>(
    family: &TraceOptimalFamily<T>,
    sigma: &DensityMatrix<T>,
    tol: T,
) -> Result<bool> {
    family.contains(sigma, tol)
}

pub fn trace_family_sample<T: Real>(
    family: &TraceOptimalFamily<T>,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    family.sample(seed, tol)
}

/// Maximal runs of consecutive eigenvalues within `tol` of their neighbour.
pub(crate) fn degenerate_blocks<T: Real>(values: &[T], tol: T) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match blocks.last_mut() {
            Some(last) if (values[*last.last().expect("non-empty")] - v).abs() <= tol => {
                last.push(i)
            }
            _ => blocks.push(vec![i]),
        }
    }
    blocks
}

/// Recomputes the metric between `rho` and the solution state.
pub fn recompute_distance<T: Real>(rho: &DensityMatrix<T>, sol: &QlrapSolution<T>) -> Result<T> {
    sol.metric.distance(rho, &sol.sigma_star)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn diag(v: &[f64]) -> DensityMatrix<f64> {
        DensityMatrix::from_diag(v, &tol()).unwrap()
    }

    fn rho_tilde() -> DensityMatrix<f64> {
        diag(&[0.41, 0.39, 0.2, 0.0])
    }

    #[test]
    fn truncate_comparison_state() {
        let tau = truncate(&rho_tilde(), 2, &tol()).unwrap();
        assert!((tau.trace() - 0.8).abs() < 1e-15);
        let expect = Matrix::from_diag(&[0.41, 0.39, 0.0, 0.0]);
        assert!(tau.matrix().sub(&expect).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn truncate_full_rank_is_identity_map() {
        let rho = rho_tilde();
        let tau = truncate(&rho, 4, &tol()).unwrap();
        assert!(tau.matrix().sub(rho.matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn rank_out_of_range() {
        let rho = rho_tilde();
        for r in [0, 5] {
            assert_eq!(
                solve_hs(&rho, r, &tol()).unwrap_err(),
                Error::RankOutOfRange { rank: r, dim: 4 }
            );
            assert!(truncate(&rho, r, &tol()).is_err());
            assert!(solve_trace_distance(&rho, r, &tol()).is_err());
            assert!(trace_family(&rho, r, &tol()).is_err());
            assert!(naive_rescale(&rho, r, &tol()).is_err());
        }
    }

    #[test]
    fn hs_comparison_example() {
        let sol = solve_hs(&rho_tilde(), 2, &tol()).unwrap();
        let ev = sol.sigma_star.eigenvalues();
        assert!((ev[0] - 0.51).abs() < 1e-12);
        assert!((ev[1] - 0.49).abs() < 1e-12);
        assert_eq!(&ev[2..], &[0.0, 0.0]);
        assert!((sol.distance_star - 0.06).abs() < 1e-12);
        assert!((sol.truncated_weight - 0.2).abs() < 1e-15);
        assert!((sol.normalization_shift() - 0.1).abs() < 1e-15);
        assert!(sol.warnings.is_empty());
    }

    #[test]
    fn hs_rank_one_hand_value() {
        let sol = solve_hs(&diag(&[0.5, 0.3, 0.2]), 1, &tol()).unwrap();
        assert_eq!(sol.sigma_star.eigenvalues(), &[1.0, 0.0, 0.0]);
        // 0.5^2 + 0.3^2 + 0.2^2
        assert!((sol.distance_star - 0.38).abs() < 1e-15);
        let recomputed = recompute_distance(&diag(&[0.5, 0.3, 0.2]), &sol).unwrap();
        assert!((recomputed - 0.38).abs() < 1e-15);
    }

    #[test]
    fn no_truncation_needed_when_rank_suffices() {
        let rho = rho_tilde();
        for r in [3, 4] {
            let sol = solve_hs(&rho, r, &tol()).unwrap();
            assert_eq!(sol.distance_star, 0.0);
            assert!(sol.sigma_star.matrix().sub(rho.matrix()).unwrap().max_abs() < 1e-15);
            assert_eq!(solve_trace_distance(&rho, r, &tol()).unwrap(), 0.0);
        }
    }

    #[test]
    fn trace_hand_values() {
        assert!((solve_trace_distance(&rho_tilde(), 2, &tol()).unwrap() - 0.2).abs() < 1e-15);
        assert!(
            (solve_trace_distance(&diag(&[0.5, 0.3, 0.2]), 1, &tol()).unwrap() - 0.5).abs() < 1e-15
        );
        let sol = solve_trace_canonical(&diag(&[0.7, 0.3]), 1, &tol()).unwrap();
        assert_eq!(sol.sigma_star.eigenvalues(), &[1.0, 0.0]);
        assert!((sol.distance_star - 0.3).abs() < 1e-15);
        assert_eq!(sol.metric, Metric::Trace);
    }

    #[test]
    fn family_bounds_and_slack() {
        let fam = trace_family(&rho_tilde(), 2, &tol()).unwrap();
        assert_eq!(fam.lower_bounds(), &[0.41, 0.39]);
        assert!((fam.slack() - 0.2).abs() < 1e-15);
        let fam = trace_family(&diag(&[0.9, 0.1]), 1, &tol()).unwrap();
        assert_eq!(fam.lower_bounds(), &[0.9]);
        assert!((fam.slack() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn family_at_full_rank_is_singleton() {
        let rho = rho_tilde();
        let fam = trace_family(&rho, 4, &tol()).unwrap();
        assert_eq!(fam.slack(), 0.0);
        let s1 = fam.sample(1, &tol()).unwrap();
        let s2 = fam.sample(2, &tol()).unwrap();
        assert_eq!(s1, s2);
        assert!(s1.matrix().sub(rho.matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn family_membership_examples() {
        let rho = rho_tilde();
        let fam = trace_family(&rho, 2, &tol()).unwrap();
        assert!(fam.contains(&diag(&[0.51, 0.49, 0.0, 0.0]), 1e-9).unwrap());
        assert!(fam.contains(&diag(&[0.49, 0.51, 0.0, 0.0]), 1e-9).unwrap());
        let m = fam
            .membership(&diag(&[0.40, 0.60, 0.0, 0.0]), MembershipOptions::default())
            .unwrap();
        assert!((m.bound_deficit - 0.01).abs() < 1e-12);
        assert!(!m.holds(1e-9));
        // weight on the third eigenvector
        assert!(!fam.contains(&diag(&[0.45, 0.45, 0.1, 0.0]), 1e-9).unwrap());
        assert!(fam.contains(&diag(&[0.5, 0.5, 0.0]), 1e-9).is_err());
    }

    #[test]
    fn off_diagonal_in_eigenbasis_fails_membership() {
        use crate::scalar::c;
        let rho = rho_tilde();
        let fam = trace_family(&rho, 2, &tol()).unwrap();
        let mut m = Matrix::from_diag(&[0.5, 0.5, 0.0, 0.0]);
        m[(0, 1)] = c(0.01, 0.0);
        m[(1, 0)] = c(0.01, 0.0);
        let sigma = DensityMatrix::from_matrix(m, &tol()).unwrap();
        let mem = fam
            .membership(&sigma, MembershipOptions::default())
            .unwrap();
        assert!((mem.off_diagonal - 0.01).abs() < 1e-15);
        assert!(!mem.holds(1e-9));
    }

    #[test]
    fn block_rotation_opt_in() {
        use crate::scalar::c;
        // rho degenerate in its top two eigenvalues
        let rho = diag(&[0.4, 0.4, 0.2]);
        let fam = trace_family(&rho, 2, &tol()).unwrap();
        let mut m = Matrix::from_diag(&[0.5, 0.5, 0.0]);
        m[(0, 1)] = c(0.05, 0.0);
        m[(1, 0)] = c(0.05, 0.0);
        let sigma = DensityMatrix::from_matrix(m, &tol()).unwrap();
        assert!(!fam.contains(&sigma, 1e-9).unwrap());
        let opts = MembershipOptions {
            allow_block_rotation: true,
        };
        // block eigenvalues 0.55 / 0.45 both dominate 0.4
        assert!(fam.contains_with(&sigma, 1e-9, opts).unwrap());
        let d = trace_distance(&rho, &sigma).unwrap();
        assert!((d - fam.optimal_distance()).abs() < 1e-12);
    }

    #[test]
    fn samples_are_optimal_members() {
        let rho = rho_tilde();
        let fam = trace_family(&rho, 2, &tol()).unwrap();
        let a = fam.sample(1, &tol()).unwrap();
        let b = fam.sample(2, &tol()).unwrap();
        assert_ne!(a, b);
        for s in [&a, &b] {
            assert!(fam.contains(s, 1e-9).unwrap());
            assert!((trace_distance(&rho, s).unwrap() - 0.2).abs() < 1e-10);
            assert!(hs_distance(&rho, s).unwrap() >= 0.06 - 1e-12);
        }
    }

    #[test]
    fn naive_rescale_is_suboptimal() {
        let rho = rho_tilde();
        let naive = naive_rescale(&rho, 2, &tol()).unwrap();
        let ev = naive.eigenvalues();
        assert!((ev[0] - 0.5125).abs() < 1e-15);
        assert!((ev[1] - 0.4875).abs() < 1e-15);
        let d = hs_distance(&rho, &naive).unwrap();
        assert!((d - 0.0600125).abs() < 1e-12);
        assert!(d > 0.06);
        let full = naive_rescale(&rho, 4, &tol()).unwrap();
        assert!(full.matrix().sub(rho.matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn naive_rescale_zero_trace_guard() {
        // Only reachable with a loose rank tolerance that zeroes the head.
        let mut t = tol();
        t.rank = 0.95;
        assert_eq!(
            naive_rescale(&diag(&[0.9, 0.1]), 1, &t).unwrap_err(),
            Error::ZeroTrace
        );
    }

    #[test]
    fn degenerate_boundary_warns() {
        let sol = solve_hs(&diag(&[0.4, 0.3, 0.3]), 2, &tol()).unwrap();
        assert_eq!(sol.warnings.len(), 1);
        // zeros at the boundary carry no weight and do not warn
        let sol = solve_hs(&diag(&[0.5, 0.5, 0.0, 0.0]), 3, &tol()).unwrap();
        assert!(sol.warnings.is_empty());
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("hs".parse::<Metric>().unwrap(), Metric::HilbertSchmidt);
        assert_eq!("TRACE".parse::<Metric>().unwrap(), Metric::Trace);
        assert!("fidelity".parse::<Metric>().is_err());
    }

    #[test]
    fn single_precision_comparison_example() {
        let t = Tolerances::<f32>::default();
        let rho = DensityMatrix::from_diag(&[0.41f32, 0.39, 0.2, 0.0], &t).unwrap();
        let sol = solve_hs(&rho, 2, &t).unwrap();
        assert!((sol.sigma_star.eigenvalues()[0] - 0.51).abs() < 1e-6);
        assert!((sol.distance_star - 0.06).abs() < 1e-6);
        assert!((solve_trace_distance(&rho, 2, &t).unwrap() - 0.2).abs() < 1e-6);
    }
}

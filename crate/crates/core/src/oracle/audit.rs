//! Randomised checks of the two facts the co-diagonal search relies on.
//!
//! [`rotation_test`] checks that moving a candidate's eigenvectors away from
//! rho's never helps: for a Haar unitary `U`, `D(rho, U sigma U^dagger)` is
//! compared with the distance to `sigma'`, which has sigma's spectrum sorted
//! onto rho's eigenvectors. [`majorization_audit`] checks that the spectrum
//! of a state majorises its diagonal in any basis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::majorization::majorization_margin;
use crate::linalg::matrix::Matrix;
use crate::linalg::state::DensityMatrix;
use crate::random::{haar_unitary, random_density, rng};
use crate::scalar::Real;
use crate::solver::Metric;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationReport {
    pub metric: Metric,
    pub trials: usize,
    /// Smallest `D(rho, U sigma U^dagger) - D(rho, sigma')` seen.
    pub min_margin: f64,
    pub worst_trial: usize,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub dim: usize,
    pub trials: usize,
    /// Smallest prefix-sum margin of spectrum over diagonal.
    pub min_margin: f64,
    pub worst_trial: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// `sigma`'s eigenvalues, descending, placed on `rho`'s eigenvectors.
fn aligned<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    DensityMatrix::from_eigenpairs(
        sigma.eigenvalues().to_vec(),
        rho.spectrum().vectors().to_vec(),
        tol,
    )
}

/// `D(rho, U sigma U^dagger) - D(rho, sigma')` for one unitary.
pub fn rotation_margin<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    u: &Matrix<T>,
    metric: Metric,
    tol: &Tolerances<T>,
) -> Result<T> {
    let base = metric.distance(rho, &aligned(rho, sigma, tol)?)?;
    Ok(rotated_distance(rho, sigma, u, metric, tol)? - base)
}

fn rotated_distance<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    u: &Matrix<T>,
    metric: Metric,
    tol: &Tolerances<T>,
) -> Result<T> {
    let rotated_vectors = sigma
        .spectrum()
        .vectors()
        .iter()
        .map(|v| u.mat_vec(v))
        .collect::<Result<Vec<_>>>()?;
    let rotated =
        DensityMatrix::from_eigenpairs(sigma.eigenvalues().to_vec(), rotated_vectors, tol)?;
    metric.distance(rho, &rotated)
}

/// Trial `t` uses a Haar unitary drawn from seed `seed + t`. Passes when every
/// margin is at least `-tolerance`.
pub fn rotation_test<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    metric: Metric,
    trials: usize,
    seed: u64,
    tolerance: f64,
    tol: &Tolerances<T>,
) -> Result<RotationReport> {
    let base = metric.distance(rho, &aligned(rho, sigma, tol)?)?;
    let mut min_margin = f64::INFINITY;
    let mut worst_trial = 0;
    for t in 0..trials {
        let u = haar_unitary::<T, _>(rho.dim(), &mut rng(seed.wrapping_add(t as u64)));
        let m = (rotated_distance(rho, sigma, &u, metric, tol)? - base).to_f64_lossy();
        if m < min_margin {
            min_margin = m;
            worst_trial = t;
        }
    }
    Ok(RotationReport {
        metric,
        trials,
        min_margin,
        worst_trial,
        tolerance,
        passed: min_margin >= -tolerance,
    })
}

/// Each trial draws a full-rank state of dimension `dim` and a Haar basis,
/// then checks that the spectrum majorises the diagonal in that basis.
pub fn majorization_audit<T: Real>(
    dim: usize,
    trials: usize,
    seed: u64,
    tolerance: f64,
    tol: &Tolerances<T>,
) -> Result<MajorizationReport> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    run_majorization(dim, trials, tolerance, |t| {
        let mut g = rng(seed.wrapping_add(t as u64));
        let sigma = random_density::<T, _>(dim, dim, &mut g, tol)?;
        let u = haar_unitary::<T, _>(dim, &mut g);
        schur_margin(&sigma, &u, tol)
    })
}

/// As [`majorization_audit`] with a fixed state.
pub fn majorization_audit_state<T: Real>(
    sigma: &DensityMatrix<T>,
    trials: usize,
    seed: u64,
    tolerance: f64,
    tol: &Tolerances<T>,
) -> Result<MajorizationReport> {
    run_majorization(sigma.dim(), trials, tolerance, |t| {
        let u = haar_unitary::<T, _>(sigma.dim(), &mut rng(seed.wrapping_add(t as u64)));
        schur_margin(sigma, &u, tol)
    })
}

fn schur_margin<T: Real>(
    sigma: &DensityMatrix<T>,
    u: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    let diag = sigma.matrix().conjugate_by(u)?.diagonal_re();
    majorization_margin(sigma.eigenvalues(), &diag, tol.sum)
}

fn run_majorization<T: Real>(
    dim: usize,
    trials: usize,
    tolerance: f64,
    mut margin: impl FnMut(usize) -> Result<T>,
) -> Result<MajorizationReport> {
    let mut min_margin = f64::INFINITY;
    let mut worst_trial = 0;
    for t in 0..trials {
        let m = margin(t)?.to_f64_lossy();
        if m < min_margin {
            min_margin = m;
            worst_trial = t;
        }
    }
    Ok(MajorizationReport {
        dim,
        trials,
        min_margin,
        worst_trial,
        tolerance,
        passed: min_margin >= -tolerance,
    })
}

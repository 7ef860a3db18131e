//! Distances and overlaps between states.

use crate::error::{Error, Result};
use crate::linalg::eigh::eigvalsh;
use crate::linalg::state::DensityMatrix;
use crate::scalar::Real;

fn check_dims<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    Ok(())
}

/// Hilbert–Schmidt distance `Tr[(rho - sigma)^2]` (no square root).
pub fn hs_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    check_dims(rho, sigma)?;
    Ok(rho.matrix().sub(sigma.matrix())?.frobenius_sqr())
}

/// Trace distance `1/2 Tr|rho - sigma|`, from the eigenvalues of the difference.
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    check_dims(rho, sigma)?;
    let diff = rho.matrix().sub(sigma.matrix())?;
    let total: T = eigvalsh(&diff)?.into_iter().map(T::abs).sum();
    Ok(total * T::lit(0.5))
}

/// `Tr(rho sigma)`.
///
/// The imaginary part must vanish within `imag_tol`; it does for any pair of
/// Hermitian operators up to round-off.
pub fn overlap_checked<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    imag_tol: T,
) -> Result<T> {
    check_dims(rho, sigma)?;
    let (a, b) = (rho.matrix(), sigma.matrix());
    let n = rho.dim();
    let mut acc = num_complex::Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    if acc.im.abs() > imag_tol {
        return Err(Error::InvalidArgument(format!(
            "overlap has imaginary part {}",
            acc.im
        )));
    }
    Ok(acc.re)
}

pub fn overlap<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    overlap_checked(rho, sigma, T::tolerance(1e-9))
}

pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    rho.purity()
}

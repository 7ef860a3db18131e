//! Validated operator types: [`HermitianOperator`] and [`DensityMatrix`].

use crate::error::{Error, Result};
use crate::linalg::eigh::{eigh, weighted_outer_sum, Spectrum};
use crate::linalg::matrix::Matrix;
use crate::scalar::{is_finite_c, Real, C};
use crate::tolerance::Tolerances;

/// Square complex matrix that is Hermitian within `herm` tolerance.
///
/// The stored entries are the exact Hermitian part of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T> {
    m: Matrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(m: Matrix<T>, herm_tol: T) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if let Some(k) = m.as_slice().iter().position(|z| !is_finite_c(*z)) {
            return Err(Error::NonFinite {
                row: k / m.cols(),
                col: k % m.cols(),
            });
        }
        let violation = m.hermiticity_violation();
        if violation > herm_tol {
            return Err(Error::NotHermitian {
                violation: violation.to_f64_lossy(),
            });
        }
        Ok(Self {
            m: m.hermitian_part(),
        })
    }

    pub fn from_real_diag(diag: &[T]) -> Result<Self> {
        Self::new(Matrix::from_diag(diag), T::zero())
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.m
    }

    pub fn trace(&self) -> T {
        self.m.trace().re
    }

    pub fn eigh(&self) -> Result<Spectrum<T>> {
        eigh(&self.m)
    }
}

/// Hermitian, positive semi-definite, unit-trace operator: a quantum state.
///
/// The spectrum is computed once at construction and cached.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    op: HermitianOperator<T>,
    spectrum: Spectrum<T>,
}

/// Checks trace and positivity of `a`.
///
/// Eigenvalues in `(-psd, 0)` are clamped to zero and the trace renormalised;
/// the operator is then rebuilt from the clamped spectrum.
pub fn validate_density<T: Real>(
    a: HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    let trace_err = (a.trace() - T::one()).abs();
    if trace_err > tol.trace {
        return Err(Error::NotUnitTrace {
            violation: trace_err.to_f64_lossy(),
        });
    }
    let spectrum = a.eigh()?;
    let min = spectrum.values().last().copied().unwrap_or(T::zero());
    if min < -tol.psd {
        return Err(Error::NotPsd {
            violation: (-min).to_f64_lossy(),
        });
    }
    if min >= T::zero() {
        return Ok(DensityMatrix { op: a, spectrum });
    }
    let clamped: Vec<T> = spectrum
        .values()
        .iter()
        .map(|&v| v.max(T::zero()))
        .collect();
    let total: T = clamped.iter().copied().sum();
    let values: Vec<T> = clamped.into_iter().map(|v| v / total).collect();
    let vectors = spectrum.vectors().to_vec();
    DensityMatrix::assemble(values, vectors)
}

impl<T: Real> DensityMatrix<T> {
    /// Validates a raw matrix: Hermitian, unit trace, PSD (in that order).
    pub fn from_matrix(m: Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        validate_density(HermitianOperator::new(m, tol.herm)?, tol)
    }

    /// Diagonal state in the computational basis.
    pub fn from_diag(diag: &[T], tol: &Tolerances<T>) -> Result<Self> {
        Self::from_matrix(Matrix::from_diag(diag), tol)
    }

    /// `sum_i values[i] v_i v_i^dagger` for orthonormal `vectors`.
    ///
    /// The eigenpairs become the cached spectrum directly, so no
    /// eigensolver round-off enters.
    pub fn from_eigenpairs(
        values: Vec<T>,
        vectors: Vec<Vec<C<T>>>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite eigenvalue {bad}"
            )));
        }
        let total: T = values.iter().copied().sum();
        let trace_err = (total - T::one()).abs();
        if trace_err > tol.trace {
            return Err(Error::NotUnitTrace {
                violation: trace_err.to_f64_lossy(),
            });
        }
        let min = values.iter().copied().fold(T::infinity(), T::min);
        if min < -tol.psd {
            return Err(Error::NotPsd {
                violation: (-min).to_f64_lossy(),
            });
        }
        if min < T::zero() {
            let clamped: Vec<T> = values.iter().map(|&v| v.max(T::zero())).collect();
            let total: T = clamped.iter().copied().sum();
            return Self::assemble(clamped.into_iter().map(|v| v / total).collect(), vectors);
        }
        Self::assemble(values, vectors)
    }

    fn assemble(values: Vec<T>, vectors: Vec<Vec<C<T>>>) -> Result<Self> {
        let spectrum = Spectrum::from_pairs(values, vectors)?;
        let m = weighted_outer_sum(spectrum.values(), spectrum.vectors());
        Ok(Self {
            op: HermitianOperator {
                m: m.hermitian_part(),
            },
            spectrum,
        })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        self.op.matrix()
    }

    pub fn op(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[T] {
        self.spectrum.values()
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.spectrum.rank(tol)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> T {
        self.matrix().frobenius_sqr()
    }

    /// `U rho U^dagger`, revalidated.
    pub fn rotated(&self, u: &Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        Self::from_matrix(self.matrix().conjugate_by(u)?, tol)
    }
}

//! Reduced states of bipartite pure states.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::matrix::{norm_sqr, Matrix};
use crate::linalg::state::DensityMatrix;
use crate::scalar::{Real, C};
use crate::tolerance::Tolerances;

/// Which factor of `system ⊗ ancilla` to discard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOut {
    Ancilla,
    System,
}

/// Reshapes a `d_sys * d_anc` amplitude vector (system index major) into
/// the `d_sys x d_anc` coefficient matrix.
pub fn amplitude_matrix<T: Real>(psi: &[C<T>], d_sys: usize, d_anc: usize) -> Result<Matrix<T>> {
    if d_sys * d_anc != psi.len() {
        return Err(Error::DimMismatch {
            left: d_sys * d_anc,
            right: psi.len(),
        });
    }
    Ok(Matrix::from_fn(d_sys, d_anc, |i, a| psi[i * d_anc + a]))
}

/// `M M^dagger` without validation.
pub(crate) fn gram<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut out = Matrix::zeros(rows, rows);
    for i in 0..rows {
        for j in i..rows {
            let mut acc = C::zero();
            for a in 0..cols {
                acc += m[(i, a)] * m[(j, a)].conj();
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc.conj();
        }
    }
    out
}

/// Reduced density matrix of the normalised pure state `psi` on
/// `system ⊗ ancilla`. The result has rank at most `min(d_sys, d_anc)`.
pub fn partial_trace<T: Real>(
    psi: &[C<T>],
    d_sys: usize,
    d_anc: usize,
    which: TraceOut,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    let m = amplitude_matrix(psi, d_sys, d_anc)?;
    let violation = (norm_sqr(psi) - T::one()).abs();
    if violation > tol.trace {
        return Err(Error::NotNormalized {
            violation: violation.to_f64_lossy(),
        });
    }
    let reduced = match which {
        TraceOut::Ancilla => gram(&m),
        // rho_anc[a, b] = sum_i psi[i, a] conj(psi[i, b]) = (M^T)(M^T)^dagger
        TraceOut::System => gram(&Matrix::from_fn(d_anc, d_sys, |a, i| m[(i, a)])),
    };
    DensityMatrix::from_matrix(reduced, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn product_state_reduces_to_pure() {
        let mut psi = vec![c(0.0, 0.0); 6];
        psi[0] = c(1.0, 0.0);
        let rho = partial_trace(&psi, 3, 2, TraceOut::Ancilla, &Tolerances::default()).unwrap();
        assert_eq!(rho.eigenvalues(), &[1.0, 0.0, 0.0]);
        assert_eq!(rho.matrix()[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        for which in [TraceOut::Ancilla, TraceOut::System] {
            let rho = partial_trace(&psi, 2, 2, which, &Tolerances::default()).unwrap();
            for v in rho.eigenvalues() {
                assert!((v - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn errors() {
        let tol = Tolerances::default();
        let psi = vec![c(1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            partial_trace(&psi, 2, 1, TraceOut::Ancilla, &tol),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            partial_trace(&psi, 2, 2, TraceOut::Ancilla, &tol),
            Err(Error::DimMismatch { .. })
        ));
    }
}

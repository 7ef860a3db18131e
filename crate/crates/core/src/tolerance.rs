//! Numerical tolerances. Every threshold used by validation and the solver
//! lives here so callers (and the CLI config file) can override them.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances<T> {
    /// Max |A_ij - conj(A_ji)|.
    pub herm: T,
    /// Max |Tr(A) - 1|; also bounds |<psi|psi> - 1| for pure states.
    pub trace: T,
    /// Eigenvalues in (-psd, 0) are clamped to zero.
    pub psd: T,
    pub ortho: T,
    pub recon: T,
    /// |lambda_R - lambda_{R+1}| at or below this is a degenerate boundary.
    pub degeneracy: T,
    /// Eigenvalues at or below this count as zero when computing ranks.
    pub rank: T,
    /// Max |Im Tr(rho sigma)| accepted from `overlap`.
    pub imag: T,
    /// Sum tolerance for majorization comparisons.
    pub sum: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            herm: T::tolerance(1e-9),
            trace: T::tolerance(1e-9),
            psd: T::tolerance(1e-9),
            ortho: T::tolerance(1e-8),
            recon: T::tolerance(1e-8),
            degeneracy: T::tolerance(1e-9),
            rank: T::tolerance(1e-10),
            imag: T::tolerance(1e-9),
            sum: T::tolerance(1e-9),
        }
    }
}

//! Rank-constrained approximation of quantum states.
//!
//! Given a density matrix `rho` and a rank bound `R`, find the closest state
//! of rank at most `R` under the Hilbert–Schmidt distance `Tr[(rho - sigma)^2]`
//! or the trace distance `1/2 Tr|rho - sigma|`. Both have closed forms
//! ([`solver`]); [`oracle`] checks them by independent search, and [`pca`]
//! simulates recovering the optimum variationally from a purification ansatz.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI uses.

pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pca;
pub mod random;
pub mod scalar;
pub mod solver;
pub mod sweep;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Real, C};
pub use solver::Metric;
pub use tolerance::Tolerances;

pub type Matrix64 = linalg::Matrix<f64>;
pub type HermitianOperator64 = linalg::HermitianOperator<f64>;
pub type DensityMatrix64 = linalg::DensityMatrix<f64>;
pub type Spectrum64 = linalg::Spectrum<f64>;
pub type QlrapSolution64 = solver::QlrapSolution<f64>;
pub type TraceOptimalFamily64 = solver::TraceOptimalFamily<f64>;
pub type Tolerances64 = Tolerances<f64>;

pub type DensityMatrix32 = linalg::DensityMatrix<f32>;
pub type QlrapSolution32 = solver::QlrapSolution<f32>;
pub type Tolerances32 = Tolerances<f32>;

//! Dense complex linear algebra for small quantum states.

pub mod eigh;
pub mod majorization;
pub mod matrix;
pub mod metrics;
pub mod partial_trace;
pub mod state;

pub use eigh::{eigh, eigvalsh, Projector, Spectrum};
pub use majorization::{majorization_margin, majorizes};
pub use matrix::{inner, Matrix};
pub use metrics::{hs_distance, overlap, overlap_checked, purity, trace_distance};
pub use partial_trace::{amplitude_matrix, partial_trace, TraceOut};
pub use state::{validate_density, DensityMatrix, HermitianOperator};

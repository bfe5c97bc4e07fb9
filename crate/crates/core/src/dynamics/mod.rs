//! Drift matrices of linear oscillator networks and exact propagation of
//! second moments through piecewise-constant control segments.

mod drift;
mod expm;
mod gaussian;
mod moments;
mod network;
mod propagate;

pub use drift::{build_drift, control_generator, DriftMatrix};
pub use expm::{exponential_with_derivative, matrix_exponential, CMatrix};
pub use gaussian::{entropy_bits, mode_entropy, symplectic_eigenvalues, thermal_state};
pub use moments::MomentMatrix;
pub use network::{ControlIndex, Edge, Mode, NetworkSpec};
pub use propagate::{propagate_protocol, propagate_segment};

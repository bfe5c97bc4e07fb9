//! Time-optimal control of linearly coupled harmonic-oscillator networks.
//!
//! Zero-mean Gaussian states are tracked through their second moments
//! `C_ij = <v_i v_j>` with `v = (a1, a1†, a2, a2†, ...)`. Control protocols are
//! piecewise constant, so every segment is propagated exactly with a matrix
//! exponential. On top of that sit a BFGS minimizer and the duration
//! path-tracing continuation that warm-starts each shorter-duration search at
//! the rescaled protocol found for the previous duration.
//!
//! Units: `ħ = 1` and the reference oscillator has `ω = 1`, so one period is
//! `τ = 2π`. Protocol durations are expressed in units of `τ`; control values
//! and frequencies are in units of `ω`.

pub mod dynamics;
pub mod error;
pub mod optimizer;
pub mod protocol;
pub mod selfcheck;
pub mod tasks;
pub mod tracer;

pub use dynamics::{
    build_drift, matrix_exponential, mode_entropy, propagate_protocol, propagate_segment,
    symplectic_eigenvalues, thermal_state, DriftMatrix, MomentMatrix, NetworkSpec,
};
pub use error::{Error, Result};
pub use optimizer::{minimize, random_protocol, ConvergedReason, SearchConfig, SearchResult};
pub use protocol::Protocol;
pub use tasks::{TaskKind, TaskSpec};
pub use tracer::{FrontierCurve, FrontierKind, TracePoint};

/// One period of the reference oscillator, `2π/ω` with `ω = 1`.
pub const TAU: f64 = std::f64::consts::TAU;

use super::drift::{build_drift, DriftMatrix};
use super::expm::matrix_exponential;
use super::moments::MomentMatrix;
use super::network::NetworkSpec;
use crate::error::{Error, Result};
use crate::protocol::Protocol;

/// `C(dt) = e^{A dt} C e^{Aᵀ dt}`, with `dt` in units of `1/ω`.
pub fn propagate_segment(c: &MomentMatrix, drift: &DriftMatrix, dt: f64) -> Result<MomentMatrix> {
    if !(dt >= 0.0) {
        return Err(Error::Argument(format!("segment duration {dt} must be non-negative")));
    }
    if drift.0.nrows() != c.entries().nrows() {
        return Err(Error::Config("drift and moment dimensions differ".into()));
    }
    if dt == 0.0 {
        return Ok(c.clone());
    }
    let u = matrix_exponential(&drift.0.map(|z| z * dt))?;
    Ok(c.transformed(&u))
}

/// Propagates `c0` through every segment of `protocol`. With
/// `record_trajectory`, also returns the state at each segment boundary,
/// starting with `c0` itself (so `N + 1` entries).
pub fn propagate_protocol(
    c0: &MomentMatrix,
    protocol: &Protocol,
    network: &NetworkSpec,
    record_trajectory: bool,
) -> Result<(MomentMatrix, Option<Vec<MomentMatrix>>)> {
    if protocol.n_controls() != network.n_controls() {
        return Err(Error::Config(format!(
            "protocol has {} controls, network has {}",
            protocol.n_controls(),
            network.n_controls()
        )));
    }
    if c0.n_modes() != network.n_modes() {
        return Err(Error::Config(format!(
            "{}-mode state for a {}-mode network",
            c0.n_modes(),
            network.n_modes()
        )));
    }
    let dt = protocol.segment_time();
    let mut trajectory = record_trajectory.then(|| Vec::with_capacity(protocol.n_segments() + 1));
    let mut c = c0.clone();
    for k in 0..protocol.n_segments() {
        if let Some(t) = trajectory.as_mut() {
            t.push(c.clone());
        }
        let drift = build_drift(network, &protocol.segment_controls(k))?;
        c = propagate_segment(&c, &drift, dt)?;
    }
    if let Some(t) = trajectory.as_mut() {
        t.push(c.clone());
    }
    Ok((c, trajectory))
}

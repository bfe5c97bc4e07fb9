use num_complex::Complex64;

use super::expm::CMatrix;
use super::network::{ControlIndex, NetworkSpec};
use crate::error::{Error, Result};

/// Generator `A` of `dC/dt = A C + C Aᵀ`, equivalently of `dv/dt = A v` for
/// the operator vector `v = (a1, a1†, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix(pub CMatrix);

impl DriftMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Adds the Heisenberg terms of `c x_i x_j` (with `x = a + a†`):
/// `da_i/dt ∋ -i c (a_j + a_j†)`, `da_i†/dt ∋ +i c (a_j + a_j†)`, and the same
/// with `i` and `j` exchanged.
fn add_coupling(a: &mut CMatrix, i: usize, j: usize, c: f64) {
    let minus_ic = Complex64::new(0.0, -c);
    for (p, q) in [(i, j), (j, i)] {
        for col in [2 * q, 2 * q + 1] {
            a[(2 * p, col)] += minus_ic;
            a[(2 * p + 1, col)] -= minus_ic;
        }
    }
}

/// Drift matrix of `H = Σ ω_k a_k† a_k + Σ_edges c_e x_i x_j`, where a
/// controlled edge has `c_e = λ_j g_e` and a fixed edge has `c_e = g_e`.
pub fn build_drift(network: &NetworkSpec, control_values: &[f64]) -> Result<DriftMatrix> {
    if control_values.len() != network.n_controls() {
        return Err(Error::Config(format!(
            "{} control values for a network with {} controls",
            control_values.len(),
            network.n_controls()
        )));
    }
    let n = 2 * network.n_modes();
    let mut a = CMatrix::zeros(n, n);
    for (k, mode) in network.modes().iter().enumerate() {
        a[(2 * k, 2 * k)] = Complex64::new(0.0, -mode.frequency);
        a[(2 * k + 1, 2 * k + 1)] = Complex64::new(0.0, mode.frequency);
    }
    for e in network.edges() {
        let c = match e.control {
            ControlIndex::Fixed => e.base_rate,
            ControlIndex::Control(j) => control_values[j - 1] * e.base_rate,
        };
        if c != 0.0 {
            add_coupling(&mut a, e.mode_i, e.mode_j, c);
        }
    }
    Ok(DriftMatrix(a))
}

/// `∂A/∂λ_j` for the 1-based control `j`; constant because `A` is linear in
/// every control value.
pub fn control_generator(network: &NetworkSpec, control: usize) -> CMatrix {
    let n = 2 * network.n_modes();
    let mut a = CMatrix::zeros(n, n);
    for e in network.edges() {
        if e.control == ControlIndex::Control(control) {
            add_coupling(&mut a, e.mode_i, e.mode_j, e.base_rate);
        }
    }
    a
}

//! The three control tasks: direct swap, mediated transfer and two-mode
//! squeezing through a mediator, each an (network, initial state, error)
//! triple with exact gradients for the optimizer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    build_drift, control_generator, exponential_with_derivative, matrix_exponential, propagate_protocol,
    thermal_state, CMatrix, MomentMatrix, NetworkSpec,
};
use crate::error::{Error, Result};
use crate::optimizer::Objective;
use crate::protocol::Protocol;

/// Mode roles in the three-oscillator chain A–C–B.
pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_C: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Swap2,
    Transfer3,
    Tmss3,
}

impl TaskKind {
    pub fn n_modes(self) -> usize {
        match self {
            TaskKind::Swap2 => 2,
            TaskKind::Transfer3 | TaskKind::Tmss3 => 3,
        }
    }

    pub fn default_segments(self) -> usize {
        match self {
            TaskKind::Swap2 => 5,
            TaskKind::Transfer3 | TaskKind::Tmss3 => 10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Swap2 => "swap2",
            TaskKind::Transfer3 => "transfer3",
            TaskKind::Tmss3 => "tmss3",
        }
    }

    /// Resonant unit-frequency network: A–B for the swap, A–C and B–C (controls
    /// 1 and 2) for the mediated tasks.
    pub fn default_network(self) -> NetworkSpec {
        match self {
            TaskKind::Swap2 => NetworkSpec::resonant(&["A", "B"], 1.0, &[(0, 1)]),
            TaskKind::Transfer3 | TaskKind::Tmss3 => {
                NetworkSpec::resonant(&["A", "B", "C"], 1.0, &[(MODE_A, MODE_C), (MODE_B, MODE_C)])
            }
        }
        .expect("built-in networks are valid")
    }

    /// Mean occupations of the initial product thermal state.
    pub fn initial_occupations(self) -> Vec<f64> {
        match self {
            TaskKind::Swap2 => vec![1.0, 0.0],
            TaskKind::Transfer3 => vec![1.0, 0.0, 0.0],
            TaskKind::Tmss3 => vec![0.0, 0.0, 0.0],
        }
    }
}

/// A control task: which error to minimize, on which network, from which state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTask", into = "RawTask")]
pub struct TaskSpec {
    kind: TaskKind,
    network: NetworkSpec,
    initial_state: MomentMatrix,
    squeezing: Option<f64>,
    n_segments: usize,
}

#[derive(Serialize, Deserialize)]
struct RawTask {
    task: TaskKind,
    #[serde(rename = "N")]
    n_segments: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    network: Option<NetworkSpec>,
}

impl TryFrom<RawTask> for TaskSpec {
    type Error = Error;

    fn try_from(raw: RawTask) -> Result<Self> {
        let network = raw.network.unwrap_or_else(|| raw.task.default_network());
        TaskSpec::new(raw.task, network, raw.n_segments, raw.r)
    }
}

impl From<TaskSpec> for RawTask {
    fn from(t: TaskSpec) -> Self {
        RawTask { task: t.kind, n_segments: t.n_segments, r: t.squeezing, network: Some(t.network) }
    }
}

impl TaskSpec {
    pub fn new(kind: TaskKind, network: NetworkSpec, n_segments: usize, r: Option<f64>) -> Result<Self> {
        if network.n_modes() != kind.n_modes() {
            return Err(Error::TaskMismatch(format!(
                "{} needs {} modes, network has {}",
                kind.name(),
                kind.n_modes(),
                network.n_modes()
            )));
        }
        if network.n_controls() == 0 {
            return Err(Error::Config("network has no controlled edges".into()));
        }
        if n_segments == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        let squeezing = match (kind, r) {
            (TaskKind::Tmss3, Some(r)) if r > 0.0 && r.is_finite() => Some(r),
            (TaskKind::Tmss3, _) => return Err(Error::Config("tmss3 needs a squeezing r > 0".into())),
            _ => None,
        };
        let initial_state = thermal_state(&network, &kind.initial_occupations())?;
        Ok(TaskSpec { kind, network, initial_state, squeezing, n_segments })
    }

    /// Two resonant oscillators, A thermal with `n̄ = 1`, B ground.
    pub fn swap2(n_segments: usize) -> Self {
        Self::new(TaskKind::Swap2, TaskKind::Swap2.default_network(), n_segments, None).unwrap()
    }

    /// A–C–B chain, A thermal with `n̄ = 1`, B and C ground.
    pub fn transfer3(n_segments: usize) -> Self {
        Self::new(TaskKind::Transfer3, TaskKind::Transfer3.default_network(), n_segments, None).unwrap()
    }

    /// A–C–B chain from the ground state, targeting squeezing `r` between A and B.
    pub fn tmss3(r: f64, n_segments: usize) -> Result<Self> {
        Self::new(TaskKind::Tmss3, TaskKind::Tmss3.default_network(), n_segments, Some(r))
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn network(&self) -> &NetworkSpec {
        &self.network
    }

    pub fn initial_state(&self) -> &MomentMatrix {
        &self.initial_state
    }

    pub fn squeezing(&self) -> Option<f64> {
        self.squeezing
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn n_controls(&self) -> usize {
        self.network.n_controls()
    }

    /// `M · N`
    pub fn n_params(&self) -> usize {
        self.n_controls() * self.n_segments
    }

    pub fn protocol(&self, params: &[f64], duration: f64) -> Result<Protocol> {
        Protocol::from_parameter_vector(duration, self.n_controls(), self.n_segments, params)
    }

    /// The task's error functional applied to a final state.
    pub fn error(&self, c: &MomentMatrix) -> Result<f64> {
        Ok(self.error_and_weights(c)?.0)
    }

    /// The error together with weights `W` such that `dε = Re Σ W_ij dC_ij`.
    fn error_and_weights(&self, c: &MomentMatrix) -> Result<(f64, CMatrix)> {
        match self.kind {
            TaskKind::Swap2 => swap_terms(c),
            TaskKind::Transfer3 => transfer_terms(c),
            TaskKind::Tmss3 => tmss_terms(c, self.squeezing.expect("validated")),
        }
    }
}

fn check_modes(c: &MomentMatrix, expected: usize, what: &str) -> Result<()> {
    if c.n_modes() != expected {
        return Err(Error::TaskMismatch(format!(
            "{what} needs a {expected}-mode state, got {} modes",
            c.n_modes()
        )));
    }
    Ok(())
}

fn occupation_weight(w: &mut CMatrix, mode: usize, scale: f64) {
    w[(2 * mode + 1, 2 * mode)] += Complex64::new(scale, 0.0);
}

fn swap_terms(c: &MomentMatrix) -> Result<(f64, CMatrix)> {
    check_modes(c, 2, "swap error")?;
    let mut w = CMatrix::zeros(4, 4);
    occupation_weight(&mut w, 0, 1.0);
    Ok((c.real_occupation(0)?, w))
}

fn transfer_terms(c: &MomentMatrix) -> Result<(f64, CMatrix)> {
    check_modes(c, 3, "transfer error")?;
    let mut w = CMatrix::zeros(6, 6);
    occupation_weight(&mut w, MODE_A, 1.0);
    occupation_weight(&mut w, MODE_C, 1.0);
    Ok((c.real_occupation(MODE_A)? + c.real_occupation(MODE_C)?, w))
}

fn tmss_terms(c: &MomentMatrix, r: f64) -> Result<(f64, CMatrix)> {
    check_modes(c, 3, "squeezing error")?;
    let occ_target = 0.5 * (2.0 * r).cosh();
    let corr_target = 0.5 * (2.0 * r).sinh();
    let da = c.real_occupation(MODE_A)? - occ_target;
    let db = c.real_occupation(MODE_B)? - occ_target;
    let dx = c.cross_correlation(MODE_A, MODE_B) - corr_target;
    let mut w = CMatrix::zeros(6, 6);
    occupation_weight(&mut w, MODE_A, 2.0 * da);
    occupation_weight(&mut w, MODE_B, 2.0 * db);
    w[(2 * MODE_A, 2 * MODE_B + 1)] = 2.0 * dx.conj();
    Ok((da * da + db * db + dx.norm_sqr(), w))
}

/// `ε = <a†a>` of mode A in a two-mode state.
pub fn swap_error(c: &MomentMatrix) -> Result<f64> {
    Ok(swap_terms(c)?.0)
}

/// `ε = <a†a> + <c†c>`: both the source and the mediator must end empty.
pub fn transfer_error(c: &MomentMatrix) -> Result<f64> {
    Ok(transfer_terms(c)?.0)
}

/// `ε = (<a†a> − cosh2r/2)² + (<b†b> − cosh2r/2)² + |<ab†> − sinh2r/2|²`.
pub fn tmss_error(c: &MomentMatrix, r: f64) -> Result<f64> {
    Ok(tmss_terms(c, r)?.0)
}

/// Target moments of the squeezing task on A and B (mediator in vacuum):
/// `<a†a> = <b†b> = cosh(2r)/2` and `<ab†> = sinh(2r)/2`, all other A–B
/// moments zero. This is a physical (mixed) Gaussian state with `tmss_error = 0`.
pub fn tmss_target_state(r: f64) -> MomentMatrix {
    let occ = 0.5 * (2.0 * r).cosh();
    let corr = 0.5 * (2.0 * r).sinh();
    let mut normal = CMatrix::zeros(3, 3);
    normal[(MODE_A, MODE_A)] = occ.into();
    normal[(MODE_B, MODE_B)] = occ.into();
    // <a_i† a_j> with <b† a> = <a b†>
    normal[(MODE_B, MODE_A)] = corr.into();
    normal[(MODE_A, MODE_B)] = corr.into();
    MomentMatrix::from_correlations(&normal, &CMatrix::zeros(3, 3))
}

/// Entanglement in bits of a two-mode squeezed vacuum with squeezing `r`:
/// `(1+λ) log2(1+λ) − λ log2 λ` with `λ = sinh² r`.
pub fn tmss_entanglement(r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Argument(format!("squeezing {r} must be non-negative")));
    }
    let lambda = r.sinh().powi(2);
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 + lambda) * (1.0 + lambda).log2() - lambda * lambda.log2())
}

/// Error of the protocol with parameter vector `params` and duration `duration`
/// (units of `τ`) applied to the task's initial state.
pub fn evaluate(task: &TaskSpec, params: &[f64], duration: f64) -> Result<f64> {
    let protocol = task.protocol(params, duration)?;
    let (c, _) = propagate_protocol(task.initial_state(), &protocol, task.network(), false)?;
    task.error(&c)
}

/// `∂ε/∂λ_jk`, exact.
pub fn gradient(task: &TaskSpec, params: &[f64], duration: f64) -> Result<Vec<f64>> {
    Ok(value_and_gradient(task, params, duration)?.1)
}

/// Error and exact gradient in one pass.
///
/// With `U = U_N ⋯ U_1` and `C_f = U C_0 Uᵀ`, the derivative of segment `k`'s
/// propagator in the direction of control `j` is the Fréchet derivative
/// `L(X_k, G_j)` of the exponential, so `∂U = S_k L(X_k, G_j) P_k` where `P_k`
/// and `S_k` are the products before and after segment `k`. Contracting with
/// the error weights `W` (and using `∂C_f = ∂U C_0 Uᵀ + (∂U C_0ᵀ Uᵀ)ᵀ`) gives
/// `∂ε = Re tr(L(X_k, G_j) Z_k)` with `Z_k = P_k (C_0 Uᵀ Wᵀ + C_0ᵀ Uᵀ W) S_k`.
/// Since `tr(L(X, G) Z) = tr(G L(X, Z))`, one derivative per segment serves
/// every control.
pub fn value_and_gradient(task: &TaskSpec, params: &[f64], duration: f64) -> Result<(f64, Vec<f64>)> {
    let protocol = task.protocol(params, duration)?;
    let network = task.network();
    let n_seg = protocol.n_segments();
    let n_ctrl = protocol.n_controls();
    let dt = protocol.segment_time();
    let dim = 2 * network.n_modes();
    let generators: Vec<CMatrix> = (1..=n_ctrl)
        .map(|j| control_generator(network, j).map(|z| z * dt))
        .collect();

    let mut exponents = Vec::with_capacity(n_seg);
    let mut propagators = Vec::with_capacity(n_seg);
    for k in 0..n_seg {
        let x = build_drift(network, &protocol.segment_controls(k))?.0.map(|z| z * dt);
        propagators.push(matrix_exponential(&x)?);
        exponents.push(x);
    }

    // prefix[k] = U_{k-1} ⋯ U_0, suffix[k] = U_{N-1} ⋯ U_{k+1}
    let id = CMatrix::identity(dim, dim);
    let mut prefix = Vec::with_capacity(n_seg + 1);
    prefix.push(id.clone());
    for u in &propagators {
        let next = u * prefix.last().unwrap();
        prefix.push(next);
    }
    let mut suffix = vec![id; n_seg];
    for k in (0..n_seg.saturating_sub(1)).rev() {
        suffix[k] = &suffix[k + 1] * &propagators[k + 1];
    }
    let total = &prefix[n_seg];

    let c0 = task.initial_state().entries();
    // Same segment-by-segment arithmetic as `evaluate`, so both report
    // bit-identical errors.
    let mut c = c0.clone();
    for u in &propagators {
        c = u * &c * u.transpose();
    }
    let final_state = MomentMatrix::from_entries(c)?;
    let (error, weights) = task.error_and_weights(&final_state)?;
    let total_t = total.transpose();
    let y = c0 * &total_t * weights.transpose() + c0.transpose() * &total_t * &weights;

    let mut grad = vec![0.0; n_ctrl * n_seg];
    for k in 0..n_seg {
        let z = &prefix[k] * &y * &suffix[k];
        let (_, l) = exponential_with_derivative(&exponents[k], &z)?;
        for (j, g) in generators.iter().enumerate() {
            // Re tr(G L)
            let mut acc = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    if g[(a, b)] != Complex64::new(0.0, 0.0) {
                        acc += (g[(a, b)] * l[(b, a)]).re;
                    }
                }
            }
            grad[j * n_seg + k] = acc;
        }
    }
    Ok((error, grad))
}

/// Central-difference gradient with step `1e-4 · max(1, |λ_jk|)`. Used as the
/// independent check on [`gradient`].
pub fn finite_difference_gradient(task: &TaskSpec, params: &[f64], duration: f64) -> Result<Vec<f64>> {
    let mut x = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let h = 1e-4 * params[i].abs().max(1.0);
        x[i] = params[i] + h;
        let up = evaluate(task, &x, duration)?;
        x[i] = params[i] - h;
        let down = evaluate(task, &x, duration)?;
        x[i] = params[i];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// A task at a fixed duration, seen as a function of its `M · N` parameters.
/// Evaluation failures surface as NaN so the optimizer treats them like any
/// other non-finite value.
#[derive(Debug, Clone, Copy)]
pub struct TaskObjective<'a> {
    pub task: &'a TaskSpec,
    pub duration: f64,
}

impl Objective for TaskObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        evaluate(self.task, x, self.duration).unwrap_or(f64::NAN)
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        value_and_gradient(self.task, x, self.duration).unwrap_or_else(|_| (f64::NAN, vec![f64::NAN; x.len()]))
    }
}

//! Fast invariant suite behind `pathtrace check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    build_drift, matrix_exponential, symplectic_eigenvalues, DriftMatrix, MomentMatrix, NetworkSpec,
};
use crate::error::Result;
use crate::protocol::Protocol;
use crate::tasks::{self, TaskSpec};
use crate::TAU;

/// Signature of [`build_drift`]; the suite accepts a replacement so that
/// broken generators can be shown to fail it.
pub type DriftBuilder = fn(&NetworkSpec, &[f64]) -> Result<DriftMatrix>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn all_tasks() -> Vec<TaskSpec> {
    vec![
        TaskSpec::swap2(5),
        TaskSpec::transfer3(10),
        TaskSpec::tmss3(2.0, 10).expect("valid squeezing"),
    ]
}

fn propagate_with(
    builder: DriftBuilder,
    task: &TaskSpec,
    protocol: &Protocol,
) -> Result<MomentMatrix> {
    let dt = protocol.segment_time();
    let mut c = task.initial_state().entries().clone();
    for k in 0..protocol.n_segments() {
        let a = builder(task.network(), &protocol.segment_controls(k))?;
        let u = matrix_exponential(&a.0.map(|z| z * dt))?;
        c = &u * c * u.transpose();
    }
    MomentMatrix::from_entries(c)
}

/// Commutator preservation and symplectic-eigenvalue conservation over random
/// protocols on every task network.
fn check_invariants(builder: DriftBuilder, rng: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let mut worst_commutator: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    let mut failure = None;
    for task in all_tasks() {
        let before = symplectic_eigenvalues(task.initial_state()).expect("initial states are physical");
        for _ in 0..20 {
            let duration = rng.random_range(0.01..0.5);
            let params: Vec<f64> = (0..task.n_params()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let protocol = task.protocol(&params, duration).expect("valid protocol");
            match propagate_with(builder, &task, &protocol) {
                Ok(c) => {
                    worst_commutator = worst_commutator.max(c.commutator_defect());
                    match symplectic_eigenvalues(&c) {
                        Ok(after) => {
                            for (a, b) in before.iter().zip(&after) {
                                worst_drift = worst_drift.max((a - b).abs());
                            }
                        }
                        Err(e) => failure = Some(e.to_string()),
                    }
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
    }
    let commutator = match &failure {
        Some(e) => outcome("commutator preservation", false, e.clone()),
        None => outcome(
            "commutator preservation",
            worst_commutator <= 1e-10,
            format!("max |C - Cᵀ - Ω| = {worst_commutator:.3e} (limit 1e-10)"),
        ),
    };
    let spectrum = match failure {
        Some(e) => outcome("symplectic spectrum conservation", false, e),
        None => outcome(
            "symplectic spectrum conservation",
            worst_drift <= 1e-9,
            format!("max eigenvalue drift = {worst_drift:.3e} (limit 1e-9)"),
        ),
    };
    vec![commutator, spectrum]
}

fn check_gradients(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for task in all_tasks() {
        for _ in 0..3 {
            let duration = rng.random_range(0.05..0.5);
            let params: Vec<f64> = (0..task.n_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let exact = tasks::gradient(&task, &params, duration);
            let fd = tasks::finite_difference_gradient(&task, &params, duration);
            let (Ok(exact), Ok(fd)) = (exact, fd) else {
                return outcome("gradient vs finite differences", false, "evaluation failed".into());
            };
            worst = worst.max(gradient_mismatch(&exact, &fd));
        }
    }
    outcome(
        "gradient vs finite differences",
        worst <= 1e-5,
        format!("max componentwise relative error = {worst:.3e} (limit 1e-5)"),
    )
}

/// Componentwise `|exact − fd| / max(|exact|, |fd|, floor)`, where the floor
/// `1e-6 · max(1, ‖fd‖_∞)` keeps components that vanish to rounding level from
/// dominating.
pub fn gradient_mismatch(exact: &[f64], fd: &[f64]) -> f64 {
    let scale = fd.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    exact
        .iter()
        .zip(fd)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1e-6 * scale))
        .fold(0.0, f64::max)
}

/// Residual `<a†a>` of mode A after resonant constant coupling `c` held for
/// `duration` (units of `1/ω`), starting from `n̄_A = 1`, B ground.
pub fn constant_coupling_residual(builder: DriftBuilder, coupling: f64, duration: f64) -> Result<f64> {
    let task = TaskSpec::swap2(1);
    let protocol = task.protocol(&[coupling], duration / TAU)?;
    tasks::swap_error(&propagate_with(builder, &task, &protocol)?)
}

fn check_rwa(builder: DriftBuilder) -> CheckOutcome {
    let residual = |g: f64| constant_coupling_residual(builder, g, std::f64::consts::FRAC_PI_2 / g);
    match (residual(1e-2), residual(1e-3)) {
        (Ok(coarse), Ok(fine)) => outcome(
            "weak-coupling swap",
            fine < coarse && fine <= 1e-5,
            format!("residual at g = 1e-2: {coarse:.3e}, at g = 1e-3: {fine:.3e} (limit 1e-5)"),
        ),
        (Err(e), _) | (_, Err(e)) => outcome("weak-coupling swap", false, e.to_string()),
    }
}

fn check_round_trips(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let params: Vec<f64> = (0..20).map(|_| rng.random_range(-10.0..10.0)).collect();
    let ok = Protocol::from_parameter_vector(0.3, 2, 10, &params)
        .and_then(|p| Ok((p.rescale(0.1)?.rescale(0.3)?, p)))
        .map(|(back, p)| back == p && p.as_parameter_vector() == params.as_slice())
        .unwrap_or(false);
    outcome("protocol round trips", ok, "parameter vector and rescale".into())
}

/// Runs the suite with the given drift builder and deterministic inputs from `seed`.
pub fn run_checks_with(builder: DriftBuilder, seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = check_invariants(builder, &mut rng);
    out.push(check_gradients(&mut rng));
    out.push(check_rwa(builder));
    out.push(check_round_trips(&mut rng));
    out
}

pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    run_checks_with(build_drift, seed)
}

//! Unconstrained quasi-Newton minimization and seeded initial protocols.

mod bfgs;
mod line_search;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tasks::TaskSpec;

pub use bfgs::minimize;

/// A smooth function to minimize, with its gradient.
pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    fn value(&self, x: &[f64]) -> f64 {
        self(x).0
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSearchConfig", into = "RawSearchConfig")]
pub struct SearchConfig {
    pub max_iterations: usize,
    /// Stop once `‖∇ε‖_∞` falls to this value.
    pub gradient_tolerance: f64,
    /// Stop once `ε` falls to this value.
    pub error_tolerance: f64,
    /// Random initial controls are uniform in `[-init_amplitude, init_amplitude]`.
    pub init_amplitude: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_iterations: 2000,
            gradient_tolerance: 1e-10,
            error_tolerance: 1e-12,
            init_amplitude: 1.0,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        SearchConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        for (name, v) in [("gtol", self.gradient_tolerance), ("etol", self.error_tolerance)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.init_amplitude >= 0.0 && self.init_amplitude.is_finite()) {
            return Err(Error::Config("init_amp must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawSearchConfig {
    #[serde(default = "default_max_iter")]
    max_iter: usize,
    #[serde(default = "default_gtol")]
    gtol: f64,
    #[serde(default = "default_etol")]
    etol: f64,
    #[serde(default = "default_init_amp")]
    init_amp: f64,
    #[serde(default)]
    seed: u64,
}

fn default_max_iter() -> usize {
    SearchConfig::default().max_iterations
}
fn default_gtol() -> f64 {
    SearchConfig::default().gradient_tolerance
}
fn default_etol() -> f64 {
    SearchConfig::default().error_tolerance
}
fn default_init_amp() -> f64 {
    SearchConfig::default().init_amplitude
}

impl TryFrom<RawSearchConfig> for SearchConfig {
    type Error = Error;

    fn try_from(raw: RawSearchConfig) -> Result<Self> {
        let config = SearchConfig {
            max_iterations: raw.max_iter,
            gradient_tolerance: raw.gtol,
            error_tolerance: raw.etol,
            init_amplitude: raw.init_amp,
            seed: raw.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

impl From<SearchConfig> for RawSearchConfig {
    fn from(c: SearchConfig) -> Self {
        RawSearchConfig {
            max_iter: c.max_iterations,
            gtol: c.gradient_tolerance,
            etol: c.error_tolerance,
            init_amp: c.init_amplitude,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConvergedReason {
    GradientTol,
    ErrorTol,
    MaxIter,
    LineSearchFail,
}

impl fmt::Display for ConvergedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConvergedReason::GradientTol => "GradientTol",
            ConvergedReason::ErrorTol => "ErrorTol",
            ConvergedReason::MaxIter => "MaxIter",
            ConvergedReason::LineSearchFail => "LineSearchFail",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ConvergedReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GradientTol" => Ok(ConvergedReason::GradientTol),
            "ErrorTol" => Ok(ConvergedReason::ErrorTol),
            "MaxIter" => Ok(ConvergedReason::MaxIter),
            "LineSearchFail" => Ok(ConvergedReason::LineSearchFail),
            other => Err(Error::Argument(format!("unknown convergence reason `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_params: Vec<f64>,
    pub best_error: f64,
    /// Objective at the starting point.
    pub start_error: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged_reason: ConvergedReason,
}

/// Initial controls for path (or sweep point) `path_index`: i.i.d. uniform in
/// `[-c₀, c₀]`, drawn from ChaCha stream `path_index` of the configured seed so
/// each index gets an independent, reproducible sequence.
pub fn random_protocol(task: &TaskSpec, config: &SearchConfig, path_index: u64) -> Vec<f64> {
    random_vector(task.n_params(), config.init_amplitude, config.seed, path_index)
}

pub(crate) fn random_vector(len: usize, amplitude: f64, seed: u64, stream: u64) -> Vec<f64> {
    if amplitude == 0.0 {
        return vec![0.0; len];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..len).map(|_| rng.random_range(-amplitude..=amplitude)).collect()
}

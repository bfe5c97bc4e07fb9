//! Experiment configuration files and the built-in figure recipes.

use std::path::Path;

use pathtrace::tracer::uniform_grid;
use pathtrace::{SearchConfig, TaskKind, TaskSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Independent searches only.
    Sweep,
    /// Traced paths and their frontier.
    Trace,
    /// Both of the above.
    Frontier,
}

/// Durations in units of `τ`, either a uniform descending range or an
/// explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Uniform {
        #[serde(rename = "T0")]
        start: f64,
        #[serde(rename = "T_end")]
        end: f64,
        points: usize,
    },
    List(Vec<f64>),
}

impl GridSpec {
    pub fn durations(&self) -> Vec<f64> {
        match self {
            GridSpec::Uniform { start, end, points } => uniform_grid(*start, *end, *points),
            GridSpec::List(v) => v.clone(),
        }
    }

    fn validate(&self, field: &str) -> Result<(), String> {
        match self {
            GridSpec::Uniform { start, end, points } => {
                if *points == 0 {
                    return Err(format!("{field}.points must be at least 1"));
                }
                if !(end.is_finite() && start.is_finite() && *end > 0.0) {
                    return Err(format!("{field}: durations must be finite and positive"));
                }
                if *points > 1 && start <= end {
                    return Err(format!("{field}: need T0 > T_end, got {start} and {end}"));
                }
            }
            GridSpec::List(v) => {
                if v.is_empty() {
                    return Err(format!("{field} is empty"));
                }
                if v.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                    return Err(format!("{field}: durations must be finite and positive"));
                }
                if v.windows(2).any(|w| w[0] <= w[1]) {
                    return Err(format!("{field} must be strictly descending"));
                }
            }
        }
        Ok(())
    }
}

fn default_paths() -> usize {
    1
}

fn default_target() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskSpec,
    pub grid: GridSpec,
    /// Grid for the independent sweep when it differs from the path grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_grid: Option<GridSpec>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default = "default_paths")]
    pub paths: usize,
    pub mode: Mode,
    pub output: String,
    /// Error target used to pick the stored best protocol.
    #[serde(default = "default_target")]
    pub target_error: f64,
}

/// A config file that could not be used, with the offending location.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            ConfigError(format!(
                "{origin}:{}:{}: field `{}`: {inner}",
                inner.line(),
                inner.column(),
                e.path()
            ))
        })?;
        config.validate().map_err(|m| ConfigError(format!("{origin}: {m}")))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), String> {
        self.grid.validate("grid")?;
        if let Some(g) = &self.sweep_grid {
            g.validate("sweep_grid")?;
        }
        if self.paths == 0 {
            return Err("paths must be at least 1".into());
        }
        if self.output.is_empty() {
            return Err("output prefix is empty".into());
        }
        if !(self.target_error > 0.0) {
            return Err("target_error must be positive".into());
        }
        self.search.validate().map_err(|e| format!("search: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn sweep_durations(&self) -> Vec<f64> {
        self.sweep_grid.as_ref().unwrap_or(&self.grid).durations()
    }
}

pub const RECIPES: [&str; 3] = ["fig1", "fig2", "fig3"];

/// Default configs for the three figure reproductions.
pub fn recipe(name: &str) -> Option<ExperimentConfig> {
    let task = |kind: TaskKind, r| {
        TaskSpec::new(kind, kind.default_network(), kind.default_segments(), r).expect("recipe task is valid")
    };
    let config = match name {
        "fig1" => ExperimentConfig {
            task: task(TaskKind::Swap2, None),
            grid: GridSpec::Uniform { start: 0.5, end: 0.02, points: 2000 },
            sweep_grid: None,
            search: SearchConfig::default(),
            paths: 11,
            mode: Mode::Frontier,
            output: "fig1".into(),
            target_error: 1e-4,
        },
        "fig2" => ExperimentConfig {
            task: task(TaskKind::Transfer3, None),
            grid: GridSpec::Uniform { start: 1.0, end: 0.02, points: 900 },
            sweep_grid: None,
            search: SearchConfig::default(),
            paths: 1,
            mode: Mode::Trace,
            output: "fig2".into(),
            target_error: 2e-4,
        },
        "fig3" => ExperimentConfig {
            task: task(TaskKind::Tmss3, Some(2.0)),
            grid: GridSpec::Uniform { start: 0.5, end: 0.005, points: 1350 },
            sweep_grid: Some(GridSpec::Uniform { start: 0.5, end: 0.005, points: 400 }),
            search: SearchConfig::default(),
            paths: 1,
            mode: Mode::Frontier,
            output: "fig3".into(),
            target_error: 1e-6,
        },
        _ => return None,
    };
    Some(config)
}

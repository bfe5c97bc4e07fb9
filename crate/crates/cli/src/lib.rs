//! Command implementations behind the `pathtrace` binary.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use pathtrace::dynamics::entropy_bits;
use pathtrace::protocol::ProtocolMeta;
use pathtrace::selfcheck::{run_checks_with, DriftBuilder};
use pathtrace::tracer::{
    independent_sweep, multi_path_frontier, trace_paths, FrontierCurve, TraceFailure, TracePoint,
};
use pathtrace::{propagate_protocol, symplectic_eigenvalues, MomentMatrix, NetworkSpec, Protocol};

pub use config::{recipe, ConfigError, ExperimentConfig, GridSpec, Mode, RECIPES};
use output::{float, points_csv, with_suffix, write_atomic};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug)]
pub enum RunError {
    /// A search hit a non-finite objective; completed points were written.
    Numerical(String),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Numerical(m) => write!(f, "numerical abort: {m}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical(_) => exit::NUMERICAL,
            RunError::Io(_) => exit::CONFIG,
        }
    }
}

/// Seed precedence: command-line flag, then `PATHTRACE_SEED`, then the config.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<Option<u64>, ConfigError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match env {
        None => Ok(None),
        Some(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ConfigError(format!("PATHTRACE_SEED: not an unsigned integer: {s:?}"))),
    }
}

/// Files written by one experiment run.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<std::path::PathBuf>,
    pub sweep: Option<FrontierCurve>,
    pub paths: Vec<FrontierCurve>,
    pub frontier: Option<FrontierCurve>,
    pub best: Option<TracePoint>,
}

/// Shortest-duration point meeting `target`, or the lowest-error point when
/// none does.
pub fn best_point(curve: &FrontierCurve, target: f64) -> Option<&TracePoint> {
    curve
        .points
        .iter()
        .find(|p| p.error <= target)
        .or_else(|| curve.points.iter().min_by(|a, b| a.error.total_cmp(&b.error)))
}

struct Writer<'a> {
    prefix: &'a str,
    n_params: usize,
    summary: RunSummary,
}

impl Writer<'_> {
    fn curve(&mut self, suffix: &str, curve: &FrontierCurve) -> std::io::Result<()> {
        let path = with_suffix(self.prefix, suffix);
        write_atomic(&path, &points_csv(&curve.points, self.n_params))?;
        self.summary.files.push(path);
        Ok(())
    }
}

/// Runs the experiment in `mode`, writing CSVs and the best protocol under
/// `config.output`. Progress lines go to `log`.
pub fn run_experiment(config: &ExperimentConfig, mode: Mode, log: &mut dyn Write) -> Result<RunSummary, RunError> {
    let task = &config.task;
    let mut w = Writer { prefix: &config.output, n_params: task.n_params(), summary: RunSummary::default() };
    let mut abort: Option<String> = None;

    if matches!(mode, Mode::Sweep | Mode::Frontier) {
        let grid = config.sweep_durations();
        let _ = writeln!(log, "sweep: {} durations", grid.len());
        let curve = match independent_sweep(task, &grid, &config.search) {
            Ok(c) => c,
            Err(TraceFailure { partial, source }) => {
                abort.get_or_insert(format!("sweep: {source}"));
                partial
            }
        };
        w.curve(".sweep.csv", &curve)?;
        w.summary.sweep = Some(curve);
    }

    if abort.is_none() && matches!(mode, Mode::Trace | Mode::Frontier) {
        let grid = config.grid.durations();
        let _ = writeln!(log, "trace: {} paths x {} durations", config.paths, grid.len());
        for (k, result) in trace_paths(task, &grid, &config.search, config.paths).into_iter().enumerate() {
            let curve = match result {
                Ok(c) => c,
                Err(TraceFailure { partial, source }) => {
                    abort.get_or_insert(format!("path {k}: {source}"));
                    partial
                }
            };
            w.curve(&format!(".path{k}.csv"), &curve)?;
            w.summary.paths.push(curve);
        }
        if abort.is_none() {
            let frontier = multi_path_frontier(&w.summary.paths).map_err(|e| RunError::Numerical(e.to_string()))?;
            w.curve(".frontier.csv", &frontier)?;
            w.summary.frontier = Some(frontier);
        }
    }

    if let Some(message) = abort {
        return Err(RunError::Numerical(message));
    }

    let chosen = w.summary.frontier.as_ref().or(w.summary.sweep.as_ref());
    if let Some(best) = chosen.and_then(|c| best_point(c, config.target_error)).cloned() {
        let protocol = task
            .protocol(&best.params, best.duration)
            .map_err(|e| RunError::Numerical(e.to_string()))?
            .with_meta(ProtocolMeta { seed: config.search.seed, task: task.kind().name().into() });
        let path = with_suffix(&config.output, ".best.json");
        let json = serde_json::to_string_pretty(&protocol).expect("protocol serializes");
        write_atomic(&path, &(json + "\n"))?;
        let _ = writeln!(log, "best: T/tau = {} epsilon = {:e}", best.duration, best.error);
        w.summary.files.push(path);
        w.summary.best = Some(best);
    }
    Ok(w.summary)
}

/// Reduced single-mode state of mode `k`.
fn mode_state(c: &MomentMatrix, k: usize) -> MomentMatrix {
    let sub = c.entries().view((2 * k, 2 * k), (2, 2)).into_owned();
    MomentMatrix::from_entries(sub).expect("sub-block of a valid moment matrix")
}

/// Trajectory diagnostics at every segment boundary: occupation and entropy
/// (bits) of each mode's reduced state, then the global symplectic
/// eigenvalues in ascending order.
pub fn simulate_csv(protocol: &Protocol, network: &NetworkSpec, initial: &MomentMatrix) -> pathtrace::Result<String> {
    let (_, trajectory) = propagate_protocol(initial, protocol, network, true)?;
    let trajectory = trajectory.expect("trajectory requested");
    let labels: Vec<&str> = network.modes().iter().map(|m| m.label.as_str()).collect();
    let mut out = String::from("segment,t_over_tau");
    for l in &labels {
        write!(out, ",n_{l}").unwrap();
    }
    for l in &labels {
        write!(out, ",S_{l}").unwrap();
    }
    for k in 1..=labels.len() {
        write!(out, ",nu_{k}").unwrap();
    }
    out.push('\n');
    let dt = protocol.duration() / protocol.n_segments() as f64;
    for (s, c) in trajectory.iter().enumerate() {
        write!(out, "{s},{}", float(dt * s as f64)).unwrap();
        for k in 0..labels.len() {
            write!(out, ",{}", float(c.real_occupation(k)?)).unwrap();
        }
        for k in 0..labels.len() {
            let nu = symplectic_eigenvalues(&mode_state(c, k))?[0];
            write!(out, ",{}", float(entropy_bits(nu))).unwrap();
        }
        for nu in symplectic_eigenvalues(c)? {
            write!(out, ",{}", float(nu)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Runs the self-check suite, printing one verdict line per check. Returns
/// whether every check passed.
pub fn run_check(builder: DriftBuilder, seed: u64, out: &mut dyn Write) -> bool {
    let mut all = true;
    for c in run_checks_with(builder, seed) {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict} {}: {}", c.name, c.detail);
        all &= c.passed;
    }
    all
}

/// Writes `contents` atomically, reporting the path on failure.
pub fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    write_atomic(path, contents).map_err(RunError::Io)
}

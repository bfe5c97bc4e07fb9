use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use pathtrace::dynamics::thermal_state;
use pathtrace::{build_drift, NetworkSpec, Protocol, TaskKind};
use pathtrace_cli::{exit, recipe, resolve_seed, run_check, run_experiment, simulate_csv, write_file};
use pathtrace_cli::{ConfigError, ExperimentConfig, Mode, RECIPES};

/// Time-optimal control of coupled oscillators by duration path tracing.
#[derive(Parser, Debug)]
#[command(name = "pathtrace", version)]
struct Cli {
    /// Experiment config JSON.
    #[arg(long, global = true, conflicts_with = "recipe")]
    config: Option<PathBuf>,
    /// Built-in experiment config (fig1, fig2, fig3).
    #[arg(long, global = true)]
    recipe: Option<String>,
    /// Output prefix, overriding the config.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads for paths and sweep points.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// RNG seed, overriding PATHTRACE_SEED and the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the effective config as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment in the config's mode.
    Run,
    /// Trace paths and write their frontier.
    Trace,
    /// Run independent searches over the grid.
    Sweep,
    /// Sweep, trace and frontier in one run.
    Frontier,
    /// Propagate a stored protocol and write per-boundary diagnostics.
    Simulate {
        /// Protocol JSON, e.g. a run's `<prefix>.best.json`.
        #[arg(long)]
        protocol: PathBuf,
        /// Network JSON; defaults to the network of the protocol's task.
        #[arg(long)]
        network: Option<PathBuf>,
        /// Initial thermal occupations, one per mode; defaults to the task's.
        #[arg(long, value_delimiter = ',')]
        occupations: Option<Vec<f64>>,
    },
    /// Run the self-check suite (inputs seeded by CHECK_SEED).
    Check,
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit::CONFIG as u8)
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut config = match (&cli.config, &cli.recipe) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => recipe(name).ok_or_else(|| {
            ConfigError(format!("unknown recipe {name:?}; expected one of {}", RECIPES.join(", ")))
        })?,
        (None, None) => return Err(ConfigError("--config or --recipe is required".into())),
    };
    let env = std::env::var("PATHTRACE_SEED").ok();
    if let Some(seed) = resolve_seed(cli.seed, env.as_deref())? {
        config.search.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output = out.clone();
    }
    config.validate().map_err(ConfigError)?;
    Ok(config)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        anyhow!("{}:{}:{}: field `{}`: {inner}", path.display(), inner.line(), inner.column(), e.path())
    })
}

fn simulate(
    protocol_path: &PathBuf,
    network_path: Option<&PathBuf>,
    occupations: Option<&[f64]>,
    out: Option<&str>,
) -> anyhow::Result<()> {
    let protocol: Protocol = read_json(protocol_path)?;
    let kind = protocol
        .meta()
        .and_then(|m| serde_json::from_value::<TaskKind>(serde_json::Value::String(m.task.clone())).ok());
    let network: NetworkSpec = match (network_path, kind) {
        (Some(p), _) => read_json(p)?,
        (None, Some(k)) => k.default_network(),
        (None, None) => return Err(anyhow!("--network is required when the protocol names no task")),
    };
    let occupations = match (occupations, kind) {
        (Some(o), _) => o.to_vec(),
        (None, Some(k)) if k.n_modes() == network.n_modes() => k.initial_occupations(),
        (None, _) => vec![0.0; network.n_modes()],
    };
    let initial = thermal_state(&network, &occupations)?;
    let csv = simulate_csv(&protocol, &network, &initial)?;
    match out {
        Some(prefix) => write_file(&PathBuf::from(format!("{prefix}.trajectory.csv")), &csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return config_error("--threads must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return config_error(e);
        }
    }

    let mode = match &cli.command {
        Some(Command::Check) => {
            let seed = match std::env::var("CHECK_SEED") {
                Ok(s) => match s.trim().parse() {
                    Ok(v) => v,
                    Err(_) => return config_error(format!("CHECK_SEED: not an unsigned integer: {s:?}")),
                },
                Err(_) => 0,
            };
            let passed = run_check(build_drift, seed, &mut std::io::stdout());
            return ExitCode::from(if passed { exit::OK } else { exit::CHECK_FAILED } as u8);
        }
        Some(Command::Simulate { protocol, network, occupations }) => {
            return match simulate(protocol, network.as_ref(), occupations.as_deref(), cli.out.as_deref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => config_error(format!("{e:#}")),
            };
        }
        Some(Command::Trace) => Some(Mode::Trace),
        Some(Command::Sweep) => Some(Mode::Sweep),
        Some(Command::Frontier) => Some(Mode::Frontier),
        Some(Command::Run) | None => None,
    };

    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    if cli.print_config {
        println!("{}", config.to_json());
        return ExitCode::SUCCESS;
    }
    if cli.command.is_none() {
        return config_error("no command given; try --help");
    }
    let mode = mode.unwrap_or(config.mode);
    match run_experiment(&config, mode, &mut std::io::stderr()) {
        Ok(summary) => {
            for f in summary.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

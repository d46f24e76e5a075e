//! Command-line front end for the thresholding bandit simulations.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tbp_core::harness::{write_csv, LowerBoundSpec, PresetSpec};
use tbp_core::{exec, run_experiment, Execution, ExperimentConfig, ExperimentResult, PolicyId, ProblemSource};

pub use svg::emit_svg;

pub const DEFAULT_HORIZONS: [usize; 10] = [50, 100, 150, 200, 250, 300, 350, 400, 450, 500];
pub const DEFAULT_REPLICATIONS: u64 = 5000;
pub const DEFAULT_LOWER_BOUND_HORIZONS: [usize; 4] = [20, 40, 60, 80];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or a config that fails validation; nothing was simulated.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tbp", version, about = "Thresholding bandit experiment runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Bernoulli,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Record per-cell wall-clock time. Outputs are then no longer
    /// reproducible byte for byte.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one of the benchmark presets against all six policies.
    Preset {
        /// exp1, exp2 or exp3.
        name: String,
        #[arg(long, value_enum, default_value = "bernoulli")]
        family: FamilyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        replications: u64,
        /// Comma-separated horizon grid.
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment described by a JSON config file.
    Run {
        config: PathBuf,
        /// Override `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Override `replications`.
        #[arg(long)]
        replications: Option<u64>,
        /// Override `horizons`.
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep APT over the lower-bound instance family.
    LowerBound {
        /// Comma-separated gap vector.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        replications: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// Files written by one invocation.
#[derive(Debug)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: PathBuf,
}

/// Parse a config document, reporting schema errors with their field path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Usage(format!("config error at `{path}`: {}", e.into_inner()))
    })
}

fn execute(config: &ExperimentConfig, common: &Common, stem: &str) -> Result<Written, CliError> {
    config.resolve().map_err(|e| CliError::Usage(e.to_string()))?;
    fs::create_dir_all(&common.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", common.out.display())))?;
    let result = exec::with_threads(common.threads, || run_experiment(config, Execution::Parallel))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let result = if common.timing { result } else { result.without_timing() };
    write_outputs(&result, &common.out, stem)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Write `<stem>.csv`, `<stem>.json` and `<stem>.svg` into `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path, stem: &str) -> Result<Written, CliError> {
    let runtime = |e: tbp_core::Error| CliError::Runtime(e.to_string());
    let mut csv = Vec::new();
    write_csv(result, &mut csv).map_err(runtime)?;
    let json = result.to_json().map_err(runtime)?;
    let written = Written {
        csv: dir.join(format!("{stem}.csv")),
        json: dir.join(format!("{stem}.json")),
        svg: dir.join(format!("{stem}.svg")),
    };
    write_file(&written.csv, &csv)?;
    write_file(&written.json, json.as_bytes())?;
    write_file(&written.svg, emit_svg(result).as_bytes())?;
    Ok(written)
}

pub fn run(cli: Cli) -> Result<Written, CliError> {
    match cli.command {
        Command::Preset {
            name,
            family,
            seed,
            replications,
            horizons,
            common,
        } => {
            let name: tbp_core::PresetName = name.parse().map_err(|e: tbp_core::Error| CliError::Usage(e.to_string()))?;
            let family = match family {
                FamilyArg::Bernoulli => tbp_core::Family::Bernoulli,
                FamilyArg::Gaussian => tbp_core::Family::Gaussian,
            };
            let source = ProblemSource::Preset(PresetSpec {
                name,
                family,
                exp3_ratio: None,
            });
            let mut cfg = ExperimentConfig::new(
                source,
                PolicyId::BENCHMARK.to_vec(),
                horizons.unwrap_or_else(|| DEFAULT_HORIZONS.to_vec()),
            );
            cfg.replications = replications;
            cfg.master_seed = seed;
            execute(&cfg, &common, &format!("{name}_{family}"))
        }
        Command::Run {
            config,
            seed,
            replications,
            horizons,
            common,
        } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = parse_config(&text)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(n) = replications {
                cfg.replications = n;
            }
            if let Some(h) = horizons {
                cfg.horizons = h;
            }
            let stem = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "experiment".into());
            execute(&cfg, &common, &stem)
        }
        Command::LowerBound {
            d,
            tau,
            epsilon,
            horizons,
            replications,
            seed,
            common,
        } => {
            let source = ProblemSource::LowerBound(LowerBoundSpec { d, tau, epsilon });
            let mut cfg = ExperimentConfig::new(
                source,
                vec![PolicyId::Apt],
                horizons.unwrap_or_else(|| DEFAULT_LOWER_BOUND_HORIZONS.to_vec()),
            );
            cfg.replications = replications;
            cfg.master_seed = seed;
            execute(&cfg, &common, "lower_bound")
        }
    }
}

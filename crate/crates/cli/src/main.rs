use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use grnpdmp::commands::execute;
use grnpdmp::config::{CompanionOverride, RunConfig, TimeGrid};
use grnpdmp::output::RunManifest;
use grnpdmp::simulate::ModelKind;

#[derive(Parser, Debug)]
#[command(name = "grnpdmp", version, about = "Bursty gene-network PDMPs: exact simulation, couplings and Wasserstein bounds")]
struct Cli {
    /// Network JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; required by every stochastic command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Number of independent runs.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Time grid `t0:t1:steps` or `t0:t1:steps:log`.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct ModelArgs {
    /// `p` (protein only) or `mp` (mRNA-protein).
    #[arg(long, default_value = "p")]
    model: String,
    #[arg(long)]
    horizon: Option<f64>,
    /// First initial condition, comma separated (`x`, or `y` then `z`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    init1: Option<Vec<f64>>,
    /// Second initial condition.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    init2: Option<Vec<f64>>,
    /// Also log rejected thinning proposals.
    #[arg(long)]
    log_rejected: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a network file and print its derived constants.
    Validate,
    /// Simulate independent trajectories from `--init1`.
    Simulate(ModelArgs),
    /// Run the synchronizing coupling from `--init1` and `--init2`.
    Couple(ModelArgs),
    /// Compare the decide-ahead companion sampler with thinning.
    Companion {
        #[arg(long, default_value_t = 1.0)]
        u0: f64,
        #[arg(long)]
        horizon: Option<f64>,
        /// Override `r` (needs `--lambda` and `--d1-min` too).
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        d1_min: Option<f64>,
    },
    /// Bound curves and the Gronwall comparison curve.
    Bounds {
        #[command(flatten)]
        model: ModelArgs,
        /// Initial Wasserstein distance (default: distance between the initial conditions).
        #[arg(long)]
        w0: Option<f64>,
    },
    /// Empirical W1 sandwich against the closed-form bound.
    Convergence(ModelArgs),
    /// p*(u) over a (lambda, rho) grid; `--grid` gives the u values.
    Pstar {
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        lambdas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        rhos: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        d1_min: f64,
    },
    /// Strong and weak toggle-switch regimes with a bimodality summary.
    ToggleDemo,
    /// Rerun the configuration stored in a manifest, writing to `--out`.
    Replay { manifest: PathBuf },
}

fn stochastic_seed(cli: &Cli, cmd: &str) -> Result<u64> {
    match cli.seed {
        Some(s) => Ok(s),
        None => bail!("`{cmd}` needs --seed"),
    }
}

fn apply_model(cfg: &mut RunConfig, m: &ModelArgs) -> Result<()> {
    cfg.model = m.model.parse().context("--model")?;
    cfg.horizon = m.horizon;
    cfg.init1 = m.init1.clone();
    cfg.init2 = m.init2.clone();
    cfg.log_rejected = m.log_rejected;
    Ok(())
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let (name, stochastic, default_runs) = match &cli.command {
        Command::Validate => ("validate", false, 1),
        Command::Simulate(_) => ("simulate", true, 1),
        Command::Couple(_) => ("couple", true, 1),
        Command::Companion { .. } => ("companion", true, 10_000),
        Command::Bounds { .. } => ("bounds", false, 1),
        Command::Convergence(_) => ("convergence", true, 500),
        Command::Pstar { .. } => ("pstar", false, 1),
        Command::ToggleDemo => ("toggle-demo", true, 8),
        Command::Replay { manifest } => {
            let mut cfg = RunManifest::read(manifest)?.config;
            cfg.out_dir = cli.out.clone();
            return Ok(cfg);
        }
    };
    let seed = if stochastic { stochastic_seed(cli, name)? } else { cli.seed.unwrap_or(0) };
    let mut cfg = RunConfig::new(name, seed, cli.out.clone());
    cfg.network = cli.config.clone();
    cfg.runs = cli.runs.unwrap_or(default_runs);
    cfg.workers = cli.workers;
    cfg.grid = cli.grid.as_deref().map(TimeGrid::parse).transpose().context("--grid")?;
    match &cli.command {
        Command::Simulate(m) | Command::Couple(m) | Command::Convergence(m) => apply_model(&mut cfg, m)?,
        Command::Bounds { model, w0 } => {
            apply_model(&mut cfg, model)?;
            cfg.w0 = *w0;
        }
        Command::Companion { u0, horizon, r, lambda, d1_min } => {
            cfg.model = ModelKind::P;
            cfg.u0 = Some(*u0);
            cfg.horizon = *horizon;
            cfg.companion = match (r, lambda, d1_min) {
                (Some(r), Some(l), Some(d)) => Some(CompanionOverride { r: *r, lambda_cap: *l, d1_min: *d }),
                (None, None, None) => None,
                _ => bail!("--r, --lambda and --d1-min must be given together"),
            };
        }
        Command::Pstar { lambdas, rhos, d1_min } => {
            cfg.lambdas = lambdas.clone();
            cfg.rhos = rhos.clone();
            cfg.companion = Some(CompanionOverride { r: 0.0, lambda_cap: 0.0, d1_min: *d1_min });
        }
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    let report = execute(&cfg)?;
    for o in &report.manifest.outputs {
        println!("{}\t{} rows", cfg.out_dir.join(&o.file).display(), o.rows);
    }
    println!("{}\tmanifest", cfg.out_dir.join("manifest.json").display());
    if !report.manifest.summary.is_null() {
        println!("{}", report.manifest.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

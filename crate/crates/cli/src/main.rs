use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use percolab::experiments::{emit_report, load_config, run_replicas, Command, ExperimentError};

/// Continuous first-passage percolation and greedy paths experiments.
///
/// Every option can also be given in a `key = value` file passed with
/// `--config`; command-line flags take precedence over the file.
#[derive(Debug, Parser)]
#[command(name = "percolab", version)]
struct Cli {
    /// speed, classify, greedy, scaling, equivalence, domination or validate
    #[arg(long)]
    cmd: Option<String>,
    /// Key-value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<String>,
    /// Radius law, e.g. `dirac:r0=1` or `pareto:beta=4,rmin=1`
    #[arg(long)]
    law: Option<String>,
    /// Window half-width
    #[arg(long = "L")]
    window: Option<String>,
    /// Horizon (initial horizon for adaptive runs)
    #[arg(long = "T")]
    horizon: Option<String>,
    #[arg(long)]
    replicas: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Fast-ball parameter for greedy runs
    #[arg(long)]
    alpha: Option<String>,
    /// Output directory for summary.json, replicas.csv and timing.json
    #[arg(long)]
    out: Option<String>,
    /// Path size of exact greedy suprema
    #[arg(long)]
    k: Option<String>,
    /// Restarts of heuristic greedy suprema
    #[arg(long)]
    budget: Option<String>,
    /// Minimal path length for S_l
    #[arg(long = "l")]
    min_length: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Weight measure: identity, size-biased, fast:alpha=A or unit:mass=M
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    tolerance: Option<String>,
    /// Targets per replica for passage-time runs
    #[arg(long)]
    targets: Option<String>,
    /// Comma-separated suites for validate (default: all)
    #[arg(long)]
    suites: Option<String>,
}

impl Cli {
    fn pairs(&self) -> Vec<(String, String)> {
        [
            ("cmd", &self.cmd),
            ("dim", &self.dim),
            ("law", &self.law),
            ("L", &self.window),
            ("T", &self.horizon),
            ("replicas", &self.replicas),
            ("seed", &self.seed),
            ("alpha", &self.alpha),
            ("out", &self.out),
            ("k", &self.k),
            ("budget", &self.budget),
            ("l", &self.min_length),
            ("gamma", &self.gamma),
            ("measure", &self.measure),
            ("epsilon", &self.epsilon),
            ("tolerance", &self.tolerance),
            ("targets", &self.targets),
            ("suites", &self.suites),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

fn run(cli: &Cli) -> Result<bool, ExperimentError> {
    let config = load_config(cli.config.as_deref(), &cli.pairs())?;
    let summary = run_replicas(&config)?;
    for v in &summary.verdicts {
        eprintln!("{v}");
    }
    match &config.out {
        Some(dir) => {
            for path in emit_report(&summary, dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => println!("{}", serde_json::to_string_pretty(&summary)?),
    }
    Ok(config.command != Command::Validate || summary.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ ExperimentError::ConfigInvalid { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

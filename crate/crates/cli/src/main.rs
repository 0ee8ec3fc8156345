use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use kneser_lab::config::{CertificateSide, ExperimentConfig, Format, Grid};

#[derive(Parser)]
#[command(name = "kneser-lab", version, about = "Experiments on random subgraphs of Kneser graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Hitting times of the star-degree, independence and EKR events per labelled process
    Hitting {
        /// Skip the forward search for the exact independence hitting times
        #[arg(long)]
        no_exact: bool,
    },
    /// Event frequencies of K_p(n,k) over a grid of p, with the exact curve when it is small enough
    Sweep,
    /// Exact event probabilities by enumerating all spanning subgraphs
    Exact,
    /// Deterministic verification suites for families, shadows and reductions
    Verify {
        /// Perturb one measured edge count to exercise the failure path
        #[arg(long)]
        inject_fault: bool,
    },
    /// Build and check certificates for random families
    Certificate {
        #[arg(long, env = "KNESER_DELTA", default_value_t = 0.25)]
        delta: f64,
        #[arg(long, env = "KNESER_MAX_TRIES", default_value_t = 50)]
        max_tries: usize,
        #[arg(long, value_enum, default_value_t = CertificateSide::A)]
        side: CertificateSide,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, env = "KNESER_N", default_value_t = 5)]
    n: u32,
    #[arg(long, global = true, env = "KNESER_K", default_value_t = 2)]
    k: u32,
    /// Trials or samples; defaults depend on the command
    #[arg(long, global = true, env = "KNESER_TRIALS")]
    trials: Option<usize>,
    #[arg(long, global = true, env = "KNESER_SEED", default_value_t = 0)]
    seed: u64,
    /// `start:stop:step` or a comma-separated list
    #[arg(long, global = true, env = "KNESER_P_GRID")]
    p_grid: Option<Grid>,
    #[arg(long, global = true, env = "KNESER_THETA", default_value_t = 0.01)]
    theta: f64,
    /// Allowed size of a certificate's missed part, as a fraction of the diversity
    #[arg(long, global = true, env = "KNESER_SLACK", default_value_t = 0.5)]
    slack: f64,
    #[arg(long, global = true, env = "KNESER_WORKERS")]
    workers: Option<usize>,
    /// Output file; standard output when absent
    #[arg(long, global = true, env = "KNESER_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "KNESER_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add elapsed wall-clock time to the timings section (breaks byte-for-byte reproducibility)
    #[arg(long, global = true)]
    wall_clock: bool,
}

fn default_trials(command: &str, vertices: u64) -> usize {
    match command {
        "hitting" if vertices > 100 => 200,
        "hitting" => 1000,
        "sweep" => 2000,
        "verify" => 10_000,
        _ => 100,
    }
}

fn build_config(cli: Cli) -> ExperimentConfig {
    let c = cli.common;
    let name = match &cli.command {
        Command::Hitting { .. } => "hitting",
        Command::Sweep => "sweep",
        Command::Exact => "exact",
        Command::Verify { .. } => "verify",
        Command::Certificate { .. } => "certificate",
    };
    let mut config = ExperimentConfig::new(name, c.n, c.k);
    let vertices = kneser_core::Params::new(c.n, c.k).map(|p| p.vertex_count()).unwrap_or(0);
    config.trials = c.trials.unwrap_or_else(|| default_trials(name, vertices));
    config.seed = c.seed;
    if let Some(g) = c.p_grid {
        config.p_grid = g;
    }
    config.theta = c.theta;
    config.slack = c.slack;
    config.workers = c.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    config.out = c.out;
    config.format = c.format;
    config.wall_clock = c.wall_clock;
    match cli.command {
        Command::Hitting { no_exact } => config.exact = !no_exact,
        Command::Verify { inject_fault } => config.inject_fault = inject_fault,
        Command::Certificate { delta, max_tries, side } => {
            config.delta = delta;
            config.max_tries = max_tries;
            config.side = side;
        }
        Command::Sweep | Command::Exact => {}
    }
    config
}

fn main() -> ExitCode {
    let config = build_config(Cli::parse());
    let start = Instant::now();
    let mut report = match kneser_lab::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let elapsed = start.elapsed();
    eprintln!("{} finished in {:.3}s", config.command, elapsed.as_secs_f64());
    if config.wall_clock {
        report.timings["elapsed_ms"] = serde_json::json!(elapsed.as_millis() as u64);
    }
    let bytes = match report.render() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    for c in report.checks.iter().filter(|c| !c.passed()) {
        eprintln!("{:?} check {} failed {}/{}: {}", c.kind, c.name, c.violations, c.checked, c.witness.as_deref().unwrap_or(""));
    }
    if report.violations() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

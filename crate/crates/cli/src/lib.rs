//! Experiment harness: hitting-time campaigns, probability sweeps, exact
//! tables, lemma verification suites and certificate runs.

pub mod certificate;
pub mod config;
pub mod exact;
pub mod hitting;
pub mod report;
pub mod stats;
pub mod sweep;
pub mod verify;

use rayon::prelude::*;

pub use config::ExperimentConfig;
pub use report::Report;

/// Runs `f` on `0..count` across `workers` threads; results come back in index order.
pub fn par_map<T, F>(workers: usize, count: u64, f: F) -> anyhow::Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> anyhow::Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// Per-trial generator: the ChaCha8 stream `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Dispatches on `config.command`.
pub fn run(config: &ExperimentConfig) -> anyhow::Result<Report> {
    config.validate()?;
    match config.command.as_str() {
        "hitting" => hitting::run(config),
        "sweep" => sweep::run(config),
        "exact" => exact::run(config),
        "verify" => verify::run(config),
        "certificate" => certificate::run(config),
        other => anyhow::bail!("unknown command {other}"),
    }
}

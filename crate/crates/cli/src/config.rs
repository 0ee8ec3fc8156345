//! Experiment configuration shared by every subcommand.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use kneser_core::Params;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CertificateSide {
    A,
    B,
}

/// Probabilities given either as `start:stop:step` or as a comma-separated list.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parse = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad grid value {t:?}"));
        let values = if let [start, stop, step] = s.split(':').collect::<Vec<_>>()[..] {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if !(step > 0.0) || stop < start {
                bail!("grid range {s:?} is empty or has a non-positive step");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            // values are rounded to 12 decimals so 0.1+0.2-style drift never reaches the output
            (0..=count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
        } else {
            s.split(',').map(parse).collect::<anyhow::Result<Vec<_>>>()?
        };
        if values.is_empty() {
            bail!("empty grid");
        }
        if let Some(p) = values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            bail!("grid value {p} not in [0,1]");
        }
        Ok(Grid(values))
    }
}

impl Default for Grid {
    fn default() -> Self {
        "0:1:0.05".parse().expect("valid default grid")
    }
}

/// Everything a run depends on; echoed into every result file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub n: u32,
    pub k: u32,
    pub trials: usize,
    pub seed: u64,
    pub p_grid: Grid,
    pub theta: f64,
    /// Allowed size of the missed part of a certificate, as a fraction of `a`.
    pub slack: f64,
    pub delta: f64,
    pub max_tries: usize,
    pub side: CertificateSide,
    pub exact: bool,
    pub inject_fault: bool,
    /// Not echoed: results must not depend on it.
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub wall_clock: bool,
}

impl ExperimentConfig {
    pub fn new(command: &str, n: u32, k: u32) -> Self {
        ExperimentConfig {
            command: command.to_string(),
            n,
            k,
            trials: 100,
            seed: 0,
            p_grid: Grid::default(),
            theta: 0.01,
            slack: 0.5,
            delta: 0.25,
            max_tries: 50,
            side: CertificateSide::A,
            exact: true,
            inject_fault: false,
            workers: 1,
            out: None,
            format: Format::Json,
            wall_clock: false,
        }
    }

    pub fn params(&self) -> anyhow::Result<Params> {
        Ok(Params::new(self.n, self.k)?)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.params()?;
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.workers == 0 {
            bail!("workers must be at least 1");
        }
        if !(self.theta > 0.0) {
            bail!("theta must be positive");
        }
        if !(self.slack >= 0.0) {
            bail!("slack must be non-negative");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        let g: Grid = "0:1:0.25".parse().unwrap();
        assert_eq!(g.0, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(Grid::default().0.len(), 21);
        assert_eq!(Grid::default().0[3], 0.15);
        let g: Grid = "0.5, 0.9".parse().unwrap();
        assert_eq!(g.0, vec![0.5, 0.9]);
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("1.5".parse::<Grid>().is_err());
        assert!("x".parse::<Grid>().is_err());
    }
}

//! Certificate runs: build and check certificates for random `T¹` families.

use kneser_core::diversity::{decompose, in_t1, Side};
use kneser_core::reductions::{build_certificate, check_certificate, CertificateConfig, CertificateReport};
use kneser_core::{Error, Family, Params};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{CertificateSide, ExperimentConfig};
use crate::report::{cell, Check, Report, Table};
use crate::stats::Estimate;
use crate::trial_rng;
use crate::verify::{max_diversity, random_nonstar_family};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateTrial {
    pub trial: u64,
    pub x: u32,
    pub a: usize,
    pub seed: u64,
    /// Try that succeeded, or `None` when every try missed a budget.
    pub tries: Option<usize>,
    pub p1: f64,
    pub sizes: Option<[usize; 4]>,
    pub report: Option<CertificateReport>,
}

/// A random non-star family in `T¹` and a certificate seed, both from the trial stream.
pub fn random_t1_family(params: &Params, seed: u64, trial: u64) -> (Family, u64) {
    let mut rng = trial_rng(seed, trial);
    let max_a = max_diversity(params);
    loop {
        let f = random_nonstar_family(params, max_a, &mut rng);
        if in_t1(&decompose(&f).expect("star-sized")) {
            return (f, rng.gen());
        }
    }
}

pub fn certificate_config(config: &ExperimentConfig, seed: u64) -> CertificateConfig {
    CertificateConfig {
        delta: config.delta,
        p1: None,
        max_tries: config.max_tries,
        seed,
        theta: config.theta,
        sigma: config.slack,
        ..CertificateConfig::default()
    }
}

pub fn run_trial(params: &Params, config: &ExperimentConfig, trial: u64) -> anyhow::Result<CertificateTrial> {
    let (f, cert_seed) = random_t1_family(params, config.seed, trial);
    let d = decompose(&f)?;
    let side = match config.side {
        CertificateSide::A => Side::A,
        CertificateSide::B => Side::B,
    };
    let cfg = certificate_config(config, cert_seed);
    let p1 = cfg.resolved_p1(params, side);
    let base = CertificateTrial { trial, x: d.x, a: d.a, seed: cert_seed, tries: None, p1, sizes: None, report: None };
    match build_certificate(&f, side, &cfg) {
        Ok(c) => Ok(CertificateTrial {
            tries: Some(c.tries),
            sizes: Some([c.y.len(), c.part1.len(), c.part2.len(), c.part3.len()]),
            report: Some(check_certificate(&c, &f)?),
            ..base
        }),
        Err(Error::TriesExhausted { .. }) => Ok(base),
        Err(e) => Err(e.into()),
    }
}

pub fn run(config: &ExperimentConfig) -> anyhow::Result<Report> {
    let params = config.params()?;
    let trials = crate::par_map(config.workers, config.trials as u64, |t| run_trial(&params, config, t))?;

    let mut reconstruction = Check::invariant("certificate-reconstruction");
    let mut membership = Check::invariant("certificate-membership");
    let mut budgets = Check::invariant("certificate-budgets");
    for t in &trials {
        if let Some(r) = &t.report {
            let id = || format!("trial {} (a={}, x={})", t.trial, t.a, t.x);
            reconstruction.record(r.reconstruction_ok, || format!("{}: {}", id(), r.witness.clone().unwrap_or_default()));
            membership.record(r.membership_ok, id);
            budgets.record(r.budgets_ok(), || format!("{}: {:?}", id(), r.budgets));
        }
    }
    let built = trials.iter().filter(|t| t.tries.is_some()).count() as u64;
    let success = Estimate::wilson(built, trials.len() as u64);

    let mut table = Table::new(&["trial", "x", "a", "seed", "p1", "tries", "y", "part1", "part2", "part3", "passed"]);
    for t in &trials {
        let size = |i: usize| cell(t.sizes.map(|s| s[i]));
        table.push(vec![
            t.trial.to_string(),
            t.x.to_string(),
            t.a.to_string(),
            t.seed.to_string(),
            t.p1.to_string(),
            cell(t.tries),
            size(0),
            size(1),
            size(2),
            size(3),
            cell(t.report.as_ref().map(|r| r.passed())),
        ]);
    }
    let results = json!({ "success": success, "trials": trials });
    let timings = json!({ "tries": trials.iter().map(|t| t.tries.unwrap_or(config.max_tries)).sum::<usize>() });
    Ok(Report::new(config, results, vec![reconstruction, membership, budgets], timings, table))
}

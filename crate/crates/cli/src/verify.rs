//! Deterministic lemma suites: each runs a statement over every (or many
//! sampled) instances and reports violations with a witness.

use itertools::Itertools;
use kneser_core::combinatorics::{all_ksets, binomial, binomial_f64, Family, KSet, Params};
use kneser_core::diversity::{
    check_isoperimetry, check_observations_with, classify_family, count_two_linked_sets, decompose, edge_stats,
    sample_family, TWO_LINKED_GUARD,
};
use kneser_core::reductions::{component_reduce, reduce_to_t2, Reduction};
use kneser_core::shadow::{lovasz_shadow_bound, shadow};
use rand::seq::IteratorRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::report::{Check, Report, Table};
use crate::trial_rng;

/// Exhaustive enumeration is used below this many candidates.
pub const EXHAUSTIVE_LIMIT: f64 = 1e6;

/// Every star-sized family that is not a star, when there are at most
/// [`EXHAUSTIVE_LIMIT`] star-sized families.
pub fn all_nonstar_families(params: &Params) -> Option<Vec<Family>> {
    let v = params.vertex_count();
    let size = params.star_size();
    if binomial_f64(v, size) > EXHAUSTIVE_LIMIT {
        return None;
    }
    let vertices: Vec<KSet> = all_ksets(params.n(), params.k()).collect();
    let families = vertices
        .into_iter()
        .combinations(size as usize)
        .filter(|c| c.iter().fold(params.full_mask(), |m, s| m & s.mask()) == 0)
        .map(|c| Family::new(*params, c).expect("valid members"))
        .collect();
    Some(families)
}

/// Largest diversity a star-sized family can have: `(n-k)/n · C(n-1,k-1)`.
pub fn max_diversity(params: &Params) -> usize {
    ((params.n() - params.k()) as u64 * params.star_size() / params.n() as u64) as usize
}

/// A non-star family drawn by [`sample_family`] with uniform `x` and `a` in
/// `1..=max_a`, redrawn until it is not a star.
pub fn random_nonstar_family<R: Rng>(params: &Params, max_a: usize, rng: &mut R) -> Family {
    loop {
        let x = rng.gen_range(1..=params.n());
        let a = rng.gen_range(1..=max_a.max(1));
        let f = sample_family(params, x, a, rng).expect("diversity within range");
        if decompose(&f).expect("star-sized").a > 0 {
            return f;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassificationTally {
    pub families: u64,
    pub in_t1: u64,
    pub in_t2: u64,
    pub in_t3: u64,
    pub in_t4: u64,
    pub in_t5: u64,
    /// Members of `T¹` for which the diversity bound holds.
    pub diversity_bound_holds: u64,
    /// Smallest `e(F) p0 / (a ln(C(n-1,k)/a))` seen: the largest θ consistent with every family.
    pub min_log_ratio: Option<f64>,
    pub min_linear_ratio: Option<f64>,
}

fn fold_min(cur: Option<f64>, v: f64) -> Option<f64> {
    Some(cur.map_or(v, |c| c.min(v)))
}

/// The three observations, the edge-count partition and the nesting of the
/// classes, over `families`. With `fault`, the first family's `e(Ā,B)` is
/// perturbed by one.
pub fn observation_suite(families: &[Family], theta: f64, fault: bool) -> anyhow::Result<(Vec<Check>, ClassificationTally)> {
    let mut checks: Vec<Check> =
        ["diversity-bound", "far-from-other-stars", "edge-identity", "edge-partition", "class-nesting"]
            .into_iter()
            .map(Check::invariant)
            .collect();
    let mut tally = ClassificationTally::default();
    for (i, f) in families.iter().enumerate() {
        let report = check_observations_with(f, if fault && i == 0 { 1 } else { 0 })?;
        for (check, outcome) in checks.iter_mut().zip(report.outcomes()) {
            check.record(outcome.passed, || format!("{f:?}: {}", outcome.witness.clone().unwrap_or_default()));
        }
        let d = decompose(f)?;
        let stats = edge_stats(&d);
        checks[3].record(stats.partition_holds(), || format!("{f:?}: {stats:?}"));
        let c = classify_family(f, theta)?;
        checks[4].record(c.nesting_holds(), || format!("{f:?}: {c:?}"));
        tally.families += 1;
        tally.in_t1 += c.in_t1 as u64;
        tally.in_t2 += c.in_t2 as u64;
        tally.in_t3 += c.in_t3 as u64;
        tally.in_t4 += c.in_t4.unwrap_or(false) as u64;
        tally.in_t5 += c.in_t5.unwrap_or(false) as u64;
        tally.diversity_bound_holds += c.diversity_bound_holds.unwrap_or(false) as u64;
        tally.min_log_ratio = fold_min(tally.min_log_ratio, c.ratios.log_ratio);
        tally.min_linear_ratio = fold_min(tally.min_linear_ratio, c.ratios.linear_ratio);
    }
    Ok((checks, tally))
}

/// `|N(A) ∩ K_x| > |A|` for nonempty `A ⊆ C([n] \ {x}, k)` below `C(n-2,k-1)`:
/// every such `A` for every `x` when feasible, otherwise `samples` random ones.
pub fn isoperimetry_suite(params: &Params, samples: usize, seed: u64) -> anyhow::Result<(Check, bool)> {
    let mut check = Check::invariant("isoperimetry");
    let limit = binomial(params.n() as u64 - 2, params.k() as u64 - 1) as usize;
    let pool_size = params.off_star_count();
    let total: f64 = (1..limit).map(|s| binomial_f64(pool_size, s as u64)).sum::<f64>() * params.n() as f64;
    let exhaustive = total <= EXHAUSTIVE_LIMIT;
    let mut test = |a: Family, x: u32| -> anyhow::Result<()> {
        let r = check_isoperimetry(params, &a, x)?;
        check.record(r.passed, || format!("x={x} A={a:?}: |N(A) ∩ K_x| = {} <= {}", r.boundary, r.size));
        Ok(())
    };
    if exhaustive {
        for x in 1..=params.n() {
            let pool: Vec<KSet> = all_ksets(params.n(), params.k()).filter(|s| !s.contains(x)).collect();
            for size in 1..limit {
                for a in pool.iter().copied().combinations(size) {
                    test(Family::new(*params, a)?, x)?;
                }
            }
        }
    } else {
        for i in 0..samples {
            let mut rng = trial_rng(seed, i as u64);
            let x = rng.gen_range(1..=params.n());
            let size = rng.gen_range(1..limit);
            let a = all_ksets(params.n(), params.k()).filter(|s| !s.contains(x)).choose_multiple(&mut rng, size);
            test(Family::new(*params, a)?, x)?;
        }
    }
    Ok((check, exhaustive))
}

/// Shadow sizes against the Lovász bound: every family of at most three
/// 3-subsets of `[7]` at both lower levels, then `samples` random families
/// of 3-subsets of `[8]`.
pub fn shadow_suite(samples: usize, seed: u64) -> anyhow::Result<Check> {
    let mut check = Check::invariant("shadow-lovasz-bound");
    let mut test = |members: &[KSet], ell: u32| -> anyhow::Result<()> {
        let sh = shadow(members, ell)?.len();
        let bound = lovasz_shadow_bound(members.len() as u64, 3, ell)?;
        check.record(sh as f64 >= bound * (1.0 - 1e-9), || format!("{members:?} level {ell}: {sh} < {bound}"));
        Ok(())
    };
    let sets7: Vec<KSet> = all_ksets(7, 3).collect();
    for m in 1..=3 {
        for fam in sets7.iter().copied().combinations(m) {
            for ell in 1..=2 {
                test(&fam, ell)?;
            }
        }
    }
    let sets8: Vec<KSet> = all_ksets(8, 3).collect();
    for i in 0..samples {
        let mut rng = trial_rng(seed, i as u64);
        let m = rng.gen_range(1..=sets8.len());
        let fam = sets8.iter().copied().choose_multiple(&mut rng, m);
        test(&fam, rng.gen_range(1..=2))?;
    }
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoLinkedRow {
    pub a: usize,
    pub count: u64,
    pub bound: f64,
}

/// Exact 2-linked counts against `C(2k,k)(ek²)^a` for every `a` the
/// enumeration guard admits (`n = 2k+1` only).
pub fn two_linked_suite(params: &Params) -> anyhow::Result<(Check, Vec<TwoLinkedRow>)> {
    let mut check = Check::invariant("two-linked-count-bound");
    let mut rows = Vec::new();
    if !params.is_tight() {
        return Ok((check, rows));
    }
    let pool = params.off_star_count();
    for a in 1..=pool as usize {
        if binomial_f64(pool, a as u64) > TWO_LINKED_GUARD {
            continue;
        }
        let c = count_two_linked_sets(params, 1, a)?;
        check.record(c.within_bound(), || format!("a={a}: {} > {}", c.count, c.bound));
        rows.push(TwoLinkedRow { a, count: c.count, bound: c.bound });
    }
    Ok((check, rows))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReductionTally {
    pub families: u64,
    pub reduced_to_t2: u64,
    pub component_reductions: u64,
    /// Components whose neighbourhood in `B` outgrows them.
    pub components_skipped: u64,
}

fn describe(r: &Reduction, f: &Family) -> String {
    format!(
        "input {f:?} output {:?}: edges_contained={} x_preserved={} a_preserved={}",
        r.family, r.edges_contained, r.x_preserved, r.a_preserved
    )
}

/// Draws `samples` families in `T¹` with `3a < C(n-2,k-1)`, reduces each to
/// `T²`, then reduces the result to each eligible 2-linked component when
/// `4a < C(n-2,k-1)`.
pub fn reduction_suite(params: &Params, samples: usize, seed: u64, workers: usize) -> anyhow::Result<(Vec<Check>, ReductionTally)> {
    let limit = binomial(params.n() as u64 - 2, params.k() as u64 - 1) as usize;
    let max_a = (limit - 1) / 3;
    if max_a == 0 {
        return Ok((vec![Check::invariant("reduce-to-t2"), Check::invariant("component-reduce")], ReductionTally::default()));
    }
    let families = crate::par_map(workers, samples as u64, |i| {
        let mut rng = trial_rng(seed, i);
        loop {
            let f = random_nonstar_family(params, max_a, &mut rng);
            let d = decompose(&f)?;
            if 3 * d.a < limit && kneser_core::diversity::in_t1(&d) {
                return Ok(f);
            }
        }
    })?;
    let mut to_t2 = Check::invariant("reduce-to-t2");
    let mut comp = Check::invariant("component-reduce");
    let mut tally = ReductionTally::default();
    for f in &families {
        tally.families += 1;
        let r = reduce_to_t2(f)?;
        let in_t2 = r.b_family.iter().all(|b| r.a_family.neighbours_of(b).next().is_some());
        to_t2.record(r.postconditions_hold() && in_t2, || describe(&r, f));
        tally.reduced_to_t2 += 1;
        if 4 * r.a_family.len() >= limit {
            continue;
        }
        let comps = kneser_core::diversity::two_linked_components(params, &r.a_family, r.x)?;
        for (i, ai) in comps.iter().enumerate() {
            match component_reduce(&r.family, i) {
                Ok(c) => {
                    tally.component_reductions += 1;
                    comp.record(c.postconditions_hold() && c.a_family == *ai, || describe(&c, &r.family));
                }
                Err(kneser_core::Error::Precondition(_)) => tally.components_skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok((vec![to_t2, comp], tally))
}

pub fn run(config: &ExperimentConfig) -> anyhow::Result<Report> {
    let params = config.params()?;
    let mut checks = Vec::new();

    let (families, exhaustive_families) = match all_nonstar_families(&params) {
        Some(f) => (f, true),
        None => {
            let max_a = max_diversity(&params);
            let f = crate::par_map(config.workers, config.trials as u64, |i| {
                Ok(random_nonstar_family(&params, max_a, &mut trial_rng(config.seed, i)))
            })?;
            (f, false)
        }
    };
    eprintln!("observation suite over {} families", families.len());
    let (obs, tally) = observation_suite(&families, config.theta, config.inject_fault)?;
    checks.extend(obs);

    let (iso, iso_exhaustive) = isoperimetry_suite(&params, config.trials, config.seed)?;
    checks.push(iso);
    eprintln!("shadow suite");
    checks.push(shadow_suite(config.trials, config.seed)?);
    let (linked, linked_rows) = two_linked_suite(&params)?;
    checks.push(linked);
    eprintln!("reduction suite");
    let (red, red_tally) = reduction_suite(&params, config.trials, config.seed, config.workers)?;
    checks.extend(red);

    let mut table = Table::new(&["check", "kind", "checked", "violations", "witness"]);
    for c in &checks {
        table.push(vec![
            c.name.clone(),
            serde_json::to_value(c.kind)?.as_str().unwrap_or_default().to_string(),
            c.checked.to_string(),
            c.violations.to_string(),
            c.witness.clone().unwrap_or_default(),
        ]);
    }
    let results = json!({
        "families": { "count": families.len(), "exhaustive": exhaustive_families },
        "classification": tally,
        "isoperimetry_exhaustive": iso_exhaustive,
        "two_linked": linked_rows,
        "reductions": red_tally,
    });
    let timings = json!({ "instances": checks.iter().map(|c| c.checked).sum::<u64>() });
    Ok(Report::new(config, results, checks, timings, table))
}

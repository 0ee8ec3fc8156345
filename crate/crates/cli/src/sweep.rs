//! Probability sweeps: event frequencies in `K_p(n,k)` over a grid of `p`.

use std::sync::Arc;

use kneser_core::process::{min_star_degree, EdgeLabeling};
use kneser_core::solver::{independent_set_larger_than, is_ekr, SampleGraph};
use kneser_core::thresholds::{p0, Event, EventTable, MAX_EXACT_EDGES};
use kneser_core::KneserGraph;
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::report::{cell, Check, Report, Table};
use crate::stats::Estimate;

/// Outcomes of the four events on one graph, in `Event::ALL` order.
pub fn evaluate_events(g: &SampleGraph) -> anyhow::Result<[bool; 4]> {
    let star = g.graph().params().star_size() as usize;
    let d = min_star_degree(g);
    let no_super = d >= 1;
    let no_near = d >= 2;
    // an independent superstar already exceeds star size, and an independent
    // near-star is already a non-star set of star size
    let alpha_star = no_super && independent_set_larger_than(g, star)?.is_none();
    let ekr = no_near && is_ekr(g)?;
    Ok([no_super, no_near, ekr, alpha_star])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRow {
    pub event: &'static str,
    pub estimate: Estimate,
    pub exact: Option<f64>,
    pub z_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub events: Vec<EventRow>,
}

pub fn run(config: &ExperimentConfig) -> anyhow::Result<Report> {
    let params = config.params()?;
    let graph = Arc::new(KneserGraph::new(params)?);
    let grid = &config.p_grid.0;
    let outcomes = crate::par_map(config.workers, config.trials as u64, |t| {
        let labeling = EdgeLabeling::sample(graph.clone(), config.seed, t);
        grid.iter().map(|&p| evaluate_events(&labeling.snapshot(p))).collect::<anyhow::Result<Vec<_>>>()
    })?;
    let table_exact = if graph.edge_count() <= MAX_EXACT_EDGES {
        eprintln!("enumerating all 2^{} subgraphs for the exact curve", graph.edge_count());
        Some(EventTable::build(&graph)?)
    } else {
        None
    };

    let mut nesting = Check::invariant("event-nesting");
    let mut calibration = Check::statistical("sampled-within-3se-of-exact");
    let mut rows = Vec::with_capacity(grid.len());
    for (i, &p) in grid.iter().enumerate() {
        let mut events = Vec::with_capacity(4);
        for (j, event) in Event::ALL.into_iter().enumerate() {
            let hits = outcomes.iter().filter(|o| o[i][j]).count() as u64;
            let estimate = Estimate::wilson(hits, outcomes.len() as u64);
            let exact = table_exact.as_ref().map(|t| t.probability(event, p)).transpose()?;
            let z_score = exact.map(|e| estimate.z_score(e));
            if let Some(z) = z_score {
                calibration.record(z <= 3.0, || format!("p={p} {}: estimate {} exact {:?}", event.name(), estimate.rate, exact));
            }
            events.push(EventRow { event: event.name(), estimate, exact, z_score });
        }
        for (t, o) in outcomes.iter().enumerate() {
            let [no_super, no_near, ekr, alpha_star] = o[i];
            let ok = (!no_near || no_super) && (!ekr || (no_near && alpha_star)) && (!alpha_star || no_super);
            nesting.record(ok, || format!("p={p} trial {t}: {:?}", o[i]));
        }
        rows.push(SweepRow { p, events });
    }

    let mut table = Table::new(&["p", "event", "successes", "trials", "rate", "low", "high", "exact", "z_score"]);
    for r in &rows {
        for e in &r.events {
            table.push(vec![
                r.p.to_string(),
                e.event.to_string(),
                e.estimate.successes.to_string(),
                e.estimate.trials.to_string(),
                e.estimate.rate.to_string(),
                e.estimate.low.to_string(),
                e.estimate.high.to_string(),
                cell(e.exact),
                cell(e.z_score),
            ]);
        }
    }
    let results = json!({ "threshold": p0(&params), "rows": rows });
    let timings = json!({ "samples": outcomes.len() * grid.len() });
    Ok(Report::new(config, results, vec![nesting, calibration], timings, table))
}

//! Exact event probabilities by enumerating every spanning subgraph.

use std::sync::Arc;

use anyhow::bail;
use kneser_core::thresholds::{Event, EventTable, MAX_EXACT_EDGES};
use kneser_core::KneserGraph;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::report::{Check, Report, Table};

pub fn run(config: &ExperimentConfig) -> anyhow::Result<Report> {
    let params = config.params()?;
    if params.edge_count() > MAX_EXACT_EDGES as u64 {
        bail!(
            "{params} has {} edges; exact enumeration is limited to {MAX_EXACT_EDGES} edges",
            params.edge_count()
        );
    }
    let graph = Arc::new(KneserGraph::new(params)?);
    let events = EventTable::build(&graph)?;
    let grid = &config.p_grid.0;
    let mut monotone = Check::invariant("monotone-in-p");
    let mut nesting = Check::invariant("event-nesting");
    let mut table = Table::new(&["p", "no-independent-superstar", "no-independent-near-star", "ekr", "alpha-equals-star-size"]);
    let mut rows = Vec::new();
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for &p in grid {
        let values = Event::ALL.iter().map(|&e| events.probability(e, p)).collect::<kneser_core::Result<Vec<_>>>()?;
        if let Some((q, before)) = &prev {
            if *q <= p {
                let ok = before.iter().zip(&values).all(|(b, v)| *v >= *b - 1e-12);
                monotone.record(ok, || format!("p={q} -> {p}: {before:?} -> {values:?}"));
            }
        }
        nesting.record(values[1] <= values[0] + 1e-12 && values[2] <= values[3] + 1e-12, || {
            format!("p={p}: {values:?}")
        });
        table.push(std::iter::once(p.to_string()).chain(values.iter().map(|v| format!("{v:.12e}"))).collect());
        rows.push(json!({
            "p": p,
            "probabilities": Event::ALL.iter().zip(&values).map(|(e, v)| (e.name().to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        }));
        prev = Some((p, values));
    }
    let counts: serde_json::Map<String, serde_json::Value> =
        Event::ALL.iter().map(|&e| (e.name().to_string(), json!(events.counts(e)))).collect();
    let results = json!({ "edge_count": graph.edge_count(), "rows": rows, "subgraph_counts": counts });
    let timings = json!({ "subgraphs": 1u64 << graph.edge_count() });
    Ok(Report::new(config, results, vec![monotone, nesting], timings, table))
}

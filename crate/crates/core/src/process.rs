//! The random graph process on `K(n,k)`: i.i.d. uniform edge labels, the
//! nested snapshots they define, and hitting times of the star-degree and
//! independence events.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::KSet;
use crate::error::{Error, Result};
use crate::kneser::KneserGraph;
use crate::combinatorics::Family;
use crate::solver::{alpha, independent_set_larger_than, nonstar_at_least, SampleGraph};

/// Labels `l(e) ∈ [0,1)` for every edge, and the total order they induce
/// (by label, ties broken by edge index).
#[derive(Debug, Clone)]
pub struct EdgeLabeling {
    graph: Arc<KneserGraph>,
    labels: Vec<f64>,
    /// Edge indices in process order.
    order: Vec<u32>,
    /// `position[e]` is the 0-based place of edge `e` in `order`.
    position: Vec<u32>,
}

impl EdgeLabeling {
    /// Draws labels from a ChaCha8 stream keyed by `(seed, trial)`, one
    /// 53-bit uniform per edge in edge-index order.
    pub fn sample(graph: Arc<KneserGraph>, seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let labels = (0..graph.edge_count()).map(|_| rng.gen::<f64>()).collect();
        Self::build(graph, labels)
    }

    pub fn from_labels(graph: Arc<KneserGraph>, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != graph.edge_count() {
            return Err(Error::Precondition(format!(
                "{} labels for {} edges",
                labels.len(),
                graph.edge_count()
            )));
        }
        if let Some(l) = labels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::OutOfRange(format!("label {l} not in [0,1]")));
        }
        Ok(Self::build(graph, labels))
    }

    fn build(graph: Arc<KneserGraph>, labels: Vec<f64>) -> Self {
        let mut order: Vec<u32> = (0..labels.len() as u32).collect();
        order.sort_by(|&a, &b| labels[a as usize].total_cmp(&labels[b as usize]).then(a.cmp(&b)));
        let mut position = vec![0u32; labels.len()];
        for (i, &e) in order.iter().enumerate() {
            position[e as usize] = i as u32;
        }
        EdgeLabeling { graph, labels, order, position }
    }

    pub fn graph(&self) -> &Arc<KneserGraph> {
        &self.graph
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> f64 {
        self.labels[e]
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn position(&self, e: usize) -> usize {
        self.position[e] as usize
    }

    /// Number of edges with label `<= p`.
    pub fn count_at(&self, p: f64) -> usize {
        self.order.partition_point(|&e| self.labels[e as usize] <= p)
    }

    /// `G_p`: edges with label `<= p`.
    pub fn snapshot(&self, p: f64) -> SampleGraph {
        self.prefix(self.count_at(p))
    }

    /// `G_i`: the `i` edges first in process order.
    pub fn snapshot_at_count(&self, i: usize) -> Result<SampleGraph> {
        if i > self.order.len() {
            return Err(Error::OutOfRange(format!("edge count {i} exceeds {}", self.order.len())));
        }
        Ok(self.prefix(i))
    }

    fn prefix(&self, i: usize) -> SampleGraph {
        SampleGraph::from_edges(self.graph.clone(), self.order[..i].iter().map(|&e| e as usize))
    }

    /// Sorted positions of the edges from each off-star vertex into each star;
    /// calls `f(x, vertex, positions)` once per pair with `x ∉ A`.
    fn for_each_pair(&self, mut f: impl FnMut(u32, usize, &mut [u32])) {
        let n = self.graph.params().n() as usize;
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        for v in 0..self.graph.vertex_count() {
            for b in &mut buckets {
                b.clear();
            }
            for &(w, e) in self.graph.incidence(v) {
                let pos = self.position[e as usize];
                for x in self.graph.vertex(w as usize).elements() {
                    buckets[x as usize].push(pos);
                }
            }
            let a = self.graph.vertex(v);
            for x in 1..=n as u32 {
                if !a.contains(x) {
                    f(x, v, &mut buckets[x as usize]);
                }
            }
        }
    }
}

/// A point of the process: after `count` edges, the last one carrying `label`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HittingTime {
    pub count: usize,
    pub label: f64,
}

impl EdgeLabeling {
    fn time_at(&self, pos: u32) -> HittingTime {
        HittingTime { count: pos as usize + 1, label: self.labels[self.order[pos as usize] as usize] }
    }
}

/// First time every vertex `A` has at least `ell` present edges into every star
/// `K_x` with `x ∉ A`.
pub fn tau_ell(labeling: &EdgeLabeling, ell: usize) -> Result<HittingTime> {
    let d = labeling.graph.params().star_degree() as usize;
    if ell == 0 || ell > d {
        return Err(Error::OutOfRange(format!("ell = {ell} not in 1..={d}")));
    }
    let mut worst = 0u32;
    labeling.for_each_pair(|_, _, positions| {
        let (_, nth, _) = positions.select_nth_unstable(ell - 1);
        worst = worst.max(*nth);
    });
    Ok(labeling.time_at(worst))
}

/// `tau_ell` for every `ell` in `1..=C(n-k-1,k-1)` in a single pass.
pub fn tau_profile(labeling: &EdgeLabeling) -> Vec<HittingTime> {
    let d = labeling.graph.params().star_degree() as usize;
    let mut worst = vec![0u32; d];
    labeling.for_each_pair(|_, _, positions| {
        positions.sort_unstable();
        for (w, &p) in worst.iter_mut().zip(positions.iter()) {
            *w = (*w).max(p);
        }
    });
    worst.into_iter().map(|p| labeling.time_at(p)).collect()
}

/// The pair `(x, A)` with `x ∉ A` minimising the present degree `d(A, K_x)`,
/// ties broken by smaller `x` then smaller rank of `A`.
pub fn weakest_star_pair(g: &SampleGraph) -> (u32, KSet, usize) {
    let graph = g.graph();
    let n = graph.params().n() as usize;
    let mut best = (usize::MAX, u32::MAX, usize::MAX);
    let mut cnt = vec![0usize; n + 1];
    for v in 0..graph.vertex_count() {
        cnt.iter_mut().for_each(|c| *c = 0);
        for w in g.neighbours(v) {
            for x in graph.vertex(w).elements() {
                cnt[x as usize] += 1;
            }
        }
        let a = graph.vertex(v);
        for x in 1..=n as u32 {
            if !a.contains(x) {
                best = best.min((cnt[x as usize], x, v));
            }
        }
    }
    (best.1, graph.vertex(best.2), best.0)
}

/// `min_{x, A ∉ K_x} d(A, K_x)` in `g`. It is 0 iff some superstar is
/// independent and at most 1 iff some maximal near-star is.
pub fn min_star_degree(g: &SampleGraph) -> usize {
    weakest_star_pair(g).2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingTimes {
    pub tau_super: HittingTime,
    pub tau_near: HittingTime,
    pub alpha_at_tau_super: usize,
    pub ekr_at_tau_near: bool,
    /// Filled when the event holds at the star-degree time or when the exact
    /// forward search was requested.
    pub tau_alpha: Option<HittingTime>,
    pub tau_ekr: Option<HittingTime>,
    /// `tau_ell` for `ell = 1..=C(n-k-1,k-1)`.
    pub tau_ell: Vec<HittingTime>,
    /// Independent superstar one edge before `tau_super` and none at it.
    pub superstar_transition_ok: bool,
    /// Independent maximal near-star one edge before `tau_near` and none at it.
    pub near_star_transition_ok: bool,
    pub solver_calls: u64,
}

impl HittingTimes {
    pub fn alpha_equals_super(&self) -> bool {
        self.tau_alpha.is_some_and(|t| t.count == self.tau_super.count)
    }

    pub fn ekr_equals_near(&self) -> bool {
        self.tau_ekr.is_some_and(|t| t.count == self.tau_near.count)
    }
}

/// Hitting times of one labelled process. With `exact`, the process is run
/// forward from each star-degree time until the exact event holds; the
/// solver is re-run only when a new edge lands inside the current witness.
pub fn compute_hitting_times(labeling: &EdgeLabeling, exact: bool) -> Result<HittingTimes> {
    let params = *labeling.graph.params();
    let star = params.star_size() as usize;
    let profile = tau_profile(labeling);
    let (tau_super, tau_near) = (profile[0], profile[1]);

    let transition = |t: HittingTime, ell: usize| -> Result<bool> {
        let before = min_star_degree(&labeling.snapshot_at_count(t.count - 1)?);
        let at = min_star_degree(&labeling.snapshot_at_count(t.count)?);
        Ok(before < ell && at >= ell)
    };
    let superstar_transition_ok = transition(tau_super, 1)?;
    let near_star_transition_ok = transition(tau_near, 2)?;

    let mut calls = 1u64;
    let g_super = labeling.snapshot_at_count(tau_super.count)?;
    let sol = alpha(&g_super)?;
    let alpha_at_tau_super = sol.size;
    let tau_alpha = if sol.size == star {
        Some(tau_super)
    } else if exact {
        run_forward(labeling, g_super, sol.witness, &mut calls, |g| independent_set_larger_than(g, star))?
    } else {
        None
    };

    let g_near = labeling.snapshot_at_count(tau_near.count)?;
    calls += 1;
    let witness = nonstar_at_least(&g_near, star)?;
    let ekr_at_tau_near = witness.is_none();
    let tau_ekr = match witness {
        None => Some(tau_near),
        Some(w) if exact => run_forward(labeling, g_near, w, &mut calls, |g| nonstar_at_least(g, star))?,
        Some(_) => None,
    };

    Ok(HittingTimes {
        tau_super,
        tau_near,
        alpha_at_tau_super,
        ekr_at_tau_near,
        tau_alpha,
        tau_ekr,
        tau_ell: profile,
        superstar_transition_ok,
        near_star_transition_ok,
        solver_calls: calls,
    })
}

/// Adds edges after `g` in process order until `search` finds no witness.
fn run_forward(
    labeling: &EdgeLabeling,
    mut g: SampleGraph,
    witness: Family,
    calls: &mut u64,
    search: impl Fn(&SampleGraph) -> Result<Option<Family>>,
) -> Result<Option<HittingTime>> {
    let graph = labeling.graph.clone();
    let mut inside = vec![false; graph.vertex_count()];
    let mark = |inside: &mut Vec<bool>, w: &Family| {
        inside.iter_mut().for_each(|b| *b = false);
        for s in w.iter() {
            inside[graph.index_of(*s)] = true;
        }
    };
    mark(&mut inside, &witness);
    for i in g.edge_count()..labeling.order.len() {
        let e = labeling.order[i] as usize;
        g.insert_edge(e);
        let (u, v) = graph.edge(e);
        if !(inside[u as usize] && inside[v as usize]) {
            continue;
        }
        *calls += 1;
        match search(&g)? {
            None => return Ok(Some(labeling.time_at(i as u32))),
            Some(w) => mark(&mut inside, &w),
        }
    }
    Ok(None)
}

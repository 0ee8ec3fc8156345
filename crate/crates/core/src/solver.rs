//! Exact independence numbers of spanning subgraphs of `K(n,k)`.
//!
//! [`alpha`] and [`max_nonstar_alpha`] are branch-and-bound searches over
//! vertex bitsets. Every node first applies the safe reductions (isolated
//! vertices, pendant vertices, degree-two vertices inside a triangle), then
//! bounds the remaining subproblem by a greedy clique cover and by the
//! fractional vertex-cover LP (a maximum matching of the bipartite double
//! cover), and finally branches on a vertex of maximum remaining degree,
//! ties broken by rank.
//!
//! The non-star search first branches on *which* member kills each element of
//! the running common intersection; once the intersection is empty every
//! extension is non-star and the plain search takes over.

use std::sync::Arc;

use crate::bitset::Bits;
use crate::combinatorics::{Family, KSet};
use crate::error::{Error, Result};
use crate::kneser::KneserGraph;

/// Largest vertex count the branch-and-bound solvers accept.
pub const MAX_SOLVER_VERTICES: usize = 512;
/// Largest vertex count for the subset-enumeration oracle.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 24;
/// Largest vertex count for the enumeration-based non-star method.
pub const MAX_ENUMERATION_VERTICES: usize = 64;

/// A spanning subgraph of `K(n,k)`: a bitset over the indices of the full edge list.
#[derive(Clone)]
pub struct SampleGraph {
    graph: Arc<KneserGraph>,
    present: Vec<u64>,
}

impl PartialEq for SampleGraph {
    fn eq(&self, other: &Self) -> bool {
        self.graph.params() == other.graph.params() && self.present == other.present
    }
}

impl Eq for SampleGraph {}

impl std::fmt::Debug for SampleGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SampleGraph({}, {} of {} edges)", self.graph.params(), self.edge_count(), self.graph.edge_count())
    }
}

impl SampleGraph {
    pub fn empty(graph: Arc<KneserGraph>) -> Self {
        let words = graph.edge_count().div_ceil(64);
        SampleGraph { graph, present: vec![0; words] }
    }

    pub fn full(graph: Arc<KneserGraph>) -> Self {
        let mut g = Self::empty(graph);
        let m = g.graph.edge_count();
        for e in 0..m {
            g.present[e >> 6] |= 1 << (e & 63);
        }
        g
    }

    pub fn from_edges(graph: Arc<KneserGraph>, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut g = Self::empty(graph);
        for e in edges {
            g.insert_edge(e);
        }
        g
    }

    pub fn graph(&self) -> &Arc<KneserGraph> {
        &self.graph
    }

    pub fn has_edge(&self, e: usize) -> bool {
        self.present[e >> 6] >> (e & 63) & 1 == 1
    }

    pub fn insert_edge(&mut self, e: usize) {
        assert!(e < self.graph.edge_count(), "edge index {e} out of range");
        self.present[e >> 6] |= 1 << (e & 63);
    }

    pub fn remove_edge(&mut self, e: usize) {
        assert!(e < self.graph.edge_count(), "edge index {e} out of range");
        self.present[e >> 6] &= !(1 << (e & 63));
    }

    pub fn edge_count(&self) -> usize {
        self.present.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.graph.edge_count()).filter(move |&e| self.has_edge(e))
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.graph.edge_between(u, v).is_some_and(|e| self.has_edge(e))
    }

    /// Present neighbours of `v`.
    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.incidence(v).iter().filter(move |&&(_, e)| self.has_edge(e as usize)).map(|&(w, _)| w as usize)
    }

    /// True iff no present edge joins two members of `f`.
    pub fn is_independent(&self, f: &Family) -> bool {
        let idx: Vec<usize> = f.iter().map(|s| self.graph.index_of(*s)).collect();
        idx.iter().all(|&u| self.neighbours(u).all(|w| idx.binary_search(&w).is_err()))
    }

    /// Number of present edges from `s` into `targets`.
    pub fn degree_into(&self, s: KSet, targets: &Family) -> usize {
        let u = self.graph.index_of(s);
        self.neighbours(u).filter(|&w| targets.contains(&self.graph.vertex(w))).count()
    }

    fn vertex_family(&self, idx: impl IntoIterator<Item = usize>) -> Family {
        let members = idx.into_iter().map(|i| self.graph.vertex(i)).collect();
        Family::from_sorted_unchecked(*self.graph.params(), members)
    }
}

/// An exact optimum together with one optimal set.
#[derive(Debug, Clone)]
pub struct Solution {
    pub size: usize,
    pub witness: Family,
    /// Search nodes expanded (0 when the initial incumbent was already optimal at the root).
    pub nodes: u64,
}

fn check_solver_limit(g: &SampleGraph) -> Result<()> {
    let v = g.graph.vertex_count();
    if v > MAX_SOLVER_VERTICES {
        return Err(Error::LimitExceeded {
            what: "vertex count",
            value: v as u64,
            limit: MAX_SOLVER_VERTICES as u64,
        });
    }
    Ok(())
}

macro_rules! with_width {
    ($nv:expr, $f:ident ( $($arg:expr),* )) => {
        match $nv {
            0..=64 => $f::<1>($($arg),*),
            65..=128 => $f::<2>($($arg),*),
            129..=256 => $f::<4>($($arg),*),
            _ => $f::<8>($($arg),*),
        }
    };
}

/// Independence number with a maximum independent set.
pub fn alpha(g: &SampleGraph) -> Result<Solution> {
    check_solver_limit(g)?;
    let (size, idx, nodes) = with_width!(g.graph.vertex_count(), run_alpha(g, usize::MAX));
    let witness = g.vertex_family(idx);
    assert!(g.is_independent(&witness), "solver produced a dependent witness");
    assert_eq!(witness.len(), size);
    Ok(Solution { size, witness, nodes })
}

/// An independent set with more than `size` members, if any.
pub fn independent_set_larger_than(g: &SampleGraph, size: usize) -> Result<Option<Family>> {
    check_solver_limit(g)?;
    let (best, idx, _) = with_width!(g.graph.vertex_count(), run_alpha(g, size + 1));
    if best <= size {
        return Ok(None);
    }
    let witness = g.vertex_family(idx);
    assert!(g.is_independent(&witness), "solver produced a dependent witness");
    Ok(Some(witness))
}

/// Largest independent set contained in no star (empty common intersection).
pub fn max_nonstar_alpha(g: &SampleGraph) -> Result<Solution> {
    check_solver_limit(g)?;
    let (size, idx, nodes) = with_width!(g.graph.vertex_count(), run_nonstar(g, usize::MAX));
    let witness = g.vertex_family(idx);
    verify_nonstar(g, &witness);
    assert_eq!(witness.len(), size);
    Ok(Solution { size, witness, nodes })
}

/// A non-star independent set with at least `size` members, if any.
pub fn nonstar_at_least(g: &SampleGraph, size: usize) -> Result<Option<Family>> {
    check_solver_limit(g)?;
    let (best, idx, _) = with_width!(g.graph.vertex_count(), run_nonstar(g, size));
    if best < size {
        return Ok(None);
    }
    let witness = g.vertex_family(idx);
    verify_nonstar(g, &witness);
    Ok(Some(witness))
}

/// Every maximum independent set is a star. Stars are independent in every
/// subgraph, so this fails exactly when some non-star independent set reaches
/// star size.
pub fn is_ekr(g: &SampleGraph) -> Result<bool> {
    let target = g.graph.params().star_size() as usize;
    Ok(nonstar_at_least(g, target)?.is_none())
}

fn verify_nonstar(g: &SampleGraph, w: &Family) {
    assert!(g.is_independent(w), "solver produced a dependent witness");
    assert!(!w.is_empty() && w.common_intersection().is_empty(), "solver produced a star-contained witness");
}

fn adjacency<const W: usize>(g: &SampleGraph) -> Vec<Bits<W>> {
    let mut adj = vec![Bits::<W>::empty(); g.graph.vertex_count()];
    for e in g.edge_indices() {
        let (u, v) = g.graph.edge(e);
        adj[u as usize].set(v as usize);
        adj[v as usize].set(u as usize);
    }
    adj
}

const NONE: u16 = u16::MAX;

struct Search<const W: usize> {
    adj: Vec<Bits<W>>,
    masks: Vec<u32>,
    best: usize,
    best_set: Bits<W>,
    /// Stop as soon as `best >= stop_at`.
    stop_at: usize,
    nodes: u64,
    mate_l: Vec<u16>,
    mate_r: Vec<u16>,
}

impl<const W: usize> Search<W> {
    fn new(g: &SampleGraph, stop_at: usize) -> Self {
        let nv = g.graph.vertex_count();
        Search {
            adj: adjacency::<W>(g),
            masks: g.graph.vertices().iter().map(|s| s.mask()).collect(),
            best: 0,
            best_set: Bits::empty(),
            stop_at,
            nodes: 0,
            mate_l: vec![NONE; nv],
            mate_r: vec![NONE; nv],
        }
    }

    fn done(&self) -> bool {
        self.best >= self.stop_at
    }

    fn offer(&mut self, set: Bits<W>) {
        let c = set.count();
        if c > self.best {
            self.best = c;
            self.best_set = set;
        }
    }

    /// Plain maximum independent set of `G[p]`, extending `chosen`.
    fn mis(&mut self, mut p: Bits<W>, mut chosen: Bits<W>) {
        self.nodes += 1;
        let mut base = chosen.count();
        loop {
            let mut changed = false;
            let snapshot = p;
            for v in snapshot.iter() {
                if !p.get(v) {
                    continue;
                }
                let nb = self.adj[v] & p;
                let d = nb.count();
                let take = match d {
                    0 | 1 => true,
                    2 => {
                        let mut it = nb.iter();
                        let (a, b) = (it.next().unwrap(), it.next().unwrap());
                        self.adj[a].get(b)
                    }
                    _ => false,
                };
                if take {
                    chosen.set(v);
                    base += 1;
                    p = p.and_not(&nb);
                    p.clear(v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let rem = p.count();
        if rem == 0 {
            self.offer(chosen);
            return;
        }
        if base + rem <= self.best {
            return;
        }
        if base + self.clique_cover_bound(p) <= self.best {
            return;
        }
        if base + self.lp_bound(p) <= self.best {
            return;
        }
        let v = self.max_degree_vertex(p);
        let mut with = chosen;
        with.set(v);
        let mut rest = p.and_not(&self.adj[v]);
        rest.clear(v);
        self.mis(rest, with);
        if self.done() {
            return;
        }
        p.clear(v);
        self.mis(p, chosen);
    }

    /// Non-star search: `common` is the intersection of the chosen members
    /// (the full ground set while nothing is chosen).
    fn nonstar(&mut self, mut p: Bits<W>, chosen: Bits<W>, common: u32) {
        if common == 0 {
            self.mis(p, chosen);
            return;
        }
        self.nodes += 1;
        let base = chosen.count();
        let x = common.trailing_zeros();
        loop {
            if self.done() {
                return;
            }
            if base + p.count() <= self.best || base + self.lp_bound(p) <= self.best {
                return;
            }
            // the first chosen member (in rank order) that avoids x
            let Some(u) = p.iter().find(|&u| self.masks[u] >> x & 1 == 0) else {
                return;
            };
            let mut with = chosen;
            with.set(u);
            let mut rest = p.and_not(&self.adj[u]);
            rest.clear(u);
            self.nonstar(rest, with, common & self.masks[u]);
            p.clear(u);
        }
    }

    fn max_degree_vertex(&self, p: Bits<W>) -> usize {
        let mut best_v = usize::MAX;
        let mut best_d = 0;
        for v in p.iter() {
            let d = self.adj[v].and_count(&p);
            if best_v == usize::MAX || d > best_d {
                best_v = v;
                best_d = d;
            }
        }
        best_v
    }

    /// Number of cliques in a greedy clique partition of `G[p]`.
    fn clique_cover_bound(&self, p: Bits<W>) -> usize {
        let mut rest = p;
        let mut cliques = 0;
        while let Some(v) = rest.first() {
            rest.clear(v);
            let mut cand = rest & self.adj[v];
            while let Some(u) = cand.first() {
                rest.clear(u);
                cand &= self.adj[u];
            }
            cliques += 1;
        }
        cliques
    }

    /// `floor(|p| - nu/2)`, where `nu` is a maximum matching of the bipartite
    /// double cover of `G[p]`; this is the fractional vertex-cover bound.
    fn lp_bound(&mut self, p: Bits<W>) -> usize {
        for v in p.iter() {
            self.mate_l[v] = NONE;
            self.mate_r[v] = NONE;
        }
        let mut matched = 0usize;
        for u in p.iter() {
            let free = (self.adj[u] & p).iter().find(|&v| self.mate_r[v] == NONE);
            if let Some(v) = free {
                self.mate_l[u] = v as u16;
                self.mate_r[v] = u as u16;
                matched += 1;
            }
        }
        for u in p.iter() {
            if self.mate_l[u] == NONE {
                let mut visited = Bits::<W>::empty();
                if self.augment(u, p, &mut visited) {
                    matched += 1;
                }
            }
        }
        p.count() - matched.div_ceil(2)
    }

    fn augment(&mut self, u: usize, p: Bits<W>, visited: &mut Bits<W>) -> bool {
        let mut cand = (self.adj[u] & p).and_not(visited);
        while let Some(v) = cand.first() {
            cand.clear(v);
            visited.set(v);
            let m = self.mate_r[v];
            if m == NONE || self.augment(m as usize, p, visited) {
                self.mate_r[v] = u as u16;
                self.mate_l[u] = v as u16;
                return true;
            }
        }
        false
    }
}

fn star_bits<const W: usize>(g: &SampleGraph, x: u32) -> Bits<W> {
    let mut b = Bits::empty();
    for i in g.graph.star_indices(x) {
        b.set(i);
    }
    b
}

/// Hilton–Milner family `{A} ∪ {B ∈ K_1 : B ∩ A ≠ ∅}` with `A = {2..k+1}`;
/// independent in every subgraph and contained in no star.
fn hilton_milner_bits<const W: usize>(g: &SampleGraph) -> Bits<W> {
    let k = g.graph.params().k();
    let a = ((1u32 << k) - 1) << 1;
    let mut b = Bits::empty();
    for (i, s) in g.graph.vertices().iter().enumerate() {
        if s.mask() == a || (s.contains(1) && s.mask() & a != 0) {
            b.set(i);
        }
    }
    b
}

fn run_alpha<const W: usize>(g: &SampleGraph, stop_at: usize) -> (usize, Vec<usize>, u64) {
    let nv = g.graph.vertex_count();
    let mut s = Search::<W>::new(g, stop_at);
    let star = star_bits::<W>(g, 1);
    s.best = star.count();
    s.best_set = star;
    if !s.done() {
        s.mis(Bits::prefix(nv), Bits::empty());
    }
    (s.best, s.best_set.iter().collect(), s.nodes)
}

fn run_nonstar<const W: usize>(g: &SampleGraph, stop_at: usize) -> (usize, Vec<usize>, u64) {
    let nv = g.graph.vertex_count();
    let mut s = Search::<W>::new(g, stop_at);
    let hm = hilton_milner_bits::<W>(g);
    s.best = hm.count();
    s.best_set = hm;
    if !s.done() {
        s.nonstar(Bits::prefix(nv), Bits::empty(), g.graph.params().full_mask());
    }
    (s.best, s.best_set.iter().collect(), s.nodes)
}

/// Independence number by enumerating every vertex subset.
pub fn brute_force_alpha(g: &SampleGraph) -> Result<usize> {
    let (a, _) = brute_force(g)?;
    Ok(a)
}

/// Largest non-star independent set by enumerating every vertex subset.
pub fn brute_force_nonstar_alpha(g: &SampleGraph) -> Result<usize> {
    let (_, ns) = brute_force(g)?;
    Ok(ns)
}

fn brute_force(g: &SampleGraph) -> Result<(usize, usize)> {
    let nv = g.graph.vertex_count();
    if nv > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::LimitExceeded {
            what: "vertex count",
            value: nv as u64,
            limit: MAX_BRUTE_FORCE_VERTICES as u64,
        });
    }
    let mut adj = vec![0u32; nv];
    for e in g.edge_indices() {
        let (u, v) = g.graph.edge(e);
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let masks: Vec<u32> = g.graph.vertices().iter().map(|s| s.mask()).collect();
    let total = 1usize << nv;
    // independent[S] = independent[S - low] && low has no neighbour in S
    let mut independent = vec![false; total];
    independent[0] = true;
    let (mut best, mut best_ns) = (0usize, 0usize);
    for s in 1..total {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        if !independent[rest] || adj[low] & rest as u32 != 0 {
            continue;
        }
        independent[s] = true;
        let size = s.count_ones() as usize;
        best = best.max(size);
        if size > best_ns {
            let common = (0..nv).filter(|&i| s >> i & 1 == 1).fold(u32::MAX, |acc, i| acc & masks[i]);
            if common == 0 {
                best_ns = size;
            }
        }
    }
    Ok((best, best_ns))
}

/// Non-star independence number by a second route: enumerate the independent
/// sets of each size, from `alpha` downwards, and return the first size at
/// which one of them has empty common intersection.
pub fn max_nonstar_alpha_by_enumeration(g: &SampleGraph) -> Result<usize> {
    let nv = g.graph.vertex_count();
    if nv > MAX_ENUMERATION_VERTICES {
        return Err(Error::LimitExceeded {
            what: "vertex count",
            value: nv as u64,
            limit: MAX_ENUMERATION_VERTICES as u64,
        });
    }
    let mut adj = vec![0u64; nv];
    for e in g.edge_indices() {
        let (u, v) = g.graph.edge(e);
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let masks: Vec<u32> = g.graph.vertices().iter().map(|s| s.mask()).collect();
    let top = alpha(g)?.size;
    let all = if nv == 64 { u64::MAX } else { (1u64 << nv) - 1 };
    for size in (1..=top).rev() {
        if exists_nonstar_of_size(&adj, &masks, all, size, u32::MAX) {
            return Ok(size);
        }
    }
    Ok(0)
}

/// Enumerates independent `size`-subsets of `cand` in rank order; true if
/// one of them together with the running intersection `common` is non-star.
fn exists_nonstar_of_size(adj: &[u64], masks: &[u32], cand: u64, size: usize, common: u32) -> bool {
    if size == 0 {
        return common == 0;
    }
    let mut rest = cand;
    while rest.count_ones() as usize >= size {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if exists_nonstar_of_size(adj, masks, rest & !adj[v], size - 1, common & masks[v]) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{near_star, superstar, Params};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(n: u32, k: u32) -> Arc<KneserGraph> {
        Arc::new(KneserGraph::new(Params::new(n, k).unwrap()).unwrap())
    }

    fn random_sample(g: &Arc<KneserGraph>, p: f64, rng: &mut ChaCha8Rng) -> SampleGraph {
        SampleGraph::from_edges(g.clone(), (0..g.edge_count()).filter(|_| rng.gen::<f64>() < p))
    }

    #[test]
    fn petersen_values() {
        let g = graph(5, 2);
        let full = SampleGraph::full(g.clone());
        assert_eq!(alpha(&full).unwrap().size, 4);
        assert_eq!(brute_force_alpha(&full).unwrap(), 4);
        assert_eq!(max_nonstar_alpha(&full).unwrap().size, 3);
        assert!(is_ekr(&full).unwrap());
        let empty = SampleGraph::empty(g.clone());
        assert_eq!(alpha(&empty).unwrap().size, 10);
        assert_eq!(max_nonstar_alpha(&empty).unwrap().size, 10);
        assert!(!is_ekr(&empty).unwrap());
        let single = SampleGraph::from_edges(g, [0]);
        assert_eq!(brute_force_alpha(&single).unwrap(), 9);
        assert_eq!(alpha(&single).unwrap().size, 9);
    }

    #[test]
    fn hilton_milner_on_k73() {
        let full = SampleGraph::full(graph(7, 3));
        assert_eq!(alpha(&full).unwrap().size, 15);
        let ns = max_nonstar_alpha(&full).unwrap();
        assert_eq!(ns.size, 13);
        assert!(ns.witness.common_intersection().is_empty());
        assert_eq!(max_nonstar_alpha_by_enumeration(&full).unwrap(), 13);
    }

    #[test]
    fn independent_superstar_breaks_ekr() {
        let g = graph(5, 2);
        let p = *g.params();
        let a = KSet::new(&p, &[2, 3]).unwrap();
        let ss = superstar(&p, 1, a).unwrap();
        // drop every edge between A and the star
        let edges = (0..g.edge_count()).filter(|&e| {
            let (u, v) = g.edge(e);
            let (s, t) = (g.vertex(u as usize), g.vertex(v as usize));
            !(ss.contains(&s) && ss.contains(&t))
        });
        let h = SampleGraph::from_edges(g.clone(), edges);
        assert!(h.is_independent(&ss));
        assert!(!is_ekr(&h).unwrap());
        assert!(alpha(&h).unwrap().size >= 5);
        let ns = near_star(&p, 1, a, KSet::new(&p, &[1, 4]).unwrap()).unwrap();
        assert!(h.is_independent(&ns));
    }

    #[test]
    fn solvers_agree_with_oracles_on_random_petersen_subgraphs() {
        let g = graph(5, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..300 {
            let p = [0.25, 0.5, 0.75][i % 3];
            let h = random_sample(&g, p, &mut rng);
            let (bf, bf_ns) = brute_force(&h).unwrap();
            assert_eq!(alpha(&h).unwrap().size, bf);
            assert_eq!(max_nonstar_alpha(&h).unwrap().size, bf_ns);
            assert_eq!(max_nonstar_alpha_by_enumeration(&h).unwrap(), bf_ns);
            assert_eq!(is_ekr(&h).unwrap(), bf_ns < 4);
        }
    }

    #[test]
    fn solver_limits() {
        let big = SampleGraph::empty(graph(7, 3));
        assert!(matches!(brute_force_alpha(&big), Err(Error::LimitExceeded { .. })));
        let huge = SampleGraph::empty(graph(13, 6));
        assert!(matches!(alpha(&huge), Err(Error::LimitExceeded { .. })));
    }
}

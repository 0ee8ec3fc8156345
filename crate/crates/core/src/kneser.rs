//! The full Kneser graph with rank-indexed vertices and an indexed edge list.

use crate::combinatorics::{all_ksets, colex_rank, kneser_neighbours, KSet, Params};
use crate::error::{Error, Result};

/// Refuse to materialise edge lists beyond this size.
pub const MAX_EDGES: u64 = 1 << 24;

/// Vertex `i` is the k-set of colex rank `i`. Edge `e` joins `edges[e].0 < edges[e].1`,
/// and the list is sorted lexicographically.
#[derive(Debug, Clone)]
pub struct KneserGraph {
    params: Params,
    vertices: Vec<KSet>,
    edges: Vec<(u32, u32)>,
    /// Per vertex: (neighbour, edge index), neighbours ascending.
    incidence: Vec<Vec<(u32, u32)>>,
}

/// The edge list of `K(n,k)`: pairs `(i, j)` of vertex ranks with `i < j`, sorted.
pub fn build_edge_list(params: &Params) -> Result<Vec<(u32, u32)>> {
    check_limits(params)?;
    let mut edges = Vec::with_capacity(params.edge_count() as usize);
    for (i, s) in all_ksets(params.n(), params.k()).enumerate() {
        let i = i as u32;
        for t in kneser_neighbours(params, s) {
            let j = colex_rank(t.mask()) as u32;
            if j > i {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

fn check_limits(params: &Params) -> Result<()> {
    let e = params.edge_count();
    if e > MAX_EDGES {
        return Err(Error::LimitExceeded { what: "edge count", value: e, limit: MAX_EDGES });
    }
    Ok(())
}

impl KneserGraph {
    pub fn new(params: Params) -> Result<Self> {
        let edges = build_edge_list(&params)?;
        let vertices: Vec<KSet> = all_ksets(params.n(), params.k()).collect();
        let mut incidence = vec![Vec::with_capacity(params.degree() as usize); vertices.len()];
        for (e, &(i, j)) in edges.iter().enumerate() {
            incidence[i as usize].push((j, e as u32));
            incidence[j as usize].push((i, e as u32));
        }
        for list in &mut incidence {
            list.sort_unstable();
        }
        Ok(KneserGraph { params, vertices, edges, incidence })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[KSet] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> KSet {
        self.vertices[i]
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (u32, u32) {
        self.edges[e]
    }

    /// Rank of a k-set of this graph.
    pub fn index_of(&self, s: KSet) -> usize {
        debug_assert!(s.validate(&self.params).is_ok());
        colex_rank(s.mask()) as usize
    }

    /// (neighbour, edge index) pairs of vertex `v`.
    pub fn incidence(&self, v: usize) -> &[(u32, u32)] {
        &self.incidence[v]
    }

    /// Index of the edge joining `u` and `v`, if they are adjacent.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let list = &self.incidence[u];
        list.binary_search_by_key(&(v as u32), |&(w, _)| w).ok().map(|pos| list[pos].1 as usize)
    }

    /// Ranks of the members of the star `K_x`.
    pub fn star_indices(&self, x: u32) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.vertices[i].contains(x)).collect()
    }
}

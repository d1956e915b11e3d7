//! Undirected graphs, the random models they are drawn from, and the edge-list file format.
//!
//! Vertex ids are 0-based inside the library. Files, JSON dumps and CLI output use 1-based ids.

mod edgelist;
mod generate;

pub use edgelist::{load_edgelist, parse_edgelist, save_edgelist, write_edgelist};
pub use generate::{gen_er, gen_pl, gen_rb, gen_sbm, pl_degree_law, GraphModelParams, Rho};

use serde::Serialize;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Which random model (if any) produced a graph, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum GraphModel {
    Er { p: f64 },
    Rb { n1: usize, n2: usize, q: f64 },
    Sbm { n1: usize, n2: usize, p: f64, q: f64 },
    Pl {
        gamma: f64,
        rho: f64,
        /// Upper end of the truncated degree law.
        degree_cap: usize,
        /// The drawn expected degrees `d_i`.
        degrees: Vec<u32>,
    },
    /// Read from an edge-list file or built by hand.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMeta {
    #[serde(flatten)]
    pub model: GraphModel,
    pub seed: Option<u64>,
    /// Vertex pairs whose edge probability had to be clamped to 1 (power-law model only).
    pub clamped_pairs: u64,
}

impl GraphMeta {
    pub fn explicit() -> Self {
        GraphMeta {
            model: GraphModel::Explicit,
            seed: None,
            clamped_pairs: 0,
        }
    }
}

/// An undirected graph with sorted adjacency lists and optional non-negative edge weights.
///
/// Structural equality compares adjacency and effective weights (unweighted edges weigh 1) and
/// ignores [`GraphMeta`].
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    /// Parallel to `adjacency` when present.
    weights: Option<Vec<Vec<f64>>>,
    meta: GraphMeta,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adjacency == other.adjacency && self.edges().zip(other.edges()).all(|(a, b)| a.2 == b.2)
    }
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            weights: None,
            meta: GraphMeta::explicit(),
        }
    }

    /// Builds a graph from unweighted edges given as 0-based pairs. Duplicates are merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut builder = GraphBuilder::new(n);
        for (u, v) in edges {
            builder.add_edge(u, v, None)?;
        }
        Ok(builder.finish(GraphMeta::explicit()))
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Weight `t(u, v)`; unweighted graphs use 1 for every edge.
    ///
    /// Returns `None` when the edge does not exist.
    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let pos = self.adjacency[u].binary_search(&v).ok()?;
        Some(match &self.weights {
            Some(w) => w[u][pos],
            None => 1.0,
        })
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Number of undirected edges; a self-loop counts once.
    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Each undirected edge once as `(u, v, weight)` with `u <= v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(move |(u, nbrs)| {
            nbrs.iter()
                .enumerate()
                .filter(move |(_, &v)| v >= u)
                .map(move |(pos, &v)| {
                    let w = self.weights.as_ref().map_or(1.0, |w| w[u][pos]);
                    (u, v, w)
                })
        })
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn self_loop_count(&self) -> usize {
        (0..self.vertex_count()).filter(|&v| self.has_edge(v, v)).count()
    }

    /// Sizes of the two clusters for two-cluster models.
    pub fn clusters(&self) -> Option<(usize, usize)> {
        match self.meta.model {
            GraphModel::Rb { n1, n2, .. } | GraphModel::Sbm { n1, n2, .. } => Some((n1, n2)),
            _ => None,
        }
    }

    /// Returns a copy carrying uniform random weights in (0, 1], one independent stream per row.
    pub fn with_random_weights(&self, seed: u64) -> Graph {
        use rand::Rng;
        let n = self.vertex_count();
        let mut weights: Vec<Vec<f64>> = self.adjacency.iter().map(|a| vec![0.0; a.len()]).collect();
        for u in 0..n {
            let mut rng = generate::block_rng(seed, generate::STREAM_WEIGHTS, u as u64);
            for (pos, &v) in self.adjacency[u].iter().enumerate() {
                if v < u {
                    continue;
                }
                let w = 1.0 - rng.gen::<f64>();
                weights[u][pos] = w;
                if v != u {
                    let back = self.adjacency[v].binary_search(&u).expect("symmetric adjacency");
                    weights[v][back] = w;
                }
            }
        }
        Graph {
            adjacency: self.adjacency.clone(),
            weights: Some(weights),
            meta: self.meta.clone(),
        }
    }

    /// Checks symmetry, sortedness, id range and weight sign.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.vertex_count();
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::consistency(format!("adjacency of {} not strictly sorted", u + 1)));
            }
            for (pos, &v) in nbrs.iter().enumerate() {
                if v >= n {
                    return Err(Error::consistency(format!("neighbor id {} out of range", v + 1)));
                }
                if !self.has_edge(v, u) {
                    return Err(Error::consistency(format!("edge {}-{} is not symmetric", u + 1, v + 1)));
                }
                if let Some(w) = &self.weights {
                    let wv = w[u][pos];
                    if !(wv >= 0.0) || Some(wv) != self.weight(v, u) {
                        return Err(Error::consistency(format!("bad weight on {}-{}", u + 1, v + 1)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Accumulates edges and produces a [`Graph`] with sorted, symmetric adjacency.
pub(crate) struct GraphBuilder {
    adj: Vec<Vec<(VertexId, f64)>>,
    weighted: bool,
}

impl GraphBuilder {
    pub(crate) fn new(n: usize) -> Self {
        GraphBuilder {
            adj: vec![Vec::new(); n],
            weighted: false,
        }
    }

    pub(crate) fn add_edge(&mut self, u: VertexId, v: VertexId, weight: Option<f64>) -> Result<()> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(Error::param(format!("edge {}-{} outside 1..={n}", u + 1, v + 1)));
        }
        if let Some(w) = weight {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::param(format!("edge weight {w} must be finite and >= 0")));
            }
            self.weighted = true;
        }
        let w = weight.unwrap_or(1.0);
        self.adj[u].push((v, w));
        if u != v {
            self.adj[v].push((u, w));
        }
        Ok(())
    }

    /// Appends a whole pre-sorted row of neighbors `v > u` (generator fast path).
    pub(crate) fn add_row(&mut self, u: VertexId, upper: &[VertexId]) {
        for &v in upper {
            self.adj[u].push((v, 1.0));
            self.adj[v].push((u, 1.0));
        }
    }

    pub(crate) fn finish(self, meta: GraphMeta) -> Graph {
        let weighted = self.weighted;
        let mut adjacency = Vec::with_capacity(self.adj.len());
        let mut weights = Vec::with_capacity(self.adj.len());
        for mut row in self.adj {
            row.sort_by_key(|e| e.0);
            row.dedup_by(|a, b| a.0 == b.0);
            adjacency.push(row.iter().map(|e| e.0).collect());
            weights.push(row.iter().map(|e| e.1).collect());
        }
        Graph {
            adjacency,
            weights: weighted.then_some(weights),
            meta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_is_symmetric_and_sorted() {
        let g = Graph::from_edges(4, [(0, 3), (2, 1), (3, 0), (1, 0)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 3]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.edge_count(), 3);
        g.check_invariants().unwrap();
    }

    #[test]
    fn self_loop_appears_once() {
        let g = Graph::from_edges(2, [(1, 1), (0, 1)]).unwrap();
        assert_eq!(g.neighbors(1), &[0, 1]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.self_loop_count(), 1);
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn unweighted_edges_have_unit_weight() {
        let g = Graph::from_edges(3, [(0, 2)]).unwrap();
        assert_eq!(g.weight(2, 0), Some(1.0));
        assert_eq!(g.weight(0, 1), None);
    }

    #[test]
    fn random_weights_symmetric_in_unit_interval() {
        let g = gen_er(40, 0.3, 5).unwrap().with_random_weights(9);
        g.check_invariants().unwrap();
        for (u, v, w) in g.edges() {
            assert!(w > 0.0 && w <= 1.0);
            assert_eq!(g.weight(v, u), Some(w));
        }
        assert_eq!(g, gen_er(40, 0.3, 5).unwrap().with_random_weights(9));
    }
}

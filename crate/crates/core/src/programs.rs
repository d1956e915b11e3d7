//! Vertex programs expressed as a per-edge Map and a per-vertex Reduce, plus a single-machine
//! reference executor.
//!
//! Reduce functions sort their inputs by mapper id before aggregating, so the result is
//! bit-identical for any arrival order of the intermediate values.

use crate::graphs::{Graph, VertexId};

/// Everything a mapper knows when producing the value `v_{i,j}` for neighbor `i` of `j`.
#[derive(Debug, Clone, Copy)]
pub struct MapInput {
    pub mapper: VertexId,
    pub reducer: VertexId,
    /// Current file `w_j` of the mapper.
    pub state: f64,
    pub mapper_degree: usize,
    /// Edge weight `t(j, i)`.
    pub weight: f64,
}

pub trait VertexProgram: Sync {
    fn name(&self) -> &'static str;

    /// Initial per-vertex files for a graph with `n` vertices.
    fn initial_state(&self, n: usize) -> Vec<f64>;

    fn map(&self, input: &MapInput) -> f64;

    /// Combines `{(j, v_{i,j}) : j in N(i)}` into the new file of `reducer`.
    fn reduce(&self, reducer: VertexId, values: &[(VertexId, f64)], own_prev: f64) -> f64;
}

/// `rank_j * P(j -> i)` with the uniform transition `1 / deg(j)`.
pub fn pagerank_map(rank: f64, degree: usize) -> f64 {
    rank / degree as f64
}

/// `(1 - d) * sum(values) + d / |V|`, summing in ascending mapper order.
pub fn pagerank_reduce(values: &[(VertexId, f64)], damping: f64, vertices: usize) -> f64 {
    (1.0 - damping) * ordered_sum(values) + damping / vertices as f64
}

pub fn sssp_map(dist: f64, weight: f64) -> f64 {
    dist + weight
}

/// Minimum over the incoming candidates and the vertex's own previous distance.
pub fn sssp_reduce(values: &[(VertexId, f64)], own_prev: f64) -> f64 {
    values.iter().map(|&(_, v)| v).fold(own_prev, f64::min)
}

fn ordered_sum(values: &[(VertexId, f64)]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by_key(|&(j, _)| j);
    sorted.iter().map(|&(_, v)| v).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRank {
    /// `d` in `(1 - d) * sum + d / |V|`.
    pub damping: f64,
    /// `|V|`, the number of real vertices.
    pub vertices: usize,
}

impl VertexProgram for PageRank {
    fn name(&self) -> &'static str {
        "pagerank"
    }

    fn initial_state(&self, n: usize) -> Vec<f64> {
        vec![1.0 / self.vertices as f64; n]
    }

    fn map(&self, input: &MapInput) -> f64 {
        pagerank_map(input.state, input.mapper_degree)
    }

    fn reduce(&self, _reducer: VertexId, values: &[(VertexId, f64)], _own_prev: f64) -> f64 {
        pagerank_reduce(values, self.damping, self.vertices)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShortestPath {
    pub source: VertexId,
}

impl VertexProgram for ShortestPath {
    fn name(&self) -> &'static str {
        "sssp"
    }

    fn initial_state(&self, n: usize) -> Vec<f64> {
        let mut state = vec![f64::INFINITY; n];
        if self.source < n {
            state[self.source] = 0.0;
        }
        state
    }

    fn map(&self, input: &MapInput) -> f64 {
        sssp_map(input.state, input.weight)
    }

    fn reduce(&self, _reducer: VertexId, values: &[(VertexId, f64)], own_prev: f64) -> f64 {
        sssp_reduce(values, own_prev)
    }
}

/// One synchronous Map + Reduce sweep over every vertex.
pub fn reference_step(graph: &Graph, program: &dyn VertexProgram, state: &[f64]) -> Vec<f64> {
    (0..graph.vertex_count())
        .map(|i| {
            let values: Vec<(VertexId, f64)> = graph
                .neighbors(i)
                .iter()
                .map(|&j| {
                    let input = MapInput {
                        mapper: j,
                        reducer: i,
                        state: state[j],
                        mapper_degree: graph.degree(j),
                        weight: graph.weight(j, i).expect("neighbor edge"),
                    };
                    (j, program.map(&input))
                })
                .collect();
            program.reduce(i, &values, state[i])
        })
        .collect()
}

/// Runs `iterations` sweeps without any distribution; the ground truth for the engine.
pub fn reference_execute(
    graph: &Graph,
    program: &dyn VertexProgram,
    state: &[f64],
    iterations: usize,
) -> Vec<f64> {
    let mut current = state.to_vec();
    for _ in 0..iterations {
        current = reference_step(graph, program, &current);
    }
    current
}

/// Iterates until a sweep leaves the state unchanged or `max_iterations` is hit.
///
/// Returns the state and the number of sweeps performed (including the final no-op sweep).
pub fn reference_fixed_point(
    graph: &Graph,
    program: &dyn VertexProgram,
    state: &[f64],
    max_iterations: usize,
) -> (Vec<f64>, usize) {
    let mut current = state.to_vec();
    for it in 1..=max_iterations {
        let next = reference_step(graph, program, &current);
        let stable = next == current;
        current = next;
        if stable {
            return (current, it);
        }
    }
    (current, max_iterations)
}

use crate::allocation::Allocation;
use crate::graphs::{Graph, VertexId};

use super::{adjacency, Filter};

/// One point-to-point transfer of a whole intermediate value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unicast {
    pub reducer: VertexId,
    pub mapper: VertexId,
    pub source: usize,
    pub destination: usize,
}

/// Every record a worker needs but did not Map, sent once by the lowest-numbered worker
/// that Mapped it. Ordered by destination, then reducer, then mapper.
pub fn uncoded_plan(alloc: &Allocation, graph: &Graph, filter: Filter<'_>) -> Vec<Unicast> {
    let mut out = Vec::new();
    for k in 0..alloc.workers() {
        for &i in alloc.reduce_set(k) {
            for &j in adjacency(graph, i) {
                if !alloc.maps(k, j) && filter(i, j) {
                    out.push(Unicast {
                        reducer: i,
                        mapper: j,
                        source: alloc.mapping_set(j).min().expect("every vertex is Mapped"),
                        destination: k,
                    });
                }
            }
        }
    }
    out
}

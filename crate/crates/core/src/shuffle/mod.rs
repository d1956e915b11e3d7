//! Delivering intermediate values to their Reducers: the uncoded baseline, the coded
//! multicast scheme, and composed multi-pass plans.
//!
//! A record `(i, j)` is the intermediate value computed by mapper `j` for reducer `i`.

pub mod coded;
mod plan;
pub mod segment;
mod uncoded;
mod zset;

use std::collections::BTreeSet;

pub use coded::{decode_group, encode_group, sender_table, CodedMessage, Table, TableRow, MESSAGE_HEADER_BYTES};
pub use plan::{
    format_load, group_tally, normalized_load, pass_load, plan_load, ratio_to_f64, rb_plan, sbm_plan, GroupTally,
    Mode, Pass, PassLoad, ShufflePlan,
};
pub use segment::{reassemble, Segment, VALUE_BITS};
pub use uncoded::{uncoded_plan, Unicast};
pub use zset::build_z_set;

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::graphs::{Graph, VertexId};
use crate::workers::WorkerSet;

/// `(reducer, mapper)`.
pub type RecordKey = (VertexId, VertexId);

/// Selects the records a pass is responsible for.
pub type Filter<'a> = &'a (dyn Fn(VertexId, VertexId) -> bool + Sync);

pub fn all_records(_: VertexId, _: VertexId) -> bool {
    true
}

/// Neighbors of `v`; virtual padding vertices have none.
pub(crate) fn adjacency(graph: &Graph, v: VertexId) -> &[VertexId] {
    if v < graph.vertex_count() {
        graph.neighbors(v)
    } else {
        &[]
    }
}

pub(crate) fn check_compatible(alloc: &Allocation, graph: &Graph) -> Result<()> {
    if alloc.real_vertex_count() != graph.vertex_count() {
        return Err(Error::param(format!(
            "allocation covers {} vertices but the graph has {}",
            alloc.real_vertex_count(),
            graph.vertex_count()
        )));
    }
    Ok(())
}

/// The common Map multiplicity `r` that coded groups of size `r + 1` are built on.
pub(crate) fn coded_load_parameter(alloc: &Allocation) -> Result<usize> {
    alloc.uniform_multiplicity().ok_or_else(|| {
        Error::Usage("coded shuffling needs every vertex Mapped by the same number of workers".into())
    })
}

/// Every group `T(j) + {k}` with `k` outside a mapping set `T(j)`, ascending by bitmask.
pub fn coded_groups(alloc: &Allocation) -> Result<Vec<WorkerSet>> {
    coded_load_parameter(alloc)?;
    let mut groups = BTreeSet::new();
    for (set, _) in alloc.batches() {
        for k in 0..alloc.workers() {
            if !set.contains(k) {
                groups.insert(set.with(k));
            }
        }
    }
    Ok(groups.into_iter().collect())
}

/// Records `(i, j)` with `i` Reduced at `k` and `j` not Mapped there, sorted.
pub fn needed_records(alloc: &Allocation, graph: &Graph, k: usize, filter: Filter<'_>) -> Vec<RecordKey> {
    let mut out = Vec::new();
    for &i in alloc.reduce_set(k) {
        for &j in adjacency(graph, i) {
            if !alloc.maps(k, j) && filter(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::workers::WorkerSet;

use super::{adjacency, coded_load_parameter, Filter, RecordKey};

/// Records `(i, j)` with `i` Reduced at `k`, `j` Mapped by exactly the workers `group \ {k}`,
/// and `(i, j)` an edge accepted by `filter`.
///
/// Ordered by mapper, then reducer. Sender tables and receivers both rely on this order.
pub fn build_z_set(
    alloc: &Allocation,
    graph: &Graph,
    group: WorkerSet,
    k: usize,
    filter: Filter<'_>,
) -> Result<Vec<RecordKey>> {
    let r = coded_load_parameter(alloc)?;
    if group.len() != r + 1 || !group.contains(k) {
        return Err(Error::Usage(format!(
            "Z-set needs a group of {} workers containing worker {}, got {group}",
            r + 1,
            k + 1
        )));
    }
    Ok(z_set_unchecked(alloc, graph, group, k, filter))
}

pub(crate) fn z_set_unchecked(
    alloc: &Allocation,
    graph: &Graph,
    group: WorkerSet,
    k: usize,
    filter: Filter<'_>,
) -> Vec<RecordKey> {
    let mut out = Vec::new();
    for &j in alloc.batch(group.without(k)) {
        for &i in adjacency(graph, j) {
            if alloc.reducer_of(i) == k && filter(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// The same set as [`build_z_set`], assembled from the adjacency of `k`'s own Reducers only.
///
/// This is what a receiver can build without having Mapped the vertices involved.
pub(crate) fn own_row(alloc: &Allocation, graph: &Graph, group: WorkerSet, k: usize, filter: Filter<'_>) -> Vec<RecordKey> {
    let others = group.without(k);
    let mut out = Vec::new();
    for &i in alloc.reduce_set(k) {
        for &j in adjacency(graph, i) {
            if alloc.mapping_set(j) == others && filter(i, j) {
                out.push((i, j));
            }
        }
    }
    out.sort_unstable_by_key(|&(i, j)| (j, i));
    out
}

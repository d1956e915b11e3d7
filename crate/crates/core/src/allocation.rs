//! Map (subgraph) and Reduce allocations over `K` workers.
//!
//! The batch scheme splits the vertex layout into `C(K, r)` contiguous batches, one per
//! `r`-subset of workers in lexicographic order; every worker in the subset Maps the batch.
//! Reduce sets are contiguous blocks of the same layout. When the vertex count is not a multiple
//! of `lcm(K, C(K, r))`, isolated virtual vertices are appended to the layout; they carry no
//! edges and are never reported.

use std::collections::BTreeMap;

use num_integer::{binomial, Integer};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::VertexId;
use crate::workers::{subsets, WorkerSet, MAX_WORKERS};

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    workers: usize,
    real_vertices: usize,
    map_sets: Vec<Vec<VertexId>>,
    reduce_sets: Vec<Vec<VertexId>>,
    mapping: Vec<WorkerSet>,
    owner: Vec<usize>,
    batches: BTreeMap<WorkerSet, Vec<VertexId>>,
}

/// `a[j]`: number of vertices Mapped by exactly `j` workers, for `j = 1..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityProfile {
    /// `counts[j - 1] = a[j]`.
    pub counts: Vec<usize>,
}

impl MultiplicityProfile {
    pub fn workers(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, j: usize) -> usize {
        self.counts[j - 1]
    }

    /// `sum_j a[j]`, the number of vertices.
    pub fn vertices(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `sum_j j * a[j]`, which equals `r * n` for computation load `r`.
    pub fn weighted_total(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, a)| (i + 1) * a).sum()
    }
}

impl Allocation {
    /// Builds an allocation from explicit sets (0-based ids).
    ///
    /// The Reduce sets must partition `0..V` for some `V >= real_vertices`; ids at or above
    /// `real_vertices` are virtual padding. Every vertex must be Mapped somewhere.
    pub fn new(
        workers: usize,
        real_vertices: usize,
        mut map_sets: Vec<Vec<VertexId>>,
        mut reduce_sets: Vec<Vec<VertexId>>,
    ) -> Result<Self> {
        if workers == 0 || workers > MAX_WORKERS {
            return Err(Error::param(format!("worker count {workers} outside 1..={MAX_WORKERS}")));
        }
        if map_sets.len() != workers || reduce_sets.len() != workers {
            return Err(Error::param(format!(
                "expected {workers} Map and Reduce sets, got {} and {}",
                map_sets.len(),
                reduce_sets.len()
            )));
        }
        let total: usize = reduce_sets.iter().map(Vec::len).sum();
        if total < real_vertices {
            return Err(Error::param(format!(
                "Reduce sets cover {total} vertices but the graph has {real_vertices}"
            )));
        }
        let mut owner = vec![usize::MAX; total];
        for (k, set) in reduce_sets.iter_mut().enumerate() {
            set.sort_unstable();
            for &v in set.iter() {
                if v >= total || owner[v] != usize::MAX {
                    return Err(Error::param(format!(
                        "Reduce sets do not partition the vertices (vertex {} on worker {})",
                        v + 1,
                        k + 1
                    )));
                }
                owner[v] = k;
            }
        }
        let mut mapping = vec![WorkerSet::EMPTY; total];
        for (k, set) in map_sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            for &v in set.iter() {
                if v >= total {
                    return Err(Error::param(format!("Map set of worker {} names unknown vertex {}", k + 1, v + 1)));
                }
                mapping[v] = mapping[v].with(k);
            }
        }
        if let Some(v) = mapping.iter().position(|m| m.is_empty()) {
            return Err(Error::param(format!("vertex {} is not Mapped by any worker", v + 1)));
        }
        let mut batches: BTreeMap<WorkerSet, Vec<VertexId>> = BTreeMap::new();
        for (v, &m) in mapping.iter().enumerate() {
            batches.entry(m).or_default().push(v);
        }
        Ok(Allocation {
            workers,
            real_vertices,
            map_sets,
            reduce_sets,
            mapping,
            owner,
            batches,
        })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Vertex count including virtual padding.
    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    pub fn real_vertex_count(&self) -> usize {
        self.real_vertices
    }

    pub fn is_virtual(&self, v: VertexId) -> bool {
        v >= self.real_vertices
    }

    /// `M_k`, sorted.
    pub fn map_set(&self, k: usize) -> &[VertexId] {
        &self.map_sets[k]
    }

    /// `R_k`, sorted.
    pub fn reduce_set(&self, k: usize) -> &[VertexId] {
        &self.reduce_sets[k]
    }

    /// `T(v)`: the workers that Map `v`.
    pub fn mapping_set(&self, v: VertexId) -> WorkerSet {
        self.mapping[v]
    }

    pub fn maps(&self, k: usize, v: VertexId) -> bool {
        self.mapping[v].contains(k)
    }

    /// The worker that Reduces `v`.
    pub fn reducer_of(&self, v: VertexId) -> usize {
        self.owner[v]
    }

    /// Vertices whose mapping set is exactly `set`, ascending.
    pub fn batch(&self, set: WorkerSet) -> &[VertexId] {
        self.batches.get(&set).map_or(&[], Vec::as_slice)
    }

    /// All distinct mapping sets with their vertices.
    pub fn batches(&self) -> impl Iterator<Item = (WorkerSet, &[VertexId])> {
        self.batches.iter().map(|(s, v)| (*s, v.as_slice()))
    }

    /// `Some(r)` when every vertex is Mapped by exactly `r` workers.
    pub fn uniform_multiplicity(&self) -> Option<usize> {
        let r = self.mapping.first()?.len();
        self.mapping.iter().all(|m| m.len() == r).then_some(r)
    }

    /// Computation load `r = sum_k |M_k| / n` as an exact fraction (over padded `n`).
    pub fn computation_load(&self) -> Ratio<usize> {
        let total: usize = self.map_sets.iter().map(Vec::len).sum();
        Ratio::new(total, self.vertex_count().max(1))
    }

    pub fn multiplicity_profile(&self) -> MultiplicityProfile {
        let mut counts = vec![0; self.workers];
        for m in &self.mapping {
            counts[m.len() - 1] += 1;
        }
        MultiplicityProfile { counts }
    }

    /// Checks that every worker Maps `r n / K` vertices and Reduces `n / K`.
    pub fn check_balanced(&self) -> Result<()> {
        let n = self.vertex_count();
        let total_maps: usize = self.map_sets.iter().map(Vec::len).sum();
        if !total_maps.is_multiple_of(self.workers) || !n.is_multiple_of(self.workers) {
            return Err(Error::consistency("allocation sizes are not divisible by K"));
        }
        for k in 0..self.workers {
            if self.map_sets[k].len() != total_maps / self.workers {
                return Err(Error::consistency(format!("worker {} Maps {} vertices", k + 1, self.map_sets[k].len())));
            }
            if self.reduce_sets[k].len() != n / self.workers {
                return Err(Error::consistency(format!(
                    "worker {} Reduces {} vertices",
                    k + 1,
                    self.reduce_sets[k].len()
                )));
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> AllocationFile {
        let one_based = |sets: &[Vec<VertexId>]| sets.iter().map(|s| s.iter().map(|v| v + 1).collect()).collect();
        AllocationFile {
            workers: self.workers,
            vertices: self.real_vertices,
            padded_vertices: self.vertex_count(),
            computation_load: self.computation_load().to_string(),
            map_sets: one_based(&self.map_sets),
            reduce_sets: one_based(&self.reduce_sets),
        }
    }

    pub fn from_file(file: &AllocationFile) -> Result<Self> {
        let zero_based = |sets: &[Vec<VertexId>]| -> Result<Vec<Vec<VertexId>>> {
            sets.iter()
                .map(|s| {
                    s.iter()
                        .map(|&v| v.checked_sub(1).ok_or_else(|| Error::param("vertex ids are 1-based")))
                        .collect()
                })
                .collect()
        };
        let alloc = Allocation::new(
            file.workers,
            file.vertices,
            zero_based(&file.map_sets)?,
            zero_based(&file.reduce_sets)?,
        )?;
        if alloc.vertex_count() != file.padded_vertices {
            return Err(Error::param(format!(
                "padded_vertices = {} but Reduce sets cover {}",
                file.padded_vertices,
                alloc.vertex_count()
            )));
        }
        Ok(alloc)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Allocation::from_file(&serde_json::from_str(text)?)
    }
}

/// JSON form of an allocation: 1-based vertex-id arrays per worker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationFile {
    pub workers: usize,
    pub vertices: usize,
    pub padded_vertices: usize,
    #[serde(default)]
    pub computation_load: String,
    pub map_sets: Vec<Vec<VertexId>>,
    pub reduce_sets: Vec<Vec<VertexId>>,
}

fn check_load(workers: usize, load: usize) -> Result<()> {
    if workers == 0 || workers > MAX_WORKERS {
        return Err(Error::param(format!("worker count K = {workers} outside 1..={MAX_WORKERS}")));
    }
    if load == 0 || load > workers {
        return Err(Error::param(format!("computation load r = {load} outside 1..=K = {workers}")));
    }
    Ok(())
}

/// Smallest multiple of `unit` that is at least `n`.
fn round_up(n: usize, unit: usize) -> Result<usize> {
    n.div_ceil(unit)
        .checked_mul(unit)
        .filter(|&p| p <= u32::MAX as usize)
        .ok_or_else(|| Error::param(format!("padding {n} vertices to a multiple of {unit} overflows")))
}

/// Cuts `items` into `parts` contiguous chunks whose sizes differ by at most one.
fn even_chunks(items: &[VertexId], parts: usize) -> Vec<Vec<VertexId>> {
    let base = items.len() / parts;
    let extra = items.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < extra);
        out.push(items[start..start + len].to_vec());
        start += len;
    }
    out
}

/// Lays `layout` out into lexicographic batches for workers `group` (ascending) with load `r`.
/// `layout.len()` must be a multiple of `C(|group|, r)`.
fn assign_batches(layout: &[VertexId], group: &[usize], load: usize, map_sets: &mut [Vec<VertexId>]) {
    let sets = subsets(group.len(), load);
    let g = layout.len() / sets.len();
    for (b, set) in sets.iter().enumerate() {
        let block = &layout[b * g..(b + 1) * g];
        for local in set.iter() {
            map_sets[group[local]].extend_from_slice(block);
        }
    }
}

/// The batch allocation over vertices `0..n` in natural order.
pub fn er_allocate(n: usize, workers: usize, load: usize) -> Result<Allocation> {
    let order: Vec<VertexId> = (0..n).collect();
    batch_allocate(&order, workers, load)
}

/// The batch allocation over an arbitrary vertex layout (a permutation of `0..n`).
pub fn batch_allocate(order: &[VertexId], workers: usize, load: usize) -> Result<Allocation> {
    check_load(workers, load)?;
    let n = order.len();
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::param("vertex layout is not a permutation"));
        }
    }
    let padded = round_up(n.max(1), workers.lcm(&binomial(workers, load)))?;
    let layout: Vec<VertexId> = order.iter().copied().chain(n..padded).collect();

    let group: Vec<usize> = (0..workers).collect();
    let mut map_sets = vec![Vec::new(); workers];
    assign_batches(&layout, &group, load, &mut map_sets);
    let per = padded / workers;
    let reduce_sets = (0..workers).map(|k| layout[k * per..(k + 1) * per].to_vec()).collect();
    Allocation::new(workers, n, map_sets, reduce_sets)
}

/// Layout that interleaves two clusters `0..n1` and `n1..n1+n2` in proportion, so every
/// contiguous block holds both clusters at (close to) their global ratio.
pub fn stratified_order(n1: usize, n2: usize) -> Vec<VertexId> {
    let n = n1 + n2;
    let (mut a, mut b) = (0, n1);
    (0..n)
        .map(|t| {
            let target = ((t + 1) * n1).div_ceil(n);
            if a < target {
                a += 1;
                a - 1
            } else {
                b += 1;
                b - 1
            }
        })
        .collect()
}

/// Batch allocation for a two-block graph over [`stratified_order`].
pub fn sbm_allocate(n1: usize, n2: usize, workers: usize, load: usize) -> Result<Allocation> {
    batch_allocate(&stratified_order(n1, n2), workers, load)
}

/// Which shuffle phase serves a Reducer under the bipartite allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    /// Reducers of the smaller cluster, hosted by the servers Mapping the larger one.
    I,
    /// Reducers of the larger cluster hosted by the servers Mapping the smaller one.
    II,
    /// Leftover Reducers of the larger cluster, back on the first server group.
    III,
}

/// Side information produced by [`rb_allocate`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePlan {
    /// Servers Mapping the larger cluster `V1`.
    pub first_group: WorkerSet,
    /// Servers Mapping the smaller cluster `V2`.
    pub second_group: WorkerSet,
    /// `true` for vertices of `V1` (padding included).
    in_larger: Vec<bool>,
    phase: Vec<Phase>,
}

impl PhasePlan {
    pub fn in_larger_cluster(&self, v: VertexId) -> bool {
        self.in_larger[v]
    }

    /// Phase that serves Reducer `v`.
    pub fn phase_of(&self, v: VertexId) -> Phase {
        self.phase[v]
    }
}

/// Two-group allocation for `RB(n1, n2, q)` graphs whose clusters are `0..n1` and `n1..n1+n2`.
///
/// With `V1` the larger cluster, `K1 = round(|V1| K / n)` servers Map `V1` with the batch scheme
/// and the other `K2` servers Map `V2`. `V2` Reducers go to the first group (phase I), as many
/// `V1` Reducers as the second group holds go there (phase II), and the remainder returns to the
/// first group (phase III).
pub fn rb_allocate(n1: usize, n2: usize, workers: usize, load: usize) -> Result<(Allocation, PhasePlan)> {
    check_load(workers, load)?;
    if n1 == 0 || n2 == 0 {
        return Err(Error::param("both clusters need at least one vertex"));
    }
    if workers < 2 {
        return Err(Error::param("the bipartite scheme needs at least two workers"));
    }
    let n = n1 + n2;
    let (v1, v2): (Vec<VertexId>, Vec<VertexId>) = if n1 >= n2 {
        ((0..n1).collect(), (n1..n).collect())
    } else {
        ((n1..n).collect(), (0..n1).collect())
    };
    let k1 = ((v1.len() * workers) as f64 / n as f64).round().clamp(1.0, (workers - 1) as f64) as usize;
    let k2 = workers - k1;
    if load > k1.min(k2) {
        return Err(Error::param(format!(
            "r = {load} exceeds the server groups K1 = {k1}, K2 = {k2}; each cluster is Mapped inside its own group"
        )));
    }

    let p1 = round_up(v1.len(), binomial(k1, load))?;
    let p2 = round_up(v2.len(), binomial(k2, load))?;
    let mut next_virtual = n;
    let mut pad = |mut list: Vec<VertexId>, to: usize| {
        while list.len() < to {
            list.push(next_virtual);
            next_virtual += 1;
        }
        list
    };
    let v1 = pad(v1, p1);
    let v2 = pad(v2, p2);
    let total = p1 + p2;

    let first: Vec<usize> = (0..k1).collect();
    let second: Vec<usize> = (k1..workers).collect();
    let mut map_sets = vec![Vec::new(); workers];
    assign_batches(&v1, &first, load, &mut map_sets);
    assign_batches(&v2, &second, load, &mut map_sets);

    let second_capacity = ((k2 * total) as f64 / workers as f64).round() as usize;
    let to_second = second_capacity.min(v1.len());
    let mut reduce_sets = vec![Vec::new(); workers];
    for (chunk, &k) in even_chunks(&v1[..to_second], k2).into_iter().zip(&second) {
        reduce_sets[k] = chunk;
    }
    let first_list: Vec<VertexId> = v2.iter().chain(&v1[to_second..]).copied().collect();
    for (chunk, &k) in even_chunks(&first_list, k1).into_iter().zip(&first) {
        reduce_sets[k] = chunk;
    }

    let mut in_larger = vec![false; total];
    for &v in &v1 {
        in_larger[v] = true;
    }
    let alloc = Allocation::new(workers, n, map_sets, reduce_sets)?;
    let second_group: WorkerSet = second.iter().copied().collect();
    let phase = (0..total)
        .map(|v| {
            if !in_larger[v] {
                Phase::I
            } else if second_group.contains(alloc.reducer_of(v)) {
                Phase::II
            } else {
                Phase::III
            }
        })
        .collect();
    let plan = PhasePlan {
        first_group: first.iter().copied().collect(),
        second_group,
        in_larger,
        phase,
    };
    Ok((alloc, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_based(set: &[VertexId]) -> Vec<VertexId> {
        set.iter().map(|v| v + 1).collect()
    }

    #[test]
    fn worked_example_allocation() {
        let a = er_allocate(6, 3, 2).unwrap();
        assert_eq!(one_based(a.map_set(0)), [1, 2, 3, 4]);
        assert_eq!(one_based(a.map_set(1)), [1, 2, 5, 6]);
        assert_eq!(one_based(a.map_set(2)), [3, 4, 5, 6]);
        assert_eq!(one_based(a.reduce_set(0)), [1, 2]);
        assert_eq!(one_based(a.reduce_set(1)), [3, 4]);
        assert_eq!(one_based(a.reduce_set(2)), [5, 6]);
        assert_eq!(a.batch([0, 1].into_iter().collect()), &[0, 1]);
        assert_eq!(a.batch([0, 2].into_iter().collect()), &[2, 3]);
        assert_eq!(a.batch([1, 2].into_iter().collect()), &[4, 5]);
        assert_eq!(a.computation_load(), Ratio::from_integer(2));
        assert_eq!(a.multiplicity_profile().counts, vec![0, 6, 0]);
    }

    #[test]
    fn full_load_maps_everything() {
        let a = er_allocate(12, 4, 4).unwrap();
        for k in 0..4 {
            assert_eq!(a.map_set(k).len(), 12);
        }
        assert_eq!(a.computation_load(), Ratio::from_integer(4));
    }

    #[test]
    fn rejects_bad_load() {
        assert!(matches!(er_allocate(10, 3, 4), Err(Error::Parameter(_))));
        assert!(er_allocate(10, 3, 0).is_err());
        assert!(er_allocate(10, 33, 1).is_err());
    }

    #[test]
    fn padding_adds_virtual_vertices() {
        // lcm(4, C(4,2)=6) = 12
        let a = er_allocate(30, 4, 2).unwrap();
        assert_eq!(a.vertex_count(), 36);
        assert_eq!(a.real_vertex_count(), 30);
        assert!(a.is_virtual(35) && !a.is_virtual(29));
        a.check_balanced().unwrap();
        assert_eq!(a.computation_load(), Ratio::from_integer(2));
    }

    #[test]
    fn explicit_allocation_validation() {
        assert!(Allocation::new(2, 2, vec![vec![0], vec![1]], vec![vec![0], vec![1]]).is_ok());
        // vertex 1 reduced twice
        assert!(Allocation::new(2, 2, vec![vec![0], vec![1]], vec![vec![0, 1], vec![1]]).is_err());
        // vertex 1 unmapped
        assert!(Allocation::new(2, 2, vec![vec![0], vec![0]], vec![vec![0], vec![1]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = er_allocate(30, 4, 2).unwrap();
        let json = a.to_json().unwrap();
        assert!(json.contains("\"padded_vertices\": 36"));
        assert_eq!(Allocation::from_json(&json).unwrap(), a);
    }

    #[test]
    fn balanced_bipartite_has_no_phase_three() {
        let (a, plan) = rb_allocate(150, 150, 6, 2).unwrap();
        a.check_balanced().unwrap();
        assert!((0..300).all(|v| plan.phase_of(v) != Phase::III));
        for k in 0..6 {
            assert_eq!(a.map_set(k).len(), 100);
            assert_eq!(a.reduce_set(k).len(), 50);
        }
    }

    #[test]
    fn unbalanced_bipartite_by_hand() {
        // K1 = round(6*5/10) = 3, K2 = 2, r = 1
        let (a, plan) = rb_allocate(6, 4, 5, 1).unwrap();
        assert_eq!(plan.first_group.to_string(), "{1,2,3}");
        assert_eq!(plan.second_group.to_string(), "{4,5}");
        let maps: Vec<Vec<VertexId>> = (0..5).map(|k| one_based(a.map_set(k))).collect();
        assert_eq!(maps, vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8], vec![9, 10]]);
        let reduces: Vec<Vec<VertexId>> = (0..5).map(|k| one_based(a.reduce_set(k))).collect();
        assert_eq!(reduces, vec![vec![7, 8], vec![9, 10], vec![5, 6], vec![1, 2], vec![3, 4]]);
        let leftovers: Vec<VertexId> = (0..10).filter(|&v| plan.phase_of(v) == Phase::III).collect();
        assert_eq!(leftovers, vec![4, 5]);
        assert!(leftovers.iter().all(|&v| plan.first_group.contains(a.reducer_of(v))));
    }

    #[test]
    fn bipartite_rejects_load_above_group_size() {
        assert!(rb_allocate(150, 150, 6, 4).is_err());
        assert!(rb_allocate(10, 10, 1, 1).is_err());
    }

    #[test]
    fn bipartite_swaps_when_second_cluster_larger() {
        let (a, plan) = rb_allocate(4, 6, 5, 1).unwrap();
        assert!(plan.in_larger_cluster(9) && !plan.in_larger_cluster(0));
        for v in 4..10 {
            assert!(a.mapping_set(v).is_subset(plan.first_group));
        }
    }

    #[test]
    fn stratified_order_balances_blocks() {
        let order = stratified_order(100, 100);
        assert_eq!(&order[..4], &[0, 100, 1, 101]);
        let order = stratified_order(3, 1);
        assert_eq!(order, vec![0, 1, 2, 3]);
        let mut sorted = stratified_order(37, 80);
        sorted.sort_unstable();
        assert_eq!(sorted, (0..117).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn batch_allocation_invariants(workers in 1usize..=8, load_seed in 0usize..8, n in 1usize..200) {
            let load = load_seed % workers + 1;
            let a = er_allocate(n, workers, load).unwrap();
            let v = a.vertex_count();
            a.check_balanced().unwrap();
            prop_assert_eq!(a.computation_load(), Ratio::from_integer(load));
            prop_assert_eq!(a.uniform_multiplicity(), Some(load));
            let profile = a.multiplicity_profile();
            prop_assert_eq!(profile.vertices(), v);
            prop_assert_eq!(profile.weighted_total(), load * v);
            prop_assert_eq!(profile.get(load), v);

            // every pair of Map sets shares g * C(K-2, r-2) vertices
            let g = v / binomial(workers, load);
            let expected = if load >= 2 { g * binomial(workers - 2, load - 2) } else { 0 };
            for j in 0..workers {
                for k in j + 1..workers {
                    let common = a.map_set(j).iter().filter(|x| a.map_set(k).binary_search(x).is_ok()).count();
                    prop_assert_eq!(common, expected);
                }
            }
        }

        #[test]
        fn bipartite_groups_map_their_own_cluster(n1 in 1usize..60, n2 in 1usize..60, workers in 2usize..=8, load in 1usize..=3) {
            if let Ok((a, plan)) = rb_allocate(n1, n2, workers, load) {
                let profile = a.multiplicity_profile();
                prop_assert_eq!(profile.weighted_total(), load * a.vertex_count());
                let mut seen = 0;
                for k in 0..workers {
                    seen += a.reduce_set(k).len();
                    for &v in a.map_set(k) {
                        let group = if plan.in_larger_cluster(v) { plan.first_group } else { plan.second_group };
                        prop_assert!(group.contains(k));
                    }
                }
                prop_assert_eq!(seen, a.vertex_count());
            }
        }
    }
}

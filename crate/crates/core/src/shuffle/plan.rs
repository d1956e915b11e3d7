//! Shuffle plans: a sequence of passes, each coded or uncoded over a subset of records, and
//! their exact load accounting.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::{Allocation, Phase, PhasePlan};
use crate::error::{Error, Result};
use crate::graphs::{Graph, VertexId};
use crate::workers::WorkerSet;

use super::segment::VALUE_BITS;
use super::uncoded::uncoded_plan;
use super::zset::z_set_unchecked;
use super::{coded_groups, coded_load_parameter, Filter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Coded,
    Uncoded,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Coded => "coded",
            Mode::Uncoded => "uncoded",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coded" => Ok(Mode::Coded),
            "uncoded" => Ok(Mode::Uncoded),
            other => Err(Error::param(format!("unknown mode `{other}` (coded|uncoded)"))),
        }
    }
}

type SharedFilter = Arc<dyn Fn(VertexId, VertexId) -> bool + Send + Sync>;

/// One shuffle pass over the records `(reducer, mapper)` accepted by its filter.
#[derive(Clone)]
pub struct Pass {
    pub label: String,
    pub mode: Mode,
    filter: SharedFilter,
}

impl fmt::Debug for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pass").field("label", &self.label).field("mode", &self.mode).finish()
    }
}

impl Pass {
    pub fn new(
        label: impl Into<String>,
        mode: Mode,
        filter: impl Fn(VertexId, VertexId) -> bool + Send + Sync + 'static,
    ) -> Self {
        Pass {
            label: label.into(),
            mode,
            filter: Arc::new(filter),
        }
    }

    pub fn filter(&self) -> Filter<'_> {
        &*self.filter
    }
}

/// Passes whose filters partition the records.
#[derive(Debug, Clone)]
pub struct ShufflePlan {
    pub passes: Vec<Pass>,
}

impl ShufflePlan {
    /// A single pass over every record.
    pub fn single(mode: Mode) -> Self {
        ShufflePlan {
            passes: vec![Pass::new("all", mode, |_, _| true)],
        }
    }

    /// The same passes with every pass forced to `mode` when `mode` is uncoded.
    pub fn with_mode(mut self, mode: Mode) -> Self {
        if mode == Mode::Uncoded {
            for p in &mut self.passes {
                p.mode = Mode::Uncoded;
            }
        }
        self
    }
}

/// Bipartite three-phase plan: coded passes for phases I and II, uncoded for phase III.
pub fn rb_plan(phases: &PhasePlan) -> ShufflePlan {
    let phases = Arc::new(phases.clone());
    let pass = |label: &str, mode, phase| {
        let phases = Arc::clone(&phases);
        Pass::new(label, mode, move |i, _| phases.phase_of(i) == phase)
    };
    ShufflePlan {
        passes: vec![
            pass("phase I", Mode::Coded, Phase::I),
            pass("phase II", Mode::Coded, Phase::II),
            pass("phase III", Mode::Uncoded, Phase::III),
        ],
    }
}

/// Two-block plan for clusters `0..n1` and the rest: intra-first, intra-second and cross
/// components, each shuffled with its own coded pass.
pub fn sbm_plan(n1: usize) -> ShufflePlan {
    ShufflePlan {
        passes: vec![
            Pass::new("intra 1", Mode::Coded, move |i, j| i < n1 && j < n1),
            Pass::new("intra 2", Mode::Coded, move |i, j| i >= n1 && j >= n1),
            Pass::new("cross", Mode::Coded, move |i, j| (i < n1) != (j < n1)),
        ],
    }
}

/// Exact traffic of one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PassLoad {
    pub label: String,
    pub mode: Mode,
    /// Records delivered (each needed `(i, j)` once).
    pub records: u64,
    /// Multicasts (coded) or unicasts (uncoded).
    pub messages: u64,
    /// Bits transmitted by each worker.
    pub worker_bits: Vec<Ratio<u64>>,
}

impl PassLoad {
    pub fn bits(&self) -> Ratio<u64> {
        self.worker_bits.iter().copied().sum()
    }
}

/// Message count per group member and Z-set sizes of a coded group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTally {
    pub group: WorkerSet,
    /// `(worker, |Z^worker|)` ascending by worker.
    pub z_sizes: Vec<(usize, usize)>,
}

impl GroupTally {
    /// Messages sent by `s`: the longest Z-set among the other members.
    pub fn messages_from(&self, s: usize) -> usize {
        self.z_sizes.iter().filter(|&&(k, _)| k != s).map(|&(_, z)| z).max().unwrap_or(0)
    }

    pub fn records(&self) -> usize {
        self.z_sizes.iter().map(|&(_, z)| z).sum()
    }

    /// Coded bits never exceed the bits of unicasting every Z-set.
    pub fn check_dominance(&self, r: usize) -> Result<()> {
        let coded: usize = self.z_sizes.iter().map(|&(s, _)| self.messages_from(s)).sum();
        if coded > r * self.records() {
            return Err(Error::consistency(format!(
                "group {} sends {coded}/{r} values for {} records",
                self.group,
                self.records()
            )));
        }
        Ok(())
    }
}

pub fn group_tally(alloc: &Allocation, graph: &Graph, group: WorkerSet, filter: Filter<'_>) -> GroupTally {
    GroupTally {
        group,
        z_sizes: group.iter().map(|k| (k, z_set_unchecked(alloc, graph, group, k, filter).len())).collect(),
    }
}

/// Load of a pass computed from Z-set sizes alone, without running any program.
pub fn pass_load(alloc: &Allocation, graph: &Graph, pass: &Pass) -> Result<PassLoad> {
    super::check_compatible(alloc, graph)?;
    let mut worker_bits = vec![Ratio::from_integer(0); alloc.workers()];
    let (mut records, mut messages) = (0u64, 0u64);
    match pass.mode {
        Mode::Uncoded => {
            for u in uncoded_plan(alloc, graph, pass.filter()) {
                worker_bits[u.source] += Ratio::from_integer(VALUE_BITS as u64);
                records += 1;
                messages += 1;
            }
        }
        Mode::Coded => {
            let r = coded_load_parameter(alloc)?;
            let tallies: Vec<GroupTally> = coded_groups(alloc)?
                .par_iter()
                .map(|&s| group_tally(alloc, graph, s, pass.filter()))
                .collect();
            let per_message = Ratio::new(VALUE_BITS as u64, r as u64);
            for t in &tallies {
                t.check_dominance(r)?;
                for s in t.group.iter() {
                    let q = t.messages_from(s) as u64;
                    worker_bits[s] += per_message * q;
                    messages += q;
                }
                records += t.records() as u64;
            }
        }
    }
    Ok(PassLoad {
        label: pass.label.clone(),
        mode: pass.mode,
        records,
        messages,
        worker_bits,
    })
}

pub fn plan_load(alloc: &Allocation, graph: &Graph, plan: &ShufflePlan) -> Result<Vec<PassLoad>> {
    plan.passes.iter().map(|p| pass_load(alloc, graph, p)).collect()
}

/// `bits / (n^2 T)` for `n` real vertices.
pub fn normalized_load(bits: Ratio<u64>, vertices: usize) -> Ratio<u64> {
    let n = vertices.max(1) as u64;
    bits / Ratio::from_integer(n * n * VALUE_BITS as u64)
}

/// Formats a normalized load over the `n^2` denominator, e.g. `3/36`, or `0`.
pub fn format_load(load: Ratio<u64>, vertices: usize) -> String {
    let n2 = (vertices.max(1) as u64).pow(2);
    if *load.numer() == 0 {
        return "0".to_string();
    }
    let scaled = load * Ratio::from_integer(n2);
    if scaled.is_integer() {
        format!("{}/{n2}", scaled.to_integer())
    } else {
        format!("{}/{}", scaled.numer(), scaled.denom() * n2)
    }
}

/// `numer / denom` as a float.
pub fn ratio_to_f64(x: Ratio<u64>) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_formatting() {
        assert_eq!(format_load(Ratio::new(1, 12), 6), "3/36");
        assert_eq!(format_load(Ratio::new(1, 6), 6), "6/36");
        assert_eq!(format_load(Ratio::from_integer(0), 6), "0");
        assert_eq!(format_load(Ratio::new(1, 108), 6), "1/108");
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("coded".parse::<Mode>().unwrap(), Mode::Coded);
        assert!("both".parse::<Mode>().is_err());
    }
}

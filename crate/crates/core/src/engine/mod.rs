//! In-process execution of Map, Shuffle and Reduce over `K` logical workers.
//!
//! Each worker only touches the Map outputs it computed and the segments delivered to it.
//! Traffic is tallied on a shared bus: `T / r` bits per coded multicast, `T` bits per unicast.

mod report;
mod sweep;

pub use report::LoadReport;
pub use sweep::{measure_loads, measure_sweep, SweepConfig, SweepRow};

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::allocation::{er_allocate, rb_allocate, sbm_allocate, Allocation};
use crate::error::{Error, Result};
use crate::graphs::{Graph, GraphModel, VertexId};
use crate::programs::{MapInput, VertexProgram};
use crate::shuffle::{
    coded_groups, decode_group, encode_group, group_tally, rb_plan, reassemble, sbm_plan, uncoded_plan, CodedMessage,
    Mode, Pass, PassLoad, RecordKey, Segment, ShufflePlan, VALUE_BITS,
};

/// Which allocation and shuffle plan a job uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanVariant {
    /// Batch allocation, one pass over every record.
    Er,
    /// Two server groups with three phases.
    Rb,
    /// Batch allocation over an interleaved layout, one coded pass per edge component.
    Sbm,
}

impl PlanVariant {
    /// The natural variant for a graph's generating model.
    pub fn for_graph(graph: &Graph) -> Self {
        match graph.meta().model {
            GraphModel::Rb { .. } => PlanVariant::Rb,
            GraphModel::Sbm { .. } => PlanVariant::Sbm,
            _ => PlanVariant::Er,
        }
    }
}

impl std::str::FromStr for PlanVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(PlanVariant::Er),
            "rb" => Ok(PlanVariant::Rb),
            "sbm" => Ok(PlanVariant::Sbm),
            other => Err(Error::param(format!("unknown plan `{other}` (er|rb|sbm)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub mode: Mode,
    pub workers: usize,
    pub load: usize,
    pub plan: PlanVariant,
    pub iterations: usize,
    /// Stop before `iterations` once a round leaves every state unchanged.
    pub stop_when_stable: bool,
}

/// Builds the allocation and plan a configuration asks for.
pub fn prepare(graph: &Graph, config: &JobConfig) -> Result<(Allocation, ShufflePlan)> {
    let n = graph.vertex_count();
    let clusters = || {
        graph
            .clusters()
            .ok_or_else(|| Error::param("this plan needs a graph generated from a two-cluster model"))
    };
    let (alloc, plan) = match config.plan {
        PlanVariant::Er => (er_allocate(n, config.workers, config.load)?, ShufflePlan::single(Mode::Coded)),
        PlanVariant::Rb => {
            let (n1, n2) = clusters()?;
            let (alloc, phases) = rb_allocate(n1, n2, config.workers, config.load)?;
            (alloc, rb_plan(&phases))
        }
        PlanVariant::Sbm => {
            let (n1, n2) = clusters()?;
            (sbm_allocate(n1, n2, config.workers, config.load)?, sbm_plan(n1))
        }
    };
    Ok((alloc, plan.with_mode(config.mode)))
}

struct Worker {
    id: usize,
    /// Map outputs by mapper, aligned with the mapper's adjacency list.
    outputs: HashMap<VertexId, Vec<f64>>,
    partial: HashMap<RecordKey, Vec<Segment>>,
    received: HashMap<RecordKey, f64>,
}

impl Worker {
    fn map(id: usize, alloc: &Allocation, graph: &Graph, program: &dyn VertexProgram, state: &[f64]) -> Self {
        let n = graph.vertex_count();
        let outputs = alloc
            .map_set(id)
            .iter()
            .filter(|&&j| j < n)
            .map(|&j| {
                let values = graph
                    .neighbors(j)
                    .iter()
                    .map(|&i| {
                        program.map(&MapInput {
                            mapper: j,
                            reducer: i,
                            state: state[j],
                            mapper_degree: graph.degree(j),
                            weight: graph.weight(j, i).expect("adjacent"),
                        })
                    })
                    .collect();
                (j, values)
            })
            .collect();
        Worker {
            id,
            outputs,
            partial: HashMap::new(),
            received: HashMap::new(),
        }
    }

    fn map_evaluations(&self) -> u64 {
        self.outputs.values().map(|v| v.len() as u64).sum()
    }

    fn local(&self, graph: &Graph, (i, j): RecordKey) -> Option<f64> {
        let values = self.outputs.get(&j)?;
        let pos = graph.neighbors(j).binary_search(&i).ok()?;
        Some(values[pos])
    }

    fn local_bits(&self, graph: &Graph, key: RecordKey) -> Option<u64> {
        self.local(graph, key).map(f64::to_bits)
    }

    /// Turns complete segment sets into values.
    fn assemble(&mut self, parts: usize) -> Result<()> {
        for (key, segments) in self.partial.drain() {
            let bits = reassemble(&segments, parts).ok_or_else(|| {
                Error::consistency(format!(
                    "worker {} holds {} of {parts} segments of v({},{})",
                    self.id + 1,
                    segments.len(),
                    key.0 + 1,
                    key.1 + 1
                ))
            })?;
            if self.received.insert(key, f64::from_bits(bits)).is_some() {
                return Err(Error::consistency(format!("v({},{}) delivered twice", key.0 + 1, key.1 + 1)));
            }
        }
        Ok(())
    }

    fn reduce(
        &self,
        alloc: &Allocation,
        graph: &Graph,
        program: &dyn VertexProgram,
        state: &[f64],
    ) -> Result<Vec<(VertexId, f64)>> {
        let n = graph.vertex_count();
        alloc
            .reduce_set(self.id)
            .iter()
            .filter(|&&i| i < n)
            .map(|&i| {
                let values = graph
                    .neighbors(i)
                    .iter()
                    .map(|&j| {
                        let v = if alloc.maps(self.id, j) {
                            self.local(graph, (i, j))
                        } else {
                            self.received.get(&(i, j)).copied()
                        };
                        v.map(|v| (j, v)).ok_or_else(|| {
                            Error::consistency(format!(
                                "worker {} is missing v({},{}) after the Shuffle",
                                self.id + 1,
                                i + 1,
                                j + 1
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((i, program.reduce(i, &values, state[i])))
            })
            .collect()
    }
}

/// Tallies bits per sender and optionally keeps the wire form of every coded message.
struct Bus {
    pass: PassLoad,
    dump: Option<Vec<u8>>,
}

impl Bus {
    fn new(pass: &Pass, workers: usize, dump: bool) -> Self {
        Bus {
            pass: PassLoad {
                label: pass.label.clone(),
                mode: pass.mode,
                records: 0,
                messages: 0,
                worker_bits: vec![Ratio::from_integer(0); workers],
            },
            dump: dump.then(Vec::new),
        }
    }

    fn multicast(&mut self, msg: &CodedMessage, r: usize) {
        self.pass.worker_bits[msg.sender] += Ratio::new(VALUE_BITS as u64, r as u64);
        self.pass.messages += 1;
        if let Some(d) = &mut self.dump {
            d.extend_from_slice(&msg.to_bytes(r));
        }
    }

    fn unicast(&mut self, source: usize) {
        self.pass.worker_bits[source] += Ratio::from_integer(VALUE_BITS as u64);
        self.pass.messages += 1;
        self.pass.records += 1;
    }
}

/// Result of one group: messages per sender and segments per receiver.
struct GroupExchange {
    sent: Vec<Vec<CodedMessage>>,
    delivered: Vec<(usize, Vec<Segment>)>,
    records: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Keep the wire bytes of every coded message.
    pub dump_messages: bool,
}

#[derive(Debug, Clone)]
pub struct JobOutcome {
    /// New state of every real vertex.
    pub outputs: Vec<f64>,
    pub report: LoadReport,
    pub message_dump: Option<Vec<u8>>,
}

/// Runs one Map, Shuffle, Reduce round from `state` (one entry per real vertex).
pub fn run_job(
    graph: &Graph,
    alloc: &Allocation,
    program: &dyn VertexProgram,
    plan: &ShufflePlan,
    state: &[f64],
    options: &RunOptions,
) -> Result<JobOutcome> {
    let n = graph.vertex_count();
    if alloc.real_vertex_count() != n || state.len() != n {
        return Err(Error::param(format!(
            "graph has {n} vertices, allocation {} and state {}",
            alloc.real_vertex_count(),
            state.len()
        )));
    }
    let mut workers: Vec<Worker> = (0..alloc.workers())
        .into_par_iter()
        .map(|k| Worker::map(k, alloc, graph, program, state))
        .collect();

    let mut passes = Vec::with_capacity(plan.passes.len());
    let mut dump = options.dump_messages.then(Vec::new);
    let mut decoded = 0u64;
    let mut parts = 1;
    for pass in &plan.passes {
        let mut bus = Bus::new(pass, alloc.workers(), options.dump_messages);
        match pass.mode {
            Mode::Uncoded => {
                for u in uncoded_plan(alloc, graph, pass.filter()) {
                    let v = workers[u.source].local(graph, (u.reducer, u.mapper)).ok_or_else(|| {
                        Error::consistency(format!("worker {} cannot send v({},{})", u.source + 1, u.reducer + 1, u.mapper + 1))
                    })?;
                    bus.unicast(u.source);
                    if workers[u.destination].received.insert((u.reducer, u.mapper), v).is_some() {
                        return Err(Error::consistency("record delivered twice"));
                    }
                }
            }
            Mode::Coded => {
                let r = alloc
                    .uniform_multiplicity()
                    .ok_or_else(|| Error::Usage("coded passes need a uniform Map multiplicity".into()))?;
                parts = r;
                let exchanges: Vec<GroupExchange> = coded_groups(alloc)?
                    .par_iter()
                    .map(|&group| exchange(alloc, graph, &workers, group, pass, r))
                    .collect::<Result<_>>()?;
                for ex in exchanges {
                    for msg in ex.sent.iter().flatten() {
                        bus.multicast(msg, r);
                    }
                    for (k, segments) in ex.delivered {
                        decoded += segments.len() as u64;
                        for s in segments {
                            workers[k].partial.entry((s.reducer, s.mapper)).or_default().push(s);
                        }
                    }
                    bus.pass.records += ex.records as u64;
                }
            }
        }
        if let (Some(all), Some(d)) = (&mut dump, bus.dump.take()) {
            all.extend(d);
        }
        passes.push(bus.pass);
    }
    workers.par_iter_mut().try_for_each(|w| w.assemble(parts))?;

    let reduced: Vec<Vec<(VertexId, f64)>> = workers
        .par_iter()
        .map(|w| w.reduce(alloc, graph, program, state))
        .collect::<Result<_>>()?;
    let mut outputs = vec![f64::NAN; n];
    for (i, v) in reduced.into_iter().flatten() {
        outputs[i] = v;
    }

    let mut report = LoadReport::new(alloc, passes);
    report.map_evaluations = workers.iter().map(Worker::map_evaluations).sum();
    report.decoded_segments = decoded;
    Ok(JobOutcome {
        outputs,
        report,
        message_dump: dump,
    })
}

fn exchange(
    alloc: &Allocation,
    graph: &Graph,
    workers: &[Worker],
    group: crate::workers::WorkerSet,
    pass: &Pass,
    r: usize,
) -> Result<GroupExchange> {
    let tally = group_tally(alloc, graph, group, pass.filter());
    tally.check_dominance(r)?;
    let mut sent = Vec::with_capacity(group.len());
    let mut delivered = Vec::new();
    for s in group.iter() {
        let msgs = encode_group(alloc, graph, group, s, pass.filter(), |key| workers[s].local_bits(graph, key))?;
        if msgs.len() != tally.messages_from(s) {
            return Err(Error::consistency(format!(
                "sender {} in {group} emitted {} messages, expected {}",
                s + 1,
                msgs.len(),
                tally.messages_from(s)
            )));
        }
        for k in group.without(s).iter() {
            let segs = decode_group(alloc, graph, group, s, k, pass.filter(), &msgs, |key| {
                workers[k].local_bits(graph, key)
            })?;
            delivered.push((k, segs));
        }
        sent.push(msgs);
    }
    Ok(GroupExchange {
        sent,
        delivered,
        records: tally.records(),
    })
}

/// Bits needed to send every updated state to the other workers that Map it.
pub fn feedback_bits(alloc: &Allocation) -> u64 {
    (0..alloc.real_vertex_count())
        .map(|i| alloc.mapping_set(i).without(alloc.reducer_of(i)).len() as u64 * VALUE_BITS as u64)
        .sum()
}

#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub outputs: Vec<f64>,
    /// One report per executed round, each carrying its feedback bits.
    pub reports: Vec<LoadReport>,
}

/// Repeats [`run_job`], feeding every round's outputs into the next round's Map.
pub fn run_iterations(
    graph: &Graph,
    alloc: &Allocation,
    program: &dyn VertexProgram,
    plan: &ShufflePlan,
    config: &JobConfig,
) -> Result<IterationOutcome> {
    if config.iterations == 0 {
        return Err(Error::param("need at least one iteration"));
    }
    let feedback = feedback_bits(alloc);
    let mut state = program.initial_state(graph.vertex_count());
    let mut reports = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let outcome = run_job(graph, alloc, program, plan, &state, &RunOptions::default())?;
        let mut report = outcome.report;
        report.feedback_bits = feedback;
        reports.push(report);
        let stable = outcome.outputs == state;
        state = outcome.outputs;
        if config.stop_when_stable && stable {
            break;
        }
    }
    Ok(IterationOutcome { outputs: state, reports })
}

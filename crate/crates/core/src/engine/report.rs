use num_rational::Ratio;
use serde_json::{json, Value};

use crate::allocation::Allocation;
use crate::shuffle::{format_load, normalized_load, ratio_to_f64, Mode, PassLoad, VALUE_BITS};

/// Traffic and work counters of one Map/Shuffle/Reduce round.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub workers: usize,
    /// Real vertex count `n` used for normalization.
    pub vertices: usize,
    pub padded_vertices: usize,
    pub computation_load: Ratio<usize>,
    pub passes: Vec<PassLoad>,
    pub map_evaluations: u64,
    pub decoded_segments: u64,
    /// Bits spent sending updated states back to Mappers; not part of the normalized load.
    pub feedback_bits: u64,
}

impl LoadReport {
    pub fn new(alloc: &Allocation, passes: Vec<PassLoad>) -> Self {
        LoadReport {
            workers: alloc.workers(),
            vertices: alloc.real_vertex_count(),
            padded_vertices: alloc.vertex_count(),
            computation_load: alloc.computation_load(),
            passes,
            map_evaluations: 0,
            decoded_segments: 0,
            feedback_bits: 0,
        }
    }

    /// `c_k` for every worker.
    pub fn worker_bits(&self) -> Vec<Ratio<u64>> {
        let mut out = vec![Ratio::from_integer(0); self.workers];
        for p in &self.passes {
            for (acc, b) in out.iter_mut().zip(&p.worker_bits) {
                *acc += *b;
            }
        }
        out
    }

    pub fn total_bits(&self) -> Ratio<u64> {
        self.passes.iter().map(PassLoad::bits).sum()
    }

    pub fn messages(&self) -> u64 {
        self.passes.iter().map(|p| p.messages).sum()
    }

    pub fn records(&self) -> u64 {
        self.passes.iter().map(|p| p.records).sum()
    }

    /// Normalized load `sum_k c_k / (n^2 T)`.
    pub fn load(&self) -> Ratio<u64> {
        normalized_load(self.total_bits(), self.vertices)
    }

    pub fn load_f64(&self) -> f64 {
        ratio_to_f64(self.load())
    }

    /// Normalized load of the pass with this label.
    pub fn pass_load(&self, label: &str) -> Option<Ratio<u64>> {
        self.passes
            .iter()
            .find(|p| p.label == label)
            .map(|p| normalized_load(p.bits(), self.vertices))
    }

    /// The load written over `n^2`, e.g. `3/36`.
    pub fn display_load(&self) -> String {
        format_load(self.load(), self.vertices)
    }

    pub fn is_coded(&self) -> bool {
        self.passes.iter().any(|p| p.mode == Mode::Coded)
    }

    pub fn to_json(&self) -> Value {
        let passes: Vec<Value> = self
            .passes
            .iter()
            .map(|p| {
                let load = normalized_load(p.bits(), self.vertices);
                json!({
                    "label": p.label,
                    "mode": p.mode,
                    "records": p.records,
                    "messages": p.messages,
                    "bits": p.bits().to_string(),
                    "load": load.to_string(),
                    "load_decimal": ratio_to_f64(load),
                })
            })
            .collect();
        json!({
            "workers": self.workers,
            "vertices": self.vertices,
            "padded_vertices": self.padded_vertices,
            "computation_load": self.computation_load.to_string(),
            "value_bits": VALUE_BITS,
            "worker_bits": self.worker_bits().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "total_bits": self.total_bits().to_string(),
            "load": self.load().to_string(),
            "load_over_n2": self.display_load(),
            "load_decimal": self.load_f64(),
            "passes": passes,
            "map_evaluations": self.map_evaluations,
            "messages": self.messages(),
            "decoded_segments": self.decoded_segments,
            "feedback_bits": self.feedback_bits,
        })
    }
}

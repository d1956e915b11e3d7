use rayon::prelude::*;

use crate::allocation::{er_allocate, rb_allocate, sbm_allocate, Allocation};
use crate::analysis::{er_bounds, mean_stderr, pl_bounds, rb_bounds, sbm_bounds, BoundSet};
use crate::error::{Error, Result};
use crate::graphs::{Graph, GraphModelParams, Rho};
use crate::shuffle::{plan_load, rb_plan, sbm_plan, Mode, ShufflePlan};

use super::LoadReport;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub model: GraphModelParams,
    pub workers: usize,
    pub loads: Vec<usize>,
    pub seed_count: u64,
    pub first_seed: u64,
}

/// One CSV row: mean normalized load over seeds for one `(r, mode)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub load: usize,
    pub mode: Mode,
    pub model: &'static str,
    pub n: usize,
    /// `p` for ER and SBM, `q` for RB, `gamma` for PL.
    pub parameter: f64,
    pub workers: usize,
    pub seed_count: u64,
    pub mean: f64,
    pub stderr: f64,
    pub theory: f64,
    pub lower_bound: Option<f64>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "r,mode,model,n,p_or_q,K,seed_count,mean_L,stderr_L,theory_L,lower_bound_L";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.load,
            self.mode,
            self.model,
            self.n,
            self.parameter,
            self.workers,
            self.seed_count,
            self.mean,
            self.stderr,
            self.theory,
            self.lower_bound.map(|x| x.to_string()).unwrap_or_default()
        )
    }
}

fn allocate(model: &GraphModelParams, graph: &Graph, workers: usize, load: usize) -> Result<(Allocation, ShufflePlan)> {
    Ok(match *model {
        GraphModelParams::Er { n, .. } | GraphModelParams::Pl { n, .. } => {
            (er_allocate(n, workers, load)?, ShufflePlan::single(Mode::Coded))
        }
        GraphModelParams::Rb { n1, n2, .. } => {
            let (alloc, phases) = rb_allocate(n1, n2, workers, load)?;
            (alloc, rb_plan(&phases))
        }
        GraphModelParams::Sbm { n1, n2, .. } => {
            debug_assert_eq!(graph.clusters(), Some((n1, n2)));
            (sbm_allocate(n1, n2, workers, load)?, sbm_plan(n1))
        }
    })
}

/// Coded and uncoded load reports for one graph realization, from load accounting alone.
pub fn measure_loads(model: &GraphModelParams, workers: usize, load: usize, seed: u64) -> Result<(LoadReport, LoadReport)> {
    let graph = model.generate(seed)?;
    let (alloc, plan) = allocate(model, &graph, workers, load)?;
    let coded = LoadReport::new(&alloc, plan_load(&alloc, &graph, &plan)?);
    let uncoded = LoadReport::new(&alloc, plan_load(&alloc, &graph, &plan.with_mode(Mode::Uncoded))?);
    if coded.total_bits() > uncoded.total_bits() {
        return Err(Error::consistency(format!(
            "coded load {} exceeds uncoded load {} (seed {seed}, r = {load})",
            coded.display_load(),
            uncoded.display_load()
        )));
    }
    Ok((coded, uncoded))
}

fn bounds(model: &GraphModelParams, workers: usize, load: usize) -> Result<(BoundSet, f64)> {
    Ok(match *model {
        GraphModelParams::Er { p, .. } => (er_bounds(p, workers, load)?, p),
        GraphModelParams::Rb { q, .. } => (rb_bounds(q, workers, load)?, q),
        GraphModelParams::Sbm { n1, n2, p, q } => (sbm_bounds(n1, n2, p, q, workers, load)?, p),
        GraphModelParams::Pl { n, gamma, .. } => {
            let b = pl_bounds(gamma, workers, load)?;
            let scale = n as f64;
            (
                BoundSet {
                    uncoded: b.uncoded / scale,
                    coded_upper: b.coded_upper / scale,
                    lower: None,
                },
                gamma,
            )
        }
    })
}

/// Mean loads over seeds for every requested `r`, coded and uncoded rows alternating.
pub fn measure_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.seed_count == 0 {
        return Err(Error::param("need at least one seed"));
    }
    if let GraphModelParams::Pl { rho: Rho::Fixed(rho), .. } = config.model {
        if !(rho > 0.0) {
            return Err(Error::param("rho must be positive"));
        }
    }
    let mut rows = Vec::with_capacity(2 * config.loads.len());
    for &load in &config.loads {
        let (bound, parameter) = bounds(&config.model, config.workers, load)?;
        let samples: Vec<(f64, f64)> = (config.first_seed..config.first_seed + config.seed_count)
            .into_par_iter()
            .map(|seed| {
                let (c, u) = measure_loads(&config.model, config.workers, load, seed)?;
                Ok((c.load_f64(), u.load_f64()))
            })
            .collect::<Result<_>>()?;
        for mode in [Mode::Coded, Mode::Uncoded] {
            let xs: Vec<f64> = samples.iter().map(|&(c, u)| if mode == Mode::Coded { c } else { u }).collect();
            let (mean, stderr) = mean_stderr(&xs);
            rows.push(SweepRow {
                load,
                mode,
                model: config.model.name(),
                n: config.model.vertex_count(),
                parameter,
                workers: config.workers,
                seed_count: config.seed_count,
                mean,
                stderr,
                theory: if mode == Mode::Coded { bound.coded_upper } else { bound.uncoded },
                lower_bound: bound.lower,
            });
        }
    }
    Ok(rows)
}

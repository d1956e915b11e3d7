//! The acceptance checks, shared by the `acceptance` test target and the `verify` command.
//!
//! Each check returns a [`CheckOutcome`] with one line per sub-check. Thresholds are fixed here.

use std::fmt;
use std::time::{Duration, Instant};

use num_integer::binomial;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::allocation::{er_allocate, rb_allocate, MultiplicityProfile};
use crate::analysis::{
    allocation_lower_bound, expected_q_monte_carlo, max_z_size, mean_stderr, q_ratio_window, r_star, rb_bounds,
    sbm_bounds,
};
use crate::engine::{measure_loads, prepare, run_iterations, run_job, JobConfig, LoadReport, PlanVariant, RunOptions};
use crate::error::Result;
use crate::graphs::{gen_er, Graph, GraphModelParams, Rho};
use crate::programs::{reference_execute, reference_fixed_point, PageRank, ShortestPath, VertexProgram};
use crate::shuffle::{plan_load, rb_plan, sender_table, Mode, ShufflePlan};
use crate::workers::WorkerSet;

#[derive(Debug, Clone)]
pub struct SubCheck {
    pub passed: bool,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<SubCheck>,
    pub elapsed: Duration,
}

impl CheckOutcome {
    fn new(id: u32, title: &'static str) -> Self {
        CheckOutcome {
            id,
            title,
            checks: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn check(&mut self, passed: bool, text: impl Into<String>) {
        self.checks.push(SubCheck {
            passed,
            text: text.into(),
        });
    }

    fn error(&mut self, err: crate::Error) {
        self.check(false, format!("error: {err}"));
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn time_limit(&mut self, limit: Duration) {
        self.check(
            self.elapsed <= limit,
            format!("runtime {:.2}s (limit {}s)", self.elapsed.as_secs_f64(), limit.as_secs()),
        );
    }
}

impl fmt::Display for CheckOutcome {
    /// First line is the verdict; sub-checks follow, indented.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] criterion {}: {}", self.id, self.title)?;
        for c in &self.checks {
            write!(f, "\n    {} {}", if c.passed { "ok  " } else { "FAIL" }, c.text)?;
        }
        Ok(())
    }
}

/// Coded-versus-uncoded comparisons made while the other checks run.
#[derive(Debug, Default)]
pub struct DominanceLog {
    pub realizations: u64,
    pub violations: Vec<String>,
}

impl DominanceLog {
    fn observe(&mut self, label: &str, coded: &LoadReport, uncoded: &LoadReport) {
        self.realizations += 1;
        if coded.total_bits() > uncoded.total_bits() {
            self.violations.push(format!(
                "{label}: coded {} > uncoded {}",
                coded.display_load(),
                uncoded.display_load()
            ));
        }
    }
}

fn timed(id: u32, title: &'static str, body: impl FnOnce(&mut CheckOutcome) -> Result<()>) -> CheckOutcome {
    let mut out = CheckOutcome::new(id, title);
    let start = Instant::now();
    if let Err(e) = body(&mut out) {
        out.error(e);
    }
    out.elapsed = start.elapsed();
    out
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y || (x - y).abs() <= tol * y.abs())
}

/// Coded PageRank (one round) and SSSP (to a fixed point) against the reference executor.
fn programs_match(graph: &Graph, config: &JobConfig, source: usize) -> Result<(bool, bool)> {
    let n = graph.vertex_count();
    let pr = PageRank { damping: 0.15, vertices: n };
    let (alloc, plan) = prepare(graph, config)?;
    let coded = run_job(graph, &alloc, &pr, &plan, &pr.initial_state(n), &RunOptions::default())?;
    let pagerank_ok = rel_close(&coded.outputs, &reference_execute(graph, &pr, &pr.initial_state(n), 1), 1e-12);

    let sp = ShortestPath { source };
    let (fixed, _) = reference_fixed_point(graph, &sp, &sp.initial_state(n), n + 1);
    let cfg = JobConfig {
        iterations: n + 1,
        stop_when_stable: true,
        ..config.clone()
    };
    let out = run_iterations(graph, &alloc, &sp, &plan, &cfg)?;
    Ok((pagerank_ok, out.outputs == fixed))
}

fn coded_config(workers: usize, load: usize, plan: PlanVariant) -> JobConfig {
    JobConfig {
        mode: Mode::Coded,
        workers,
        load,
        plan,
        iterations: 1,
        stop_when_stable: false,
    }
}

/// 1: six-vertex instance, exact loads and message composition.
pub fn worked_example() -> CheckOutcome {
    timed(1, "six-vertex example: exact loads and message sets", |out| {
        let g = Graph::from_edges(6, [(0, 4), (1, 5), (2, 3)])?;
        let alloc = er_allocate(6, 3, 2)?;
        let pr = PageRank { damping: 0.15, vertices: 6 };
        let init = pr.initial_state(6);
        for (mode, want) in [(Mode::Uncoded, "6/36"), (Mode::Coded, "3/36")] {
            let run = run_job(&g, &alloc, &pr, &ShufflePlan::single(mode), &init, &RunOptions::default())?;
            let got = run.report.display_load();
            out.check(got == want, format!("{mode} L = {got} (want {want})"));
        }
        // (i, j, segment), 1-based, per column
        let expected: [[[(usize, usize, usize); 2]; 2]; 3] = [
            [[(5, 1, 1), (4, 3, 1)], [(3, 4, 1), (6, 2, 1)]],
            [[(5, 1, 2), (1, 5, 1)], [(6, 2, 2), (2, 6, 1)]],
            [[(4, 3, 2), (1, 5, 2)], [(3, 4, 2), (2, 6, 2)]],
        ];
        let group = WorkerSet::first(3);
        for (sender, want) in expected.iter().enumerate() {
            let table = sender_table(&alloc, &g, group, sender, &crate::shuffle::all_records)?;
            let mut got: Vec<Vec<(usize, usize, usize)>> = (0..table.width())
                .map(|c| {
                    let mut col: Vec<_> = table.column(c).into_iter().map(|((i, j), t)| (i + 1, j + 1, t + 1)).collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            let mut want: Vec<Vec<_>> = want.iter().map(|c| c.to_vec()).collect();
            want.iter_mut().for_each(|c| c.sort_unstable());
            got.iter_mut().for_each(|c| c.sort_unstable());
            out.check(got == want, format!("sender {} columns {:?}", sender + 1, got));
        }
        Ok(())
    })
    .with_limit(Duration::from_secs(1))
}

impl CheckOutcome {
    fn with_limit(mut self, limit: Duration) -> Self {
        self.time_limit(limit);
        self
    }
}

/// 2: coded pipeline equals the reference executor on 100 random ER instances.
pub fn decode_correctness(log: &mut DominanceLog) -> CheckOutcome {
    timed(2, "coded pipeline equals the reference on 100 ER instances", |out| {
        let instances: Vec<(u64, usize, f64, usize, usize)> = (0..100u64)
            .map(|t| {
                let n = [30, 60][t as usize % 2];
                let p = [0.1, 0.3][(t as usize / 2) % 2];
                let workers = 3 + (t as usize / 4) % 3;
                let load = 1 + (t as usize / 12) % workers;
                (t, n, p, workers, load)
            })
            .collect();
        let results: Vec<(bool, bool, LoadReport, LoadReport)> = instances
            .par_iter()
            .map(|&(seed, n, p, workers, load)| {
                let g = gen_er(n, p, seed)?.with_random_weights(seed);
                let cfg = coded_config(workers, load, PlanVariant::Er);
                let (pr_ok, sp_ok) = programs_match(&g, &cfg, seed as usize % n)?;
                let (alloc, plan) = prepare(&g, &cfg)?;
                let coded = LoadReport::new(&alloc, plan_load(&alloc, &g, &plan)?);
                let uncoded = LoadReport::new(&alloc, plan_load(&alloc, &g, &plan.with_mode(Mode::Uncoded))?);
                Ok((pr_ok, sp_ok, coded, uncoded))
            })
            .collect::<Result<_>>()?;
        let pr_ok = results.iter().filter(|r| r.0).count();
        let sp_ok = results.iter().filter(|r| r.1).count();
        for (i, r) in results.iter().enumerate() {
            log.observe(&format!("decode instance {i}"), &r.2, &r.3);
        }
        out.check(pr_ok == 100, format!("PageRank within 1e-12 on {pr_ok}/100"));
        out.check(sp_ok == 100, format!("SSSP fixed point exact on {sp_ok}/100"));
        Ok(())
    })
    .with_limit(Duration::from_secs(60))
}

/// Per-`r` means over seeds of ER(300, 0.1) with K = 5.
#[derive(Debug, Clone)]
pub struct ErSweep {
    pub load: usize,
    pub coded_mean: f64,
    pub coded_stderr: f64,
    pub uncoded_mean: f64,
}

/// 3: scaled sweep of ER(300, 0.1), K = 5, 100 seeds, r = 1..4.
pub fn er_sweep(log: &mut DominanceLog) -> (CheckOutcome, Vec<ErSweep>) {
    let mut sweep = Vec::new();
    let out = timed(3, "ER(300, 0.1), K = 5, 100 seeds: load sweep", |out| {
        let (n, p, workers) = (300, 0.1, 5);
        let model = GraphModelParams::Er { n, p };
        for load in 1..=4 {
            let runs: Vec<(LoadReport, LoadReport)> =
                (0..100u64).into_par_iter().map(|s| measure_loads(&model, workers, load, s)).collect::<Result<_>>()?;
            for (s, (c, u)) in runs.iter().enumerate() {
                log.observe(&format!("ER sweep r={load} seed {s}"), c, u);
            }
            let coded: Vec<f64> = runs.iter().map(|r| r.0.load_f64()).collect();
            let uncoded: Vec<f64> = runs.iter().map(|r| r.1.load_f64()).collect();
            let (cm, cs) = mean_stderr(&coded);
            let (um, _) = mean_stderr(&uncoded);

            let target = p * (1.0 - load as f64 / workers as f64);
            let dev = (um - target).abs() / target;
            out.check(dev <= 0.02, format!("r={load} uncoded mean {um:.6} vs {target:.6} (rel. dev {:.4} <= 0.02)", dev));

            let lo = target / load as f64;
            let g_tilde = (n * n) as f64 / (workers as f64 * binomial(workers, load) as f64);
            let hi = lo * (1.0 + 3.0 * ((load as f64).ln() / (g_tilde * p)).sqrt());
            out.check(
                cm >= lo && cm <= hi,
                format!("r={load} coded mean {cm:.6} in [{lo:.6}, {hi:.6}]"),
            );
            if load >= 2 {
                let gain = um / cm;
                out.check(gain >= 0.9 * load as f64, format!("r={load} gain {gain:.3} >= {:.1}", 0.9 * load as f64));
            }
            sweep.push(ErSweep {
                load,
                coded_mean: cm,
                coded_stderr: cs,
                uncoded_mean: um,
            });
        }
        Ok(())
    })
    .with_limit(Duration::from_secs(600));
    (out, sweep)
}

/// 4: empirical mean message count against `p g`.
pub fn message_count_ratio() -> CheckOutcome {
    timed(4, "mean message count vs p*g at n = 150, 300, 600", |out| {
        let (p, workers, load, trials) = (0.1, 5, 2, 300);
        let mut gaps = Vec::new();
        for n in [150, 300, 600] {
            let est = expected_q_monte_carlo(n, p, workers, load, trials, 0)?;
            let lo = 1.0 - 3.0 * est.ratio_stderr;
            let hi = q_ratio_window(n, p, workers, load);
            out.check(
                est.ratio >= lo && est.ratio <= hi,
                format!("n={n}: ratio {:.4} in [{lo:.4}, {hi:.4}] (g = {})", est.ratio, max_z_size(n, workers, load)),
            );
            gaps.push((est.ratio - 1.0).abs());
        }
        out.check(
            gaps.windows(2).all(|w| w[1] < w[0]),
            format!("|ratio - 1| shrinks with n: {gaps:.4?}"),
        );
        Ok(())
    })
}

/// 5: the allocation lower bound at the batch profile, and measured loads above it.
pub fn lower_bound_consistency(sweep: &[ErSweep]) -> CheckOutcome {
    timed(5, "lower bound: closed form and measured loads", |out| {
        let p = 0.1;
        let n = 840;
        let mut worst = 0.0f64;
        for workers in 1..=8 {
            for load in 1..=workers {
                let mut counts = vec![0; workers];
                counts[load - 1] = n;
                let v = allocation_lower_bound(&MultiplicityProfile { counts }, p, workers, n)?;
                let closed = p * (1.0 - load as f64 / workers as f64) / load as f64;
                worst = worst.max((v - closed).abs());
            }
        }
        out.check(worst <= 4.0 * f64::EPSILON * p, format!("max |bound - (1/r)p(1-r/K)| = {worst:e}"));
        out.check(!sweep.is_empty(), format!("{} sweep rows available", sweep.len()));
        for row in sweep {
            let bound = p * (1.0 - row.load as f64 / 5.0) / row.load as f64;
            let floor = bound - 3.0 * row.coded_stderr;
            out.check(
                row.coded_mean >= floor,
                format!("r={} coded mean {:.6} >= {floor:.6}", row.load, row.coded_mean),
            );
        }
        Ok(())
    })
}

/// 6: bipartite scheme on RB(150, 150, 0.1), K = 6.
pub fn bipartite_scheme(log: &mut DominanceLog) -> CheckOutcome {
    timed(6, "RB(150, 150, 0.1), K = 6, 100 seeds: three-phase scheme", |out| {
        let (n1, n2, q, workers) = (150, 150, 0.1, 6);
        let model = GraphModelParams::Rb { n1, n2, q };
        for load in 1..=2 {
            let (alloc, phases) = rb_allocate(n1, n2, workers, load)?;
            let plan = rb_plan(&phases);
            let runs: Vec<(LoadReport, LoadReport)> = (0..100u64)
                .into_par_iter()
                .map(|s| {
                    let g = model.generate(s)?;
                    Ok((
                        LoadReport::new(&alloc, plan_load(&alloc, &g, &plan)?),
                        LoadReport::new(&alloc, plan_load(&alloc, &g, &plan.clone().with_mode(Mode::Uncoded))?),
                    ))
                })
                .collect::<Result<_>>()?;
            for (s, (c, u)) in runs.iter().enumerate() {
                log.observe(&format!("RB r={load} seed {s}"), c, u);
            }
            let (mean, _) = mean_stderr(&runs.iter().map(|r| r.0.load_f64()).collect::<Vec<_>>());
            let target = rb_bounds(q, workers, load)?.coded_upper;
            let dev = (mean - target).abs() / target;
            out.check(dev <= 0.15, format!("r={load} coded mean {mean:.6} vs {target:.6} (rel. dev {dev:.4} <= 0.15)"));
            let phase3 = runs.iter().filter(|r| r.0.pass_load("phase III") != Some(Ratio::from_integer(0))).count();
            out.check(phase3 == 0, format!("r={load} phase III load nonzero on {phase3}/100 seeds"));

            let mut matched = 0;
            for s in 0..5u64 {
                let g = model.generate(s)?.with_random_weights(s);
                let (pr, sp) = programs_match(&g, &coded_config(workers, load, PlanVariant::Rb), s as usize)?;
                matched += usize::from(pr && sp);
            }
            out.check(matched == 5, format!("r={load} PageRank and SSSP equal the reference on {matched}/5 graphs"));
        }
        Ok(())
    })
}

/// 7: two-block scheme on SBM(100, 100, 0.2, 0.05), K = 6, r = 2.
pub fn block_scheme(log: &mut DominanceLog) -> CheckOutcome {
    timed(7, "SBM(100, 100, 0.2, 0.05), K = 6, r = 2, 100 seeds: component scheme", |out| {
        let (n1, n2, p, q, workers, load) = (100, 100, 0.2, 0.05, 6, 2);
        let model = GraphModelParams::Sbm { n1, n2, p, q };
        let runs: Vec<(LoadReport, LoadReport)> =
            (0..100u64).into_par_iter().map(|s| measure_loads(&model, workers, load, s)).collect::<Result<_>>()?;
        for (s, (c, u)) in runs.iter().enumerate() {
            log.observe(&format!("SBM seed {s}"), c, u);
        }
        let exact = runs.iter().all(|(c, _)| {
            let parts: Ratio<u64> = c.passes.iter().map(|p| crate::shuffle::normalized_load(p.bits(), c.vertices)).sum();
            parts == c.load()
        });
        out.check(exact, "component loads sum exactly to the total on every seed");
        let (mean, se) = mean_stderr(&runs.iter().map(|r| r.0.load_f64()).collect::<Vec<_>>());
        let bounds = sbm_bounds(n1, n2, p, q, workers, load)?;
        let cap = bounds.coded_upper * 1.15;
        out.check(mean <= cap, format!("upper: coded mean {mean:.6} <= 1.15 x upper {:.6} = {cap:.6}", bounds.coded_upper));
        let floor = bounds.lower.expect("block model has a converse") - 3.0 * se;
        out.check(mean >= floor, format!("coded mean {mean:.6} >= converse - 3 se = {floor:.6}"));

        let g = model.generate(0)?.with_random_weights(0);
        let (pr, sp) = programs_match(&g, &coded_config(workers, load, PlanVariant::Sbm), 0)?;
        out.check(pr && sp, "PageRank and SSSP equal the reference on seed 0");
        Ok(())
    })
}

/// 8: power-law graphs under the batch allocation.
pub fn power_law_scheme(log: &mut DominanceLog) -> CheckOutcome {
    timed(8, "PL(2000, 2.5, auto rho), K = 5, 50 seeds: coding gain", |out| {
        let model = GraphModelParams::Pl {
            n: 2000,
            gamma: 2.5,
            rho: Rho::Auto,
        };
        let workers = 5;
        for load in [2, 3] {
            let runs: Vec<(LoadReport, LoadReport)> =
                (0..50u64).into_par_iter().map(|s| measure_loads(&model, workers, load, s)).collect::<Result<_>>()?;
            for (s, (c, u)) in runs.iter().enumerate() {
                log.observe(&format!("PL r={load} seed {s}"), c, u);
            }
            let (cm, _) = mean_stderr(&runs.iter().map(|r| r.0.load_f64()).collect::<Vec<_>>());
            let (um, _) = mean_stderr(&runs.iter().map(|r| r.1.load_f64()).collect::<Vec<_>>());
            let gain = um / cm;
            let dev = (gain - load as f64).abs() / load as f64;
            out.check(dev <= 0.2, format!("r={load} gain {gain:.3} vs {load} (rel. dev {dev:.3} <= 0.2)"));

            let g = model.generate(0)?;
            let pr = PageRank { damping: 0.15, vertices: 2000 };
            let cfg = coded_config(workers, load, PlanVariant::Er);
            let (alloc, plan) = prepare(&g, &cfg)?;
            let run = run_job(&g, &alloc, &pr, &plan, &pr.initial_state(2000), &RunOptions::default())?;
            let ok = rel_close(&run.outputs, &reference_execute(&g, &pr, &pr.initial_state(2000), 1), 1e-12);
            out.check(ok, format!("r={load} PageRank equals the reference on seed 0"));
        }
        Ok(())
    })
}

/// 9: no realization seen by checks 2 to 8 had coded load above uncoded load.
pub fn dominance(log: &DominanceLog) -> CheckOutcome {
    timed(9, "coded load never exceeds uncoded load", |out| {
        out.check(log.realizations > 0, format!("{} realizations compared", log.realizations));
        out.check(
            log.violations.is_empty(),
            format!("{} violations {:?}", log.violations.len(), log.violations.iter().take(3).collect::<Vec<_>>()),
        );
        Ok(())
    })
}

/// 10: the computation-load heuristic at the measured timings.
pub fn r_star_value() -> CheckOutcome {
    timed(10, "r* from Map and Shuffle timings", |out| {
        let v = r_star(1.649, 43.78)?;
        out.check((v - 5.15).abs() <= 0.005, format!("r*(1.649, 43.78) = {v:.4} (want 5.15 +- 0.005)"));
        Ok(())
    })
}

/// Runs every check in order.
pub fn run_all() -> Vec<CheckOutcome> {
    let mut log = DominanceLog::default();
    let mut out = vec![worked_example(), decode_correctness(&mut log)];
    let (sweep_check, sweep) = er_sweep(&mut log);
    out.push(sweep_check);
    out.push(message_count_ratio());
    out.push(lower_bound_consistency(&sweep));
    out.push(bipartite_scheme(&mut log));
    out.push(block_scheme(&mut log));
    out.push(power_law_scheme(&mut log));
    out.push(dominance(&log));
    out.push(r_star_value());
    out
}

use coded_shuffle::allocation::{er_allocate, rb_allocate, sbm_allocate};
use coded_shuffle::engine::{
    feedback_bits, measure_loads, measure_sweep, prepare, run_iterations, run_job, JobConfig, PlanVariant, RunOptions,
    SweepConfig,
};
use coded_shuffle::graphs::{gen_er, gen_rb, gen_sbm, GraphModelParams, Rho};
use coded_shuffle::programs::{reference_execute, reference_fixed_point, PageRank, ShortestPath, VertexProgram};
use coded_shuffle::shuffle::{
    plan_load, rb_plan, sbm_plan, CodedMessage, Mode, ShufflePlan, MESSAGE_HEADER_BYTES,
};
use num_rational::Ratio;

fn config(mode: Mode, workers: usize, load: usize, iterations: usize) -> JobConfig {
    JobConfig {
        mode,
        workers,
        load,
        plan: PlanVariant::Er,
        iterations,
        stop_when_stable: false,
    }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x == y || (x - y).abs() <= 1e-12 * y.abs())
}

#[test]
fn pagerank_five_iterations_matches_oracle() {
    let g = gen_er(60, 0.2, 4).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 60 };
    let oracle = reference_execute(&g, &pr, &pr.initial_state(60), 5);
    for mode in [Mode::Coded, Mode::Uncoded] {
        let cfg = config(mode, 3, 2, 5);
        let (a, plan) = prepare(&g, &cfg).unwrap();
        let out = run_iterations(&g, &a, &pr, &plan, &cfg).unwrap();
        assert_eq!(out.reports.len(), 5);
        assert!(close(&out.outputs, &oracle));
        assert_eq!(out.outputs, oracle);
    }
}

#[test]
fn coded_and_uncoded_agree_bit_for_bit_with_padding() {
    // 50 is not a multiple of lcm(4, 6), so virtual vertices are added
    let g = gen_er(50, 0.3, 8).unwrap().with_random_weights(2);
    let a = er_allocate(50, 4, 2).unwrap();
    assert!(a.vertex_count() > 50);
    let sp = ShortestPath { source: 3 };
    let init = sp.initial_state(50);
    let c = run_job(&g, &a, &sp, &ShufflePlan::single(Mode::Coded), &init, &RunOptions::default()).unwrap();
    let u = run_job(&g, &a, &sp, &ShufflePlan::single(Mode::Uncoded), &init, &RunOptions::default()).unwrap();
    assert_eq!(c.outputs.len(), 50);
    assert_eq!(c.outputs, u.outputs);
    assert_eq!(c.outputs, reference_execute(&g, &sp, &init, 1));
    assert!(c.report.total_bits() <= u.report.total_bits());
    assert_eq!(u.report.records() * 64, u.report.total_bits().to_integer());
}

#[test]
fn sssp_reaches_dijkstra_fixed_point() {
    let g = gen_er(40, 0.15, 12).unwrap().with_random_weights(5);
    let sp = ShortestPath { source: 0 };
    let (fixed, iters) = reference_fixed_point(&g, &sp, &sp.initial_state(40), 100);
    let cfg = JobConfig {
        stop_when_stable: true,
        ..config(Mode::Coded, 5, 3, 100)
    };
    let (a, plan) = prepare(&g, &cfg).unwrap();
    let out = run_iterations(&g, &a, &sp, &plan, &cfg).unwrap();
    assert_eq!(out.outputs, fixed);
    assert_eq!(out.reports.len(), iters);
}

#[test]
fn feedback_matches_enumeration() {
    for (n, workers, load) in [(60, 3, 2), (30, 5, 1), (45, 4, 3), (20, 4, 4)] {
        let a = er_allocate(n, workers, load).unwrap();
        let mut expected = 0u64;
        for i in 0..n {
            let owner = (0..workers).find(|&k| a.reduce_set(k).contains(&i)).unwrap();
            let others = (0..workers).filter(|&k| k != owner && a.map_set(k).contains(&i)).count();
            expected += others as u64 * 64;
        }
        assert_eq!(feedback_bits(&a), expected);
    }

    let g = gen_er(30, 0.2, 1).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 30 };
    let cfg = config(Mode::Coded, 3, 2, 1);
    let (a, plan) = prepare(&g, &cfg).unwrap();
    let once = run_iterations(&g, &a, &pr, &plan, &cfg).unwrap();
    let job = run_job(&g, &a, &pr, &plan, &pr.initial_state(30), &RunOptions::default()).unwrap();
    assert_eq!(once.outputs, job.outputs);
    assert_eq!(once.reports[0].load(), job.report.load());
    assert_eq!(once.reports[0].feedback_bits, feedback_bits(&a));
    assert_eq!(job.report.feedback_bits, 0);
}

#[test]
fn full_replication_has_zero_load() {
    let g = gen_er(36, 0.3, 2).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 36 };
    let a = er_allocate(36, 4, 4).unwrap();
    let out = run_job(&g, &a, &pr, &ShufflePlan::single(Mode::Coded), &pr.initial_state(36), &RunOptions::default())
        .unwrap();
    assert_eq!(out.report.load(), Ratio::from_integer(0));
    assert_eq!(out.outputs, reference_execute(&g, &pr, &pr.initial_state(36), 1));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let g = gen_er(80, 0.2, 6).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 80 };
    let a = er_allocate(80, 5, 2).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            run_job(&g, &a, &pr, &ShufflePlan::single(Mode::Coded), &pr.initial_state(80), &RunOptions::default())
                .unwrap()
        })
    };
    let (one, many) = (run(1), run(8));
    assert_eq!(one.outputs, many.outputs);
    assert_eq!(one.report, many.report);
}

#[test]
fn message_dump_has_one_record_per_multicast() {
    let g = gen_er(30, 0.3, 3).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 30 };
    let a = er_allocate(30, 3, 2).unwrap();
    let opts = RunOptions { dump_messages: true };
    let out = run_job(&g, &a, &pr, &ShufflePlan::single(Mode::Coded), &pr.initial_state(30), &opts).unwrap();
    let dump = out.message_dump.unwrap();
    let width = MESSAGE_HEADER_BYTES + 4;
    assert_eq!(dump.len() as u64, out.report.messages() * width as u64);
    let first = CodedMessage::from_bytes(&dump[..width], 2).unwrap();
    assert_eq!(first.group.len(), 3);
}

#[test]
fn report_json_fields() {
    let g = gen_er(30, 0.3, 3).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 30 };
    let a = er_allocate(30, 3, 2).unwrap();
    let out = run_job(&g, &a, &pr, &ShufflePlan::single(Mode::Coded), &pr.initial_state(30), &RunOptions::default())
        .unwrap();
    let v = out.report.to_json();
    assert_eq!(v["workers"], 3);
    assert_eq!(v["value_bits"], 64);
    assert_eq!(v["passes"][0]["mode"], "coded");
    assert_eq!(v["worker_bits"].as_array().unwrap().len(), 3);
    assert!(v["load_over_n2"].as_str().unwrap().ends_with("/900"));
}

#[test]
fn bipartite_plan_phases() {
    let g = gen_rb(60, 60, 0.2, 7).unwrap();
    let (a, phases) = rb_allocate(60, 60, 6, 2).unwrap();
    let loads = plan_load(&a, &g, &rb_plan(&phases)).unwrap();
    assert_eq!(loads.len(), 3);
    assert_eq!(loads[2].bits(), Ratio::from_integer(0));
    assert!(loads[0].bits() > Ratio::from_integer(0));

    // unbalanced clusters need phase III
    let g = gen_rb(70, 30, 0.2, 7).unwrap();
    let (a, phases) = rb_allocate(70, 30, 5, 1).unwrap();
    let loads = plan_load(&a, &g, &rb_plan(&phases)).unwrap();
    assert!(loads[2].bits() > Ratio::from_integer(0));
    let pr = PageRank { damping: 0.15, vertices: 100 };
    let out = run_job(&g, &a, &pr, &rb_plan(&phases), &pr.initial_state(100), &RunOptions::default()).unwrap();
    assert_eq!(out.outputs, reference_execute(&g, &pr, &pr.initial_state(100), 1));

    let empty = gen_rb(60, 60, 0.0, 1).unwrap();
    let (a, phases) = rb_allocate(60, 60, 6, 2).unwrap();
    let total: Ratio<u64> = plan_load(&a, &empty, &rb_plan(&phases)).unwrap().iter().map(|p| p.bits()).sum();
    assert_eq!(total, Ratio::from_integer(0));
}

#[test]
fn block_plan_components_sum_to_total() {
    let g = gen_sbm(50, 70, 0.3, 0.05, 4).unwrap();
    let a = sbm_allocate(50, 70, 4, 2).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 120 };
    let out = run_job(&g, &a, &pr, &sbm_plan(50), &pr.initial_state(120), &RunOptions::default()).unwrap();
    let parts: Ratio<u64> = ["intra 1", "intra 2", "cross"].iter().map(|l| out.report.pass_load(l).unwrap()).sum();
    assert_eq!(parts, out.report.load());
    assert_eq!(out.outputs, reference_execute(&g, &pr, &pr.initial_state(120), 1));

    let no_cross = gen_sbm(50, 70, 0.3, 0.0, 4).unwrap();
    let loads = plan_load(&a, &no_cross, &sbm_plan(50)).unwrap();
    assert_eq!(loads[2].bits(), Ratio::from_integer(0));
}

#[test]
fn block_model_with_equal_probabilities_behaves_like_er() {
    // q just below p: the block model is then statistically an ER graph
    let seeds = 60;
    let (mut sbm, mut er) = (0.0, 0.0);
    for seed in 0..seeds {
        let (c, _) = measure_loads(&GraphModelParams::Sbm { n1: 100, n2: 100, p: 0.2, q: 0.2 - 1e-9 }, 4, 2, seed).unwrap();
        sbm += c.load_f64();
        let (c, _) = measure_loads(&GraphModelParams::Er { n: 200, p: 0.2 }, 4, 2, seed + 1000).unwrap();
        er += c.load_f64();
    }
    let (sbm, er) = (sbm / seeds as f64, er / seeds as f64);
    assert!((sbm - er).abs() / er < 0.02, "sbm {sbm} er {er}");
}

#[test]
fn plan_variant_requires_cluster_metadata() {
    let g = gen_er(20, 0.2, 1).unwrap();
    let cfg = JobConfig {
        plan: PlanVariant::Rb,
        ..config(Mode::Coded, 4, 1, 1)
    };
    assert!(prepare(&g, &cfg).is_err());
    let g = gen_sbm(10, 10, 0.5, 0.1, 1).unwrap();
    assert_eq!(PlanVariant::for_graph(&g), PlanVariant::Sbm);
}

#[test]
fn single_seed_sweep_reports_the_run() {
    let model = GraphModelParams::Er { n: 60, p: 0.2 };
    let rows = measure_sweep(&SweepConfig {
        model,
        workers: 4,
        loads: vec![2],
        seed_count: 1,
        first_seed: 5,
    })
    .unwrap();
    assert_eq!(rows.len(), 2);
    let (c, u) = measure_loads(&model, 4, 2, 5).unwrap();
    assert_eq!(rows[0].mean, c.load_f64());
    assert_eq!(rows[1].mean, u.load_f64());
    assert_eq!(rows[0].stderr, 0.0);
    assert_eq!(rows[0].to_csv().split(',').count(), 11);

    let pl = GraphModelParams::Pl { n: 200, gamma: 2.5, rho: Rho::Auto };
    let rows = measure_sweep(&SweepConfig {
        model: pl,
        workers: 4,
        loads: vec![1, 2],
        seed_count: 2,
        first_seed: 0,
    })
    .unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].lower_bound.is_none());
    assert!(rows[0].to_csv().ends_with(','));
}

#[test]
fn engine_load_matches_accounting_only_load() {
    let g = gen_er(90, 0.15, 21).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 90 };
    for load in 1..=4 {
        let a = er_allocate(90, 5, load).unwrap();
        let plan = ShufflePlan::single(Mode::Coded);
        let out = run_job(&g, &a, &pr, &plan, &pr.initial_state(90), &RunOptions::default()).unwrap();
        assert_eq!(out.report.passes, plan_load(&a, &g, &plan).unwrap());
    }
}

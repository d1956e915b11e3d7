use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coded_shuffle::analysis::{er_bounds, pl_bounds, rb_bounds, sbm_bounds, BoundSet};
use coded_shuffle::engine::{
    measure_sweep, prepare, run_iterations, run_job, JobConfig, PlanVariant, RunOptions, SweepConfig, SweepRow,
};
use coded_shuffle::graphs::{load_edgelist, save_edgelist, GraphModelParams, Rho};
use coded_shuffle::programs::{PageRank, ShortestPath, VertexProgram};
use coded_shuffle::shuffle::{format_load, ratio_to_f64, Mode};
use coded_shuffle::verify;

#[derive(Parser)]
#[command(name = "coded-shuffle", version, about = "Coded MapReduce shuffling for graph analytics")]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true, env = "CODED_SHUFFLE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Run a vertex program through Map, Shuffle and Reduce and report the load.
    Run(RunArgs),
    /// Mean loads over seeds for a range of r, as CSV.
    Sweep(SweepArgs),
    /// Closed-form loads for one model and (K, r).
    Bounds(BoundsArgs),
    /// Run the acceptance checks.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Er,
    Rb,
    Sbm,
    Pl,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Power-law scale factor, a positive number or `auto`.
    #[arg(long, default_value = "auto")]
    rho: String,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Attach uniform random edge weights drawn from the same seed.
    #[arg(long)]
    weights: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProgramKind {
    Pagerank,
    Sssp,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "pagerank")]
    program: ProgramKind,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value = "coded")]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    iters: usize,
    /// Stop early once a round changes no state.
    #[arg(long)]
    until_stable: bool,
    /// er, rb or sbm; defaults to the model recorded in the graph file.
    #[arg(long)]
    plan: Option<PlanVariant>,
    #[arg(long, default_value_t = 0.15)]
    damping: f64,
    /// 1-based source vertex for sssp.
    #[arg(long, default_value_t = 1)]
    source: usize,
    /// Print the full load report as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the wire bytes of the first round's coded messages here.
    #[arg(long)]
    dump_messages: Option<PathBuf>,
    /// Write final vertex values here, one `vertex value` line each.
    #[arg(long)]
    outputs: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    k: usize,
    /// A single value or an inclusive range `a..b`.
    #[arg(long)]
    r: String,
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    r: usize,
}

/// Bad flags; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn need<T>(value: Option<T>, flag: &str, model: &str) -> Result<T> {
    value.ok_or_else(|| usage(format!("--{flag} is required for --model {model}")))
}

fn model_params(args: &ModelArgs) -> Result<GraphModelParams> {
    Ok(match args.model {
        ModelKind::Er => GraphModelParams::Er {
            n: need(args.n, "n", "er")?,
            p: need(args.p, "p", "er")?,
        },
        ModelKind::Rb => GraphModelParams::Rb {
            n1: need(args.n1, "n1", "rb")?,
            n2: need(args.n2, "n2", "rb")?,
            q: need(args.q, "q", "rb")?,
        },
        ModelKind::Sbm => GraphModelParams::Sbm {
            n1: need(args.n1, "n1", "sbm")?,
            n2: need(args.n2, "n2", "sbm")?,
            p: need(args.p, "p", "sbm")?,
            q: need(args.q, "q", "sbm")?,
        },
        ModelKind::Pl => GraphModelParams::Pl {
            n: need(args.n, "n", "pl")?,
            gamma: need(args.gamma, "gamma", "pl")?,
            rho: parse_rho(&args.rho)?,
        },
    })
}

fn parse_rho(s: &str) -> Result<Rho> {
    if s == "auto" {
        return Ok(Rho::Auto);
    }
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(Rho::Fixed(x)),
        _ => Err(usage(format!("--rho must be `auto` or a positive number, got `{s}`"))),
    }
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || usage(format!("--r must be `a` or `a..b`, got `{s}`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let a = s.trim().parse().map_err(|_| bad())?;
            (a, a)
        }
    };
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let model = model_params(&args.model)?;
    let mut graph = model.generate(args.seed)?;
    if args.weights {
        graph = graph.with_random_weights(args.seed);
    }
    save_edgelist(&graph, &args.out)?;
    println!(
        "wrote {}: {} model, {} vertices, {} edges, seed {}",
        args.out.display(),
        model.name(),
        graph.vertex_count(),
        graph.edge_count(),
        args.seed
    );
    if graph.meta().clamped_pairs > 0 {
        println!("{} vertex pairs had edge probability clamped to 1", graph.meta().clamped_pairs);
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let graph = load_edgelist(&args.graph)?;
    let n = graph.vertex_count();
    let program: Box<dyn VertexProgram> = match args.program {
        ProgramKind::Pagerank => {
            if !(args.damping >= 0.0 && args.damping <= 1.0) {
                return Err(usage(format!("--damping must lie in [0, 1], got {}", args.damping)));
            }
            Box::new(PageRank {
                damping: args.damping,
                vertices: n,
            })
        }
        ProgramKind::Sssp => {
            if args.source == 0 || args.source > n {
                return Err(usage(format!("--source must lie in 1..={n}")));
            }
            Box::new(ShortestPath {
                source: args.source - 1,
            })
        }
    };
    let config = JobConfig {
        mode: args.mode,
        workers: args.k,
        load: args.r,
        plan: args.plan.unwrap_or_else(|| PlanVariant::for_graph(&graph)),
        iterations: args.iters,
        stop_when_stable: args.until_stable,
    };
    let (alloc, plan) = prepare(&graph, &config)?;
    let outcome = run_iterations(&graph, &alloc, program.as_ref(), &plan, &config)?;
    let report = outcome.reports.last().ok_or_else(|| anyhow!("no round was executed"))?;

    if let Some(path) = &args.dump_messages {
        let first = run_job(
            &graph,
            &alloc,
            program.as_ref(),
            &plan,
            &program.initial_state(n),
            &RunOptions { dump_messages: true },
        )?;
        let bytes = first.message_dump.unwrap_or_default();
        std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {} message bytes to {}", bytes.len(), path.display());
    }
    if let Some(path) = &args.outputs {
        let mut text = String::new();
        for (v, x) in outcome.outputs.iter().enumerate() {
            text.push_str(&format!("{} {x}\n", v + 1));
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }

    if args.json {
        let mut value = report.to_json();
        value["rounds"] = serde_json::json!(outcome.reports.len());
        value["program"] = serde_json::json!(program.name());
        println!("{}", serde_json::to_string_pretty(&value)?);
        return Ok(());
    }
    println!(
        "{} on {} vertices ({} padded), K = {}, r = {}, {} shuffle, {} round(s)",
        program.name(),
        report.vertices,
        report.padded_vertices,
        report.workers,
        args.r,
        args.mode,
        outcome.reports.len()
    );
    println!("L = {} ({:.6})", report.display_load(), report.load_f64());
    if report.passes.len() > 1 {
        for pass in &report.passes {
            let part = report.pass_load(&pass.label).unwrap_or_default();
            println!("  {}: {} ({:.6})", pass.label, format_load(part, report.vertices), ratio_to_f64(part));
        }
    }
    println!("messages = {}, records = {}", report.messages(), report.records());
    println!("feedback = {} bits per round (not part of L)", report.feedback_bits);
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let config = SweepConfig {
        model: model_params(&args.model)?,
        workers: args.k,
        loads: parse_range(&args.r)?,
        seed_count: args.seeds,
        first_seed: args.first_seed,
    };
    let rows = measure_sweep(&config)?;
    let mut text = String::from(SweepRow::CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn bounds(args: &BoundsArgs) -> Result<()> {
    let (k, r) = (args.k, args.r);
    let (set, scale): (BoundSet, &str) = match args.model {
        ModelKind::Er => (er_bounds(need(args.p, "p", "er")?, k, r)?, "L"),
        ModelKind::Rb => (rb_bounds(need(args.q, "q", "rb")?, k, r)?, "L"),
        ModelKind::Sbm => (
            sbm_bounds(
                need(args.n1, "n1", "sbm")?,
                need(args.n2, "n2", "sbm")?,
                need(args.p, "p", "sbm")?,
                need(args.q, "q", "sbm")?,
                k,
                r,
            )?,
            "L",
        ),
        ModelKind::Pl => (pl_bounds(need(args.gamma, "gamma", "pl")?, k, r)?, "n*L"),
    };
    println!("uncoded {scale} = {:.6}", set.uncoded);
    println!("coded upper {scale} = {:.6}", set.coded_upper);
    match set.lower {
        Some(lower) => println!("lower {scale} = {lower:.6}"),
        None => println!("lower {scale} = none"),
    }
    Ok(())
}

fn verify_all() -> Result<bool> {
    let outcomes = verify::run_all();
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id).collect();
    println!();
    println!("{}/{} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
    }
    Ok(failed.is_empty())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<coded_shuffle::Error>() {
        Some(e) if e.is_usage() => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Bounds(a) => bounds(a),
        Command::Verify => match verify_all() {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_ranges() {
        assert_eq!(parse_range("1..5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_range("3").unwrap(), vec![3]);
        for bad in ["0..2", "3..1", "a..b", ""] {
            assert_eq!(exit_code(&parse_range(bad).unwrap_err()), 2, "{bad}");
        }
    }

    #[test]
    fn rho_values() {
        assert!(matches!(parse_rho("auto").unwrap(), Rho::Auto));
        assert!(matches!(parse_rho("0.5").unwrap(), Rho::Fixed(x) if x == 0.5));
        assert!(parse_rho("-1").is_err());
    }
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_coded-shuffle"));
    cmd.env("CODED_SHUFFLE_THREADS", "2");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/six_vertex.txt")
}

fn run_fixture(extra: &[&str]) -> Output {
    let graph = fixture();
    let mut args = vec!["run", "--graph", graph.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn six_vertex_loads() {
    let coded = run_fixture(&["--k", "3", "--r", "2", "--mode", "coded"]);
    assert!(coded.status.success());
    assert!(stdout(&coded).contains("L = 3/36"), "{}", stdout(&coded));

    let uncoded = run_fixture(&["--k", "3", "--r", "2", "--mode", "uncoded"]);
    assert!(stdout(&uncoded).contains("L = 6/36"));

    let full = run_fixture(&["--k", "3", "--r", "3"]);
    assert!(stdout(&full).contains("L = 0 "), "{}", stdout(&full));
}

#[test]
fn json_report_and_message_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("msgs.bin");
    let out = run_fixture(&["--k", "3", "--r", "2", "--json", "--dump-messages", dump.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["load"], "1/12");
    assert_eq!(v["workers"], 3);
    assert_eq!(v["rounds"], 1);
    // six messages of a 10-byte header and a 4-byte half value
    assert_eq!(std::fs::read(&dump).unwrap().len(), 6 * 14);
}

#[test]
fn generate_is_deterministic_and_reloadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let out = run(&["generate", "--model", "er", "--n", "300", "--p", "0.1", "--seed", "7", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(stdout(&out).contains("edges"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let out = run(&["run", "--graph", a.to_str().unwrap(), "--k", "5", "--r", "2", "--program", "sssp", "--iters", "400", "--until-stable"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cluster_graphs_pick_their_plan() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("rb.txt");
    let out = run(&["generate", "--model", "rb", "--n1", "30", "--n2", "30", "--q", "0.2", "--out", g.to_str().unwrap()]);
    assert!(out.status.success());
    let out = run(&["run", "--graph", g.to_str().unwrap(), "--k", "6", "--r", "2"]);
    let text = stdout(&out);
    assert!(text.contains("phase I:") && text.contains("phase III:"), "{text}");
}

#[test]
fn bad_parameters_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let out = run(&["generate", "--model", "er", "--n", "30", "--p", "1.5", "--out", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    assert_eq!(run(&["generate", "--model", "er", "--n", "30", "--out", g.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run_fixture(&["--k", "3", "--r", "4"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--model", "er", "--n", "30", "--p", "0.1", "--k", "3", "--r", "3..1"]).status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_with_three() {
    let out = run(&["run", "--graph", "/nonexistent/graph.txt", "--k", "3", "--r", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.txt");
    std::fs::write(&g, "1 2\n2 x\n").unwrap();
    let out = run(&["run", "--graph", g.to_str().unwrap(), "--k", "3", "--r", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn sweep_emits_both_modes_per_r() {
    let out = run(&["sweep", "--model", "er", "--n", "60", "--p", "0.1", "--k", "5", "--r", "1..5", "--seeds", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,mode,model,n,p_or_q,K,seed_count,mean_L,stderr_L,theory_L,lower_bound_L");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("1,coded,er,60,0.1,5,3,"));
    assert!(lines[2].starts_with("1,uncoded,"));
    // r = K needs no shuffle
    assert!(lines[9].starts_with("5,coded,") && lines[9].contains(",0,0,"), "{}", lines[9]);
}

#[test]
fn bounds_for_bipartite_model() {
    let out = run(&["bounds", "--model", "rb", "--q", "0.1", "--k", "6", "--r", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("coded upper L = 0.008333"), "{text}");
    assert!(text.contains("lower L = 0.002083"), "{text}");
    let bad = run(&["bounds", "--model", "rb", "--q", "0.1", "--k", "6", "--r", "4"]);
    assert_eq!(bad.status.code(), Some(2));
}

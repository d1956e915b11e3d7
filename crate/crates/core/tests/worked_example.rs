use std::collections::BTreeSet;

use coded_shuffle::allocation::er_allocate;
use coded_shuffle::engine::{run_job, RunOptions};
use coded_shuffle::graphs::Graph;
use coded_shuffle::programs::{reference_execute, PageRank, VertexProgram};
use coded_shuffle::shuffle::segment::segment_bits;
use coded_shuffle::shuffle::{
    all_records, build_z_set, decode_group, encode_group, sender_table, Mode, ShufflePlan,
};
use coded_shuffle::workers::WorkerSet;

fn graph() -> Graph {
    Graph::from_edges(6, [(0, 4), (1, 5), (2, 3)]).unwrap()
}

fn set(ids: &[usize]) -> WorkerSet {
    ids.iter().map(|k| k - 1).collect()
}

/// Column contents as 1-based `(i, j, segment)` triples.
fn columns(sender: usize) -> Vec<BTreeSet<(usize, usize, usize)>> {
    let g = graph();
    let a = er_allocate(6, 3, 2).unwrap();
    let table = sender_table(&a, &g, set(&[1, 2, 3]), sender - 1, &all_records).unwrap();
    (0..table.width())
        .map(|c| table.column(c).into_iter().map(|((i, j), t)| (i + 1, j + 1, t + 1)).collect())
        .collect()
}

fn expected(cols: &[&[(usize, usize, usize)]]) -> Vec<BTreeSet<(usize, usize, usize)>> {
    cols.iter().map(|c| c.iter().copied().collect()).collect()
}

#[test]
fn z_set_of_server_three() {
    let g = graph();
    let a = er_allocate(6, 3, 2).unwrap();
    let z = build_z_set(&a, &g, set(&[1, 2, 3]), 2, &all_records).unwrap();
    assert_eq!(z, vec![(4, 0), (5, 1)]);
    assert!(build_z_set(&a, &g, set(&[1, 2]), 1, &all_records).is_err());
}

#[test]
fn message_sets_match_hand_derivation() {
    assert_eq!(columns(1), expected(&[&[(5, 1, 1), (4, 3, 1)], &[(3, 4, 1), (6, 2, 1)]]));
    assert_eq!(columns(2), expected(&[&[(5, 1, 2), (1, 5, 1)], &[(6, 2, 2), (2, 6, 1)]]));
    assert_eq!(columns(3), expected(&[&[(4, 3, 2), (1, 5, 2)], &[(3, 4, 2), (2, 6, 2)]]));
}

#[test]
fn server_three_recovers_its_segment() {
    let g = graph();
    let a = er_allocate(6, 3, 2).unwrap();
    let value = |(i, j): (usize, usize)| ((i as u64 + 1) << 32) | ((j as u64 + 1) * 0x0101_0101);
    let s = set(&[1, 2, 3]);
    let msgs = encode_group(&a, &g, s, 0, &all_records, |k| Some(value(k))).unwrap();
    assert_eq!(msgs.len(), 2);
    // server 3 can only look up values of vertices it Mapped
    let local = |(i, j): (usize, usize)| a.maps(2, j).then(|| value((i, j)));
    let segs = decode_group(&a, &g, s, 0, 2, &all_records, &msgs, local).unwrap();
    assert_eq!(segs.len(), 2);
    assert_eq!((segs[0].reducer, segs[0].mapper, segs[0].index), (4, 0, 0));
    assert_eq!(segs[0].bits, segment_bits(value((4, 0)), 0, 2));
    assert_eq!((segs[1].reducer, segs[1].mapper), (5, 1));
}

#[test]
fn loads_and_outputs() {
    let g = graph();
    let a = er_allocate(6, 3, 2).unwrap();
    let pr = PageRank { damping: 0.15, vertices: 6 };
    let init = pr.initial_state(6);
    let oracle = reference_execute(&g, &pr, &init, 1);

    let coded = run_job(&g, &a, &pr, &ShufflePlan::single(Mode::Coded), &init, &RunOptions::default()).unwrap();
    assert_eq!(coded.report.display_load(), "3/36");
    assert_eq!(coded.report.messages(), 6);
    assert_eq!(coded.outputs, oracle);

    let uncoded = run_job(&g, &a, &pr, &ShufflePlan::single(Mode::Uncoded), &init, &RunOptions::default()).unwrap();
    assert_eq!(uncoded.report.display_load(), "6/36");
    assert_eq!(uncoded.report.messages(), 6);
    assert_eq!(uncoded.outputs, oracle);

    let full = er_allocate(6, 3, 3).unwrap();
    let none = run_job(&g, &full, &pr, &ShufflePlan::single(Mode::Coded), &init, &RunOptions::default()).unwrap();
    assert_eq!(none.report.display_load(), "0");
    assert_eq!(none.outputs, oracle);
}

#[test]
fn allocation_json_uses_one_based_ids() {
    let a = er_allocate(6, 3, 2).unwrap();
    let v: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
    assert_eq!(v["map_sets"][0], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(v["reduce_sets"][2], serde_json::json!([5, 6]));
    assert_eq!(v["computation_load"], "2");
}

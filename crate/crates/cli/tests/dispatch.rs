//! Algorithms the generated corpus does not reach, on small handwritten instances.

use submod_cli::instance::parse_line;
use submod_cli::{bench, build, run, verify_record, ReportRecord, RunOptions};

fn instance(objective: &str, constraint: &str, task: &str) -> String {
    format!(
        r#"{{"version":"submod-instance/1","name":"t","ground":["a","b","c","d"],"objective":{objective},"constraint":{constraint},"task":{task}}}"#
    )
}

/// Cut of the path a-b-c-d plus a modular term, so the minimizer is neither ∅ nor V.
const CUT_MINUS: &str = r#"{"kind":"agents","agents":[{"kind":"sum","parts":[
    {"kind":"cut","edges":[[0,1],[1,2],[2,3]],"weights":["3","1","3"]},
    {"kind":"modular","weights":["-2","-2","1","1"]}]}]}"#;

const COVERAGE: &str = r#"{"kind":"agents","agents":[{"kind":"coverage","covers":[[0,1],[1,2],[2],[3]],"item_weights":["2","3","1","4"]}]}"#;

fn check(line: &str, algorithm: &str) -> ReportRecord {
    let line = line.replace(['\n', ' '], "");
    let p = build(parse_line(&line, 1).unwrap(), 1).unwrap();
    let record = run(&p, algorithm, &RunOptions::default()).unwrap();
    assert!(record.ok, "{algorithm}: {:?}", record.verdicts);
    assert!(record.bounds.brute_opt.is_some(), "{algorithm}: no brute optimum");
    let again = verify_record(&p, &record).unwrap();
    assert!(again.iter().all(|v| v.holds), "{algorithm}: {again:?}");
    record
}

#[test]
fn sfm_finds_the_minimum() {
    let r = check(&instance(CUT_MINUS, r#"{"kind":"free"}"#, r#"{"kind":"min"}"#), "sfm");
    assert_eq!(r.objective, r.bounds.brute_opt);
    assert_eq!(r.solution.unwrap(), vec![vec!["a".to_string(), "b".to_string()]]);
}

#[test]
fn lp_makes_no_lower_bound_claim_for_non_monotone_objectives() {
    let line = instance(CUT_MINUS, r#"{"kind":"free"}"#, r#"{"kind":"min"}"#).replace(['\n', ' '], "");
    let p = build(parse_line(&line, 1).unwrap(), 1).unwrap();
    let r = run(&p, "lp", &RunOptions::default()).unwrap();
    assert!(r.ok, "{:?}", r.verdicts);
    assert!(r.bounds.guarantee.as_deref().unwrap().starts_with("none:"));
    assert!(r.verdicts.iter().all(|v| v.check != "LP ≤ OPT"));
}

#[test]
fn ring_minimum_respects_implications() {
    // Two agents on the lifted index space; (0:a) forces (1:c), and (1:d) must be present.
    let objective = r#"{"kind":"lifted","k":2,"function":{"kind":"sum","parts":[
        {"kind":"concave-of-cardinality","table":["0","4","7","9","10","10","10","10","10"]},
        {"kind":"modular","weights":["-3","1","1","1","1","1","-1","1"]}]}}"#;
    let ring = r#"{"kind":"ring","implications":[[0,6]],"lower":[7]}"#;
    let r = check(&instance(objective, ring, r#"{"kind":"min"}"#), "ring-min");
    assert_eq!(r.objective, r.bounds.brute_opt);
    let parts = r.solution.unwrap();
    assert!(parts[1].contains(&"d".to_string()));
    assert!(!parts[0].contains(&"a".to_string()) || parts[1].contains(&"c".to_string()));
}

#[test]
fn greedy_under_a_matroid() {
    let constraint = r#"{"kind":"matroid","matroid":{"kind":"uniform","rank":2}}"#;
    let r = check(&instance(COVERAGE, constraint, r#"{"kind":"max"}"#), "greedy");
    assert!(r.ratio.unwrap() >= 0.5);
}

#[test]
fn double_greedy_on_a_cut() {
    let objective = r#"{"kind":"agents","agents":[{"kind":"cut","edges":[[0,1],[1,2],[2,3],[0,3]]}]}"#;
    let r = check(&instance(objective, r#"{"kind":"free"}"#, r#"{"kind":"max"}"#), "double-greedy");
    assert!(r.ratio.unwrap() >= 1.0 / 3.0);
}

#[test]
fn robust_exhaustive_is_exact() {
    let objective = r#"{"kind":"agents","agents":[
        {"kind":"coverage","covers":[[0],[0,1],[1],[2]]},
        {"kind":"modular","weights":["1","2","1","2"]}]}"#;
    let constraint = r#"{"kind":"matroid","matroid":{"kind":"uniform","rank":3}}"#;
    let r = check(&instance(objective, constraint, r#"{"kind":"robust","tau":1}"#), "robust-exhaustive");
    assert_eq!(r.objective, r.bounds.brute_opt);
}

#[test]
fn bench_over_handwritten_instances() {
    let lines = [
        instance(CUT_MINUS, r#"{"kind":"free"}"#, r#"{"kind":"min"}"#),
        instance(COVERAGE, r#"{"kind":"free"}"#, r#"{"kind":"max"}"#),
        instance(COVERAGE, r#"{"kind":"matroid","matroid":{"kind":"uniform","rank":2}}"#, r#"{"kind":"robust","tau":1}"#),
    ];
    let corpus: Vec<_> = lines.iter().map(|l| parse_line(&l.replace(['\n', ' '], ""), 1).unwrap()).collect();
    let out = bench(&corpus, None, &RunOptions::default()).unwrap();
    assert_eq!(out.exit_code(), 0, "{:?}", out.failures);
    let names: Vec<&str> = out.summary.algorithms.iter().map(|a| a.algorithm.as_str()).collect();
    for want in ["sfm", "greedy", "ma-greedy", "double-greedy", "robust-exhaustive"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
}


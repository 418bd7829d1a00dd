use std::path::Path;
use std::process::{Command, Output};

fn submod(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_submod")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const TRIANGLE: &str = r#"{"version":"submod-instance/1","name":"triangle","ground":["a","b","c"],"objective":{"kind":"agents","agents":[{"kind":"modular","weights":["1","1","1"]}]},"constraint":{"kind":"vertex-cover","edges":[[0,1],[1,2],[0,2]]},"task":{"kind":"min"}}"#;

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t.jsonl", &format!("{TRIANGLE}\n"));
    let out = submod(&["solve", "--instance", "t.jsonl", "--out", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap().lines().next().unwrap())
            .unwrap();
    // The relaxation puts 1/2 everywhere, so thresholding takes all three vertices.
    assert_eq!(report["bounds"]["lp_value"], "3/2");
    assert_eq!(report["objective"], "3/1");
    assert_eq!(report["bounds"]["brute_opt"], "2/1");
    let out = submod(&["verify", "--instance", "t.jsonl", "--report", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.jsonl", "{\"version\":\"submod-instance/1\",\"name\":\"x\"\n");
    assert_eq!(submod(&["solve", "--instance", "bad.jsonl"], dir.path()).status.code(), Some(4));

    write(dir.path(), "t.jsonl", &format!("{TRIANGLE}\n"));
    let out = submod(&["solve", "--instance", "t.jsonl", "--algorithm", "greedy"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("valid here"));

    let out = submod(&["gen", "--family", "welfare", "--n", "40", "--out", "w.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(5));

    let infeasible = TRIANGLE.replace(r#""kind":"vertex-cover","edges":[[0,1],[1,2],[0,2]]"#, r#""kind":"regions","regions":[[0]]"#);
    write(dir.path(), "i.jsonl", &format!("{infeasible}\n"));
    let out = submod(&["solve", "--instance", "i.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = submod(&["gen", "--family", "all", "--n", "4", "--count", "2", "--seed", "3", "--out", "c"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let a = submod(&["bench", "--instance", "c"], dir.path());
    let b = submod(&["bench", "--instance", "c"], dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

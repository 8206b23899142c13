use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn qubopath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubopath"))
        .env_remove("QUBOPATH_VAR_CAP")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_spec(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn generate_writes_the_artifact_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sop.qubo");
    let o = qubopath(&[
        "generate",
        "--input",
        path_str(&fixture("sop.json")),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "primary=25 auxiliary=15 total=40\n");
    let artifact = std::fs::read_to_string(&out).unwrap();
    assert!(artifact.starts_with("# qubopath coordinate-list\n# n 40\n"));
}

#[test]
fn quiet_suppresses_the_summary() {
    let o = qubopath(&[
        "generate",
        "--input",
        path_str(&fixture("sop.json")),
        "--format",
        "ising",
        "--quiet",
    ]);
    assert!(o.status.success());
    assert!(stderr(&o).is_empty());
    assert!(stdout(&o).starts_with("# qubopath ising-text\n"));
}

#[test]
fn trivial_spec_renders_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "trivial.json",
        r#"{"graph": {"adjacency": [[0]]}, "encoding": {"scheme": "one_hot", "max_path_length": 1},
            "constraints": [], "implicit_path_is_valid": false}"#,
    );
    let o = qubopath(&[
        "generate",
        "--input",
        path_str(&spec),
        "--format",
        "poly",
        "--quiet",
    ]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn missing_file_exits_with_1() {
    let o = qubopath(&["generate", "--input", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E_IO"));
}

#[test]
fn invalid_spec_exits_with_1_and_lists_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "bad.json",
        r#"{"graph": {"adjacency": [[0, 1], [1, 0]]}, "encoding": {"scheme": "one_hot", "max_path_length": 2},
            "constraints": [{"type": "precedence", "before": 1, "after": 1}]}"#,
    );
    let o = qubopath(&["suggest-encoding", "--input", path_str(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("E_SEMANTIC"), "{err}");
    assert!(err.contains("E_PRECEDENCE_SELF"), "{err}");
}

#[test]
fn variable_cap_from_the_environment_exits_with_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_qubopath"))
        .env("QUBOPATH_VAR_CAP", "10")
        .args(["generate", "--input", path_str(&fixture("sop.json"))])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("E_VARIABLE_CAP"));
}

#[test]
fn suggest_lists_totals_ascending() {
    let o = qubopath(&[
        "suggest-encoding",
        "--input",
        path_str(&fixture("sop.json")),
    ]);
    assert!(o.status.success());
    let rows: Vec<Vec<String>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(String::from).collect())
        .collect();
    let order: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(order, ["one_hot", "domain_wall", "binary"]);
    let primaries: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(primaries, ["25", "25", "15"]);

    let o = qubopath(&[
        "suggest-encoding",
        "--input",
        path_str(&fixture("dpp.json")),
    ]);
    let dw = stdout(&o)
        .lines()
        .find(|l| l.starts_with("domain_wall"))
        .unwrap()
        .split_whitespace()
        .nth(3)
        .unwrap()
        .to_string();
    assert_eq!(dw, "30");
}

const FOUR_VERTEX_SOP: &str = r#"{
    "graph": {"adjacency": [[0, 2, 6, 6], [5, 0, 1, 7], [7, 3, 0, 5], [4, 8, 1, 0]]},
    "encoding": {"scheme": "one_hot", "n_paths": 1, "max_path_length": 4, "loops": [false]},
    "constraints": [
        {"type": "vertices_exactly_once"},
        {"type": "precedence", "before": 1, "after": 3},
        {"type": "precedence", "before": 2, "after": 1}
    ],
    "objective": "minimize"
}"#;

#[test]
fn brute_force_prints_the_optimal_path() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "sop4.json", FOUR_VERTEX_SOP);
    let o = qubopath(&[
        "solve",
        "--input",
        path_str(&spec),
        "--method",
        "brute",
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = stdout(&o);
    // Orders with 2 before 1 before 3: v4 v2 v1 v3 = 19, v2 v4 v1 v3 = 17,
    // v2 v1 v3 v4 = 16, v2 v1 v4 v3 = 12.
    assert!(
        report.contains("path 1: v2 -> v1 -> v4 -> v3 (weight 12)"),
        "{report}"
    );
    assert!(report.contains("total weight: 12"));
    assert!(!report.contains("violated"));
}

#[test]
fn seeded_annealing_is_reproducible() {
    let input = fixture("sop.json");
    let args = [
        "solve",
        "--input",
        path_str(&input),
        "--method",
        "anneal",
        "--seed",
        "11",
        "--steps",
        "1500",
        "--quiet",
    ];
    let a = qubopath(&args);
    let b = qubopath(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn contradictory_positions_report_the_penalty_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "contradiction.json",
        r#"{"graph": {"adjacency": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]},
            "encoding": {"scheme": "one_hot", "max_path_length": 2},
            "constraints": [
                {"type": "position_is", "path": 1, "position": 1, "vertices": [1]},
                {"type": "position_is", "path": 1, "position": 1, "vertices": [2]}
            ]}"#,
    );
    let o = qubopath(&[
        "solve",
        "--input",
        path_str(&spec),
        "--method",
        "brute",
        "--quiet",
    ]);
    assert!(o.status.success());
    let report = stdout(&o);
    assert!(
        report.starts_with("no satisfying assignment found; best penalty breakdown\n"),
        "{report}"
    );
    assert!(report.contains("[violated] position_is"));
}

#[test]
fn brute_force_over_the_cap_exits_with_2() {
    let o = qubopath(&[
        "solve",
        "--input",
        path_str(&fixture("sop.json")),
        "--method",
        "brute",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("E_BRUTE_FORCE_CAP"));
}

#[test]
fn tsplib_input_matches_the_json_fixture() {
    let a = qubopath(&[
        "generate",
        "--input",
        path_str(&fixture("tsp.tsp")),
        "--tsplib",
        "--quiet",
    ]);
    let b = qubopath(&[
        "generate",
        "--input",
        path_str(&fixture("tsp.json")),
        "--quiet",
    ]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn json_errors_go_to_stdout_in_json_mode() {
    let o = qubopath(&["generate", "--input", "/nonexistent/spec.json", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["code"], "E_IO");
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn quadlie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadlie"))
        .args(args)
        .env_remove("QUADLIE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quadlie-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn dims_of_n25() {
    let o = quadlie(&["dims", "-d", "2", "-t", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("graded dims: 2 1 2 3 6"), "{s}");
    assert!(s.contains("total: 14"), "{s}");

    let o = quadlie(&["dims", "-d", "2", "-t", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total"], 14);
}

#[test]
fn basis_of_n11_is_one_generator() {
    let o = quadlie(&["basis", "-d", "1", "-t", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["basis"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(quadlie(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(quadlie(&["dims", "-d", "two", "-t", "5"]).status.code(), Some(2));
    assert_eq!(quadlie(&["quadratize", "--family", "B99"]).status.code(), Some(2));
    assert_eq!(quadlie(&["replay", "--tag", "T9.9"]).status.code(), Some(2));
    assert_eq!(quadlie(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(quadlie(&["quadratize", "--family", "B25", "--params", "{not json"]).status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    assert_eq!(quadlie(&["--help"]).status.code(), Some(0));
}

#[test]
fn replay_is_byte_identical_per_seed() {
    let args = ["replay", "--tag", "T5.2,L5.4", "--samples", "3", "--seed", "11", "--json"];
    let a = quadlie(&args);
    let b = quadlie(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_quadlie"))
        .args(["replay", "--tag", "T5.2,L5.4", "--samples", "3", "--json"])
        .env("QUADLIE_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn act_is_deterministic_and_preserves_invariants() {
    let args = ["act", "--family", "B33", "--params", r#"{"A2": [[1,0,0],[0,1,0],[0,0,0]]}"#, "--seed", "5", "--json"];
    let a = quadlie(&args);
    let b = quadlie(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["before"], v["after"]);
}

#[test]
fn quadratize_family_reports_classes() {
    let o = quadlie(&[
        "quadratize",
        "--family",
        "B25",
        "--params",
        r#"{"gamma": "2", "A2": [[1,0],[0,-1]]}"#,
        "--field",
        "R",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["algebra"]["dim"], 8);
    assert_eq!(v["verification"]["type"], 2);
    assert_eq!(v["parameter_classes"]["A2"]["signature"], serde_json::json!([1, 1, 0]));
}

#[test]
fn inadmissible_form_fails_with_witness() {
    let o = quadlie(&["quadratize", "--family", "B21", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sym0"]["member"], false);
    assert!(!v["sym0"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn non_invariant_form_file_fails_with_witness() {
    // B(x1, [x2,x1]) = 1 with B(x2, [x1,x2]) = 0 breaks invariance.
    let path = temp_file(
        "bad_form.json",
        r#"{"algebra": {"d": 2, "t": 2}, "matrix": [[0,0,1],[0,0,0],[1,0,0]]}"#,
    );
    let o = quadlie(&["verify", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["invariant"], false);
    assert!(v["witness"]["triple"].is_array());
}

#[test]
fn quadratic_file_round_trips_through_verify() {
    let o = quadlie(&["catalog", "T6.1-v", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let path = temp_file("t61v.json", &v["algebra"].to_string());
    let o = quadlie(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("type 3, nilindex 2"));
}

#[test]
fn catalog_listing_by_field() {
    let c = stdout(&quadlie(&["catalog", "--field", "C"]));
    let r = stdout(&quadlie(&["catalog", "--field", "R"]));
    assert_eq!(c.lines().count(), 7);
    assert_eq!(r.lines().count(), 10);
    assert_eq!(quadlie(&["catalog", "--field", "Q"]).status.code(), Some(2));
}

#[test]
fn invforms_space_dimension() {
    let o = quadlie(&["invforms", "-d", "2", "-t", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 5);
    assert_eq!(v["basis"].as_array().unwrap().len(), v["space_dim"].as_u64().unwrap() as usize);
}

#[test]
fn full_replay_passes() {
    let o = quadlie(&["replay", "--tag", "all", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("ALL PASS"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn nlt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlt")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const CHAIN: &str = r#"{"nodes":["a","b"],"edges":[{"src":"b","dst":"a","weight":1.0}]}"#;
const TWO_CYCLE: &str =
    r#"{"nodes":["a","b"],"edges":[{"src":"a","dst":"b","weight":0.5},{"src":"b","dst":"a","weight":0.5}]}"#;
const HUB: &str = r#"{"nodes":["h","x","y","z"],"edges":[
    {"src":"x","dst":"h","weight":1.0},{"src":"y","dst":"h","weight":1.0},{"src":"z","dst":"h","weight":1.0}]}"#;

#[test]
fn chain_evaluates_to_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", CHAIN);
    for method in ["exact-dag", "cells"] {
        let out = nlt(&["evaluate", "--network", &g, "--transient", "a", "--horizon", "2", "--method", method]);
        assert!(out.status.success());
        assert_eq!(json(&out)["value"], 0.5);
    }
    let out = nlt(&["evaluate", "--network", &g, "--horizon", "2"]);
    assert_eq!(json(&out)["value"], 0.0);
}

#[test]
fn csv_network_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.csv", "src,dst,weight\nb,a,1.0\n");
    let out = nlt(&["evaluate", "--network", &g, "--transient", "a", "--horizon", "2"]);
    assert_eq!(json(&out)["value"], 0.5);
}

#[test]
fn cyclic_network_with_walk_evaluator_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c.json", TWO_CYCLE);
    let out = nlt(&["evaluate", "--network", &g, "--transient", "a", "--method", "exact-dag"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("a -> b -> a"), "{msg}");
}

#[test]
fn bad_inputs_exit_2_and_bad_seeds_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", CHAIN);
    let broken = write(dir.path(), "broken.json", "{\"nodes\":");
    let heavy = write(
        dir.path(),
        "heavy.json",
        r#"{"nodes":["a","b"],"edges":[{"src":"b","dst":"a","weight":1.5}]}"#,
    );
    assert_eq!(nlt(&["evaluate", "--network", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(nlt(&["evaluate", "--network", &broken]).status.code(), Some(2));
    assert_eq!(nlt(&["evaluate", "--network", &heavy]).status.code(), Some(2));
    assert_eq!(nlt(&["evaluate", "--network", &g, "--transient", "zz"]).status.code(), Some(4));
    assert_eq!(nlt(&["bogus"]).status.code(), Some(2));
}

#[test]
fn seed_lists_read_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", CHAIN);
    let seeds = write(dir.path(), "seeds.txt", "a\n");
    let out = nlt(&["evaluate", "--network", &g, "--transient", &format!("@{seeds}"), "--horizon", "2"]);
    assert_eq!(json(&out)["value"], 0.5);
}

#[test]
fn hub_budget_buys_the_hub_permanently() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "hub.json", HUB);
    let out = nlt(&["optimize", "--network", &g, "--budget", "2", "--cost-permanent", "2"]);
    let v = json(&out);
    assert_eq!(v["permanent"], serde_json::json!(["h"]));
    assert_eq!(v["transient"], serde_json::json!([]));
    assert_eq!(v["value"], 4.0);
    assert!(v.get("wall_ms").is_none());
    let timed = json(&nlt(&["optimize", "--network", &g, "--budget", "2", "--timing"]));
    assert!(timed["wall_ms"].is_u64());
}

#[test]
fn zero_budget_gives_empty_solution() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "hub.json", HUB);
    let v = json(&nlt(&["optimize", "--network", &g, "--budget", "0"]));
    assert_eq!(v["k"], 0);
    assert_eq!(v["k_hat"], 0);
    assert_eq!(v["value"], 0.0);
}

#[test]
fn exhaustive_and_greedy_agree_on_hub() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "hub.json", HUB);
    let greedy = json(&nlt(&["optimize", "--network", &g, "--budget", "2"]));
    let brute = json(&nlt(&["optimize", "--network", &g, "--budget", "2", "--exhaustive"]));
    assert_eq!(greedy["value"], brute["value"]);
}

#[test]
fn monte_carlo_optimize_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c.json", TWO_CYCLE);
    let args = ["optimize", "--network", &g, "--budget", "1", "--evaluator", "mc", "--samples", "5000", "--seed", "7"];
    let a = nlt(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, nlt(&args).stdout);
}

#[test]
fn single_sample_simulation_is_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c.json", TWO_CYCLE);
    let out = nlt(&["simulate", "--network", &g, "--transient", "a", "--samples", "1", "--seed", "1", "--horizon", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,a,b");
    assert_eq!(lines.len(), 1 + 6);
    assert_eq!(lines[1], "0,1,0");
}

#[test]
fn deterministic_instance_has_zero_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", CHAIN);
    let v = json(&nlt(&["simulate", "--network", &g, "--transient", "a", "--horizon", "2"]));
    assert_eq!(v["stderr"], 0.0);
    assert_eq!(v["mean"], 0.5);
    assert_eq!(v["samples"], 10_000);

    let c = write(dir.path(), "c.json", TWO_CYCLE);
    let v = json(&nlt(&["simulate", "--network", &c, "--transient", "a", "--samples", "2000"]));
    assert!(v["stderr"].as_f64().unwrap() > 0.0);
}

#[test]
fn table_output_has_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", CHAIN);
    let table = dir.path().join("table.csv");
    let out = nlt(&[
        "evaluate", "--network", &g, "--transient", "a", "--horizon", "2", "--table", table.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(table).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(2).unwrap().starts_with("1,0.0000000000000000e0,1.0000000000000000e0"));
}

#[test]
fn submodularity_sweep_exits_0() {
    let out = nlt(&["check", "submodularity", "--random-dags", "50", "--max-n", "7"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["violation_count"], 0);
}

#[test]
fn cyclic_submodularity_check_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let found = nlt(&["check", "counterexample", "--family", "self-loop-only", "--out", w.to_str().unwrap()]);
    assert!(found.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    let horizon = doc["witness"]["horizon"].to_string();
    let out = nlt(&[
        "check", "submodularity", "--network", w.to_str().unwrap(), "--method", "cells", "--horizon", &horizon,
        "--scope", "first-arg",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["violation_count"].as_u64().unwrap() >= 1);
}

#[test]
fn counterexample_witness_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let w = w.to_str().unwrap();
    let out = nlt(&["check", "counterexample", "--family", "general-cycles", "--out", w]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let re = nlt(&["check", "counterexample", "--verify", w]);
    assert!(re.status.success());
    assert_eq!(json(&re)["passed"], true);

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(w).unwrap()).unwrap();
    doc["witness"]["violation"] = serde_json::json!(1.0);
    std::fs::write(w, doc.to_string()).unwrap();
    assert_eq!(nlt(&["check", "counterexample", "--verify", w]).status.code(), Some(1));
}

#[test]
fn acyclic_counterexample_search_exits_1() {
    let out = nlt(&["check", "counterexample", "--family", "acyclic", "--max-n", "4", "--attempts", "300"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn equivalence_checks_pass() {
    let out = nlt(&["check", "equivalence", "--random-dags", "5", "--samples", "4000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.json", TWO_CYCLE);
    let out = nlt(&["check", "equivalence", "--network", &c, "--transient", "a", "--permanent", "b"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn hardness_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.json", r#"{"nodes":["x","y","z"],"edges":[["x","y"],["y","z"],["x","z"]]}"#);
    for (k, has_cover) in [(1, false), (2, true)] {
        let out = nlt(&["check", "hardness", "--graph", &k3, "--k", &k.to_string()]);
        assert!(out.status.success());
        let v = json(&out);
        assert_eq!(v["consistent"], true);
        assert_eq!(v["cover"].is_array(), has_cover);
    }
    let out = nlt(&["check", "hardness", "--all-graphs", "--max-n", "4"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["graphs"], 1 + 2 + 8 + 64);
}

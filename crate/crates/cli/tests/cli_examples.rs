use std::path::{Path, PathBuf};
use std::process::Command;

use ppadforge::birthday::BirthdayMetadata;
use ppadforge::ceei::AllocationSolution;
use ppadforge::fanout::ReplicaRecord;
use ppadforge::gadgets::VertexBinding;
use ppadforge::games::{BimatrixGame, PolymatrixGame};
use ppadforge::gcircuit::GeneralizedCircuit;
use ppadforge::partition::Partition;
use serde_json::Value;

const TINY: &str = r#"{"nodes":["a","b"],"gates":[{"type":"CONST","zeta":1.0,"in":[],"out":"a"},{"type":"NOT","in":["a"],"out":"b"}]}"#;
const WIDE: &str = r#"{"nodes":["a","b","c","d","e"],"gates":[
  {"type":"CONST","zeta":0.5,"in":[],"out":"a"},
  {"type":"COPY","in":["a"],"out":"b"},
  {"type":"MULZ","zeta":0.5,"in":["a"],"out":"c"},
  {"type":"ADD","in":["a","b"],"out":"d"},
  {"type":"NOT","in":["d"],"out":"e"}]}"#;
// left players want to match, right players want to mismatch
const POLY: &str = r#"{"players":4,"edges":[
  {"u":0,"v":2,"Au":[[1,0],[0,1]],"Av":[[0,1],[1,0]]},
  {"u":1,"v":3,"Au":[[1,0],[0,1]],"Av":[[0,1],[1,0]]}],"bipartition":[[0,1],[2,3]]}"#;

fn workdir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn put(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

/// Runs the binary in `dir`, returning the exit code and the parsed report.
fn run(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_ppadforge"))
        .args(args)
        .current_dir(dir)
        .env_remove("PPADFORGE_BUDGET")
        .output()
        .unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn reparse<T: serde::de::DeserializeOwned + serde::Serialize + PartialEq + std::fmt::Debug>(path: &Path) -> T {
    let text = std::fs::read_to_string(path).unwrap();
    let v: T = serde_json::from_str(&text).unwrap();
    let again: T = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    v
}

#[test]
fn gc_check_on_satisfying_pair() {
    let d = workdir("gc-check");
    put(&d, "c.json", TINY);
    put(&d, "a.json", r#"{"a":1.0,"b":0.0}"#);
    put(&d, "bad.json", r#"{"a":1.0,"b":1.0}"#);
    let (code, rep) = run(&d, &["gc", "check", "--circuit", "c.json", "--assign", "a.json", "--eps", "0.1", "--delta", "0"]);
    assert_eq!(code, 0);
    assert_eq!(rep["verdict"], "satisfied");
    assert_eq!(rep["exit_code"], 0);
    assert_eq!(rep["inputs"]["circuit"]["path"], "c.json");
    assert_eq!(rep["inputs"]["circuit"]["sha256"].as_str().unwrap().len(), 64);
    let (code, rep) = run(&d, &["gc", "check", "--circuit", "c.json", "--assign", "bad.json", "--eps", "0.1"]);
    assert_eq!(code, 1);
    assert_eq!(rep["result"]["violated_gates"], serde_json::json!([1]));
}

#[test]
fn verify_weak_on_half_violating_instance() {
    let d = workdir("verify-weak");
    put(&d, "p.json", POLY);
    // both left players mismatch their neighbour: regret 1 for half the players
    put(&d, "q.json", r#"{"p":[1.0,1.0,0.0,0.0]}"#);
    let args = |delta: &'static str| ["verify", "weak", "--game", "p.json", "--profile", "q.json", "--eps", "0.1", "--delta", delta];
    let (code, rep) = run(&d, &args("0.5"));
    assert_eq!(code, 0);
    assert_eq!(rep["result"]["fraction_above_eps"], 0.5);
    assert_eq!(run(&d, &args("0.4")).0, 1);
}

#[test]
fn exit_codes_for_input_and_budget_errors() {
    let d = workdir("exit-codes");
    put(&d, "c.json", TINY);
    put(&d, "broken.json", r#"{"nodes":["a"],"gates":[],"extra":1}"#);
    put(&d, "g.json", r#"{"R":[[1,0],[0,1]],"C":[[0,1],[1,0]]}"#);
    let (code, rep) = run(&d, &["gc", "validate", "--circuit", "missing.json"]);
    assert_eq!((code, rep["verdict"].as_str().unwrap()), (2, "input_error"));
    assert_eq!(run(&d, &["gc", "validate", "--circuit", "broken.json"]).0, 2);
    assert_eq!(run(&d, &["gc", "check", "--circuit", "c.json", "--assign", "c.json", "--eps", "2"]).0, 2);
    let (code, rep) = run(&d, &["solve", "lmm", "--game", "g.json", "--eps", "0.1", "--budget", "3"]);
    assert_eq!((code, rep["verdict"].as_str().unwrap()), (3, "budget_refusal"));
    let out = Command::new(env!("CARGO_BIN_EXE_ppadforge"))
        .args(["solve", "grid", "--game", "g.json", "--m", "50", "--eps", "0.1"])
        .current_dir(&d)
        .env("PPADFORGE_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["params"]["budget_source"], "env");
}

#[test]
fn reduction_outputs_reparse_to_equal_values() {
    let d = workdir("reduce");
    put(&d, "wide.json", WIDE);
    put(&d, "p.json", POLY);
    assert_eq!(run(&d, &["reduce", "fanout", "--circuit", "wide.json", "--eps", "0.25", "--out", "norm.json"]).0, 0);
    let norm: GeneralizedCircuit = reparse(&d.join("norm.json"));
    assert!(ppadforge::gcircuit::max_fanout(&norm) <= 2);
    let meta: Value = reparse(&d.join("norm.meta.json"));
    let records: Vec<ReplicaRecord> = serde_json::from_value(meta["node_map"].clone()).unwrap();
    assert!(records.iter().any(|r| r.orig == "a" && r.replicas.iter().all(|x| x.starts_with("a#"))));

    let (code, rep) = run(&d, &["reduce", "gadgets", "--circuit", "norm.json", "--out", "poly.json"]);
    assert_eq!(code, 0);
    let poly: PolymatrixGame = reparse(&d.join("poly.json"));
    assert_eq!(rep["result"]["players"], poly.players);
    let vm: Vec<VertexBinding> = reparse(&d.join("poly.vertex_map.json"));
    assert_eq!(vm.len(), norm.nodes.len());

    assert_eq!(run(&d, &["reduce", "birthday", "--in", "p.json", "--eps", "0.5", "--delta", "1", "--out", "bd.json"]).0, 0);
    let bd: BimatrixGame = reparse(&d.join("bd.json"));
    let meta: BirthdayMetadata = reparse(&d.join("bd.meta.json"));
    assert_eq!(bd.rows(), meta.row_codec.len());
    assert_eq!(meta.k, 2);

    assert_eq!(run(&d, &["reduce", "relative", "--in", "p.json", "--eps", "0.5", "--delta", "1", "--out", "rel.json"]).0, 0);
    let rel: BimatrixGame = reparse(&d.join("rel.json"));
    assert_eq!(rel.rows(), 2 * 2 * 2);

    assert_eq!(run(&d, &["reduce", "brcircuit", "--in", "p.json", "--out", "br.json"]).0, 0);
    let br: GeneralizedCircuit = reparse(&d.join("br.json"));
    assert!(ppadforge::gcircuit::validate_circuit(&br).is_empty());
}

#[test]
fn partition_and_ceei_commands() {
    let d = workdir("partition-ceei");
    put(&d, "g.json", r#"{"n":4,"d":2,"edges":[[0,0],[0,1],[1,1],[1,2],[2,2],[2,3],[3,3],[3,0]]}"#);
    assert_eq!(run(&d, &["partition", "--graph", "g.json", "--out", "part.json"]).0, 0);
    let _: Partition = reparse(&d.join("part.json"));
    assert_eq!(run(&d, &["verify", "partition", "--graph", "g.json", "--partition", "part.json"]).0, 0);

    put(&d, "inc.json", r#"{"incomes":[1,1,1,3]}"#);
    let (code, rep) = run(&d, &["ceei", "gini", "--in", "inc.json"]);
    assert_eq!(code, 0);
    assert!((rep["result"]["gini"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(run(&d, &["ceei", "gini", "--witness", "--epsp", "0.2", "--deltap", "0.1", "--n", "100"]).0, 0);

    assert_eq!(run(&d, &["ceei", "gadget", "--nx", "12", "--out", "gadget.json"]).0, 0);
    let budgets = vec![1.05; 12];
    for (p_out, verdict, code) in [(0.55, "GATE_SATISFIED", 0), (0.8, "VIOLATION", 1)] {
        let s = AllocationSolution { prices: vec![0.5, p_out], budgets: budgets.clone(), bundles: vec![vec![]; 12] };
        put(&d, "sol.json", &serde_json::to_string(&s).unwrap());
        let args = ["ceei", "verify", "--problem", "gadget.json", "--solution", "sol.json", "--epsp", "0.1", "--alpha", "1"];
        let (c, rep) = run(&d, &args);
        assert_eq!((c, rep["verdict"].as_str().unwrap()), (code, verdict));
    }
    let s = AllocationSolution { prices: vec![1.0, 1.0], budgets: vec![2.0; 12], bundles: vec![vec![]; 12] };
    put(&d, "raw.json", &serde_json::to_string(&s).unwrap());
    let args = ["ceei", "normalize", "--problem", "gadget.json", "--solution", "raw.json", "--epsp", "0.1", "--out", "n.json"];
    assert_eq!(run(&d, &args).0, 0);
    let n: AllocationSolution = reparse(&d.join("n.json"));
    assert!((n.budgets[0] - 1.05).abs() < 1e-12);
}

#[test]
fn solvers_emit_certificates() {
    let d = workdir("solve");
    put(&d, "g.json", r#"{"R":[[1,0],[0,1]],"C":[[0,1],[1,0]]}"#);
    put(&d, "p.json", POLY);
    let (code, rep) = run(&d, &["solve", "support", "--game", "g.json", "--out", "s.json"]);
    assert_eq!(code, 0);
    let eq = &rep["result"]["equilibria"][0];
    assert_eq!(eq["x"], serde_json::json!([0.5, 0.5]));
    assert!(eq["certificate"]["row_regret"].as_f64().unwrap() <= 1e-12);
    let (code, rep) = run(&d, &["solve", "lmm", "--game", "g.json", "--eps", "0.1"]);
    assert_eq!(code, 0);
    put(&d, "pair.json", &serde_json::to_string(&serde_json::json!({"x": rep["result"]["x"], "y": rep["result"]["y"]})).unwrap());
    assert_eq!(run(&d, &["verify", "ne", "--game", "g.json", "--pair", "pair.json", "--eps", "0.1"]).0, 0);
    assert_eq!(run(&d, &["solve", "grid", "--game", "g.json", "--m", "4", "--eps", "0.1"]).0, 0);
    let (code, rep) = run(&d, &["solve", "fp", "--game", "g.json", "--iters", "2000"]);
    assert_eq!(code, 0);
    let b = &rep["result"]["certificate"];
    assert!(b["lower"].as_f64().unwrap() <= 0.5 && b["upper"].as_f64().unwrap() >= 0.5);
    let a = run(&d, &["solve", "brd", "--game", "p.json", "--iters", "50", "--seed", "9"]).1;
    let b = run(&d, &["solve", "brd", "--game", "p.json", "--iters", "50", "--seed", "9", "--threads", "1"]).1;
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn roundtrip_reports_uniformity_and_reproduces() {
    let d = workdir("roundtrip");
    put(&d, "tiny.json", TINY);
    let args = ["roundtrip", "circuit2bimatrix", "--circuit", "tiny.json", "--eps", "0.25", "--delta", "0.5", "--artifacts", "art"];
    let (code, first) = run(&d, &args);
    assert_eq!(code, 0);
    assert_eq!(first["result"]["uniformity_check"]["pass"], true);
    assert_eq!(first["result"]["assignment"], serde_json::json!({"a": 1.0, "b": 0.0}));
    let _: BimatrixGame = reparse(&d.join("art/bimatrix.json"));
    let (_, second) = run(&d, &args);
    assert_eq!(first, second);
}

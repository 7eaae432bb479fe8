//! End-to-end runs of the binary, covering the exit-code matrix.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rayless::corpus;
use rayless::graph::FiniteGraph;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rayless"));
    c.env_remove("WORKBENCH_LOG");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> PathBuf {
    write(dir, name, &serde_json::to_string(value).unwrap())
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn triangle_json() -> String {
    r#"{"vertices":["a","b","c"],"edges":[["a","b"],["a","c"],["b","c"]]}"#.into()
}

#[test]
fn solve_finite_triangle_ok() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &triangle_json());
    let out = bin().args(["solve-finite"]).arg(&g).arg("--json").output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["partition"]["assignments"].is_object());
}

#[test]
fn malformed_graph_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", "{not json");
    let out = bin().args(["solve-finite"]).arg(&g).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn extend_respects_fixed_side() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &triangle_json());
    let fixed = write(dir.path(), "fixed.json", r#"{"assignments":{"a":1}}"#);
    let out = bin().args(["extend"]).arg(&g).arg(&fixed).arg("--json").output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["partition"]["assignments"]["a"], 1);
}

#[test]
fn rank_p7_prints_two() {
    let dir = tempfile::tempdir().unwrap();
    let vertices: Vec<String> = (1..=7).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, String)> =
        (1..7).map(|i| (format!("v{i}"), format!("v{}", i + 1))).collect();
    let g = FiniteGraph::new(vertices, edges).unwrap();
    let path = write_json(dir.path(), "p7.json", &g);
    let out = bin().args(["rank"]).arg(&path).args(["--base", "edgeless", "--k", "1"]).output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");
    // The reference recursion agrees.
    let naive = bin().args(["rank"]).arg(&path).args(["--k", "1", "--naive"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&naive.stdout).trim(), "2");
}

#[test]
fn rank_without_budget_is_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &triangle_json());
    let out = bin().args(["rank"]).arg(&g).args(["--k", "0"]).output().unwrap();
    assert_eq!(code(&out), 1, "{out:?}");
}

#[test]
fn rank_over_ceiling_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let vertices: Vec<String> = (0..17).map(|i| format!("v{i:02}")).collect();
    let g = FiniteGraph::new(vertices, std::iter::empty()).unwrap();
    let path = write_json(dir.path(), "big.json", &g);
    let out = bin().args(["rank"]).arg(&path).args(["--k", "1"]).output().unwrap();
    assert_eq!(code(&out), 3, "{out:?}");
}

#[test]
fn srank_and_atlas_on_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let star = write_json(dir.path(), "star.json", &corpus::omega_star());
    let t2 = write_json(dir.path(), "t2.json", &corpus::two_level_tree());
    let out = bin().args(["srank"]).arg(&star).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1");
    let out = bin().args(["srank"]).arg(&t2).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");
    let out = bin().args(["atlas"]).arg(&t2).arg("--json").output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["in_w"], false);
    assert_eq!(v["atlas"]["v_star_size"], "omega");
}

#[test]
fn solve_check_xval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "p.json", &corpus::two_level_tree());
    let sigma = dir.path().join("sigma.json");
    let out = bin().args(["solve"]).arg(&p).arg("-o").arg(&sigma).output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let out = bin().args(["check"]).arg(&p).arg(&sigma).output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let out = bin().args(["xval"]).arg(&p).arg(&sigma).args(["--ns", "1..6"]).output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
}

#[test]
fn check_rejects_bad_partition_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "p.json", &corpus::omega_star());
    let sigma = write(
        dir.path(),
        "sigma.json",
        r#"{"s_colours":{"c":0},"families":[{"default":{"leaf_colours":{"x":0}},"exceptions":{}}]}"#,
    );
    let out = bin().args(["check"]).arg(&p).arg(&sigma).output().unwrap();
    assert_eq!(code(&out), 1, "{out:?}");
}

#[test]
fn solve_with_seed_partition_pins_addresses() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "p.json", &corpus::omega_star());
    let seed = write(
        dir.path(),
        "seed.json",
        r#"{"assignments":{"S:c":0,"0[5]/x":0}}"#,
    );
    let out = bin()
        .args(["solve"])
        .arg(&p)
        .arg("--seed-partition")
        .arg(&seed)
        .arg("--json")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sigma"]["families"][0]["exceptions"]["5"]["leaf_colours"]["x"], 0);
}

#[test]
fn instantiate_emits_reparseable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "p.json", &corpus::omega_star());
    let out = bin().args(["instantiate"]).arg(&p).arg("3").arg("--json").output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let g: FiniteGraph = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g.num_vertices(), 4);
    // Canonical emission: serializing the re-parsed value is identical.
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&g).unwrap(), text.trim_end());
}

#[test]
fn xval_range_and_list_forms() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "p.json", &corpus::omega_star());
    let sigma = dir.path().join("sigma.json");
    bin().args(["solve"]).arg(&p).arg("-o").arg(&sigma).output().unwrap();
    for ns in ["1..8", "1,3,8", "0"] {
        let out = bin().args(["xval"]).arg(&p).arg(&sigma).args(["--ns", ns]).output().unwrap();
        assert_eq!(code(&out), 0, "ns={ns}: {out:?}");
    }
    let out = bin().args(["xval"]).arg(&p).arg(&sigma).args(["--ns", "five"]).output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn bogus_log_level_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &triangle_json());
    let out = bin()
        .args(["solve-finite"])
        .arg(&g)
        .env("WORKBENCH_LOG", "loud")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn capacity_from_symbolic_solver_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "p.json", &corpus::big_leaf());
    // A five-vertex leaf fits the default bound but not a shrunken one.
    let out = bin().args(["solve"]).arg(&p).args(["--max-leaf", "4"]).output().unwrap();
    assert_eq!(code(&out), 3, "{out:?}");
    let out = bin().args(["solve"]).arg(&p).output().unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
}

#[test]
fn emitted_partitions_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, p) in [("star", corpus::omega_star()), ("mix", corpus::depth3_mixed())] {
        let path = write_json(dir.path(), &format!("{name}.json"), &p);
        let sigma_path = dir.path().join(format!("{name}-sigma.json"));
        let out = bin().args(["solve"]).arg(&path).arg("-o").arg(&sigma_path).output().unwrap();
        assert_eq!(code(&out), 0, "{name}: {out:?}");
        let text = std::fs::read_to_string(&sigma_path).unwrap();
        let sigma: rayless::symbolic::SymbolicPartition = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&sigma).unwrap(), text.trim_end());
    }
}

#[test]
fn seed_partition_file_feeds_solve_finite() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &triangle_json());
    let seed = write(dir.path(), "seed.json", r#"{"assignments":{"a":1,"b":0,"c":1}}"#);
    let out = bin()
        .args(["solve-finite"])
        .arg(&g)
        .arg("--seed-partition")
        .arg(&seed)
        .arg("--json")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let sides: BTreeMap<String, i64> =
        serde_json::from_value(v["partition"]["assignments"].clone()).unwrap();
    assert_eq!(sides.len(), 3);
}

use std::fs;
use std::path::Path;

use collab_hub::cli::{run, EXIT_ERROR, EXIT_OK, EXIT_REFUTED};
use collab_hub::instance::{save_instance, Instance, InstanceData, Scenario};

fn cli(args: &[&str]) -> i32 {
    run(std::iter::once("collab-hub").chain(args.iter().copied()))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write_instance(dir: &Path, name: &str, edit: impl FnOnce(&mut InstanceData)) -> String {
    let mut data = InstanceData {
        n: 3,
        demand: vec![vec![0.0, 0.0, 10.0], vec![0.0; 3], vec![0.0; 3]],
        cost: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
        setup: vec![100.0, 5.0, 100.0],
        capacity: vec![20.0; 3],
        chi: 1.0,
        alpha: 0.5,
        delta: 1.0,
        scenarios: vec![Scenario { supplement: vec![0.0; 3] }],
        chains: vec![vec![0, 1], vec![1, 2]],
    };
    edit(&mut data);
    let p = path(dir, name);
    fs::write(&p, save_instance(&Instance::new(data).unwrap())).unwrap();
    p
}

#[test]
fn gen_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "a.json");
    let out = path(dir.path(), "sol.json");
    assert_eq!(cli(&["gen", "--seed", "1", "--nodes", "4", "--chains", "2", "--scenarios", "2", "-o", &inst]), EXIT_OK);
    assert_eq!(cli(&["solve", "--model", "nc", &inst, "-o", &out]), EXIT_OK);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["status"], "optimal");
    assert_eq!(report["options"]["eq20_mode"], "linearized");
    assert!(report["objective"].as_f64().unwrap() > 0.0);
}

#[test]
fn every_model_and_flag_combination_runs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "t.json", |_| {});
    for model in ["nc", "cc", "ccu", "ocu"] {
        for flags in [
            ["--distribution-cost", "literal", "--ocu-objective", "split"],
            ["--eq20", "omit", "--big-m", "total"],
        ] {
            let out = path(dir.path(), "o.json");
            let mut args = vec!["solve", "--model", model];
            args.extend(flags);
            args.extend([inst.as_str(), "-o", out.as_str()]);
            assert_eq!(cli(&args), EXIT_OK, "{args:?}");
        }
    }
}

#[test]
fn toy3_regret_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "t.json", |d| {
        d.scenarios.push(Scenario { supplement: vec![0.0, 10.0, 0.0] });
    });
    let out = path(dir.path(), "r.json");
    assert_eq!(cli(&["regret", "--model", "ccu", &inst, "-o", &out]), EXIT_OK);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let baselines: Vec<f64> = serde_json::from_value(report["baselines"].clone()).unwrap();
    assert!((baselines[0] - 25.0).abs() < 1e-9 && (baselines[1] - 35.0).abs() < 1e-9);
    assert!(report["max_regret"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn single_chain_ocu_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "one.json", |d| d.chains = vec![vec![0, 1, 2]]);
    assert_eq!(cli(&["solve", "--model", "ocu", &inst]), EXIT_ERROR);
    assert_eq!(cli(&["verify", "--claim", "thm1", &inst]), EXIT_ERROR);
}

#[test]
fn infeasible_model_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "tight.json", |d| d.capacity = vec![1.0; 3]);
    let out = path(dir.path(), "o.json");
    assert_eq!(cli(&["solve", "--model", "nc", &inst, "-o", &out]), EXIT_REFUTED);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["status"], "infeasible");
    assert!(report["objective"].is_null());
}

#[test]
fn counterexample_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "zero.json", |d| {
        d.demand = vec![vec![0.0; 3]; 3];
        d.setup = vec![0.0; 3];
    });
    let out = path(dir.path(), "tk.json");
    assert_eq!(cli(&["verify", "--claim", "tk", &inst, "-o", &out]), EXIT_REFUTED);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["verdict"], "COUNTEREXAMPLE");
    assert_eq!(report["zero_objective"], true);
}

#[test]
fn theorem1_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "thm1.csv");
    assert_eq!(cli(&["verify", "--claim", "thm1", "--trials", "100", "--seed", "7", "-o", &out]), EXIT_OK);
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let verdict = reader.headers().unwrap().iter().position(|h| h == "verdict").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| &r[verdict] == "CONFIRMED"));
}

#[test]
fn sweep_writes_rows_and_tally() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "sweep.csv");
    let summary = path(dir.path(), "tally.json");
    let code = cli(&["sweep", "--trials", "3", "--seed", "2", "-o", &out, "--summary", &summary]);
    assert_ne!(code, EXIT_ERROR);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1 + 3 * 5);
    let tally: serde_json::Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(tally["tally"].as_object().unwrap().len(), 5);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "t.json", |d| {
        d.scenarios.push(Scenario { supplement: vec![0.0, 200.0, 0.0] });
    });
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    assert_eq!(cli(&["regret", "--model", "ocu", &inst, "-o", &a]), EXIT_OK);
    assert_eq!(cli(&["regret", "--model", "ocu", &inst, "-o", &b]), EXIT_OK);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["solve", "--model", "xyz", "missing.json"]), EXIT_ERROR);
    assert_eq!(cli(&["frobnicate"]), EXIT_ERROR);
    assert_eq!(cli(&["solve", "--model", "nc", "/nonexistent/file.json"]), EXIT_ERROR);
    assert_eq!(cli(&["regret", "--model", "nc", "/nonexistent/file.json"]), EXIT_ERROR);
}

#[test]
fn malformed_instance_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "bad.json");
    fs::write(&p, "{\"n\": 2, \"extra\": 1}").unwrap();
    assert_eq!(cli(&["solve", "--model", "nc", &p]), EXIT_ERROR);
}

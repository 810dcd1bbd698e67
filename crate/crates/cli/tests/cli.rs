use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({}): {}", e, String::from_utf8_lossy(&out.stdout))
    })
}

fn ranks(r: &Value) -> Vec<u64> {
    let obj = r["ranks"].as_object().unwrap();
    let mut v: Vec<(i64, u64)> = obj.iter().map(|(k, x)| (k.parse().unwrap(), x.as_u64().unwrap())).collect();
    v.sort();
    v.into_iter().map(|p| p.1).collect()
}

#[test]
fn graph_ranks_for_two_and_three_points() {
    let out = run(&["graphs", "--d", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(&ranks(&r)[..2], &[1, 1]);
    assert!(r["warnings"].as_array().unwrap().is_empty());
    assert_eq!(r["phi"]["ok"], true);

    let out = run(&["graphs", "--d", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(&ranks(&report(&out))[..3], &[1, 3, 2]);
}

#[test]
fn unsaturated_window_warns() {
    let out = run(&["graphs", "--d", "2", "--n", "2", "--max-k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning: window not saturated"), "{}", err);
    assert!(!report(&out)["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn graph_file_and_matrices() {
    let out = run(&["graphs", "--n", "3", "--matrices", "--graph", &data("tripod.txt")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(!r["differentials"].as_array().unwrap().is_empty());
    assert_eq!(r["graph"]["zero"], false);
    assert!(r["graph"]["canonical"].is_string());
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["graphs", "--d", "3", "--n", "2", "--seed", "11"]);
    let b = run(&["graphs", "--d", "3", "--n", "2", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["selftest"]);
    let b = run(&["selftest"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selftest_passes_and_records_the_seed() {
    let out = run(&["selftest", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["seed"], 3);
    assert_eq!(r["passed"], true);
}

#[test]
fn selftest_negative_controls_fail() {
    let out = run(&["selftest", "--corrupt-bracket"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("word (f h e)"));

    let out = run(&["selftest", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let failing: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|c| c["residual"].as_f64().unwrap() > 0.0));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["graphs", "--d", "1"]).status.code(), Some(2));
    assert_eq!(run(&["--caps", "0,3", "selftest"]).status.code(), Some(2));
    assert_eq!(run(&["holonomy", "missing.json", "also_missing.json"]).status.code(), Some(2));
    assert_eq!(run(&["kz", &data("tripod.txt")]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sphere_holonomy_is_maurer_cartan() {
    let out = run(&["holonomy", &data("sphere.json"), &data("sphere_simplices.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let rows = r["simplices"].as_array().unwrap();
    let dims: Vec<u64> = rows.iter().map(|s| s["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![0, 1, 2, 3]);
    for s in rows {
        assert_eq!(s["mc"]["passed"], true);
        assert!(s["mc"]["residual"].as_f64().unwrap() <= 1e-6);
    }
}

#[test]
fn strict_holonomy_reports_compatibility() {
    let out = run(&["holonomy", &data("heisenberg.json"), &data("triangle.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for s in r["simplices"].as_array().unwrap() {
        assert_eq!(s["compatibility"]["passed"], true);
        assert!(!s["leading"].as_array().unwrap().is_empty());
    }
}

#[test]
fn kz_documents() {
    let out = run(&["kz", &data("kz_loop.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["closed"], true);
    assert_eq!(r["fibre_dim"], 8);
    assert!(r["flatness"]["residual"].as_f64().unwrap() <= 1e-10);

    let out = run(&["kz", &data("kz_twist.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["series_vs_ode"]["residual"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn out_flag_writes_the_report() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("graphs_report.json");
    let out = run(&["graphs", "--n", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["command"], "graphs");
}

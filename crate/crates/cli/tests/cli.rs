use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use revcs_core::bounds::BoundReport;
use serde_json::Value;

fn revcs(args: &[&str]) -> Output {
    revcs_env(args, &[])
}

fn revcs_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_revcs"));
    cmd.args(args).env_remove("REVCS_TOL_RTOL").env_remove("REVCS_TOL_ATOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn doc_example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "docs", "examples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_diagonal_instance_holds() {
    let o = revcs(&["--json", "verify", &doc_example("diagonal_module.json")]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "HOLDS");
    assert!((v["margin"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    let report: BoundReport = serde_json::from_value(v).unwrap();
    assert_eq!(report.margin, Some(0.25));
}

#[test]
fn verify_shipped_examples() {
    for name in ["operator_pair.json", "constant_family.json"] {
        let o = revcs(&["verify", &doc_example(name)]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
        assert!(String::from_utf8_lossy(&o.stdout).contains("HOLDS"));
    }
}

#[test]
fn degenerate_pair_with_x_off_the_line_is_a_precondition_failure() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "bad.json",
        r#"{"version":"1","target":"ADD_MATRIX_14",
            "form":{"kind":"ModuleForm","algebra_dim":2},
            "x":{"element":[[[2,0],[0,0]],[[0,0],[3,0]]]},
            "y":{"element":[[[1,0],[0,0]],[[0,0],[1,0]]]},
            "omega_pair":{"omega":[2,0],"Omega":[2,0]}}"#,
    );
    let o = revcs(&["--json", "verify", &f]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["verdict"], "PRECONDITION_FAILED");
}

#[test]
fn hypothesis_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "neg.json",
        r#"{"version":"1","target":"MULT_FUNC","functional":{"kind":"Trace","dim":1},
            "x":[[[1,0]]],"y":[[[1,0]]],"omega_pair":{"omega":[-1,0],"Omega":[1,0]}}"#,
    );
    assert_eq!(code(&revcs(&["verify", &f])), 3);
}

#[test]
fn malformed_and_invalid_files_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{ not json");
    let o = revcs(&["verify", &broken]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid JSON"));

    let schema = write(
        dir.path(),
        "schema.json",
        r#"{"version":"1","target":"OP_PAIR_ADD","T":[[[1,0]]],"S":[[[1,0]]],"v":[[1,"x"]]}"#,
    );
    let o = revcs(&["verify", &schema]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/v/0/1"), "{}", String::from_utf8_lossy(&o.stderr));

    assert_eq!(code(&revcs(&["verify", "/nonexistent/file.json"])), 1);
    assert_eq!(code(&revcs(&["frobnicate"])), 1);
}

#[test]
fn fuzz_functional_bound_is_clean() {
    let o = revcs(&["--json", "--seed", "42", "fuzz", "ADD_FUNC", "--trials", "1000"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["violated"], 0);
    assert_eq!(v["trials_run"], 1000);
}

#[test]
fn fuzz_zero_trials_and_unknown_id() {
    let o = revcs(&["--json", "fuzz", "MULT_MATRIX_STAR", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["trials_run"], 0);
    assert_eq!(v["worst_margin"], Value::Null);
    assert_eq!(code(&revcs(&["fuzz", "NOT_AN_ID"])), 1);
}

#[test]
fn replay_reproduces_worst_margin() {
    let s = stdout_json(&revcs(&["--json", "--seed", "5", "fuzz", "GREUB_RHEINBOLDT", "--trials", "200", "--parallel"]));
    let trial = s["worst_trial"].as_u64().unwrap().to_string();
    let r = stdout_json(&revcs(&["--json", "--seed", "5", "fuzz", "GREUB_RHEINBOLDT", "--trials", "200", "--replay", &trial]));
    assert_eq!(r["margin"].as_f64().unwrap().to_bits(), s["worst_margin"].as_f64().unwrap().to_bits());
}

#[test]
fn sharpness_demo() {
    let o = revcs(&["--json", "sharpness", "--omega", "1", "--Omega", "3", "--dim", "2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["ratio"], 0.25);
    assert_eq!(v["witness"]["report"]["lhs"], 1.0);

    let o = revcs(&["sharpness", "--omega", "2", "--Omega", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("undefined"));

    assert_eq!(code(&revcs(&["--seed", "3", "sharpness", "--omega", "-1,0.5", "--Omega", "2,1", "--dim", "3", "--sweep", "100"])), 0);
    assert_eq!(code(&revcs(&["sharpness", "--dim", "1"])), 2);
}

#[test]
fn compare_writes_csv_and_sees_every_constant() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let o = revcs(&["--json", "compare", "--samples", "2000", "--n", "3", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["all_indices_seen"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "sample,family,a,A,b,B,c1,c2,c3,argmin,lhs,margin,eq_residual");
    assert_eq!(lines.count(), 2002);

    assert_eq!(code(&revcs(&["compare", "--samples", "10", "--csv", "/nonexistent/dir/rows.csv"])), 1);
}

#[test]
fn tolerance_precedence() {
    let f = doc_example("diagonal_module.json");
    let o = revcs_env(&["--json", "verify", &f], &[("REVCS_TOL_RTOL", "not-a-number")]);
    assert_eq!(code(&o), 1);
    let o = revcs_env(&["--tol-rtol", "1e-3", "verify", &f], &[("REVCS_TOL_RTOL", "0.5")]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("rtol 1.00000e-3"));
    let o = revcs_env(&["verify", &f], &[("REVCS_TOL_ATOL", "1e-6")]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("atol 1.00000e-6"));
}

//! End-to-end behaviour of the command line and its artifacts.

use std::fs;
use std::path::Path;
use std::process::Command as Process;

use serde_json::Value;
use stlab::run::read_traces;
use stlab::{parse_config, run};

const CM_COUNT: &str = r#"{"command":"count","curve":{"genus":1,"f":[0,1,0,1]},"p_max":100,"descriptor":[-1]}"#;

fn stlab(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_stlab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn count_writes_header_and_one_row_per_good_prime() {
    let cfg = parse_config(CM_COUNT).unwrap();
    let out = run(&cfg, CM_COUNT, 2).unwrap();
    let lines: Vec<&str> = out.artifact.lines().collect();
    assert!(lines[0].starts_with("# tool=stlab version="));
    assert!(lines[0].contains("command=count seed=0 config_sha256="));
    assert_eq!(lines[1], "p,class,N1,N2,s1,e2,t,u");
    assert_eq!(lines.len() - 2, 24);
    assert_eq!(lines[2], "3,s1,4,,0,,0,");
    assert_eq!(lines[3], "5,id,4,,2,,0.894427191,");
}

#[test]
fn traces_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(CM_COUNT).unwrap();
    let csv = run(&cfg, CM_COUNT, 1).unwrap().artifact;
    let path = dir.path().join("t.csv");
    fs::write(&path, &csv).unwrap();
    let records = read_traces(&path).unwrap();
    let direct = stlab_core::frobenius::scan_primes(
        cfg.curve.as_ref().unwrap(),
        100,
        cfg.label_group().as_ref(),
        1,
    )
    .unwrap();
    assert_eq!(records, direct);
}

#[test]
fn genus2_rows_carry_second_coefficient() {
    let text = r#"{"command":"count","curve":{"genus":2,"f":[1,1,0,0,0,1]},"p_max":30}"#;
    let out = run(&parse_config(text).unwrap(), text, 1).unwrap().artifact;
    let row = out.lines().nth(2).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 8);
    assert!(fields[3].parse::<u64>().is_ok() && fields[5].parse::<i64>().is_ok() && !fields[7].is_empty());
}

#[test]
fn haar_quadrature_gives_catalan_numbers() {
    let out = stlab(&["haar-moments", "--group", "SU2", "--method", "quad", "--k", "8"]);
    assert!(out.status.success());
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let values: Vec<f64> = json["moments"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expected = [1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0];
    assert_eq!(values.len(), 9);
    for (v, e) in values.iter().zip(expected) {
        assert!((v - e).abs() < 1e-8, "{values:?}");
    }
    assert_eq!(json["header"]["command"], "haar-moments");
}

#[test]
fn selftest_passes() {
    let out = stlab(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failed"));
}

#[test]
fn failing_verdict_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        r#"{"curve":{"genus":1,"f":[0,1,0,1]},"p_max":5000,"descriptor":[-1],
            "catalog":["SU2"],"hypothesis":{"id":"SU2","s1":"NU1/nontrivial"}}"#,
    );
    let out_path = dir.path().join("r.json");
    let out = stlab(&["analyze", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["conditional"]["classes"][0]["verdict"], "fail");
}

#[test]
fn analyze_reads_precomputed_traces() {
    let dir = tempfile::tempdir().unwrap();
    let count_cfg = write(
        dir.path(),
        "c.json",
        r#"{"command":"count","curve":{"genus":1,"f":[1,1,0,1]},"p_max":20000}"#,
    );
    let csv = dir.path().join("t.csv");
    assert!(stlab(&["count", "--config", &count_cfg, "--out", csv.to_str().unwrap()]).status.success());
    let analyze_cfg = write(dir.path(), "a.json", r#"{"command":"analyze","catalog":["U1","NU1","SU2","USp4"]}"#);
    let out = stlab(&["analyze", "--config", &analyze_cfg, "--traces", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["identified"], "SU2/mixture");
    assert_eq!(report["n_records"], 2260);
}

#[test]
fn errors_carry_module_codes() {
    let dir = tempfile::tempdir().unwrap();
    let singular = write(dir.path(), "s.json", "{\n \"command\": \"count\",\n \"curve\": {\"genus\": 1, \"f\": [0,0,0,1]},\n \"p_max\": 50\n}");
    let out = stlab(&["count", "--config", &singular]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(!out.status.success());
    assert!(err.contains("error[cli.config]") && err.contains("line 3") && err.contains("singular model"), "{err}");
    let unknown = write(dir.path(), "u.json", r#"{"command":"fly"}"#);
    let err = String::from_utf8_lossy(&stlab(&["count", "--config", &unknown]).stderr).to_string();
    assert!(err.contains("unknown command"), "{err}");
    let big = write(
        dir.path(),
        "b.json",
        r#"{"command":"count","curve":{"genus":2,"f":[1,1,0,0,0,1]},"p_max":5000}"#,
    );
    assert!(!stlab(&["count", "--config", &big]).status.success());
    let missing = stlab(&["count", "--config", "/nonexistent/config.json"]);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error[cli.io]"));
}

#[test]
fn lefschetz_report_for_gaussian_plane() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "l.json",
        r#"{"command":"lefschetz","seed":3,
            "space":{"weight":1,"pairing":[[0,1],[-1,0]]},
            "endomorphisms":[[["0","-1"],["1","0"]]],
            "galois":{"descriptor":[-1],"actions":[[[1,0],[0,1]],[[1,0],[0,-1]]]},
            "composites":[{"power":2},{"power":3}]}"#,
    );
    let out = stlab(&["lefschetz", "--config", &cfg, "--budget", "50"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["lie_dim"], 1);
    assert_eq!(report["surjection"]["verdict"], "surjective_complex_points");
    assert_eq!(report["composites_pass"], true);
    assert_eq!(report["header"]["settings"]["search_budget"], 50);
    assert_eq!(report["header"]["seed"], 3);
}

use std::process::{Command, Output};

use serde_json::Value;

fn vsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsynth"))
        .args(args)
        .env_remove("VSYNTH_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn decimal_le(a: &str, b: &str) -> bool {
    let parse = |s: &str| vsynth::expr::parse_epsilon(s).unwrap();
    a == "0" || parse(a) <= parse(b)
}

#[test]
fn synth_json_matches_golden_file() {
    let out = vsynth(&["synth", "--theta", "pi/128", "--epsilon", "1e-10", "--format", "json"]);
    let mut v = json(&out);
    assert!(v["elapsed_ms"].is_number());
    v["elapsed_ms"] = Value::from(0);
    let got = serde_json::to_string_pretty(&v).unwrap() + "\n";
    let want = include_str!("golden/synth_pi_128.json");
    assert_eq!(got, want);
    assert!(decimal_le(v["error_bound"].as_str().unwrap(), "1e-10"));
}

#[test]
fn synth_record_is_consistent_with_check() {
    let v = json(&vsynth(&["synth", "--theta", "-0.7", "--epsilon", "1e-6", "--format", "json"]));
    let circuit = v["circuit"].as_str().unwrap();
    let parsed: vsynth::exact::Circuit = circuit.parse().unwrap();
    assert_eq!(parsed.to_string(), circuit);
    assert_eq!(parsed.v_count() as u64, v["v_count"].as_u64().unwrap());
    let out = vsynth(&["check", "--theta", "-0.7", "--circuit", circuit]);
    assert!(out.status.success());
    let d = String::from_utf8(out.stdout).unwrap();
    assert!(decimal_le(d.trim(), "1e-6"), "{d}");
}

#[test]
fn text_and_json_agree() {
    let args = ["synth", "--theta", "0.4", "--epsilon", "1e-4"];
    let v = json(&vsynth(&[&args[..], &["--format", "json"]].concat()));
    let text = String::from_utf8(vsynth(&args).stdout).unwrap();
    for key in ["circuit", "v_count", "error_bound", "candidates_examined", "levels_visited", "backend"] {
        let line = text.lines().find(|l| l.starts_with(&format!("{key}:"))).unwrap();
        let shown = line.split_once(": ").map(|(_, v)| v).unwrap_or("");
        let want = match &v[key] {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(shown, want, "{key}");
    }
}

#[test]
fn trivial_and_clifford_cases() {
    let v = json(&vsynth(&["synth", "--theta", "0", "--epsilon", "1e-3", "--format", "json"]));
    assert_eq!(v["v_count"], 0);
    assert_eq!(v["circuit"], "");
    let v = json(&vsynth(&["synth", "--theta", "1.0", "--epsilon", "0.9", "--format", "json"]));
    assert_eq!(v["v_count"], 0);
}

#[test]
fn pauli_mode_from_the_command_line() {
    let v = json(&vsynth(&[
        "synth", "--theta", "3*pi/64", "--epsilon", "1e-5", "--gate-set", "pauli+v", "--format", "json",
    ]));
    let c: vsynth::exact::Circuit = v["circuit"].as_str().unwrap().parse().unwrap();
    assert!(c.is_pauli_v());
}

#[test]
fn check_closed_forms() {
    let out = vsynth(&["check", "--theta", "0", "--circuit", ""]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "0");
    let out = vsynth(&["check", "--theta", "1.3", "--circuit", "VZ VZd", "--format", "json"]);
    let d: f64 = json(&out)["distance"].as_str().unwrap().parse().unwrap();
    assert!((d - 2.0 * (1.3f64 / 4.0).sin()).abs() < 1e-15);
}

#[test]
fn oracle_and_dioph_reports() {
    let v = json(&vsynth(&["oracle", "--theta", "0", "--epsilon", "0.1"]));
    assert_eq!(v["k"], 0);
    let v = json(&vsynth(&["dioph", "--n", "21"]));
    assert_eq!(v["representable"], false);
    let v = json(&vsynth(&["dioph", "--n", "98"]));
    assert_eq!(v["representable"], true);
    let sq: Vec<i64> = v["two_squares"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().parse().unwrap())
        .collect();
    assert_eq!(sq[0] * sq[0] + sq[1] * sq[1], 98);
    let v = json(&vsynth(&["dioph", "--n", "21", "--effort", "fast"]));
    assert_eq!(v["complete"], false);
    assert!(v["representable"].is_null());
}

#[test]
fn grid_dump_lists_candidates() {
    let v = json(&vsynth(&["grid", "--theta", "0.3", "--epsilon", "0.3", "--k", "4"]));
    let n = v["count"].as_u64().unwrap();
    assert!(n > 0);
    assert!(v["uprightness_after"].as_f64().unwrap() >= 0.5);
}

#[test]
fn bench_rows_stay_under_the_ceiling_and_keep_order() {
    let v = json(&vsynth(&["bench", "--thetas", "4", "--eps", "1e-2..1e-5"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[0]["theta"], "1*pi/4");
    assert_eq!(rows[0]["epsilon"], "1e-2");
    assert_eq!(rows[5]["epsilon"], "1e-3");
    for r in rows {
        assert_eq!(r["within_ceiling"], true, "{r}");
    }
    let out = vsynth(&["bench", "--thetas", "0.1,0.2", "--eps", "1e-3", "--format", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(vsynth(&["synth", "--theta", "pi/", "--epsilon", "1e-3"]).status.code(), Some(1));
    assert_eq!(vsynth(&["synth", "--theta", "1", "--epsilon", "0"]).status.code(), Some(1));
    assert_eq!(vsynth(&["synth", "--theta", "1", "--epsilon", "-1e-3"]).status.code(), Some(1));
    assert_eq!(vsynth(&["check", "--theta", "1", "--circuit", "T"]).status.code(), Some(1));
    assert_eq!(vsynth(&["frobnicate"]).status.code(), Some(1));
    let capped = vsynth(&["synth", "--theta", "1", "--epsilon", "1e-9", "--candidate-cap", "1"]);
    assert_eq!(capped.status.code(), Some(2));
    assert_eq!(vsynth(&["oracle", "--theta", "1", "--epsilon", "0.1", "--max-vcount", "9"]).status.code(), Some(2));
    assert_eq!(vsynth(&["--help"]).status.code(), Some(0));
}

#[test]
fn precision_override_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_vsynth"))
        .args(["synth", "--theta", "0.5", "--epsilon", "1e-4", "--format", "json"])
        .env("VSYNTH_PRECISION", "512")
        .output()
        .unwrap();
    let v = json(&out);
    let base = json(&vsynth(&["synth", "--theta", "0.5", "--epsilon", "1e-4", "--format", "json"]));
    assert_eq!(v["circuit"], base["circuit"]);
    let bad = Command::new(env!("CARGO_BIN_EXE_vsynth"))
        .args(["synth", "--theta", "0.5", "--epsilon", "1e-4"])
        .env("VSYNTH_PRECISION", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

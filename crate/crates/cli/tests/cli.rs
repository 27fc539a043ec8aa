use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn pushguide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pushguide")).args(args).output().expect("run pushguide")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr is not JSON: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn simulate_json_report() {
    let out = pushguide(&["simulate", "--config", "cs_paper", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tool"], "pushguide");
    assert_eq!(v["config"]["species"], "Cs133");
    let dt = v["report"]["travel_time_ms"].as_f64().unwrap();
    assert!((dt - 130.0).abs() < 26.0, "{dt}");
    for key in ["v0", "v_arrival", "z_out_cm", "delta_r_out_um", "delta_r_arrival_mm", "eta_percent", "refined_score"] {
        assert!(v["report"][key].is_number(), "{key}");
    }
}

#[test]
fn simulate_writes_report_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = pushguide(&["simulate", "--config", "rb_paper", "--set", "beam.power_mW=15", "--out", out_dir]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# pushguide "));
    assert!(csv.contains("# beam.power_mW = 15\n"));
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "z_m,v_mps,Th_uK,depth_uK,delta_r_mm,guided");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2000);
    let last: Vec<f64> = rows.last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 0.72);
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn config_errors_exit_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "species = Rb87\n# comment\nbeam.colour = red\n").unwrap();
    let out = pushguide(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"], "config");
    assert_eq!(e["exit_code"], 2);
    assert!(e["message"].as_str().unwrap().contains("line 3"));

    let empty = pushguide(&["simulate"]);
    assert_eq!(empty.status.code(), Some(2));
    assert!(stderr_json(&empty)["message"].as_str().unwrap().contains("beam.power_mW"));

    let unit = pushguide(&["simulate", "--config", "rb_paper", "--set", "beam.waist_um=3 GHz"]);
    assert_eq!(unit.status.code(), Some(2));
}

#[test]
fn model_validity_exit_3() {
    let out = pushguide(&["simulate", "--config", "rb_paper", "--set", "beam.detuning_GHz=8"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "model_validity");
}

#[test]
fn missing_file_exit_1() {
    let out = pushguide(&["simulate", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn rates_bookkeeping() {
    let out = pushguide(&[
        "rates",
        "--json",
        "--set",
        "rates.L1_per_s=3.9e8",
        "--set",
        "rates.gamma_per_s=0.5",
        "--set",
        "rates.N1_push=1e8",
        "--set",
        "rates.L2_per_s=2.7e8",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rates"]["n1_steady"].as_f64().unwrap(), 3.9e8 / 0.5);
    assert_eq!(v["rates"]["outgoing"]["flux"], 3.4e8);
    assert_eq!(v["rates"]["transfer"]["efficiency"].as_f64().unwrap(), 2.7e8 / 3.4e8);

    let none = pushguide(&["rates"]);
    assert_eq!(none.status.code(), Some(2));
}

#[test]
fn sweep_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = pushguide(&[
        "sweep",
        "--config",
        "rb_paper",
        "--set",
        "sweep.axis1=beam.power_mW values 10 21",
        "--set",
        "sweep.axis2=beam.detuning_GHz range -2 -0.5 7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(body[0].starts_with("beam.power_mW,beam.detuning_GHz,objective,"));
    assert_eq!(body.len(), 1 + 14);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("best refined_score"));
}

#[test]
fn optimize_json_has_trace() {
    let out = pushguide(&[
        "optimize",
        "--config",
        "rb_paper",
        "--json",
        "--set",
        "optimize.param1=beam.detuning_GHz -2.5 -0.3",
        "--set",
        "optimize.objective=travel_time",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["optimize"]["objective"], "travel_time");
    assert!(v["optimize"]["trace"].as_array().unwrap().len() >= 8);
}

#[test]
fn figures_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = pushguide(&["figures", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    for name in ["fig3_cs.csv", "fig5_rb.csv", "fig8_rb.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("# pushguide "), "{name}");
    }
    let fig5 = fs::read_to_string(dir.path().join("fig5_rb.csv")).unwrap();
    let header = fig5.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "detuning_GHz,score_10mW,score_15mW,score_21mW");
}

#[test]
fn mc_summary_json() {
    let out = pushguide(&["mc", "--config", "cs_paper", "--json", "--set", "mc.n_atoms=200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mc"]["ensemble"]["n_atoms"], 200);
    assert_eq!(v["config"]["mc.n_atoms"], "200");
}

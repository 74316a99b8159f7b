use nashswitch::cli::{DOMAINS_HEADER, EVENTS_HEADER, SWEEP_HEADER, TRAJECTORY_HEADER};
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nashswitch")).args(args).output().expect("binary runs")
}

fn run_cfg(cmd: &str, config: &Path, out: &Path) -> Output {
    run(&[cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn write_config(dir: &Path, name: &str, json: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(json).unwrap()).unwrap();
    p
}

fn example2_doc() -> Value {
    serde_json::from_str(&fs::read_to_string(configs().join("example2.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn error_object(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).expect("error JSON on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn analyze_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cfg("analyze", &configs().join("example1.json"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["verdict"], "AsymptoticallyStable");
    assert_eq!(rep["direction"], "CCW");
    assert_eq!(rep["case"], "Case1");
    assert_eq!(rep["eigenvalues"].as_array().unwrap().len(), 4);
    assert!(!rep["mode_map"].as_array().unwrap().is_empty());
    assert_eq!(rep["config"]["game"]["c1"], 162.47);
}

#[test]
fn report_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run_cfg("analyze", &configs().join("example2.json"), d.path()).status.success());
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("report.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn report_floats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_cfg("analyze", &configs().join("example2.json"), dir.path()).status.success());
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let rep: Value = serde_json::from_str(&text).unwrap();
    let g = rep["gamma_rg"].as_f64().unwrap();
    let direct = nashswitch::stability_verdict(&nashswitch::game::examples::example2()).unwrap().gamma_rg.unwrap();
    assert_eq!(g.to_bits(), direct.to_bits());
}

#[test]
fn invalid_game_exits_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["game"]["A1"][0] = 1.0.into();
    let cfg = write_config(dir.path(), "bad.json", &doc);
    let out = run_cfg("analyze", &cfg, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let e = error_object(&out);
    assert_eq!(e["error"]["kind"], "invalid_game");
    assert_eq!(e["error"]["exit_code"], 2);
    assert!(e["error"]["message"].as_str().unwrap().contains("game.A1[0]"));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn parse_error_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["alphas"]["a2_high"] = "nine".into();
    let out = run_cfg("analyze", &write_config(dir.path(), "bad.json", &doc), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let e = error_object(&out);
    assert_eq!(e["error"]["kind"], "config");
    assert!(e["error"]["message"].as_str().unwrap().contains("alphas.a2_high"));
}

#[test]
fn missing_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cfg("analyze", &dir.path().join("nope.json"), dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn assumption_failure_still_reports_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["game"]["A1"] = serde_json::json!([-2, -1, -1, -1]);
    doc["game"]["A2"] = serde_json::json!([-1, -1, -1, -2]);
    let cfg = write_config(dir.path(), "noassume.json", &doc);
    let out = run_cfg("analyze", &cfg, dir.path());
    assert!(out.status.success());
    let rep: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["verdict"], "Inconclusive");
    assert!(rep["reason"].is_string());

    let out = run_cfg("simulate", &cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn error_objects_carry_exit_codes() {
    use nashswitch::cli::error_json;
    use nashswitch::Error;
    for (e, code) in [
        (Error::AssumptionViolated("x".into()), 3),
        (Error::NonPeriodicModeMap, 3),
        (Error::StepTooLarge("x".into()), 4),
        (Error::UnknownParameter("p".into()), 2),
    ] {
        assert_eq!(e.exit_code(), code);
        let v: Value = serde_json::from_str(&error_json(&e)).unwrap();
        assert_eq!(v["error"]["exit_code"], code);
        assert_eq!(v["error"]["kind"], e.kind());
    }
}

#[test]
fn oversized_step_exits_4_without_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["sim"]["step"] = 0.5.into();
    let out = run_cfg("simulate", &write_config(dir.path(), "big.json", &doc), dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_object(&out)["error"]["kind"], "step_too_large");
    assert!(!dir.path().join("trajectory.csv").exists());
    assert!(!dir.path().join("events.csv").exists());
}

#[test]
fn simulate_headers_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cfg("simulate", &configs().join("example2.json"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let raw = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(raw.lines().next().unwrap(), "t,x1,x2,mode,J1,J2,r,theta");
    let raw = fs::read_to_string(dir.path().join("events.csv")).unwrap();
    assert_eq!(raw.lines().next().unwrap(), "t,x1,x2,agents,from_mode,mid_mode,to_mode,flash");

    let (h, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(h, TRAJECTORY_HEADER);
    assert!(rows.len() > 10);
    let t: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[0] < w[1]));
    assert!(rows.iter().all(|r| ["LL", "HL", "LH", "HH"].contains(&r[3].as_str())));

    let (h, events) = csv_rows(&dir.path().join("events.csv"));
    assert_eq!(h, EVENTS_HEADER);
    assert!(!events.is_empty());
    for e in &events {
        assert!(["1", "2", "1,2", "2,1"].contains(&e[3].as_str()), "{e:?}");
        assert!(["true", "false"].contains(&e[7].as_str()));
        assert_ne!(e[4], e[6]);
    }
}

#[test]
fn example1_payoffs_settle_at_equilibrium_values() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_cfg("simulate", &configs().join("example1.json"), dir.path()).status.success());
    let (_, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    let last = rows.last().unwrap();
    let g = nashswitch::game::examples::example1();
    let xs = [5.0, -5.0];
    let j1: f64 = last[4].parse().unwrap();
    let j2: f64 = last[5].parse().unwrap();
    assert!((j1 - g.payoff1.value(xs)).abs() < 1e-8, "{j1}");
    assert!((j2 - g.payoff2.value(xs)).abs() < 1e-8, "{j2}");
}

#[test]
fn start_at_equilibrium_gives_one_row_and_empty_events() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["sim"]["x0"] = serde_json::json!([0, 0]);
    let out = run_cfg("simulate", &write_config(dir.path(), "eq.json", &doc), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(fs::read_to_string(dir.path().join("events.csv")).unwrap(), format!("{}\n", EVENTS_HEADER.join(",")));
}

#[test]
fn domains_default_grid_covers_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cfg("domains", &configs().join("example2.json"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = csv_rows(&dir.path().join("domains.csv"));
    assert_eq!(h, DOMAINS_HEADER);
    assert_eq!(rows.len(), 101 * 101);
    for r in &rows {
        let n: u32 = r[2..6].iter().map(|v| v.parse::<u32>().unwrap()).sum();
        assert!(n >= 1, "{r:?}");
    }
    let centre = rows.iter().find(|r| r[0] == "0.0" && r[1] == "0.0").expect("grid hits x*");
    assert_eq!(&centre[2..7], ["1", "1", "1", "1", ""]);
}

#[test]
fn domains_explicit_grid_and_degenerate_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("example1.json");
    let c = cfg.to_str().unwrap();
    let o = dir.path().to_str().unwrap();
    let out = run(&[
        "domains", "--config", c, "--out", o, "--xmin", "0", "--xmax", "10", "--ymin", "-10", "--ymax", "0", "--n", "5",
    ]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&dir.path().join("domains.csv"));
    assert_eq!(rows.len(), 25);
    let out = run(&[
        "domains", "--config", c, "--out", o, "--xmin", "0", "--xmax", "10", "--ymin", "-10", "--ymax", "0", "--n", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_object(&out)["error"]["kind"], "degenerate_grid");
}

#[test]
fn zero_sum_domains_exclude_pure_modes() {
    let dir = tempfile::tempdir().unwrap();
    let doc = serde_json::json!({
        "game": {"A1": [-2, 1, 1, 3], "A2": [2, -1, -1, -3], "b1": [1, -2], "b2": [-1, 2]},
        "alphas": {"a1_low": 1, "a1_high": 3, "a2_low": 1, "a2_high": 2},
        "grid": {"xmin": -3, "xmax": 3, "ymin": -3, "ymax": 3, "n": 41}
    });
    let out = run_cfg("domains", &write_config(dir.path(), "zs.json", &doc), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = csv_rows(&dir.path().join("domains.csv"));
    let pure = rows.iter().filter(|r| r[2] == "1" || r[5] == "1").count();
    // Only boundary points, where both J̇ vanish, may sit in LL or HH.
    assert!(pure <= 41 * 2, "{pure}");
    assert!(rows.iter().all(|r| !matches!(r[6].as_str(), "LL" | "HH")));
}

#[test]
fn sweep_rows_follow_input_order_and_gamma_changes_sign() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value =
        serde_json::from_str(&fs::read_to_string(configs().join("example2_sweep.json")).unwrap()).unwrap();
    doc["sweep"]["values"] = serde_json::json!([9, 1, 5, 2, 8, 3, 7, 4, 6]);
    let out = run_cfg("sweep", &write_config(dir.path(), "sw.json", &doc), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(h, SWEEP_HEADER);
    let values: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(values, [9.0, 1.0, 5.0, 2.0, 8.0, 3.0, 7.0, 4.0, 6.0]);
    let gamma = |v: f64| -> f64 { rows[values.iter().position(|&x| x == v).unwrap()][3].parse().unwrap() };
    assert!(gamma(1.0) > 0.0 && gamma(9.0) < 0.0);
    assert!((gamma(9.0) + 0.3224).abs() < 5e-3);
}

#[test]
fn sweep_of_linear_term_leaves_case2() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["sweep"] = serde_json::json!({"parameter": "b1_2", "values": [0.0, 1e-6, 0.5, -2.0]});
    let out = run_cfg("sweep", &write_config(dir.path(), "b.json", &doc), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = csv_rows(&dir.path().join("sweep.csv"));
    let cases: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(cases, ["Case2", "Case3", "Case3", "Case3"]);
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["sweep"] = serde_json::json!({"parameter": "a2_high", "values": []});
    assert!(run_cfg("sweep", &write_config(dir.path(), "e.json", &doc), dir.path()).status.success());
    assert_eq!(fs::read_to_string(dir.path().join("sweep.csv")).unwrap(), format!("{}\n", SWEEP_HEADER.join(",")));
}

#[test]
fn unknown_sweep_parameter_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["sweep"] = serde_json::json!({"parameter": "game.A3[0]", "values": [1.0]});
    let out = run_cfg("sweep", &write_config(dir.path(), "u.json", &doc), dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_object(&out)["error"]["kind"], "unknown_parameter");
}

#[test]
fn sweep_into_invalid_region_marks_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = example2_doc();
    doc["sweep"] = serde_json::json!({"parameter": "a2_high", "values": [0.5, 3.0]});
    assert!(run_cfg("sweep", &write_config(dir.path(), "i.json", &doc), dir.path()).status.success());
    let (_, rows) = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0][4], "Invalid");
    assert_eq!(rows[1][4], "GloballyAsymptoticallyStable");
}

#[test]
fn flash_switches_are_marked_in_events() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("flash_switching.json");
    assert!(run_cfg("analyze", &cfg, dir.path()).status.success());
    let rep: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["flash_phases"].as_array().unwrap().len(), 2);
    assert!(run_cfg("simulate", &cfg, dir.path()).status.success());
    let (_, events) = csv_rows(&dir.path().join("events.csv"));
    let flashes: Vec<_> = events.iter().filter(|e| e[7] == "true").collect();
    assert!(!flashes.is_empty());
    for e in flashes {
        assert_eq!(e[3], "2,1");
        assert!(["LH", "HL"].contains(&e[4].as_str()) && ["LH", "HL"].contains(&e[6].as_str()), "{e:?}");
        assert!(["LL", "HH"].contains(&e[5].as_str()));
    }
}

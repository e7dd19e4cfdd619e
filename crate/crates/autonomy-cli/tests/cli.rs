//! End-to-end checks of the `autonomy` binary: exit codes, golden output,
//! output stability, and the curve emitters.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use autonomy_cli::scenario;

fn autonomy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autonomy")).args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn assess_vehicle_a_golden() {
    let out = autonomy(&["assess", "--scenario", "driving-table4", "--system", "A"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("LoA 2 (reliability-conditioned)"), "{text}");
    assert!(text.contains("27524500×10⁻⁶"), "{text}");
    assert!(text.contains("built-up-areas / heading-control: reliability"), "{text}");
}

#[test]
fn assess_vehicle_b_golden() {
    let out = autonomy(&["assess", "--scenario", "driving-table4", "--system", "B"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("LoA 4 (unconditional)"), "{text}");
    assert!(text.contains("23469700×10⁻⁶"), "{text}");
    assert!(text.contains("19229600×10⁻⁶"), "{text}");
}

#[test]
fn assess_subt_exits_two_with_cell_diagnostics() {
    let out = autonomy(&["assess", "--scenario", "subt-table5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.matches("insufficient specification").count(), 12, "{err}");
}

#[test]
fn assess_level_zero_exits_one() {
    // A system that misses one requisite capability classifies at level 0.
    let dir = tempfile::tempdir().unwrap();
    let mut doc = scenario::find("driving-table4").unwrap().document;
    doc.systems[0].capabilities.remove("object-detection");
    let path = dir.path().join("broken.json");
    fs::write(&path, doc.to_canonical_json()).unwrap();

    let out = autonomy(&["assess", "--spec", path.to_str().unwrap(), "--system", "A"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("LoA 0"), "{}", stdout(&out));
}

#[test]
fn machine_report_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    for path in [&first, &second] {
        let out = autonomy(&[
            "assess",
            "--scenario",
            "driving-table4",
            "--system",
            "A",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(&first).unwrap();
    let b = fs::read(&second).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);

    let json: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(json["loa"], 2);
    assert_eq!(json["regions"][0]["doa_micro"], 27524500);
}

#[test]
fn scenario_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exported.json");
    let out = autonomy(&["scenario", "export", "driving-table4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // parse -> serialize -> parse is a fixed point, and assessing the
    // exported file matches the bundled verdicts.
    let text = fs::read_to_string(&path).unwrap();
    let parsed = autonomy_cli::doc::parse_spec_str(&text, true).unwrap();
    assert_eq!(parsed.document.to_canonical_json(), text);

    let out = autonomy(&["assess", "--spec", path.to_str().unwrap(), "--system", "B"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("LoA 4"));
}

#[test]
fn scenario_list_names_bundles() {
    let out = autonomy(&["scenario", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("driving-table4"));
    assert!(text.contains("subt-table5"));
}

#[test]
fn strict_mode_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    let text = scenario::find("driving-table4")
        .unwrap()
        .document
        .to_canonical_json()
        .replacen("\"task\": {", "\"task\": {\n    \"color\": \"red\",", 1);
    fs::write(&path, text).unwrap();

    let lenient = autonomy(&["assess", "--spec", path.to_str().unwrap(), "--system", "A"]);
    assert_eq!(lenient.status.code(), Some(0));
    assert!(stderr(&lenient).contains("warning: unknown field `task.color`"));

    let strict =
        autonomy(&["--strict", "assess", "--spec", path.to_str().unwrap(), "--system", "A"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(stderr(&strict).contains("unknown field"));
}

#[test]
fn empty_spec_is_positioned_syntax_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    fs::write(&path, "").unwrap();
    let out = autonomy(&["assess", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("syntax error at line 1"), "{}", stderr(&out));
}

#[test]
fn generate_is_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for path in [&first, &second] {
        let out = autonomy(&[
            "generate",
            "--scenario",
            "driving-table4",
            "--system",
            "A",
            "--duration",
            "5",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(&first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());
    assert!(a.starts_with(b"timestamp,capability,kind,value\n"));
}

fn generate_log(dir: &Path, name: &str, duration: &str, fault: Option<&str>) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut args: Vec<String> = [
        "generate",
        "--scenario",
        "driving-table4",
        "--system",
        "A",
        "--duration",
        duration,
        "--seed",
        "42",
        "--out",
        path.to_str().unwrap(),
    ]
    .into_iter()
    .map(String::from)
    .collect();
    if let Some(f) = fault {
        args.push("--fault".to_string());
        args.push(f.to_string());
    }
    let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = autonomy(&arg_refs);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    path
}

#[test]
fn monitor_clean_log_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let log = generate_log(dir.path(), "clean.csv", "30", None);
    let out = autonomy(&[
        "monitor",
        "--scenario",
        "driving-table4",
        "--system",
        "A",
        "--region",
        "motorways",
        "--telemetry",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("total integrity events: 0"));
}

#[test]
fn monitor_faulty_log_exits_one_with_event_near_tta() {
    let dir = tempfile::tempdir().unwrap();
    let log = generate_log(
        dir.path(),
        "faulty.csv",
        "120",
        Some("lateral-position-control:step:4@100"),
    );
    let machine = dir.path().join("monitor.json");
    let out = autonomy(&[
        "monitor",
        "--scenario",
        "driving-table4",
        "--system",
        "A",
        "--region",
        "motorways",
        "--telemetry",
        log.to_str().unwrap(),
        "--out",
        machine.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("integrity-event"), "{text}");

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&machine).unwrap()).unwrap();
    let event = json["events"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["kind"] == "integrity-event")
        .expect("integrity event recorded");
    let ts = event["timestamp"].as_f64().unwrap();
    // Fault at 100 s, TTA 1 s, 100-sample window at 200 Hz.
    assert!((101.0..=101.5).contains(&ts), "event at {ts}");
}

#[test]
fn monitor_empty_telemetry_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("empty.csv");
    fs::write(&log, "timestamp,capability,kind,value\n").unwrap();
    let out = autonomy(&[
        "monitor",
        "--scenario",
        "driving-table4",
        "--telemetry",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no operating time"), "{}", stderr(&out));
}

#[test]
fn monitor_reports_unsorted_telemetry_line() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("unsorted.csv");
    fs::write(
        &log,
        "timestamp,capability,kind,value\n1.0,lateral-position-control,err,0.1\n0.5,lateral-position-control,err,0.1\n",
    )
    .unwrap();
    let out = autonomy(&[
        "monitor",
        "--scenario",
        "driving-table4",
        "--telemetry",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn sweep_rel_curve_crosses_unity_at_reference() {
    let out = autonomy(&[
        "sweep", "rel", "--sigma-ref", "0.5,1,2", "--min", "0.25", "--max", "2", "--step", "0.25",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "sigma_act,crel[sigma_ref=0.5],crel[sigma_ref=1],crel[sigma_ref=2]");
    // At sigma_act = 1 the sigma_ref = 1 column is exactly 1.
    let row: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("1,"))
        .expect("row at sigma_act = 1")
        .split(',')
        .collect();
    assert_eq!(row[2], "1");
    // Past the reference the quotient collapses to zero.
    let row2: Vec<&str> = text.lines().find(|l| l.starts_with("2,")).unwrap().split(',').collect();
    assert_eq!(row2[1], "0");
}

#[test]
fn sweep_res_curve_doubles_at_half_reference_time() {
    let out = autonomy(&[
        "sweep", "res", "--t-ref", "0.1", "--min", "0.05", "--max", "0.2", "--step", "0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> =
        text.lines().find(|l| l.starts_with("0.05,")).unwrap().split(',').collect();
    assert_eq!(row[1], "2");
}

#[test]
fn sweep_doa_endpoint_approaches_bounded_influence_limit() {
    // Vehicle A motorway terms without heading control.
    let rest: f64 = [
        0.3826530612244898,
        0.2077562326869806,
        0.17846519928613921,
        0.3675,
        0.2063157894736842,
        0.10421052631578948,
    ]
    .iter()
    .sum();
    let limit = 49.0 / rest;

    let sigma_ref = 1.5 / autonomy_core::SIGMA_TO_ALERT;
    let tiny = (sigma_ref * 1e-6).to_string();
    let out = autonomy(&[
        "sweep",
        "doa",
        "--scenario",
        "driving-table4",
        "--system",
        "A",
        "--capability",
        "heading-control",
        "--region",
        "motorways",
        "--min",
        &tiny,
        "--max",
        &tiny,
        "--step",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().nth(1).expect("one data row");
    let doa: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((doa - limit).abs() / limit < 1e-9, "doa {doa} vs limit {limit}");
}

#[test]
fn sweep_rejects_empty_range() {
    let out = autonomy(&["sweep", "rel", "--sigma-ref", "1", "--min", "2", "--max", "1", "--step", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn baseline_commands_match_hand_values() {
    let level = autonomy(&["baseline", "insaurralde-level", "--deltas", "1,2,3,4,5"]);
    assert_eq!(level.status.code(), Some(0));
    assert!(stdout(&level).contains("insaurralde-level: 3"));

    let ratio = autonomy(&["baseline", "insaurralde-ratio", "--act", "1,1,1,1,1", "--std", "1,1,1,1,1", "--n", "10"]);
    assert!(stdout(&ratio).contains("insaurralde-ratio: 5"));

    let curtin = autonomy(&[
        "baseline", "curtin", "--control-bits", "1", "--total-bits", "2", "--contact-time", "1",
        "--total-time", "2",
    ]);
    assert!(stdout(&curtin).contains("curtin: 4"));
    assert!(stdout(&curtin).contains("defaults of 1 in use"));

    let dir = tempfile::tempdir().unwrap();
    let grid_path = dir.path().join("grid.json");
    let n = 16usize;
    let axis: Vec<f64> = (0..n).map(|i| i as f64 / (n as f64 - 1.0)).collect();
    let mut values = Vec::new();
    for _t in 0..n {
        for _a in 0..n {
            for p in 0..n {
                values.push(axis[p]);
            }
        }
    }
    let grid = serde_json::json!({
        "performance_bounds": [0.0, 1.0],
        "area_bounds": [0.0, 1.0],
        "time_bounds": [0.0, 1.0],
        "shape": [n, n, n],
        "values": values,
    });
    fs::write(&grid_path, serde_json::to_string(&grid).unwrap()).unwrap();
    let doboli = autonomy(&["baseline", "doboli", "--grid", grid_path.to_str().unwrap()]);
    assert_eq!(doboli.status.code(), Some(0));
    let text = stdout(&doboli);
    let value: f64 = text
        .lines()
        .next()
        .unwrap()
        .split(": ")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.5).abs() < 1e-9, "{value}");
}

#[test]
fn open_loop_command_prints_displacement() {
    let out = autonomy(&["open-loop", "--speed", "130", "--rate", "150"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0.240741"), "{}", stdout(&out));
}

#[test]
fn unknown_scenario_is_usage_error() {
    let out = autonomy(&["assess", "--scenario", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown scenario"));
}

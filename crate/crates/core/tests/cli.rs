use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn scenario(name: &str) -> PathBuf {
    fixtures().join("scenarios").join(name)
}

fn greenbench(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenbench"))
        .args(args)
        .current_dir(cwd)
        .env_remove("GREENBENCH_FIXTURES")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn find(dir: &Path, contains: &str, suffix: &str) -> PathBuf {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| {
            let n = p.file_name().unwrap().to_str().unwrap();
            n.contains(contains) && n.ends_with(suffix) && !(suffix == ".json" && n.ends_with(".measurement.json"))
        })
        .unwrap_or_else(|| panic!("no {contains}*{suffix} in {}", dir.display()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_peak_exits_zero_with_ecr() {
    let out = tempfile::tempdir().unwrap();
    let o = greenbench(&["run", s(&scenario("table2_peak.json")), "--out", s(out.path())], out.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(find(out.path(), "table2_router_peak", ".json")).unwrap()).unwrap();
    assert_eq!(report["metrics"][0]["result"]["kind"], "ECR");
    assert_eq!(report["metrics"][0]["result"]["value"], 8.63);
}

#[test]
fn run_cheater_exits_two() {
    let out = tempfile::tempdir().unwrap();
    let o = greenbench(&["run", s(&scenario("cheater_variable_load.json")), "--out", s(out.path())], out.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("return-to-full-capacity violation"));
    let report = std::fs::read_to_string(find(out.path(), "cheater_downshift_variable_load", ".json")).unwrap();
    assert!(report.contains("return-to-full-capacity violation"));
    assert!(!report.contains("EER_VL"));
}

#[test]
fn run_missing_device_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        r#"{"device": "nowhere.json", "procedure": "peak", "parameters": {"packet_size_weights": [[1518, 1.0]]}}"#,
    )
    .unwrap();
    let o = greenbench(&["run", s(&path), "--out", s(dir.path())], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nowhere.json"));
}

#[test]
fn run_reports_parse_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.json");
    std::fs::write(&path, "{\n  \"device\": \"table2_router.json\",\n  \"procedur\": \"peak\"\n}\n").unwrap();
    let o = greenbench(&["run", s(&path)], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("typo.json:3:"), "{}", stderr(&o));
}

#[test]
fn run_directory_matches_single_runs() {
    let all = tempfile::tempdir().unwrap();
    let o = greenbench(&["run", s(&fixtures().join("scenarios")), "--out", s(all.path())], all.path());
    // the directory holds the cheater scenario, so the run as a whole is invalidated
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let one = tempfile::tempdir().unwrap();
    greenbench(&["run", s(&scenario("three_state_full_suite.json")), "--out", s(one.path())], one.path());
    let name = find(one.path(), "full_suite", ".json");
    let a = std::fs::read(&name).unwrap();
    let b = std::fs::read(all.path().join(name.file_name().unwrap())).unwrap();
    assert_eq!(a, b);
    let leftovers = std::fs::read_dir(all.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_str().unwrap().ends_with(".tmp"));
    assert_eq!(leftovers.count(), 0);
}

#[test]
fn seed_flag_changes_probe_timing_only() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sc = scenario("table2_variable_load.json");
    greenbench(&["run", s(&sc), "--out", s(a.path()), "--seed", "1"], a.path());
    greenbench(&["run", s(&sc), "--out", s(b.path()), "--seed", "2"], b.path());
    let set_a = std::fs::read_to_string(find(a.path(), "variable_load", ".measurement.json")).unwrap();
    let set_b = std::fs::read_to_string(find(b.path(), "variable_load", ".measurement.json")).unwrap();
    assert_ne!(set_a, set_b);
    let phases = |text: &str| {
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        v["samples"].clone()
    };
    assert_eq!(phases(&set_a), phases(&set_b));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = greenbench(&["run", s(&scenario("three_state_full_suite.json")), "--out", s(dir)], dir);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for n in names {
        assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap());
    }
}

#[test]
fn metrics_subcommand() {
    let out = tempfile::tempdir().unwrap();
    greenbench(&["run", s(&scenario("table2_variable_load.json")), "--out", s(out.path())], out.path());
    greenbench(&["run", s(&scenario("table2_peak.json")), "--out", s(out.path())], out.path());
    let vl = find(out.path(), "variable_load", ".measurement.json");
    let o = greenbench(&["metrics", s(&vl), "--metric", "eer_vl", "--weights", "0.25,0.5,0.25"], out.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["kind"], "EER_VL");
    assert!((r["value"].as_f64().unwrap() - 0.04949).abs() < 5e-6);

    let o = greenbench(
        &["metrics", s(&vl), "--metric", "eer_vl", "--weights", "0.25,0.5,0.25", "--format", "table"],
        out.path(),
    );
    assert_eq!(stdout(&o), "EER_VL = 0.04949 Gbps/W\n");

    let peak = find(out.path(), "table2_router_peak", ".measurement.json");
    let o = greenbench(&["metrics", s(&peak), "--metric", "ecr", "--format", "csv"], out.path());
    assert_eq!(stdout(&o), "metric,units,value\nECR,W/Gbps,8.63\n");

    let o = greenbench(&["metrics", s(&vl), "--metric", "eer_vl", "--weights", "0.3,0.3,0.3"], out.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn metrics_refuses_invalidated_sets() {
    let out = tempfile::tempdir().unwrap();
    greenbench(&["run", s(&scenario("cheater_variable_load.json")), "--out", s(out.path())], out.path());
    let set = find(out.path(), "cheater", ".measurement.json");
    let o = greenbench(&["metrics", s(&set), "--metric", "eer_vl"], out.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("refusing to compute metrics on invalidated test"));
}

#[test]
fn compare_table1() {
    let out = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for d in ["t640", "t1600", "t4000", "ptx"] {
        let o = greenbench(&["run", s(&scenario(&format!("table1_{d}.json"))), "--out", s(out.path())], out.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for d in ["T640", "T1600", "T4000", "PTX"] {
        reports.push(find(out.path(), &format!("{d}_peak"), ".json"));
    }
    let mut args = vec!["compare", "--metric", "ecr", "--format", "csv"];
    args.extend(reports.iter().map(|p| s(p)));
    let o = greenbench(&args, out.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "device,label,ECR (W/Gbps),note\nT640,2002,14,\nT1600,2007,9.7,\nT4000,2011,3.54,\nPTX,2012,1.54,\n"
    );

    let o = greenbench(&["compare", s(&reports[0])], out.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);

    let o = greenbench(&["compare", "--metric", "eer_ex", s(&reports[0])], out.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("EER_EX"));

    let table = out.path().join("table.json");
    let o = greenbench(&["compare", "--format", "json", "--out", s(&table), s(&reports[0])], out.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert!(std::fs::read_to_string(&table).unwrap().contains("\"metric\": \"ECR\""));
}

#[test]
fn validate_shipped_fixtures() {
    let dir = fixtures();
    let mut paths: Vec<PathBuf> = Vec::new();
    for sub in [dir.clone(), dir.join("table1"), dir.join("scenarios")] {
        paths.extend(
            std::fs::read_dir(sub)
                .unwrap()
                .map(|e| e.unwrap().path())
                .filter(|p| p.extension().is_some_and(|x| x == "json")),
        );
    }
    let mut args = vec!["validate"];
    args.extend(paths.iter().map(|p| s(p)));
    let o = greenbench(&args, &dir);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn validate_names_the_violation() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.json");
    let text =
        std::fs::read_to_string(fixtures().join("table2_router.json")).unwrap().replace("[0.5, 816.0]", "[0.5, 700.0]");
    std::fs::write(&curve, text).unwrap();
    let o = greenbench(&["validate", s(&curve)], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("states[0].curve") && err.contains("nondecreasing"), "{err}");

    let weights = dir.path().join("weights.json");
    std::fs::write(
        &weights,
        r#"{"device": "table2_router.json", "procedure": "peak", "parameters": {"packet_size_weights": [[64, 0.5], [1518, 0.4]]}}"#,
    )
    .unwrap();
    let o = greenbench(&["validate", s(&weights)], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sum to 0.9"), "{}", stderr(&o));
}

#[test]
fn fixture_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixtures().join("proportional_ideal.json"), dir.path().join("table2_router.json")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_greenbench"))
        .args(["run", s(&scenario("table2_peak.json")), "--out", s(dir.path())])
        .env("GREENBENCH_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    find(dir.path(), "proportional_ideal_peak", ".json");
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(greenbench(&[], dir.path()).status.code(), Some(1));
    assert_eq!(greenbench(&["metrics", "x.json", "--metric", "bogus"], dir.path()).status.code(), Some(1));
    let help = greenbench(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("validate"));
}

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixhardy")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn constant_quasi_spherical_csv() {
    let o = run(&["constant", "--d", "5", "--k", "2", "--p", "3", "--a", "0", "--b", "1", "--gamma", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,k,p,a,b,gamma,value,provenance,error_indicator,flags"));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields.len(), 10);
    assert!((fields[6].parse::<f64>().unwrap() - 1.0 / 27.0).abs() < 1e-15);
    assert_eq!(fields[7], "closed_form_quasi_spherical");
}

#[test]
fn constant_degenerate_json() {
    let o = run(&[
        "constant", "--d", "3", "--k", "2", "--p", "2", "--a", "1", "--b", "1", "--gamma", "0.5", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rec = &json_lines(&o)[0];
    assert_eq!(rec["provenance"], "theorem1_degenerate");
    assert_eq!(rec["value"].as_f64(), Some(0.0));
    assert_eq!(rec["gamma"].as_f64(), Some(0.5));
    assert!(rec["paper_refs"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn numbers_carry_seventeen_digits() {
    let o = run(&["constant", "--d", "3", "--k", "2", "--p", "2", "--a", "1", "--b", "1", "--format", "json"]);
    let line = stdout(&o);
    assert!(line.contains("\"value\":1.1602540378443864e-1"), "{line}");
}

#[test]
fn numerical_constant_reports_bounds() {
    let o = run(&[
        "constant", "--d", "4", "--k", "2", "--p", "3", "--a", "2", "--b", "1", "--levels", "3", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rec = &json_lines(&o)[0];
    assert_eq!(rec["provenance"], "numerical");
    let bounds = rec["bounds"].as_array().unwrap();
    assert!(!bounds.is_empty());
    assert!(bounds.iter().all(|b| b["satisfied"] == true));
    assert_eq!(rec["levels"].as_array().unwrap().len(), 3);
}

#[test]
fn invalid_parameters_exit_one() {
    for args in [
        &["constant", "--d", "3", "--k", "3", "--p", "2", "--a", "1", "--b", "1"][..],
        &["constant", "--d", "3", "--k", "2", "--p", "2", "--a", "1"],
        &["constant", "--d", "3", "--k", "2", "--p", "2", "--a", "1", "--b", "1", "--unknown", "2"],
        &["bstar", "--d", "3", "--k", "2", "--p", "2", "--a", "-0.5"],
        &[
            "scan", "--d", "3", "--k", "2", "--p", "2", "--a", "1", "--axis", "bottom", "--from", "0", "--to", "1",
            "--count", "0",
        ],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn bstar_brackets_closed_form() {
    let o = run(&["bstar", "--d", "3", "--k", "2", "--p", "2", "--a", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rec = &json_lines(&o)[0];
    let lo = rec["bracket"][0].as_f64().unwrap();
    let hi = rec["bracket"][1].as_f64().unwrap();
    let exact = rec["closed_form_ref"].as_f64().unwrap();
    assert!((exact - (2.0 - 3f64.sqrt())).abs() < 1e-15);
    assert!(lo <= exact && exact <= hi);

    let o = run(&["bstar", "--d", "3", "--k", "2", "--p", "2", "--a", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let (lo, hi): (f64, f64) = (row[5].parse().unwrap(), row[6].parse().unwrap());
    assert!(0.0 < lo && hi <= 1.0);
}

#[test]
fn scan_is_deterministic_across_worker_counts() {
    let base = ["scan", "--d", "3", "--k", "2", "--p", "2", "--a", "1", "--b", "1", "--axis", "gamma"];
    let range = ["--from", "1", "--to", "3", "--count", "6", "--levels", "3"];
    let one = run(&[&base[..], &range[..], &["--workers", "1"]].concat());
    let four = run(&[&base[..], &range[..], &["--workers", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 7);
    assert!(text.lines().filter(|l| l.starts_with("# diagnostic")).all(|l| l.contains(",pass,")));
}

#[test]
fn bottom_scan_json_has_rows_and_diagnostics() {
    let o = run(&[
        "scan", "--d", "3", "--k", "2", "--p", "2", "--a", "1", "--axis", "bottom", "--from", "0.3", "--to", "1.2",
        "--count", "4", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json_lines(&o);
    let rows: Vec<_> = recs.iter().filter(|r| r.get("index").is_some()).collect();
    assert_eq!(rows.len(), 4);
    let values: Vec<f64> = rows.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]));
    assert!(recs.iter().any(|r| r.get("diagnostic").is_some()));
}

#[test]
fn verify_identities_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let o = run(&["verify", "--suite", "identities", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report = std::fs::read_to_string(&path).unwrap();
    assert!(report.starts_with("suite,check,measured,tolerance,status\n"));
    assert!(report.lines().skip(1).all(|l| l.ends_with(",PASS")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["verify", "--suite", "scaling", "--samples", "40000", "--seed", "5", "--format", "json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

//! CSV and JSON-lines rendering. Every float is written with 17 significant
//! digits so that records round-trip exactly.

use std::fmt::Write;
use std::str::FromStr;

use clap::ValueEnum;
use mixhardy::closedform::FormulaId;
use mixhardy::solver::{BoundCheck, ScanResult};
use mixhardy::suites::CheckResult;
use mixhardy::{BStarEstimate, ConstantEstimate, ProblemParams};
use serde_json::{json, Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const CONSTANT_HEADER: &str = "d,k,p,a,b,gamma,value,provenance,error_indicator,flags";

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// JSON number carrying exactly the text of [`fmt`]; `null` when not finite.
fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt(x)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn params_json(p: &ProblemParams) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("d".into(), json!(p.d));
    m.insert("k".into(), json!(p.k));
    for (name, v) in [("p", p.p), ("a", p.a), ("b", p.b), ("gamma", p.gamma)] {
        m.insert(name.into(), num(v));
    }
    m
}

fn params_csv(p: &ProblemParams) -> String {
    format!("{},{},{},{},{},{}", p.d, p.k, fmt(p.p), fmt(p.a), fmt(p.b), fmt(p.gamma))
}

fn bound_json(c: &BoundCheck) -> Value {
    json!({
        "source": c.source.label(),
        "bound": num(c.bound),
        "tolerance": num(c.tolerance),
        "satisfied": c.satisfied,
    })
}

fn constant_record(est: &ConstantEstimate) -> Map<String, Value> {
    let mut m = params_json(&est.params);
    m.insert("value".into(), num(est.value));
    m.insert("provenance".into(), json!(est.provenance.name()));
    m.insert("regime".into(), json!(est.regime.name()));
    m.insert("error_indicator".into(), num(est.error_indicator));
    m.insert("extrapolated".into(), num(est.extrapolated));
    m.insert("levels".into(), Value::Array(est.levels.iter().map(|&v| num(v)).collect()));
    m.insert("flags".into(), json!(est.flag_names()));
    m.insert("bounds".into(), Value::Array(est.bound_checks.iter().map(bound_json).collect()));
    m.insert("paper_refs".into(), json!(est.paper_refs));
    m
}

fn constant_row(est: &ConstantEstimate) -> String {
    format!(
        "{},{},{},{},{}",
        params_csv(&est.params),
        fmt(est.value),
        est.provenance.name(),
        fmt(est.error_indicator),
        csv_field(&est.flag_names().join(";"))
    )
}

fn line(m: Map<String, Value>) -> String {
    let mut s = Value::Object(m).to_string();
    s.push('\n');
    s
}

pub fn constant(format: Format, est: &ConstantEstimate) -> String {
    match format {
        Format::Csv => format!("{CONSTANT_HEADER}\n{}\n", constant_row(est)),
        Format::Json => line(constant_record(est)),
    }
}

pub fn bstar(format: Format, est: &BStarEstimate) -> String {
    let (lo, hi) = est.bracket;
    match format {
        Format::Csv => format!(
            "d,k,p,a,method,lower,upper,margin,iterations,closed_form_ref\n{},{},{},{},{},{},{},{},{},{}\n",
            est.params.d,
            est.params.k,
            fmt(est.params.p),
            fmt(est.params.a),
            est.method.name(),
            fmt(lo),
            fmt(hi),
            fmt(est.margin),
            est.iterations,
            est.closed_form_ref.map(fmt).unwrap_or_default()
        ),
        Format::Json => {
            let mut m = params_json(&est.params);
            m.remove("b");
            m.remove("gamma");
            m.insert("method".into(), json!(est.method.name()));
            m.insert("bracket".into(), json!([num(lo), num(hi)]));
            m.insert("margin".into(), num(est.margin));
            m.insert("iterations".into(), json!(est.iterations));
            m.insert("closed_form_ref".into(), est.closed_form_ref.map(num).unwrap_or(Value::Null));
            let refs: Vec<&str> = est.closed_form_ref.map(|_| FormulaId::BStarP2.tag()).into_iter().collect();
            m.insert("paper_refs".into(), json!(refs));
            line(m)
        }
    }
}

/// One row per sweep point (failed points carry provenance `error` and the
/// message in `flags`), then the diagnostics: `#`-prefixed summary rows in
/// CSV, records with a `diagnostic` key in JSON.
pub fn scan(format: Format, res: &ScanResult) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CONSTANT_HEADER);
            out.push('\n');
            for row in &res.rows {
                match &row.estimate {
                    Some(est) => out.push_str(&constant_row(est)),
                    None => out.push_str(&format!(
                        "{},NaN,error,NaN,{}",
                        params_csv(&row.params),
                        csv_field(row.error.as_deref().unwrap_or(""))
                    )),
                }
                out.push('\n');
            }
            for d in &res.diagnostics {
                let verdict = if d.passed { "pass" } else { "fail" };
                let _ = writeln!(out, "# diagnostic,{},{verdict},{}", d.name, csv_field(&d.detail));
            }
        }
        Format::Json => {
            for row in &res.rows {
                let mut m = match &row.estimate {
                    Some(est) => constant_record(est),
                    None => {
                        let mut m = params_json(&row.params);
                        m.insert("error".into(), json!(row.error));
                        m
                    }
                };
                m.insert("index".into(), json!(row.index));
                m.insert("x".into(), num(row.x));
                out.push_str(&line(m));
            }
            for d in &res.diagnostics {
                let m = json!({ "diagnostic": d.name, "passed": d.passed, "detail": d.detail });
                out.push_str(&m.to_string());
                out.push('\n');
            }
        }
    }
    out
}

pub fn checks(format: Format, checks: &[CheckResult]) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("suite,check,measured,tolerance,status\n");
            for c in checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{status}",
                    c.suite,
                    csv_field(&c.name),
                    fmt(c.measured),
                    fmt(c.tolerance)
                );
            }
        }
        Format::Json => {
            for c in checks {
                let m = json!({
                    "suite": c.suite,
                    "check": c.name,
                    "measured": num(c.measured),
                    "tolerance": num(c.tolerance),
                    "passed": c.passed,
                });
                out.push_str(&m.to_string());
                out.push('\n');
            }
        }
    }
    out
}

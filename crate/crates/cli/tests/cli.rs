use std::process::{Command, Output};

use polyzeta_core::field::LevelInfo;
use polyzeta_core::{FieldCtx, FqConfig, LocalSeries, SeriesJson};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyzeta")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn tower(doc: &Value) -> FieldCtx {
    let cfg = &doc["config"];
    let config = FqConfig::new(cfg["p"].as_u64().unwrap(), cfg["upsilon"].as_u64().unwrap() as u32).unwrap();
    let levels: Vec<LevelInfo> = serde_json::from_value(doc["tower"].clone()).unwrap();
    FieldCtx::from_levels(config, &levels).unwrap()
}

fn series(ctx: &FieldCtx, v: &Value) -> LocalSeries {
    let j: SeriesJson = serde_json::from_value(v.clone()).unwrap();
    let s = LocalSeries::from_json(ctx, &j).unwrap();
    assert_eq!(serde_json::to_value(s.to_json()).unwrap(), *v);
    s
}

#[test]
fn zeta_of_zero_is_zero() {
    let doc = json(&["zeta", "--t", "0"]);
    let v = series(&tower(&doc), &doc["result"]["value"]);
    assert!(v.is_zero());
    assert_eq!(v.precision(), 64);
}

#[test]
fn a_table_as_json() {
    let doc = json(&["--prec", "16", "coeffs", "--A", "4"]);
    let rows = doc["result"]["A"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    let ctx = tower(&doc);
    for row in rows {
        let (n, r) = (row["n"].as_u64().unwrap(), row["r"].as_u64().unwrap());
        let a = series(&ctx, &row["value"]);
        if n == r {
            assert_eq!(a.val_lb(), 0);
        } else {
            // q = 2, pi = x: every bracket has valuation 1
            assert!(a.val_lb() >= (n - r) as i64, "A[{n},{r}]");
        }
    }
}

#[test]
fn functional_equation_report_is_monotone() {
    let out = run(&["--format", "json", "verify", "--eq", "functional", "--n", "1", "--i-cut", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let cases = doc["result"]["cases"].as_array().unwrap();
    let defects: Vec<i64> = cases
        .iter()
        .filter(|c| c["relation"] == "at_least")
        .map(|c| c["measured"]["value"].as_i64().unwrap())
        .collect();
    assert_eq!(defects.len(), 6);
    assert!(defects.windows(2).all(|w| w[0] < w[1] || w[1] == 64), "{defects:?}");
}

#[test]
fn reported_values_round_trip() {
    for args in [
        vec!["polylog", "--n", "2", "--t", "1 + x^3"],
        vec!["--p", "3", "zeta", "--t", "x^-2 + 2x"],
        vec!["--pi", "x^2 + x + 1", "polylog", "--t", "x"],
        vec!["--p", "2", "--upsilon", "2", "--nmax", "2", "polylog", "--t", "3x"],
    ] {
        let doc = json(&args);
        series(&tower(&doc), &doc["result"]["value"]);
    }
}

#[test]
fn errors_have_distinct_exit_codes() {
    let cases: [(&[&str], i32); 6] = [
        (&["--pi", "x^2 + 1", "zeta", "--t", "1"], 2),
        (&["--pi", "x^2 + x + 1", "zeta", "--t", "1"], 2),
        (&["--branch", "7", "polylog", "--t", "1"], 3),
        (&["--nmax", "2", "polylog", "--n", "3", "--t", "1"], 4),
        (&["polylog", "--t", "y"], 5),
        (&["--no-such-flag"], 5),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn text_output_is_readable() {
    let out = run(&["--prec", "8", "table", "--zeta-range", "0..1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("zeta(x^0)"));
    assert!(text.contains("zeta(x^1)"));
}

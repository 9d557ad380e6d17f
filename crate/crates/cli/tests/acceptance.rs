//! Acceptance criteria 1-11 on the default configurations. Prints one line
//! per criterion and exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use polyzeta_core::session::{RunConfig, Session};
use polyzeta_core::verify::{Check, CheckReport};

const SUITE_BUDGET_SECS: f64 = 60.0;

fn configs() -> Vec<(&'static str, RunConfig)> {
    let base = RunConfig { precision: 64, i_max: 14, n_max: 4, ..RunConfig::default() };
    vec![
        ("q=2 pi=x", RunConfig { p: 2, pi: vec![0, 1], ..base.clone() }),
        ("q=3 pi=x", RunConfig { p: 3, pi: vec![0, 1], ..base.clone() }),
        ("q=2 pi=x^2+x+1", RunConfig { p: 2, pi: vec![1, 1, 1], ..base }),
    ]
}

fn failing_cases(r: &CheckReport) -> String {
    r.cases
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {} vs {}", c.label, c.measured, c.required))
        .collect::<Vec<_>>()
        .join("; ")
}

fn suite_json() -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_polyzeta"))
        .args(["--p", "2", "--pi", "x", "--prec", "64", "--imax", "14", "--nmax", "4", "--format", "json", "verify", "--eq", "all"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit status {}", out.status));
    }
    Ok(out.stdout)
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, String, bool, Vec<String>)> =
        Check::ALL.iter().map(|c| (*c as u32, c.name().to_string(), true, Vec::new())).collect();
    let mut budget_ok = true;

    for (label, cfg) in configs() {
        let start = Instant::now();
        let session = match Session::new(cfg) {
            Ok(s) => s,
            Err(e) => {
                for r in &mut results {
                    r.2 = false;
                    r.3.push(format!("{label}: session failed: {e}"));
                }
                continue;
            }
        };
        for (k, check) in Check::ALL.iter().enumerate() {
            if check.needs_pi_x() && !session.place().is_pi_x() {
                continue;
            }
            match check.run(&session) {
                Ok(report) if report.passed => results[k].3.push(format!("{label}: {} cases", report.cases.len())),
                Ok(report) => {
                    results[k].2 = false;
                    results[k].3.push(format!("{label}: {}", failing_cases(&report)));
                }
                Err(e) => {
                    results[k].2 = false;
                    results[k].3.push(format!("{label}: error: {e}"));
                }
            }
        }
        let secs = start.elapsed().as_secs_f64();
        if secs > SUITE_BUDGET_SECS {
            budget_ok = false;
            println!("note: suite for {label} took {secs:.1} s");
        }
    }

    let determinism = match (suite_json(), suite_json()) {
        (Ok(a), Ok(b)) if a == b && !a.is_empty() => (true, format!("{} bytes, identical", a.len())),
        (Ok(_), Ok(_)) => (false, "outputs differ".to_string()),
        (Err(e), _) | (_, Err(e)) => (false, e),
    };
    results.push((11, "deterministic JSON".into(), determinism.0, vec![determinism.1]));

    let mut all = budget_ok;
    for (k, name, passed, detail) in &results {
        all &= passed;
        let status = if *passed { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {status}  {name}  [{}]", detail.join(" | "));
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

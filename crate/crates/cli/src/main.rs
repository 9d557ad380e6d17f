use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use polyzeta_core::carlitz::{a_row, FunctionHandle};
use polyzeta_core::hyperdiff::BaseDigitSeries;
use polyzeta_core::polylog::EvalMode;
use polyzeta_core::session::{RunConfig, Session};
use polyzeta_core::verify::{capped, run_suite, Case, Check, CheckReport};
use polyzeta_core::{Error, FFElement, LocalSeries, PlaceCtx, Valuation};

mod parse;

#[derive(Parser)]
#[command(name = "polyzeta", version, about = "Carlitz polylogarithms and zeta values at finite places of F_q(x)")]
struct Cli {
    /// Characteristic.
    #[arg(long, default_value_t = 2, global = true)]
    p: u64,
    /// q = p^upsilon.
    #[arg(long, default_value_t = 1, global = true)]
    upsilon: u32,
    /// Monic irreducible pi: an expression such as "x^2 + x + 1", or
    /// coefficients constant first, e.g. "1,1,1".
    #[arg(long, default_value = "x", global = true)]
    pi: String,
    /// Absolute precision N of reported values.
    #[arg(long, default_value_t = 64, global = true)]
    prec: i64,
    /// Number of Carlitz coefficients built.
    #[arg(long, default_value_t = 14, global = true)]
    imax: usize,
    /// Deepest polylogarithm built.
    #[arg(long, default_value_t = 6, global = true)]
    nmax: usize,
    /// Root indices for c_1, ..., c_delta, comma separated.
    #[arg(long, default_value = "", global = true)]
    branch: String,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 0x5eed, global = true)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hybrid,
    Carlitz,
    Series,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Identity {
    /// l_n(t) against its expansion in the f_i with zeta coefficients.
    Expansion,
    /// Carlitz coefficients of l_n recovered from zeta values.
    Coefficients,
    /// zeta(x^-n) against its series in the coefficients of l_1.
    Functional,
    /// Euler product for the coefficients of l_1.
    Euler,
    /// Every check of the suite.
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate l_n(t).
    Polylog {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        t: String,
        #[arg(long, value_enum, default_value_t = Mode::Hybrid)]
        mode: Mode,
    },
    /// Evaluate zeta(t) for t in F_q((x)); requires pi = x.
    Zeta {
        #[arg(long)]
        t: String,
    },
    /// Coefficient tables.
    Coeffs {
        /// A_{n,r} for n up to this bound.
        #[arg(long = "A", value_name = "N")]
        a: Option<usize>,
        /// Carlitz coefficients of l_n.
        #[arg(long = "c", value_name = "N")]
        c: Option<usize>,
        /// [i], L_i and D_i for i up to this bound.
        #[arg(long, value_name = "N")]
        factorials: Option<usize>,
    },
    /// Check zeta identities or run the whole suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Identity::All)]
        eq: Identity,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Largest cutoff; defects are reported for every cutoff up to it.
        #[arg(long, default_value_t = 4)]
        i_cut: usize,
        /// Coefficient index for the coefficient and Euler checks.
        #[arg(long, default_value_t = 2)]
        i: usize,
        /// Argument for the expansion check.
        #[arg(long, default_value = "1 + x")]
        t: String,
    },
    /// zeta(x^k) for k in an inclusive range "a..b".
    Table {
        #[arg(long, allow_hyphen_values = true)]
        zeta_range: String,
    },
}

enum Failure {
    Verification,
    Core(Error),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidPi(_) | Error::ReduciblePi(_) | Error::RequiresPiX => 2,
        Error::BranchOutOfRange { .. } => 3,
        Error::DepthExceeded { .. } => 4,
        _ => 5,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 5 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, Failure::Verification)) => {
            println!("{out}");
            ExitCode::from(1)
        }
        Err((_, Failure::Core(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let fq = polyzeta_core::FqConfig::new(cli.p, cli.upsilon)?;
    let pi = parse::polynomial(&cli.pi, fq.q()).map_err(Error::InvalidPi)?;
    let branch = cli
        .branch
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|e| Error::Parse(format!("branch entry {s:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunConfig {
        p: cli.p,
        upsilon: cli.upsilon,
        pi,
        precision: cli.prec,
        i_max: cli.imax,
        n_max: cli.nmax,
        branch,
        seed: cli.seed,
    })
}

struct Output {
    json: Value,
    text: String,
    passed: bool,
}

fn run(cli: &Cli) -> Result<String, (String, Failure)> {
    let core = |e: Error| (String::new(), Failure::Core(e));
    let session = Session::new(config(cli).map_err(core)?).map_err(core)?;
    let out = match &cli.command {
        Command::Polylog { n, t, mode } => cmd_polylog(&session, *n, t, *mode),
        Command::Zeta { t } => cmd_zeta(&session, t),
        Command::Coeffs { a, c, factorials } => cmd_coeffs(&session, *a, *c, *factorials),
        Command::Verify { eq, n, i_cut, i, t } => cmd_verify(&session, *eq, *n, *i_cut, *i, t),
        Command::Table { zeta_range } => cmd_table(&session, zeta_range),
    }
    .map_err(core)?;
    let rendered = match cli.format {
        Format::Json => {
            let doc = json!({
                "config": session.config(),
                "tower": session.polylogs().fields().levels(),
                "result": out.json,
            });
            serde_json::to_string_pretty(&doc).expect("serializable")
        }
        Format::Text => out.text.trim_end().to_string(),
    };
    if out.passed {
        Ok(rendered)
    } else {
        Err((rendered, Failure::Verification))
    }
}

fn series_json(s: &Session, v: &LocalSeries) -> Value {
    serde_json::to_value(s.report(v).to_json()).expect("serializable")
}

fn value(s: &Session, label: String, v: &LocalSeries) -> Output {
    let r = s.report(v);
    Output {
        json: json!({ "label": label, "value": series_json(s, v) }),
        text: format!("{label} = {r}"),
        passed: true,
    }
}

fn argument(place: &PlaceCtx, text: &str) -> Result<LocalSeries, Error> {
    let terms = parse::laurent(text, place.q()).map_err(Error::Parse)?;
    let fq = place.fq_level();
    let mut acc = place.zero();
    for (k, c) in terms {
        acc = &acc + &place.x_pow(k).scale(&FFElement::new(fq, c));
    }
    Ok(acc)
}

fn cmd_polylog(s: &Session, n: usize, t: &str, mode: Mode) -> Result<Output, Error> {
    let arg = argument(s.place(), t)?;
    let mode = match mode {
        Mode::Hybrid => EvalMode::Hybrid,
        Mode::Carlitz => EvalMode::Carlitz,
        Mode::Series => EvalMode::Series,
    };
    let v = s.polylogs().handle_with(n, mode)?.eval(&arg)?;
    Ok(value(s, format!("l_{n}({t})"), &v))
}

fn cmd_zeta(s: &Session, t: &str) -> Result<Output, Error> {
    let ev = s.zeta()?;
    let arg = BaseDigitSeries::new(argument(s.place(), t)?)?;
    let v = ev.zeta(&arg)?;
    Ok(value(s, format!("zeta({t})"), &v))
}

fn cmd_coeffs(s: &Session, a: Option<usize>, c: Option<usize>, factorials: Option<usize>) -> Result<Output, Error> {
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    if let Some(n_max) = a {
        let mut rows = Vec::new();
        for n in 1..=n_max {
            for (r, v) in a_row(s.place(), n).iter().enumerate().skip(1) {
                rows.push(json!({ "n": n, "r": r, "value": series_json(s, v) }));
                let _ = writeln!(text, "A[{n},{r}] = {}", s.report(v));
            }
        }
        json.insert("A".into(), Value::Array(rows));
    }
    if let Some(n) = c {
        let f = s.polylogs().carlitz(n)?;
        let rows: Vec<Value> = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let _ = writeln!(text, "c_{i}^({n}) = {}", s.report(v));
                json!({ "i": i, "value": series_json(s, v) })
            })
            .collect();
        json.insert("c".into(), json!({ "n": n, "coefficients": rows }));
    }
    if let Some(i_max) = factorials {
        let place = s.place();
        let rows: Vec<Value> = (0..=i_max)
            .map(|i| {
                let (b, l, d) = (place.bracket(i), place.l_factorial(i), place.d_factorial(i));
                let _ = writeln!(text, "[{i}] = {}\nL_{i} = {}\nD_{i} = {}", s.report(&b), s.report(&l), s.report(&d));
                json!({ "i": i, "bracket": series_json(s, &b), "L": series_json(s, &l), "D": series_json(s, &d) })
            })
            .collect();
        json.insert("factorials".into(), Value::Array(rows));
    }
    if json.is_empty() {
        return Err(Error::InvalidArgument("coeffs needs --A, --c or --factorials".into()));
    }
    Ok(Output { json: Value::Object(json), text, passed: true })
}

fn render_check(r: &CheckReport, text: &mut String) {
    let status = if r.passed { "pass" } else { "FAIL" };
    let _ = writeln!(text, "[{status}] {}. {}", r.criterion, r.name);
    for c in &r.cases {
        let mark = if c.passed { " " } else { "!" };
        let _ = writeln!(text, "   {mark} {}: {} ({:?} {})", c.label, c.measured, c.relation, c.required);
    }
    for n in &r.notes {
        let _ = writeln!(text, "     note: {n}");
    }
}

fn check_output(r: CheckReport) -> Output {
    let mut text = String::new();
    render_check(&r, &mut text);
    let passed = r.passed;
    Output { json: to_json(&r), text, passed }
}

fn to_json(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Defects for cutoffs `1..=i_cut`: each meets its bound, and the sequence
/// grows until it saturates at `N`.
fn cutoff_cases(label: &str, cap: i64, defects: Vec<(usize, polyzeta_core::zeta::Defect)>) -> Vec<Case> {
    let mut cases = Vec::new();
    let mut prev: Option<Valuation> = None;
    for (cut, d) in defects {
        let v = capped(d.defect, cap);
        cases.push(Case::at_least(format!("{label}, cutoff {cut}"), v, d.bound.min(cap)));
        if let Some(p) = prev {
            cases.push(Case::exceeds(format!("{label}, cutoff {cut}: defect grows"), v, p, cap));
        }
        prev = Some(v);
    }
    cases
}

fn cmd_verify(s: &Session, eq: Identity, n: usize, i_cut: usize, i: usize, t: &str) -> Result<Output, Error> {
    if eq == Identity::All {
        let report = run_suite(s, &Check::ALL)?;
        let mut text = String::new();
        for r in &report.checks {
            render_check(r, &mut text);
        }
        for sk in &report.skipped {
            let _ = writeln!(text, "[skip] {sk}");
        }
        let _ = writeln!(text, "{}", if report.passed { "all checks passed" } else { "some checks FAILED" });
        return Ok(Output { json: to_json(&report), text, passed: report.passed });
    }
    let ev = s.zeta()?;
    let cap = s.precision();
    let (criterion, name, cases, notes) = match eq {
        Identity::Expansion => {
            let arg = BaseDigitSeries::new(argument(s.place(), t)?)?;
            let defects = (1..=i_cut).map(|c| ev.verify_expansion(n, &arg, c).map(|d| (c, d))).collect::<Result<_, _>>()?;
            (9, "expansion of l_n in the f_i", cutoff_cases(&format!("l_{n}({t})"), cap, defects), Vec::new())
        }
        Identity::Functional => {
            let defects = (1..=i_cut).map(|c| ev.verify_functional_eq(n, c).map(|d| (c, d))).collect::<Result<_, _>>()?;
            (9, "zeta(x^-n) series", cutoff_cases(&format!("zeta(x^-{n})"), cap, defects), Vec::new())
        }
        Identity::Coefficients => {
            let (via_zeta, pointwise) = ev.verify_coefficients(i, n)?;
            let cases = vec![
                Case::at_least(format!("c_{i}^({n}) from zeta"), capped(via_zeta.defect, cap), via_zeta.bound.min(cap)),
                Case::at_least(format!("c_{i}^({n}) = (Delta_{i} l_{n})(1)"), capped(pointwise.defect, cap), pointwise.bound.min(cap)),
            ];
            (9, "Carlitz coefficients from zeta", cases, Vec::new())
        }
        Identity::Euler => {
            let r = ev.euler_partial(i, 7, 32)?;
            let cases = vec![
                Case::at_least(format!("c_{i}: product vs sum over j >= 1"), capped(r.agreement, cap), r.certified_precision.min(cap)),
                Case::equals(format!("c_{i}: v(c_{i} - product) is v(z_{i})"), capped(r.j0_discrepancy, cap), r.z_valuation.lower_bound()),
            ];
            let notes = vec![format!(
                "the product omits the j = 0 term z_{i} of valuation {}; first missing index {}",
                r.z_valuation, r.smallest_missing_index
            )];
            (10, "Euler product", cases, notes)
        }
        Identity::All => unreachable!("handled above"),
    };
    let passed = !cases.is_empty() && cases.iter().all(|c| c.passed);
    Ok(check_output(CheckReport { criterion, name: name.into(), passed, cases, notes }))
}

fn cmd_table(s: &Session, range: &str) -> Result<Output, Error> {
    let ev = s.zeta()?;
    let (lo, hi) = parse::range(range).map_err(Error::Parse)?;
    let cap = s.precision();
    let mut rows = Vec::new();
    let mut text = String::new();
    for k in lo..=hi {
        let v = ev.zeta_x_pow(k)?;
        // k >= 0: against Delta^(k+1) l_1 (1); k < 0: the series in the c_i
        let defects: Vec<Valuation> = if k >= 0 {
            vec![capped((&v - &ev.zeta_special_pos(k as usize)?).valuation(), cap)]
        } else {
            (1..=4).map(|c| ev.verify_functional_eq((-k) as usize, c).map(|d| capped(d.defect, cap))).collect::<Result<_, _>>()?
        };
        let shown: Vec<String> = defects.iter().map(Valuation::to_string).collect();
        let _ = writeln!(text, "zeta(x^{k}) = {}   [defects: {}]", s.report(&v), shown.join(", "));
        rows.push(json!({ "argument": format!("x^{k}"), "value": series_json(s, &v), "defect_valuations": defects }));
    }
    Ok(Output { json: Value::Array(rows), text, passed: true })
}

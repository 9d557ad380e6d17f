//! Seeded verification suites over a [`Session`]. Each check measures
//! defect valuations (or exact valuations) and compares them with what the
//! theory requires. Reports are plain data, so the same run serializes to
//! identical JSON every time.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::artin_schreier::solve;
use crate::carlitz::{delta_on_carlitz, delta_point, delta_pow_point, q_pow_sat, FunctionHandle, Memoized};
use crate::error::Result;
use crate::hyperdiff::{frac_delta, hyperdiff, BaseDigitSeries, FracDelta};
use crate::place::PlaceCtx;
use crate::polylog::{alternative_valuation, build_alternative_branch, build_l1_carlitz};
use crate::series::{LocalSeries, Valuation};
use crate::session::{RunConfig, Session};
use crate::FFElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    Equals,
    /// Strictly above `required`, or saturated at the reporting precision.
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub label: String,
    pub measured: Valuation,
    pub relation: Relation,
    pub required: i64,
    pub passed: bool,
}

impl Case {
    pub fn at_least(label: impl Into<String>, measured: Valuation, required: i64) -> Self {
        let passed = measured.lower_bound() >= required;
        Case { label: label.into(), measured, relation: Relation::AtLeast, required, passed }
    }

    pub fn equals(label: impl Into<String>, measured: Valuation, required: i64) -> Self {
        let passed = measured == Valuation::Exact(required);
        Case { label: label.into(), measured, relation: Relation::Equals, required, passed }
    }

    pub fn count(label: impl Into<String>, measured: usize, required: usize) -> Self {
        Self::equals(label, Valuation::Exact(measured as i64), required as i64)
    }

    pub fn exceeds(label: impl Into<String>, measured: Valuation, previous: Valuation, cap: i64) -> Self {
        let (now, before) = (measured.lower_bound(), previous.lower_bound());
        let passed = now > before || (measured == Valuation::AtLeast(cap) && now >= before);
        Case { label: label.into(), measured, relation: Relation::Exceeds, required: before, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    pub cases: Vec<Case>,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(criterion: u32, name: &str, cases: Vec<Case>, notes: Vec<String>) -> Self {
        let passed = !cases.is_empty() && cases.iter().all(|c| c.passed);
        CheckReport { criterion, name: name.into(), passed, cases, notes }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub working_precision: i64,
    pub checks: Vec<CheckReport>,
    pub skipped: Vec<String>,
    pub passed: bool,
}

/// The checks, numbered as in the acceptance list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Brackets = 1,
    ArtinSchreier = 2,
    FirstPolylog = 3,
    SmallDisk = 4,
    AlternativeBranch = 5,
    PolylogChain = 6,
    Operators = 7,
    ZetaConsistency = 8,
    Identities = 9,
    EulerProduct = 10,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::Brackets,
        Check::ArtinSchreier,
        Check::FirstPolylog,
        Check::SmallDisk,
        Check::AlternativeBranch,
        Check::PolylogChain,
        Check::Operators,
        Check::ZetaConsistency,
        Check::Identities,
        Check::EulerProduct,
    ];

    pub fn needs_pi_x(self) -> bool {
        self >= Check::Operators
    }

    pub fn name(self) -> &'static str {
        match self {
            Check::Brackets => "bracket and factorial valuations",
            Check::ArtinSchreier => "Artin-Schreier roots",
            Check::FirstPolylog => "construction of l_1",
            Check::SmallDisk => "small-disk agreement",
            Check::AlternativeBranch => "alternative-branch valuations",
            Check::PolylogChain => "polylogarithm chain",
            Check::Operators => "operator algebra",
            Check::ZetaConsistency => "zeta well-definedness and linearity",
            Check::Identities => "zeta identities",
            Check::EulerProduct => "Euler product",
        }
    }

    pub fn run(self, s: &Session) -> Result<CheckReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(s.config().seed ^ (self as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let (cases, notes) = match self {
            Check::Brackets => brackets(s),
            Check::ArtinSchreier => artin_schreier(s, &mut rng)?,
            Check::FirstPolylog => first_polylog(s, &mut rng)?,
            Check::SmallDisk => small_disk(s, &mut rng)?,
            Check::AlternativeBranch => alternative(s)?,
            Check::PolylogChain => chain(s),
            Check::Operators => operators(s, &mut rng)?,
            Check::ZetaConsistency => zeta_consistency(s, &mut rng)?,
            Check::Identities => identities(s, &mut rng)?,
            Check::EulerProduct => euler(s)?,
        };
        Ok(CheckReport::new(self as u32, self.name(), cases, notes))
    }
}

/// Every applicable check.
pub fn run_suite(s: &Session, checks: &[Check]) -> Result<SuiteReport> {
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for &c in checks {
        if c.needs_pi_x() && !s.place().is_pi_x() {
            skipped.push(format!("{}: defined for pi = x only", c.name()));
            continue;
        }
        reports.push(c.run(s)?);
    }
    let passed = reports.iter().all(|r| r.passed);
    Ok(SuiteReport {
        config: s.config().clone(),
        working_precision: s.place().precision(),
        checks: reports,
        skipped,
        passed,
    })
}

type Outcome = (Vec<Case>, Vec<String>);

/// `v` as seen at reporting precision `cap`.
pub fn capped(v: Valuation, cap: i64) -> Valuation {
    if v.lower_bound() >= cap {
        Valuation::AtLeast(cap)
    } else {
        v
    }
}

fn min_valuation(vals: impl IntoIterator<Item = Valuation>, cap: i64) -> Valuation {
    vals.into_iter()
        .map(|v| capped(v, cap))
        .min_by_key(|v| (v.lower_bound(), v.is_exact()))
        .unwrap_or(Valuation::AtLeast(cap))
}

/// A random element of `pi^v_min O_pi`, digits drawn from the residue
/// field up to the place precision.
pub fn random_series(place: &PlaceCtx, rng: &mut impl Rng, v_min: i64) -> LocalSeries {
    let size = place.residue().size();
    let prec = place.precision();
    let digits = (v_min..prec).map(|_| rng.gen_range(0..size)).collect();
    LocalSeries::from_digits(place.residue(), v_min, digits, prec)
}

/// A random series in `x` with `len` digits from `F_q` starting at `v_min`,
/// exact to the place precision.
pub fn random_base_digits(place: &PlaceCtx, rng: &mut impl Rng, v_min: i64, len: usize) -> BaseDigitSeries {
    let q = place.q();
    let digits = (0..len).map(|_| rng.gen_range(0..q)).collect();
    let s = LocalSeries::from_digits(place.residue(), v_min, digits, place.precision());
    BaseDigitSeries::new(s).expect("digits drawn from F_q")
}

fn brackets(s: &Session) -> Outcome {
    let place = s.place();
    let delta = place.delta();
    let mut cases = Vec::new();
    for n in 1..=12usize {
        let expect = i64::from(n % delta == 0);
        cases.push(Case::equals(format!("v([{n}])"), place.bracket(n).valuation(), expect));
        cases.push(Case::equals(format!("v(L_{n})"), place.l_factorial(n).valuation(), (n / delta) as i64));
    }
    (cases, Vec::new())
}

fn artin_schreier(s: &Session, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let place = s.place();
    let n = s.precision();
    let q = place.q() as usize;
    let size = place.residue().size();
    let mut cases = Vec::new();
    for unit in [false, true] {
        let tag = if unit { "v(xi) = 0" } else { "v(xi) > 0" };
        let (mut full, mut pattern) = (0, 0);
        let mut defects = Vec::new();
        for _ in 0..20 {
            let v = if unit { 0 } else { rng.gen_range(1..=4) };
            let mut digits: Vec<u64> = (v..n).map(|_| rng.gen_range(0..size)).collect();
            digits[0] = rng.gen_range(1..size);
            let xi = LocalSeries::from_digits(place.residue(), v, digits, n);
            let sol = solve(place.fields(), &xi)?;
            full += usize::from(sol.roots.len() == q);
            for z in &sol.roots {
                defects.push((&(&z.q_power_capped(1, n) - z) - &xi).valuation());
            }
            let units = sol.roots.iter().filter(|z| z.valuation() == Valuation::Exact(0)).count();
            let small = sol.roots.iter().filter(|z| z.valuation() == Valuation::Exact(v)).count();
            let ok = if unit { units == q } else { small == 1 && units == q - 1 };
            pattern += usize::from(ok);
        }
        cases.push(Case::count(format!("{tag}: equations with q roots"), full, 20));
        cases.push(Case::count(format!("{tag}: equations with the expected valuation pattern"), pattern, 20));
        cases.push(Case::at_least(format!("{tag}: min root defect"), min_valuation(defects, n), n - 2));
    }
    Ok((cases, Vec::new()))
}

fn first_polylog(s: &Session, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let place = s.place();
    let cfg = s.config();
    let n = s.precision();
    let delta = place.delta();
    let mut cases = Vec::new();
    let mut notes = Vec::new();
    for b in 0..place.q() as usize {
        let (_, l1) = build_l1_carlitz(place, &[b], cfg.i_max)?;
        let handle = Memoized::new(l1.clone());
        let mut defects = Vec::new();
        for _ in 0..10 {
            let t = random_series(place, rng, 0);
            let du = delta_point(place, &handle, &t)?;
            let lhs = &du - &du.q_power_capped(1, du.precision());
            defects.push((&lhs - &t.q_power_capped(1, place.precision())).valuation());
        }
        cases.push(Case::at_least(format!("branch {b}: defining identity, min defect"), min_valuation(defects, n), n - 4));
        let mut beyond = Vec::new();
        for i in delta + 1..=cfg.i_max {
            let bound = q_pow_sat(place.q(), (i - delta) as i64);
            let v = l1.coeff(i).valuation();
            let required = match v {
                Valuation::Exact(_) => bound,
                Valuation::AtLeast(known) => {
                    if bound > known {
                        beyond.push(i);
                    }
                    bound.min(known)
                }
            };
            cases.push(Case::at_least(format!("branch {b}: v(c_{i})"), v, required));
        }
        if !beyond.is_empty() {
            notes.push(format!(
                "branch {b}: c_i for i in {beyond:?} vanish to working precision {}, below the decay bound",
                place.precision()
            ));
        }
    }
    Ok((cases, notes))
}

fn small_disk(s: &Session, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let place = s.place();
    let set = s.polylogs();
    let cap = s.precision();
    let mut cases = Vec::new();
    for n in 1..=set.n_max().min(4) {
        let l = set.get(n)?;
        let mut defects = Vec::new();
        for _ in 0..10 {
            let t = random_series(place, rng, 1);
            let a = l.carlitz.eval_cf(&t)?;
            let b = l.series.eval(&t)?;
            defects.push((&a - &b).valuation());
        }
        cases.push(Case::at_least(format!("l_{n}: min defect"), min_valuation(defects, cap), cap - 4));
    }
    Ok((cases, Vec::new()))
}

fn alternative(s: &Session) -> Result<Outcome> {
    let place = s.place();
    let cfg = s.config();
    let delta = place.delta();
    let mut cases = Vec::new();
    let mut notes = Vec::new();
    for n_branch in [2usize, 3] {
        let needed = (n_branch + 3) * delta;
        let i_max = cfg.i_max.max(needed);
        if i_max > cfg.i_max {
            notes.push(format!("N = {n_branch}: built with i_max = {i_max}"));
        }
        let (_, alt) = build_alternative_branch(place, n_branch, i_max)?;
        let vals = alt.valuations();
        for l in 1..=3u32 {
            let i = (n_branch + l as usize) * delta;
            let expect = alternative_valuation(place.q(), delta, l);
            cases.push(Case::equals(format!("N = {n_branch}: v(c_{i})"), vals[i], expect));
        }
    }
    Ok((cases, notes))
}

fn chain(s: &Session) -> Outcome {
    let set = s.polylogs();
    let cap = s.precision();
    let mut cases = Vec::new();
    for n in 2..=set.n_max().min(4) {
        let (Ok(hi), Ok(lo)) = (set.carlitz(n), set.carlitz(n - 1)) else { continue };
        let d = delta_on_carlitz(hi);
        let diffs = d.coeffs().iter().zip(lo.coeffs()).map(|(a, b)| (a - b).valuation());
        cases.push(Case::at_least(format!("Delta l_{n} - l_{}", n - 1), min_valuation(diffs, cap), cap));
    }
    (cases, Vec::new())
}

fn l1_handle(s: &Session) -> Result<Arc<dyn FunctionHandle>> {
    Ok(s.zeta()?.handle(1)?)
}

fn operators(s: &Session, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let place = s.place();
    let cap = s.precision();
    let u = l1_handle(s)?;
    let mut cases = Vec::new();

    let t = random_series(place, rng, 0);
    for n in 1..=4usize {
        let mut coeffs = vec![0u64; n + 1];
        coeffs[n] = 1;
        let alpha = BaseDigitSeries::from_coeffs(place, &coeffs, place.precision())?;
        let lhs = frac_delta(place, &alpha, u.as_ref(), &t)?;
        let rhs = delta_pow_point(place, u.as_ref(), n, &t)?;
        cases.push(Case::at_least(format!("Delta^(x^{n}) = Delta^{n}"), capped((&lhs - &rhs).valuation(), cap), cap - 4));
    }

    let mut defects = Vec::new();
    for _ in 0..20 {
        let alpha = random_base_digits(place, rng, 0, 12);
        let beta = random_base_digits(place, rng, 0, 12);
        let t = random_series(place, rng, 0);
        let ab = BaseDigitSeries::new(alpha.series() * beta.series())?;
        let inner = Memoized::new(FracDelta::new(place.clone(), beta, u.clone())?);
        let lhs = frac_delta(place, &alpha, &inner, &t)?;
        let rhs = frac_delta(place, &ab, u.as_ref(), &t)?;
        defects.push((&lhs - &rhs).valuation());
    }
    cases.push(Case::at_least("composition over 20 pairs, min defect", min_valuation(defects, cap), cap - 4));

    let alpha = hat_random(place, rng);
    let beta = hat_random(place, rng);
    let prod = BaseDigitSeries::new(alpha.series() * beta.series())?;
    for n in 0..=8u64 {
        let lhs = hyperdiff(n, &prod)?;
        let mut rhs = LocalSeries::zero(place.residue(), place.precision());
        for k in 0..=n {
            rhs = &rhs + &(&hyperdiff(k, &alpha)? * &hyperdiff(n - k, &beta)?);
        }
        cases.push(Case::at_least(format!("Leibniz rule, n = {n}"), capped((&lhs - &rhs).valuation(), cap), cap));
    }
    Ok((cases, Vec::new()))
}

fn hat_random(place: &PlaceCtx, rng: &mut ChaCha8Rng) -> BaseDigitSeries {
    let len = place.precision() as usize;
    random_base_digits(place, rng, 0, len)
}

/// A random `t` in `K_x` with `v(t) >= -max_pole` and 16 digits.
fn random_argument(place: &PlaceCtx, rng: &mut ChaCha8Rng, max_pole: i64) -> BaseDigitSeries {
    let v = -rng.gen_range(0..=max_pole);
    random_base_digits(place, rng, v, 16)
}

fn zeta_consistency(s: &Session, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let place = s.place();
    let ev = s.zeta()?;
    let cap = s.precision();
    let n_max = s.polylogs().n_max() as i64;
    let mut cases = Vec::new();

    let mut defects = Vec::new();
    for _ in 0..10 {
        let t = random_argument(place, rng, n_max - 2);
        let n = (-t.series().val_lb()).max(1) as usize;
        let a = ev.zeta_via(&t, n)?;
        let b = ev.zeta_via(&t, n + 1)?;
        defects.push((&a - &b).valuation());
    }
    cases.push(Case::at_least("(n, alpha) vs (n + 1, x alpha), min defect", min_valuation(defects, cap), cap - 4));

    for m in 0..=4usize {
        let a = ev.zeta_special_pos(m)?;
        let b = ev.zeta_x_pow(m as i64)?;
        cases.push(Case::at_least(format!("zeta(x^{m}) two paths"), capped((&a - &b).valuation(), cap), cap - 4));
    }

    let (mut add, mut scale) = (Vec::new(), Vec::new());
    let fq = place.fq_level().clone();
    for _ in 0..10 {
        let t1 = random_argument(place, rng, n_max - 1);
        let t2 = random_argument(place, rng, n_max - 1);
        let sum = BaseDigitSeries::new(t1.series() + t2.series())?;
        let lhs = ev.zeta(&sum)?;
        let rhs = &ev.zeta(&t1)? + &ev.zeta(&t2)?;
        add.push((&lhs - &rhs).valuation());
        let gamma = FFElement::new(&fq, rng.gen_range(1..place.q()));
        let scaled = BaseDigitSeries::new(t1.series().scale(&gamma))?;
        let lhs = ev.zeta(&scaled)?;
        let rhs = ev.zeta(&t1)?.scale(&gamma);
        scale.push((&lhs - &rhs).valuation());
    }
    cases.push(Case::at_least("additivity, min defect", min_valuation(add, cap), cap - 4));
    cases.push(Case::at_least("F_q-homogeneity, min defect", min_valuation(scale, cap), cap - 4));
    Ok((cases, Vec::new()))
}

fn identities(s: &Session, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let place = s.place();
    let ev = s.zeta()?;
    let cap = s.precision();
    let n_max = s.polylogs().n_max();
    let mut cases = Vec::new();

    let t = hat_random(place, rng);
    for n in 1..=n_max.min(2) {
        let mut prev: Option<Valuation> = None;
        for cut in [4usize, 8] {
            let d = ev.verify_expansion(n, &t, cut)?;
            let v = capped(d.defect, cap);
            cases.push(Case::at_least(format!("expansion of l_{n}, cutoff {cut}"), v, d.bound.min(cap)));
            if let Some(p) = prev {
                cases.push(Case::exceeds(format!("expansion of l_{n}: defect grows"), v, p, cap));
            }
            prev = Some(v);
        }
    }

    for n in 1..=n_max.min(4) {
        for i in 1..=4usize.min(s.config().i_max) {
            let (via_zeta, pointwise) = ev.verify_coefficients(i, n)?;
            let low = capped(via_zeta.defect, cap / 2);
            let high = capped(via_zeta.defect, cap);
            cases.push(Case::at_least(format!("c_{i}^({n}) from zeta, precision {}", cap / 2), low, cap / 2));
            cases.push(Case::at_least(format!("c_{i}^({n}) from zeta, precision {cap}"), high, cap));
            cases.push(Case::exceeds(format!("c_{i}^({n}) from zeta: defect grows"), high, low, cap));
            cases.push(Case::at_least(format!("c_{i}^({n}) = (Delta_{i} l_{n})(1)"), capped(pointwise.defect, cap), cap));
        }
    }

    for n in 1..=n_max.min(2) {
        let mut prev: Option<Valuation> = None;
        for cut in [2usize, 3] {
            let d = ev.verify_functional_eq(n, cut)?;
            let v = capped(d.defect, cap);
            cases.push(Case::at_least(format!("zeta(x^-{n}) series, cutoff {cut}"), v, d.bound.min(cap)));
            if let Some(p) = prev {
                cases.push(Case::exceeds(format!("zeta(x^-{n}) series: defect grows"), v, p, cap));
            }
            prev = Some(v);
        }
    }
    Ok((cases, Vec::new()))
}

fn euler(s: &Session) -> Result<Outcome> {
    let ev = s.zeta()?;
    let cap = s.precision();
    let mut cases = Vec::new();
    let mut notes = Vec::new();
    for i in [2usize, 3] {
        let r = ev.euler_partial(i, 7, 32)?;
        let required = r.certified_precision.min(cap);
        cases.push(Case::at_least(format!("c_{i}: product vs sum over j >= 1"), capped(r.agreement, cap), required));
        let z = r.z_valuation.lower_bound();
        cases.push(Case::equals(format!("c_{i}: v(c_{i} - product) is v(z_{i})"), capped(r.j0_discrepancy, cap), z));
        notes.push(format!(
            "c_{i}: the product omits the j = 0 term z_{i}, v(z_{i}) = {}; first missing index {}",
            r.z_valuation, r.smallest_missing_index
        ));
        let mut prev: Option<LocalSeries> = None;
        let mut steps = Vec::new();
        for depth in [2u64, 4, 8, 16, 32] {
            let value = ev.euler_partial_value(i, 7, depth)?;
            if let Some(p) = &prev {
                steps.push(capped((&value - p).valuation(), cap).to_string());
            }
            prev = Some(value);
        }
        notes.push(format!("c_{i}: successive partial products differ at valuations {}", steps.join(", ")));
    }
    Ok((cases, notes))
}

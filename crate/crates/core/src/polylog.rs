//! The Carlitz polylogarithms `l_n`: the power series `sum_j t^(q^j)/[j]^n`
//! on `v(t) >= 1` and its continuous extension `sum_i c_i^(n) f_i` to the
//! unit disk.
//!
//! `l_1` comes from the Artin-Schreier recursion on its Carlitz
//! coefficients: `c_1` and `c_2..c_delta` are unit roots chosen by a branch
//! vector, later coefficients are principal roots. `l_n` follows from
//! `l_{n-1}` through the suffix sums
//! `c_i^(n) = (-1)^i L_{i-1} sum_{j >= i} (-1)^j c_j^(n-1)/L_j`.
//! In every case `c_0 = sum_{i >= 1} (-1)^(i+1) c_i/L_i`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::artin_schreier::{principal_root, solve};
use crate::carlitz::{q_pow_sat, CarlitzFunction, FunctionHandle, LinearPowerSeries, TailBound, BOUND_CAP};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::place::PlaceCtx;
use crate::series::{LocalSeries, Valuation};

/// Certified decay `v(c_i^(n)) >= q^(i-delta) - offset` for `i > delta`,
/// i.e. `|c_i^(n)| <= C_n q^(-delta q^(i-delta))` with `C_n = q^c_exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub n: usize,
    pub offset: i64,
    pub c_exponent: i64,
    /// Stored coefficients whose exact valuation breaks the bound.
    pub violations: Vec<usize>,
}

impl DecayCertificate {
    fn check(place: &PlaceCtx, f: &CarlitzFunction, n: usize, offset: i64) -> Self {
        let delta = place.delta();
        let violations = (delta + 1..=f.i_max())
            .filter(|&i| match f.coeff(i).valuation() {
                Valuation::Exact(v) => v < q_pow_sat(place.q(), (i - delta) as i64) - offset,
                Valuation::AtLeast(_) => false,
            })
            .collect();
        DecayCertificate { n, offset, c_exponent: delta as i64 * offset, violations }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `min_{i > i_max} v(c_i / L_i)` given the tail bound of `c`.
fn tail_over_factorials(tail: TailBound, i_max: usize, delta: usize) -> i64 {
    (i_max + 1..i_max + 65)
        .map(|i| tail.at(i).saturating_sub((i / delta) as i64))
        .min()
        .unwrap_or(BOUND_CAP)
}

/// `sum_{i >= 1} (-1)^(i+1) c_i / L_i` with the tail certified by `tail`.
fn constant_coefficient(place: &PlaceCtx, coeffs: &[LocalSeries], tail: TailBound) -> LocalSeries {
    let i_max = coeffs.len() - 1;
    let mut acc = LocalSeries::zero(place.residue(), tail_over_factorials(tail, i_max, place.delta()));
    for (i, c) in coeffs.iter().enumerate().skip(1) {
        if c.is_zero() && c.precision() >= acc.precision() {
            continue;
        }
        let term = c.div(&place.l_factorial(i)).expect("L_i is nonzero");
        acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `a_0 = 0`, `a_j = 1/[j]` for `1 <= j <= j_max`.
pub fn build_l1_series(place: Arc<PlaceCtx>, j_max: usize) -> LinearPowerSeries {
    LinearPowerSeries::polylog_with_terms(place, 1, j_max)
}

/// `l_n(t)` from the power series, `v(t) >= 1`.
pub fn eval_ln_series(place: Arc<PlaceCtx>, n: u32, t: &LocalSeries) -> Result<LocalSeries> {
    LinearPowerSeries::polylog(place, n).eval(t)
}

fn pick(roots: &[LocalSeries], step: usize, index: usize) -> Result<LocalSeries> {
    roots
        .get(index)
        .cloned()
        .ok_or(Error::BranchOutOfRange { step, index, count: roots.len() })
}

/// `-([n-1] c_{n-1})^q`, the right-hand side fixing `c_n`.
fn next_rhs(place: &PlaceCtx, n: usize, prev: &LocalSeries) -> LocalSeries {
    let w = place.precision();
    -(&place.bracket(n - 1) * prev).q_power_capped(1, w)
}

/// The Carlitz expansion of `l_1` on the branch `branch` (missing entries
/// select root 0). Returns the tower the coefficients live in.
pub fn build_l1_carlitz(
    place: &Arc<PlaceCtx>,
    branch: &[usize],
    i_max: usize,
) -> Result<(FieldCtx, CarlitzFunction)> {
    let delta = place.delta();
    if branch.len() > delta {
        return Err(Error::InvalidArgument(format!("branch has {} entries, delta = {delta}", branch.len())));
    }
    if i_max < 1 {
        return Err(Error::InvalidArgument("i_max must be at least 1".into()));
    }
    let mut fields = place.fields().clone();
    let mut coeffs = vec![place.zero(); i_max + 1];
    for n in 1..=i_max {
        let xi = if n == 1 { -place.one() } else { next_rhs(place, n, &coeffs[n - 1]) };
        coeffs[n] = if n <= delta {
            let sol = solve(&fields, &xi)?;
            fields = sol.fields;
            pick(&sol.roots, n, branch.get(n - 1).copied().unwrap_or(0))?
        } else {
            principal_root(&xi)
        };
    }
    let tail = TailBound { q: place.q(), shift: delta as i64, offset: 0 };
    coeffs[0] = constant_coefficient(place, &coeffs, tail);
    Ok((fields, CarlitzFunction::new(place.clone(), coeffs, tail)))
}

/// The Carlitz expansion of `l_n` from that of `l_{n-1}`.
pub fn build_ln(place: &Arc<PlaceCtx>, prev: &CarlitzFunction, n: usize) -> (CarlitzFunction, DecayCertificate) {
    let delta = place.delta();
    let i_max = prev.i_max();
    let mut suffix = LocalSeries::zero(place.residue(), tail_over_factorials(prev.tail(), i_max, delta));
    let mut coeffs = vec![place.zero(); i_max + 1];
    for i in (1..=i_max).rev() {
        let c = prev.coeff(i);
        if !(c.is_zero() && c.precision() >= suffix.precision()) {
            let term = c.div(&place.l_factorial(i)).expect("L_i is nonzero");
            suffix = if i % 2 == 0 { &suffix + &term } else { &suffix - &term };
        }
        let v = &place.l_factorial(i - 1) * &suffix;
        coeffs[i] = if i % 2 == 0 { v } else { -v };
    }
    let offset = prev.tail().offset + 1;
    let tail = TailBound { q: place.q(), shift: delta as i64, offset };
    coeffs[0] = constant_coefficient(place, &coeffs, tail);
    let f = CarlitzFunction::new(place.clone(), coeffs, tail);
    let cert = DecayCertificate::check(place, &f, n, offset);
    (f, cert)
}

/// `sum_{k=1}^{l} q^(k delta)`: the valuation of `c_{(N+l) delta}` on the
/// branch with `N` unit steps.
pub fn alternative_valuation(q: u64, delta: usize, l: u32) -> i64 {
    (1..=l as i64).map(|k| q_pow_sat(q, k * delta as i64)).fold(0, i64::saturating_add)
}

#[derive(Debug, Clone)]
pub struct AlternativeBranch {
    pub n_branch: usize,
    pub function: CarlitzFunction,
}

impl AlternativeBranch {
    pub fn valuations(&self) -> Vec<Valuation> {
        self.function.coeffs().iter().map(LocalSeries::valuation).collect()
    }
}

/// A continuous solution of the `l_1` equation whose coefficients stay
/// units up to index `n_branch * delta`, followed by principal roots.
pub fn build_alternative_branch(
    place: &Arc<PlaceCtx>,
    n_branch: usize,
    i_max: usize,
) -> Result<(FieldCtx, AlternativeBranch)> {
    let delta = place.delta();
    if n_branch < 2 {
        return Err(Error::InvalidArgument(format!("n_branch = {n_branch} < 2")));
    }
    let unit_steps = n_branch * delta;
    if unit_steps > i_max {
        return Err(Error::InvalidArgument(format!("n_branch * delta = {unit_steps} exceeds i_max = {i_max}")));
    }
    let mut fields = place.fields().clone();
    let mut coeffs = vec![place.zero(); i_max + 1];
    for n in 1..=i_max {
        let xi = if n == 1 { -place.one() } else { next_rhs(place, n, &coeffs[n - 1]) };
        coeffs[n] = if n <= unit_steps {
            let sol = solve(&fields, &xi)?;
            fields = sol.fields;
            // the first root that is not the principal one
            let index = usize::from(sol.principal == Some(0));
            pick(&sol.roots, n, index)?
        } else {
            principal_root(&xi)
        };
    }
    let tail = TailBound { q: place.q(), shift: unit_steps as i64, offset: 0 };
    coeffs[0] = constant_coefficient(place, &coeffs, tail);
    let function = CarlitzFunction::new(place.clone(), coeffs, tail);
    Ok((fields, AlternativeBranch { n_branch, function }))
}

/// How a [`PolylogHandle`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Power series on `v(t) >= 1`, Carlitz expansion elsewhere.
    Hybrid,
    Carlitz,
    Series,
}

#[derive(Clone)]
pub struct Polylog {
    pub n: usize,
    pub series: Arc<LinearPowerSeries>,
    pub carlitz: Arc<CarlitzFunction>,
    pub certificate: DecayCertificate,
}

#[derive(Clone)]
pub struct PolylogHandle {
    polylog: Polylog,
    mode: EvalMode,
}

impl PolylogHandle {
    pub fn new(polylog: Polylog, mode: EvalMode) -> Self {
        PolylogHandle { polylog, mode }
    }

    pub fn n(&self) -> usize {
        self.polylog.n
    }
}

impl FunctionHandle for PolylogHandle {
    fn eval(&self, t: &LocalSeries) -> Result<LocalSeries> {
        let small = t.is_zero() || t.val_lb() >= 1;
        match self.mode {
            EvalMode::Series => self.polylog.series.eval(t),
            EvalMode::Hybrid if small => self.polylog.series.eval(t),
            _ => self.polylog.carlitz.eval_cf(t),
        }
    }

    fn modulus_bound(&self, k: i64) -> i64 {
        if k >= 1 {
            self.polylog.series.modulus_bound(k)
        } else {
            self.polylog.carlitz.min_coeff_valuation()
        }
    }
}

/// `l_1, ..., l_{n_max}` on one branch.
pub struct PolylogSet {
    place: Arc<PlaceCtx>,
    fields: FieldCtx,
    branch: Vec<usize>,
    levels: Vec<Polylog>,
}

impl PolylogSet {
    pub fn build(place: Arc<PlaceCtx>, branch: &[usize], i_max: usize, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        let (fields, l1) = build_l1_carlitz(&place, branch, i_max)?;
        let mut levels = vec![Polylog {
            n: 1,
            series: Arc::new(LinearPowerSeries::polylog(place.clone(), 1)),
            certificate: DecayCertificate::check(&place, &l1, 1, 0),
            carlitz: Arc::new(l1),
        }];
        for n in 2..=n_max {
            let (ln, certificate) = build_ln(&place, &levels[n - 2].carlitz, n);
            levels.push(Polylog {
                n,
                series: Arc::new(LinearPowerSeries::polylog(place.clone(), n as u32)),
                carlitz: Arc::new(ln),
                certificate,
            });
        }
        let mut branch = branch.to_vec();
        branch.resize(place.delta(), 0);
        Ok(PolylogSet { place, fields, branch, levels })
    }

    pub fn place(&self) -> &Arc<PlaceCtx> {
        &self.place
    }

    /// The tower holding every coefficient.
    pub fn fields(&self) -> &FieldCtx {
        &self.fields
    }

    pub fn branch(&self) -> &[usize] {
        &self.branch
    }

    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    pub fn i_max(&self) -> usize {
        self.levels[0].carlitz.i_max()
    }

    pub fn get(&self, n: usize) -> Result<&Polylog> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::DepthExceeded { needed: n, built: self.levels.len() });
        }
        Ok(&self.levels[n - 1])
    }

    pub fn carlitz(&self, n: usize) -> Result<&CarlitzFunction> {
        Ok(&self.get(n)?.carlitz)
    }

    pub fn handle(&self, n: usize) -> Result<PolylogHandle> {
        self.handle_with(n, EvalMode::Hybrid)
    }

    pub fn handle_with(&self, n: usize, mode: EvalMode) -> Result<PolylogHandle> {
        Ok(PolylogHandle::new(self.get(n)?.clone(), mode))
    }
}

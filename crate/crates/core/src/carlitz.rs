//! Normalized Carlitz polynomials `f_i`, continuous `F_q`-linear functions
//! given by their Carlitz expansion `sum c_i f_i`, and the difference
//! operators `Delta`, `Delta^r`, `Delta_n` evaluated pointwise.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::place::PlaceCtx;
use crate::series::LocalSeries;

/// Stand-in for "infinitely large" valuation bounds.
pub const BOUND_CAP: i64 = 1 << 50;

/// `q^e` saturating at [`BOUND_CAP`].
pub fn q_pow_sat(q: u64, e: i64) -> i64 {
    if e < 0 {
        return 0;
    }
    let mut acc: i64 = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(q as i64);
        if acc >= BOUND_CAP {
            return BOUND_CAP;
        }
    }
    acc
}

/// A continuous `F_q`-linear function on the closed unit disk.
pub trait FunctionHandle: Send + Sync {
    fn eval(&self, t: &LocalSeries) -> Result<LocalSeries>;

    /// A lower bound for `v(u(t))`, valid whenever `v(t) >= k`.
    /// Non-decreasing in `k`.
    fn modulus_bound(&self, k: i64) -> i64;
}

impl<H: FunctionHandle + ?Sized> FunctionHandle for Arc<H> {
    fn eval(&self, t: &LocalSeries) -> Result<LocalSeries> {
        (**self).eval(t)
    }

    fn modulus_bound(&self, k: i64) -> i64 {
        (**self).modulus_bound(k)
    }
}

type EvalFn = dyn Fn(&LocalSeries) -> Result<LocalSeries> + Send + Sync;
type BoundFn = dyn Fn(i64) -> i64 + Send + Sync;

/// A handle built from closures.
pub struct ClosureHandle {
    eval: Box<EvalFn>,
    bound: Box<BoundFn>,
}

impl ClosureHandle {
    pub fn new(
        eval: impl Fn(&LocalSeries) -> Result<LocalSeries> + Send + Sync + 'static,
        bound: impl Fn(i64) -> i64 + Send + Sync + 'static,
    ) -> Self {
        ClosureHandle { eval: Box::new(eval), bound: Box::new(bound) }
    }

    /// `u(t) = t`.
    pub fn identity() -> Self {
        Self::new(|t| Ok(t.clone()), |k| k)
    }
}

impl FunctionHandle for ClosureHandle {
    fn eval(&self, t: &LocalSeries) -> Result<LocalSeries> {
        (self.eval)(t)
    }

    fn modulus_bound(&self, k: i64) -> i64 {
        (self.bound)(k)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct SeriesKey {
    level: usize,
    start: i64,
    precision: i64,
    digits: Vec<u64>,
}

impl From<&LocalSeries> for SeriesKey {
    fn from(t: &LocalSeries) -> Self {
        SeriesKey {
            level: t.level().index(),
            start: t.start(),
            precision: t.precision(),
            digits: t.raw_digits().to_vec(),
        }
    }
}

/// Caches evaluations of the wrapped handle, e.g. over a grid `x^k t`.
pub struct Memoized<H> {
    inner: H,
    cache: Mutex<HashMap<SeriesKey, LocalSeries>>,
}

impl<H: FunctionHandle> Memoized<H> {
    pub fn new(inner: H) -> Self {
        Memoized { inner, cache: Mutex::new(HashMap::new()) }
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }
}

impl<H: FunctionHandle> FunctionHandle for Memoized<H> {
    fn eval(&self, t: &LocalSeries) -> Result<LocalSeries> {
        let key = SeriesKey::from(t);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.inner.eval(t)?;
        self.cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn modulus_bound(&self, k: i64) -> i64 {
        self.inner.modulus_bound(k)
    }
}

/// `f_0(t), ..., f_imax(t)` by `f_{i+1} = (f_i^q - f_i) / [i+1]`.
pub fn eval_f_upto(place: &PlaceCtx, i_max: usize, t: &LocalSeries) -> Result<Vec<LocalSeries>> {
    if !t.is_zero() && t.val_lb() < 0 {
        return Err(Error::OutsideUnitDisk(t.val_lb()));
    }
    let mut out = Vec::with_capacity(i_max + 1);
    let mut f = t.clone();
    for i in 0..=i_max {
        if i > 0 {
            let fq = f.q_power_capped(1, f.precision());
            f = &(&fq - &f) * &place.bracket_inv(i);
        }
        out.push(f.clone());
    }
    Ok(out)
}

/// `f_i(t)` for `v(t) >= 0`.
pub fn eval_f(place: &PlaceCtx, i: usize, t: &LocalSeries) -> Result<LocalSeries> {
    Ok(eval_f_upto(place, i, t)?.pop().expect("nonempty"))
}

/// `f_i(t)` from the closed form
/// `sum_j (-1)^(i-j) t^(q^j) / (D_j L_{i-j}^(q^j))`.
///
/// The terms have large negative valuation and cancel, so `t` and the
/// place need precision well beyond the target; this is a reference path.
pub fn eval_f_explicit(place: &PlaceCtx, i: usize, t: &LocalSeries) -> Result<LocalSeries> {
    let q = place.q();
    let mut acc: Option<LocalSeries> = None;
    for j in 0..=i {
        let l = place.l_factorial(i - j);
        let lq = l.q_power_capped(j as u32, l.val_lb() * q_pow_sat(q, j as i64) + place.precision());
        let den = &place.d_factorial(j) * &lq;
        let tq = t.q_power_capped(j as u32, den.val_lb() + t.precision());
        let mut term = tq.div(&den)?;
        if (i - j) % 2 == 1 {
            term = -term;
        }
        acc = Some(match acc {
            None => term,
            Some(a) => &a + &term,
        });
    }
    Ok(acc.expect("at least one term"))
}

/// Certified lower bound `v(c_i) >= q^(i - shift) - offset` for `i > shift`
/// (and `>= -offset` below).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    pub q: u64,
    pub shift: i64,
    pub offset: i64,
}

impl TailBound {
    pub fn at(&self, i: usize) -> i64 {
        let i = i as i64;
        let base = if i > self.shift { q_pow_sat(self.q, i - self.shift) } else { 0 };
        base.saturating_sub(self.offset)
    }

    /// `min_{i > i_max} at(i)`.
    pub fn beyond(&self, i_max: usize) -> i64 {
        self.at(i_max + 1)
    }
}

/// `u = sum_{i <= i_max} c_i f_i`, with `v(c_i) >= tail.at(i)` certified
/// for `i > i_max`.
#[derive(Clone)]
pub struct CarlitzFunction {
    place: Arc<PlaceCtx>,
    coeffs: Vec<LocalSeries>,
    tail: TailBound,
}

impl std::fmt::Debug for CarlitzFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CarlitzFunction").field("coeffs", &self.coeffs).field("tail", &self.tail).finish()
    }
}

impl CarlitzFunction {
    pub fn new(place: Arc<PlaceCtx>, coeffs: Vec<LocalSeries>, tail: TailBound) -> Self {
        assert!(!coeffs.is_empty(), "a Carlitz expansion needs c_0");
        CarlitzFunction { place, coeffs, tail }
    }

    pub fn place(&self) -> &Arc<PlaceCtx> {
        &self.place
    }

    pub fn coeffs(&self) -> &[LocalSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &LocalSeries {
        &self.coeffs[i]
    }

    pub fn i_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail(&self) -> TailBound {
        self.tail
    }

    /// `sum c_i f_i(t)` for `v(t) >= 0`.
    pub fn eval_cf(&self, t: &LocalSeries) -> Result<LocalSeries> {
        if !t.is_zero() && t.val_lb() < 0 {
            return Err(Error::OutsideUnitDisk(t.val_lb()));
        }
        // v(f_i(t)) >= 0 on the unit disk, so a coefficient known to be zero
        // to precision P contributes only O(pi^P)
        let mut floor = self.tail.beyond(self.i_max());
        for c in self.coeffs.iter().filter(|c| c.is_zero()) {
            floor = floor.min(c.precision());
        }
        let mut acc = LocalSeries::zero(self.place.residue(), floor);
        let Some(last) = self.coeffs.iter().rposition(|c| !c.is_zero()) else {
            return Ok(acc);
        };
        let fs = eval_f_upto(&self.place, last, t)?;
        for (c, f) in self.coeffs.iter().zip(&fs) {
            if !c.is_zero() {
                acc = &acc + &(c * f);
            }
        }
        Ok(acc)
    }

    /// Lower bound on every coefficient's valuation, tail included.
    pub fn min_coeff_valuation(&self) -> i64 {
        let stored = self.coeffs.iter().map(|c| c.val_lb()).min().unwrap_or(BOUND_CAP);
        stored.min(self.tail.beyond(self.i_max()))
    }
}

impl FunctionHandle for CarlitzFunction {
    fn eval(&self, t: &LocalSeries) -> Result<LocalSeries> {
        self.eval_cf(t)
    }

    fn modulus_bound(&self, _k: i64) -> i64 {
        self.min_coeff_valuation()
    }
}

/// Carlitz coefficients of `Delta u`: `b_i = c_{i+1} + [i] c_i`.
pub fn delta_on_carlitz(u: &CarlitzFunction) -> CarlitzFunction {
    let place = u.place();
    let i_max = u.i_max();
    let tail = u.tail();
    let coeffs = (0..=i_max)
        .map(|i| {
            let next = if i < i_max {
                u.coeff(i + 1).clone()
            } else {
                LocalSeries::zero(place.residue(), tail.at(i + 1))
            };
            &next + &(&place.bracket(i) * u.coeff(i))
        })
        .collect();
    // v(b_i) >= min(v(c_{i+1}), v(c_i)) and the tail bound is increasing
    CarlitzFunction::new(place.clone(), coeffs, tail)
}

/// Values `u(x^k t)` for `k = 0..=count`.
fn grid(place: &PlaceCtx, u: &dyn FunctionHandle, count: usize, t: &LocalSeries) -> Result<Vec<LocalSeries>> {
    let x = place.x();
    let mut point = t.clone();
    let mut out = Vec::with_capacity(count + 1);
    for k in 0..=count {
        if k > 0 {
            point = x * &point;
        }
        out.push(u.eval(&point)?);
    }
    Ok(out)
}

/// `(Delta u)(t) = u(xt) - x u(t)`.
pub fn delta_point(place: &PlaceCtx, u: &dyn FunctionHandle, t: &LocalSeries) -> Result<LocalSeries> {
    delta_pow_point(place, u, 1, t)
}

/// `(Delta^r u)(t)`.
pub fn delta_pow_point(place: &PlaceCtx, u: &dyn FunctionHandle, r: usize, t: &LocalSeries) -> Result<LocalSeries> {
    let x = place.x();
    let mut vals = grid(place, u, r, t)?;
    for _ in 0..r {
        vals = vals.windows(2).map(|w| &w[1] - &(x * &w[0])).collect();
    }
    Ok(vals.pop().expect("one value left"))
}

/// `(Delta_n u)(t)` with `Delta_n u = (Delta_{n-1} u)(x .) - x^(q^(n-1)) Delta_{n-1} u`.
pub fn delta_n_point(place: &PlaceCtx, u: &dyn FunctionHandle, n: usize, t: &LocalSeries) -> Result<LocalSeries> {
    let mut vals = grid(place, u, n, t)?;
    for m in 1..=n {
        let xq = place.x().q_power_capped((m - 1) as u32, place.precision());
        vals = vals.windows(2).map(|w| &w[1] - &(&xq * &w[0])).collect();
    }
    Ok(vals.pop().expect("one value left"))
}

/// `A_{n,r}` for `r = 1..=n` (index 0 unused, set to zero).
///
/// `L_{n-1} e_{r-1}(1/[1], ..., 1/[n-1]) = e_{n-r}([1], ..., [n-1])`, so the
/// dynamic program runs over the brackets and never divides.
pub fn a_row(place: &PlaceCtx, n: usize) -> Vec<LocalSeries> {
    assert!(n >= 1, "A_{{n,r}} needs n >= 1");
    let mut e = vec![place.one()];
    e.resize(n, place.zero());
    for i in 1..n {
        let b = place.bracket(i);
        for k in (1..=i).rev() {
            e[k] = &e[k] + &(&e[k - 1] * &b);
        }
    }
    let mut row = vec![place.zero()];
    for r in 1..=n {
        let v = e[n - r].clone();
        row.push(if (n + r) % 2 == 1 { -v } else { v });
    }
    row
}

/// `A_{n,r}`, `1 <= r <= n`.
pub fn a_coeff(place: &PlaceCtx, n: usize, r: usize) -> LocalSeries {
    assert!((1..=n).contains(&r), "A_{{n,r}} needs 1 <= r <= n");
    a_row(place, n).swap_remove(r)
}

/// An `F_q`-linear power series `sum_j a_j t^(q^j)` on `v(t) >= 1`, with
/// `v(a_j) >= -n floor(j/delta)` certified beyond the stored terms.
#[derive(Clone)]
pub struct LinearPowerSeries {
    place: Arc<PlaceCtx>,
    coeffs: Vec<LocalSeries>,
    bracket_power: u32,
}

impl LinearPowerSeries {
    pub fn new(place: Arc<PlaceCtx>, coeffs: Vec<LocalSeries>, bracket_power: u32) -> Self {
        LinearPowerSeries { place, coeffs, bracket_power }
    }

    /// `a_0 = 0`, `a_j = [j]^(-n)`, enough terms for the place precision at
    /// `v(t) = 1`.
    pub fn polylog(place: Arc<PlaceCtx>, n: u32) -> Self {
        let j_max = Self::terms_needed(&place, n);
        Self::polylog_with_terms(place, n, j_max)
    }

    pub fn polylog_with_terms(place: Arc<PlaceCtx>, n: u32, j_max: usize) -> Self {
        let mut coeffs = vec![LocalSeries::zero(place.residue(), BOUND_CAP)];
        for j in 1..=j_max {
            coeffs.push(place.bracket_inv(j).pow(n as u64));
        }
        LinearPowerSeries { place, coeffs, bracket_power: n }
    }

    fn terms_needed(place: &PlaceCtx, n: u32) -> usize {
        let target = place.precision();
        let tail_min = |j0: usize| (j0 + 1..j0 + 65).map(|j| Self::term_bound_static(place, n, j, 1)).min().unwrap();
        let mut j = 1;
        while tail_min(j) < target {
            j += 1;
        }
        j
    }

    fn term_bound_static(place: &PlaceCtx, n: u32, j: usize, v: i64) -> i64 {
        let delta = place.delta() as i64;
        q_pow_sat(place.q(), j as i64)
            .saturating_mul(v)
            .saturating_sub(n as i64 * (j as i64 / delta))
    }

    pub fn coeffs(&self) -> &[LocalSeries] {
        &self.coeffs
    }

    pub fn j_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `min_{j > j_max} v(a_j t^(q^j))` for `v(t) >= v`.
    pub fn remainder_bound(&self, v: i64) -> i64 {
        let j0 = self.j_max() + 1;
        (j0..j0 + 64)
            .map(|j| Self::term_bound_static(&self.place, self.bracket_power, j, v))
            .min()
            .unwrap_or(BOUND_CAP)
    }

    pub fn eval(&self, t: &LocalSeries) -> Result<LocalSeries> {
        let v = t.val_lb();
        if !t.is_zero() && v < 1 {
            return Err(Error::OutsideDisk(v));
        }
        let v = v.max(1);
        let mut acc = LocalSeries::zero(self.place.residue(), self.remainder_bound(v));
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && a.precision() >= BOUND_CAP {
                continue;
            }
            let cap = acc.precision() - a.val_lb().min(0);
            let tq = t.q_power_capped(j as u32, cap);
            acc = &acc + &(a * &tq);
        }
        Ok(acc)
    }

    /// Lower bound on `v(u(t))` for `v(t) >= k >= 1`.
    pub fn modulus_bound(&self, k: i64) -> i64 {
        let k = k.max(1);
        (1..self.j_max() + 64)
            .map(|j| Self::term_bound_static(&self.place, self.bracket_power, j, k))
            .min()
            .unwrap_or(BOUND_CAP)
    }
}

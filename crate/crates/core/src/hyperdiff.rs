//! Hyperdifferentiations `D_k(x^n) = binom(n, k) x^(n-k)` on `O_x`, the
//! digit sign flip `hat`, and the fractional derivative
//! `Delta^(alpha) u(t) = sum_k (-1)^k D_k(hat alpha) u(x^k t)`.
//! Everything here assumes `pi = x`, so series digits are `x`-adic digits.

use std::sync::Arc;

use crate::carlitz::FunctionHandle;
use crate::error::{Error, Result};
use crate::field::lucas_binomial;
use crate::place::PlaceCtx;
use crate::series::LocalSeries;

/// A series in `x` whose digits all lie in `F_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseDigitSeries(LocalSeries);

impl BaseDigitSeries {
    pub fn new(s: LocalSeries) -> Result<Self> {
        let q = s.level().config().q();
        if let Some(k) = s.raw_digits().iter().position(|&d| d >= q) {
            return Err(Error::NotBaseDigit(s.start() + k as i64));
        }
        Ok(BaseDigitSeries(s))
    }

    /// `sum_k coeffs[k] x^k`, exact to `precision`.
    pub fn from_coeffs(place: &PlaceCtx, coeffs: &[u64], precision: i64) -> Result<Self> {
        Self::new(LocalSeries::from_digits(place.residue(), 0, coeffs.to_vec(), precision))
    }

    pub fn series(&self) -> &LocalSeries {
        &self.0
    }

    pub fn into_series(self) -> LocalSeries {
        self.0
    }
}

fn require_pi_x(place: &PlaceCtx) -> Result<()> {
    if place.is_pi_x() {
        Ok(())
    } else {
        Err(Error::RequiresPiX)
    }
}

/// `D_k(t)` for `v(t) >= 0`; precision drops from `N` to `N - k`.
pub fn hyperdiff(k: u64, t: &BaseDigitSeries) -> Result<LocalSeries> {
    let t = t.series();
    let level = t.level();
    if t.is_zero() {
        return Ok(LocalSeries::zero(level, t.precision() - k as i64));
    }
    if t.val_lb() < 0 {
        return Err(Error::OutsideUnitDisk(t.val_lb()));
    }
    let p = level.p();
    let start = t.start();
    let digits: Vec<u64> = t
        .raw_digits()
        .iter()
        .enumerate()
        .filter_map(|(i, &d)| {
            let n = (start + i as i64) as u64;
            (n >= k).then(|| level.scale(lucas_binomial(n, k, p), d))
        })
        .collect();
    let first = (start - k as i64).max(0);
    Ok(LocalSeries::from_digits(level, first, digits, t.precision() - k as i64))
}

/// `sum_n (-1)^n alpha_n x^n`.
pub fn hat(alpha: &BaseDigitSeries) -> BaseDigitSeries {
    let s = alpha.series();
    let level = s.level();
    let start = s.start();
    let digits = s
        .raw_digits()
        .iter()
        .enumerate()
        .map(|(i, &d)| if (start + i as i64).rem_euclid(2) == 1 { level.neg(d) } else { d })
        .collect();
    BaseDigitSeries(LocalSeries::from_digits(level, start, digits, s.precision()))
}

/// Smallest `K` with `m(k + v(t)) >= target` for every `k > K`.
fn cutoff(u: &dyn FunctionHandle, v_t: i64, target: i64) -> usize {
    let mut k = 0usize;
    while u.modulus_bound(k as i64 + 1 + v_t) < target {
        k += 1;
    }
    k
}

/// `Delta^(alpha) u(t)`, `v(alpha) >= 0`, `v(t) >= 0`. The omitted tail is
/// certified by the modulus bound of `u` at the place precision.
pub fn frac_delta(
    place: &PlaceCtx,
    alpha: &BaseDigitSeries,
    u: &dyn FunctionHandle,
    t: &LocalSeries,
) -> Result<LocalSeries> {
    require_pi_x(place)?;
    if alpha.series().val_lb() < 0 {
        return Err(Error::OutsideUnitDisk(alpha.series().val_lb()));
    }
    if !t.is_zero() && t.val_lb() < 0 {
        return Err(Error::OutsideUnitDisk(t.val_lb()));
    }
    let target = place.precision();
    if t.is_zero() {
        return Ok(LocalSeries::zero(place.residue(), target.min(t.precision())));
    }
    let k_max = cutoff(u, t.val_lb(), target);
    let a = hat(alpha);
    let mut acc = LocalSeries::zero(place.residue(), target);
    for k in 0..=k_max {
        let d = hyperdiff(k as u64, &a)?;
        if d.is_zero() && d.precision() >= target {
            continue;
        }
        let term = &d * &u.eval(&t.shift(k as i64))?;
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    Ok(acc)
}

/// `Delta^(alpha) u` as a function handle.
pub struct FracDelta {
    place: Arc<PlaceCtx>,
    alpha: BaseDigitSeries,
    inner: Arc<dyn FunctionHandle>,
}

impl FracDelta {
    pub fn new(place: Arc<PlaceCtx>, alpha: BaseDigitSeries, inner: Arc<dyn FunctionHandle>) -> Result<Self> {
        require_pi_x(&place)?;
        Ok(FracDelta { place, alpha, inner })
    }
}

impl FunctionHandle for FracDelta {
    fn eval(&self, t: &LocalSeries) -> Result<LocalSeries> {
        frac_delta(&self.place, &self.alpha, self.inner.as_ref(), t)
    }

    fn modulus_bound(&self, k: i64) -> i64 {
        // every term is D_k(hat alpha) u(x^k t) with v(D_k(hat alpha)) >= 0
        self.inner.modulus_bound(k)
    }
}

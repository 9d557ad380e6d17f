//! Truncated Laurent series `sum a_i pi^i` over a tower field, carrying an
//! absolute precision: the value is known modulo `pi^N` and nothing beyond
//! `N` is ever read.

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{join, FFElement, FieldCtx, Level};

/// Valuation of a series known to finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Valuation {
    Exact(i64),
    /// The element is zero to this precision.
    AtLeast(i64),
}

impl Valuation {
    pub fn lower_bound(self) -> i64 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Valuation::Exact(_))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

#[derive(Clone)]
pub struct LocalSeries {
    level: Arc<Level>,
    /// For the zero element this equals `precision`.
    valuation: i64,
    /// `digits[k]` is the coefficient of `pi^(valuation + k)`; length is
    /// `precision - valuation`, empty exactly for zero.
    digits: Vec<u64>,
    precision: i64,
}

impl LocalSeries {
    pub fn zero(level: &Arc<Level>, precision: i64) -> Self {
        LocalSeries { level: level.clone(), valuation: precision, digits: Vec::new(), precision }
    }

    pub fn one(level: &Arc<Level>, precision: i64) -> Self {
        Self::monomial(level, 1, 0, precision)
    }

    /// `value * pi^exponent`, `value` a packed element of `level`.
    pub fn monomial(level: &Arc<Level>, value: u64, exponent: i64, precision: i64) -> Self {
        Self::from_digits(level, exponent, vec![value], precision)
    }

    pub fn constant(c: &FFElement, precision: i64) -> Self {
        Self::monomial(c.level(), c.value(), 0, precision)
    }

    /// Build from digits starting at exponent `start`; digits at or past
    /// `precision` are dropped and leading zeros stripped.
    pub fn from_digits(level: &Arc<Level>, start: i64, mut digits: Vec<u64>, precision: i64) -> Self {
        let keep = max(0, precision - start) as usize;
        digits.truncate(keep);
        match digits.iter().position(|&d| d != 0) {
            None => Self::zero(level, precision),
            Some(first) => {
                debug_assert!(digits.iter().all(|&d| level.contains(d)));
                digits.drain(..first);
                let valuation = start + first as i64;
                digits.resize((precision - valuation) as usize, 0);
                LocalSeries { level: level.clone(), valuation, digits, precision }
            }
        }
    }

    pub fn level(&self) -> &Arc<Level> {
        &self.level
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::AtLeast(self.precision)
        } else {
            Valuation::Exact(self.valuation)
        }
    }

    /// Exact valuation, or the precision for zero.
    pub fn val_lb(&self) -> i64 {
        self.valuation
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Exponent of the first stored digit (the valuation when nonzero).
    pub fn start(&self) -> i64 {
        self.valuation
    }

    pub fn raw_digits(&self) -> &[u64] {
        &self.digits
    }

    /// Coefficient of `pi^i`, or `None` past the precision.
    pub fn digit(&self, i: i64) -> Option<FFElement> {
        if i >= self.precision {
            return None;
        }
        let v = if i < self.valuation { 0 } else { self.digits[(i - self.valuation) as usize] };
        Some(FFElement::new(&self.level, v))
    }

    pub fn digit_value(&self, i: i64) -> u64 {
        if i < self.valuation || i >= self.precision {
            0
        } else {
            self.digits[(i - self.valuation) as usize]
        }
    }

    pub fn truncate_to(&self, n: i64) -> Self {
        if n >= self.precision {
            return self.clone();
        }
        Self::from_digits(&self.level, self.valuation, self.digits.clone(), n)
    }

    /// Same value viewed at a deeper level of the same tower.
    pub fn embed(&self, level: &Arc<Level>) -> Self {
        let mut out = self.clone();
        out.level = join(&self.level, level);
        out
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let level = join(&self.level, &other.level);
        let prec = min(self.precision, other.precision);
        let start = min(self.valuation, other.valuation);
        if start >= prec {
            return Self::zero(&level, prec);
        }
        let mut d = vec![0u64; (prec - start) as usize];
        for (k, &x) in self.digits.iter().enumerate() {
            let e = self.valuation + k as i64;
            if e >= prec {
                break;
            }
            d[(e - start) as usize] = x;
        }
        for (k, &y) in other.digits.iter().enumerate() {
            let e = other.valuation + k as i64;
            if e >= prec {
                break;
            }
            if y != 0 {
                let slot = &mut d[(e - start) as usize];
                *slot = if negate { level.sub(*slot, y) } else { level.add(*slot, y) };
            }
        }
        Self::from_digits(&level, start, d, prec)
    }

    fn product(&self, other: &Self) -> Self {
        let level = join(&self.level, &other.level);
        let prec = min(
            self.precision.saturating_add(other.valuation),
            other.precision.saturating_add(self.valuation),
        );
        if self.is_zero() || other.is_zero() {
            return Self::zero(&level, prec);
        }
        let start = self.valuation + other.valuation;
        let len = (prec - start) as usize;
        let mut d = vec![0u64; len];
        for (i, &x) in self.digits.iter().enumerate().take(len) {
            if x == 0 {
                continue;
            }
            for (j, &y) in other.digits[..len - i].iter().enumerate() {
                if y != 0 {
                    d[i + j] = level.add(d[i + j], level.mul(x, y));
                }
            }
        }
        Self::from_digits(&level, start, d, prec)
    }

    /// Multiply by `pi^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.valuation += k;
        out.precision += k;
        out
    }

    /// Multiply by a residue-field constant.
    pub fn scale(&self, c: &FFElement) -> Self {
        let level = join(&self.level, c.level());
        let d = self.digits.iter().map(|&x| level.mul(x, c.value())).collect();
        Self::from_digits(&level, self.valuation, d, self.precision)
    }

    /// Multiply by an integer (reduced mod p).
    pub fn scale_int(&self, c: i64) -> Self {
        let p = self.level.p() as i64;
        let c = c.rem_euclid(p) as u64;
        let d = self.digits.iter().map(|&x| self.level.scale(c, x)).collect();
        Self::from_digits(&self.level, self.valuation, d, self.precision)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::IndeterminateValuation(self.precision));
        }
        let level = &self.level;
        let v = self.valuation;
        let n = self.digits.len();
        let e0 = level.inv(self.digits[0]).expect("leading digit nonzero");
        let minus_e0 = level.neg(e0);
        let mut e = Vec::with_capacity(n);
        e.push(e0);
        for k in 1..n {
            let mut s = 0u64;
            for j in 1..=k {
                let dj = self.digits[j];
                if dj != 0 && e[k - j] != 0 {
                    s = level.add(s, level.mul(dj, e[k - j]));
                }
            }
            e.push(level.mul(minus_e0, s));
        }
        Ok(Self::from_digits(level, -v, e, self.precision - 2 * v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(&self.level, self.precision.max(self.valuation.saturating_mul(e as i64)));
        let mut base = self.clone();
        let mut e = e;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { base.clone() } else { &acc * &base };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^(q^n)`: Frobenius on every digit and exponents scaled by `q^n`.
    /// Precision becomes `N q^n`.
    pub fn q_power(&self, n: u32) -> Self {
        self.q_power_capped(n, i64::MAX)
    }

    /// As [`q_power`](Self::q_power), truncated to precision `cap`.
    pub fn q_power_capped(&self, n: u32, cap: i64) -> Self {
        let cfg = self.level.config();
        let factor = (cfg.q() as i64).checked_pow(n).unwrap_or(i64::MAX);
        let prec = min(self.precision.saturating_mul(factor), cap);
        if self.is_zero() {
            return Self::zero(&self.level, prec);
        }
        let start = self.valuation.saturating_mul(factor);
        if start >= prec {
            return Self::zero(&self.level, prec);
        }
        let e = n as i64 * cfg.upsilon as i64;
        let len = (prec - start) as usize;
        let mut d = vec![0u64; len];
        for (k, &x) in self.digits.iter().enumerate() {
            let idx = (k as i64).saturating_mul(factor);
            if idx >= len as i64 {
                break;
            }
            d[idx as usize] = self.level.frobenius(x, e);
        }
        Self::from_digits(&self.level, start, d, prec)
    }

    /// The `q`-th root: inverse Frobenius on digits, exponents divided by
    /// `q`. Fails when a nonzero digit sits at an exponent not divisible by
    /// `q`. A value known mod `pi^N` gives a root known mod `pi^ceil(N/q)`.
    pub fn q_root(&self) -> Result<Self> {
        let cfg = self.level.config();
        let q = cfg.q() as i64;
        let prec = self.precision.div_euclid(q) + i64::from(self.precision.rem_euclid(q) != 0);
        if self.is_zero() {
            return Ok(Self::zero(&self.level, prec));
        }
        let e = -(cfg.upsilon as i64);
        let mut out = vec![0u64; (prec - self.valuation.div_euclid(q)) as usize];
        let start = self.valuation.div_euclid(q);
        for (k, &x) in self.digits.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let exp = self.valuation + k as i64;
            if exp.rem_euclid(q) != 0 {
                return Err(Error::NotQthPower(exp));
            }
            out[(exp / q - start) as usize] = self.level.frobenius(x, e);
        }
        Ok(Self::from_digits(&self.level, start, out, prec))
    }

    /// True when the two agree to the smaller of their precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            valuation: (!self.is_zero()).then_some(self.valuation),
            precision: self.precision,
            digits: self.digits.iter().map(|&d| self.level.coords(d)).collect(),
            level: self.level.index(),
        }
    }

    pub fn from_json(ctx: &FieldCtx, json: &SeriesJson) -> Result<Self> {
        if json.level >= ctx.depth() {
            return Err(Error::Parse(format!("unknown tower level {}", json.level)));
        }
        let level = ctx.level(json.level).clone();
        match json.valuation {
            None => {
                if !json.digits.is_empty() {
                    return Err(Error::Parse("zero series with digits".into()));
                }
                Ok(Self::zero(&level, json.precision))
            }
            Some(v) => {
                let digits = json
                    .digits
                    .iter()
                    .map(|c| level.from_coords(c))
                    .collect::<Result<Vec<_>>>()?;
                if digits.first().copied().unwrap_or(0) == 0
                    || digits.len() as i64 != json.precision - v
                {
                    return Err(Error::Parse("digit vector inconsistent with valuation".into()));
                }
                Ok(Self::from_digits(&level, v, digits, json.precision))
            }
        }
    }
}

/// Serialized form of a [`LocalSeries`]. `valuation` is `null` for an
/// element that is zero to its precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub valuation: Option<i64>,
    pub precision: i64,
    pub digits: Vec<Vec<u64>>,
    pub level: usize,
}

impl PartialEq for LocalSeries {
    fn eq(&self, other: &Self) -> bool {
        join(&self.level, &other.level);
        self.valuation == other.valuation && self.precision == other.precision && self.digits == other.digits
    }
}

impl fmt::Debug for LocalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LocalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &d) in self.digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = self.valuation + k as i64;
            let c = self.level.coords(d);
            let coeff = if self.level.degree() == 1 { c[0].to_string() } else { format!("{c:?}") };
            match e {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}*pi")?,
                _ => write!(f, "{coeff}*pi^{e}")?,
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(pi^{})", self.precision)
    }
}

macro_rules! series_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait for &LocalSeries {
            type Output = LocalSeries;
            fn $method(self, rhs: &LocalSeries) -> LocalSeries {
                $body(self, rhs)
            }
        }
        impl $trait for LocalSeries {
            type Output = LocalSeries;
            fn $method(self, rhs: LocalSeries) -> LocalSeries {
                $body(&self, &rhs)
            }
        }
        impl $trait<&LocalSeries> for LocalSeries {
            type Output = LocalSeries;
            fn $method(self, rhs: &LocalSeries) -> LocalSeries {
                $body(&self, rhs)
            }
        }
    };
}

series_binop!(Add, add, |a: &LocalSeries, b: &LocalSeries| a.combine(b, false));
series_binop!(Sub, sub, |a: &LocalSeries, b: &LocalSeries| a.combine(b, true));
series_binop!(Mul, mul, |a: &LocalSeries, b: &LocalSeries| a.product(b));

impl Neg for &LocalSeries {
    type Output = LocalSeries;
    fn neg(self) -> LocalSeries {
        self.scale_int(-1)
    }
}

impl Neg for LocalSeries {
    type Output = LocalSeries;
    fn neg(self) -> LocalSeries {
        self.scale_int(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FqConfig;

    fn f2() -> FieldCtx {
        FieldCtx::new(FqConfig::new(2, 1).unwrap())
    }

    fn poly(level: &Arc<Level>, coeffs: &[u64], prec: i64) -> LocalSeries {
        LocalSeries::from_digits(level, 0, coeffs.to_vec(), prec)
    }

    #[test]
    fn addition_cancels_low_term() {
        let ctx = f2();
        let l = ctx.top();
        let a = poly(l, &[0, 1, 1], 8);
        let b = poly(l, &[0, 1], 8);
        let s = &a + &b;
        assert_eq!(s.valuation(), Valuation::Exact(2));
        assert_eq!(s.precision(), 8);
    }

    #[test]
    fn product_of_uniformizers() {
        let ctx = f2();
        let pi = LocalSeries::monomial(ctx.top(), 1, 1, 10);
        let sq = &pi * &pi;
        assert_eq!(sq.valuation(), Valuation::Exact(2));
        assert_eq!(sq.digit_value(2), 1);
        assert_eq!(sq.precision(), 11);
    }

    #[test]
    fn inverse_of_one_plus_pi() {
        let ctx = f2();
        let l = ctx.top();
        let inv = poly(l, &[1, 1], 5).inv().unwrap();
        assert_eq!(inv, poly(l, &[1, 1, 1, 1, 1], 5));
        assert!((&inv * &poly(l, &[1, 1], 5)).agrees_with(&LocalSeries::one(l, 5)));
    }

    #[test]
    fn inverse_precision_rule() {
        let ctx = f2();
        let l = ctx.top();
        let a = LocalSeries::from_digits(l, 2, vec![1, 1], 10);
        let inv = a.inv().unwrap();
        assert_eq!(inv.valuation(), Valuation::Exact(-2));
        assert_eq!(inv.precision(), 6);
    }

    #[test]
    fn division_by_zero_is_indeterminate() {
        let ctx = f2();
        let z = LocalSeries::zero(ctx.top(), 16);
        assert_eq!(z.inv().unwrap_err(), Error::IndeterminateValuation(16));
    }

    #[test]
    fn q_power_examples() {
        let ctx = f2();
        let l = ctx.top();
        let pi = LocalSeries::monomial(l, 1, 1, 8);
        assert_eq!(pi.q_power(1), LocalSeries::monomial(l, 1, 2, 16));
        let a = poly(l, &[1, 1], 8);
        assert_eq!(a.q_power(1).truncate_to(8), &a * &a);
        assert_eq!(a.q_power(0), a);
        assert_eq!(a.q_power(1).truncate_to(8), poly(l, &[1, 0, 1], 8));
    }

    #[test]
    fn q_root_examples() {
        let ctx = f2();
        let l = ctx.top();
        assert_eq!(LocalSeries::monomial(l, 1, 2, 8).q_root().unwrap(), LocalSeries::monomial(l, 1, 1, 4));
        assert_eq!(LocalSeries::monomial(l, 1, 1, 8).q_root().unwrap_err(), Error::NotQthPower(1));
    }

    #[test]
    fn truncate_and_zero() {
        let ctx = f2();
        let l = ctx.top();
        let mut d = vec![0u64; 10];
        d[0] = 1;
        d[1] = 1;
        d[9] = 1;
        let a = poly(l, &d, 12);
        assert_eq!(a.truncate_to(4), poly(l, &[1, 1], 4));
        let z = LocalSeries::zero(l, 16);
        assert!(z.is_zero());
        assert_eq!(z.valuation(), Valuation::AtLeast(16));
    }

    #[test]
    fn json_round_trip() {
        let ctx = f2().extend(2).unwrap();
        let a = LocalSeries::from_digits(ctx.top(), -1, vec![2, 0, 3, 1], 6);
        let back = LocalSeries::from_json(&ctx, &a.to_json()).unwrap();
        assert_eq!(a, back);
        let z = LocalSeries::zero(ctx.top(), 9);
        assert_eq!(LocalSeries::from_json(&ctx, &z.to_json()).unwrap(), z);
    }
}

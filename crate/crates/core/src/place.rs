//! The completion `K_pi` of `F_q(x)` at a finite place, realized as
//! `F_{q^delta}((T))` with `T` standing for `pi` itself.
//!
//! The residue field is `F_q[x]/(pi)`, adjoined to the tower with `pi` as its
//! defining polynomial so the class of `x` is the new generator. The image of
//! `x` is the unique series `chi` with constant digit `x mod pi` and
//! `pi(chi) = T`, found by Newton iteration.

use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqConfig, Level};
use crate::poly;
use crate::series::LocalSeries;

#[derive(Default)]
struct Cache {
    brackets: Vec<LocalSeries>,
    bracket_invs: Vec<Option<LocalSeries>>,
    l_fact: Vec<LocalSeries>,
}

pub struct PlaceCtx {
    fields: FieldCtx,
    pi: Vec<u64>,
    delta: usize,
    residue: Arc<Level>,
    precision: i64,
    chi: LocalSeries,
    cache: Mutex<Cache>,
}

impl std::fmt::Debug for PlaceCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlaceCtx")
            .field("pi", &self.pi)
            .field("delta", &self.delta)
            .field("precision", &self.precision)
            .finish()
    }
}

impl PlaceCtx {
    /// `pi` is monic over `F_q`, coefficients packed, constant term first.
    pub fn new(config: FqConfig, pi: Vec<u64>, precision: i64) -> Result<Self> {
        if precision < 2 {
            return Err(Error::InvalidArgument(format!("precision {precision} < 2")));
        }
        let base = FieldCtx::new(config);
        let fq = base.fq_level().clone();
        if pi.len() < 2 || *pi.last().unwrap() != 1 {
            return Err(Error::InvalidPi("pi must be monic of degree at least 1".into()));
        }
        if let Some(&c) = pi.iter().find(|&&c| c >= config.q()) {
            return Err(Error::InvalidPi(format!("coefficient {c} is not in F_{}", config.q())));
        }
        if !poly::is_irreducible(&fq, &pi) {
            return Err(Error::ReduciblePi(format!("{pi:?}")));
        }
        let delta = pi.len() - 1;
        let (fields, xbar) = if delta == 1 {
            (base, fq.neg(pi[0]))
        } else {
            (base.extend_with(pi.clone())?, config.q())
        };
        let residue = fields.top().clone();

        let t = LocalSeries::monomial(&residue, 1, 1, precision);
        let mut chi = LocalSeries::monomial(&residue, xbar, 0, precision);
        let eval = |x: &LocalSeries| horner(&residue, &pi, x, precision);
        let deriv: Vec<u64> =
            pi.iter().enumerate().skip(1).map(|(k, &c)| residue.scale(k as u64, c)).collect();
        for _ in 0..=64 {
            let defect = &eval(&chi) - &t;
            if defect.is_zero() {
                break;
            }
            let slope = horner(&residue, &deriv, &chi, precision);
            chi = &chi - &defect.div(&slope)?;
        }
        debug_assert!((&eval(&chi) - &t).is_zero());

        Ok(PlaceCtx { fields, pi, delta, residue, precision, chi, cache: Mutex::default() })
    }

    pub fn config(&self) -> FqConfig {
        self.fields.config()
    }

    pub fn q(&self) -> u64 {
        self.config().q()
    }

    pub fn fields(&self) -> &FieldCtx {
        &self.fields
    }

    pub fn pi(&self) -> &[u64] {
        &self.pi
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn is_pi_x(&self) -> bool {
        self.pi == [0, 1]
    }

    pub fn residue(&self) -> &Arc<Level> {
        &self.residue
    }

    pub fn fq_level(&self) -> &Arc<Level> {
        self.fields.fq_level()
    }

    /// Working precision of every constant this context produces.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// The image of `x`.
    pub fn x(&self) -> &LocalSeries {
        &self.chi
    }

    pub fn uniformizer(&self) -> LocalSeries {
        LocalSeries::monomial(&self.residue, 1, 1, self.precision)
    }

    pub fn one(&self) -> LocalSeries {
        LocalSeries::one(&self.residue, self.precision)
    }

    pub fn zero(&self) -> LocalSeries {
        LocalSeries::zero(&self.residue, self.precision)
    }

    /// `|t|_pi = q^(-delta v)`: the exponent `-delta v`.
    pub fn abs_value_exponent(&self, v: i64) -> i64 {
        -(self.delta as i64) * v
    }

    /// `f(x)` for `f` in `F_q[x]` (packed coefficients, constant first).
    pub fn embed_poly(&self, f: &[u64]) -> LocalSeries {
        horner(&self.residue, f, &self.chi, self.precision)
    }

    /// `num(x) / den(x)`.
    pub fn embed_rational(&self, num: &[u64], den: &[u64]) -> Result<LocalSeries> {
        self.embed_poly(num).div(&self.embed_poly(den))
    }

    /// `x^k` for any integer `k`.
    pub fn x_pow(&self, k: i64) -> LocalSeries {
        if self.is_pi_x() {
            return LocalSeries::monomial(&self.residue, 1, k, self.precision + k);
        }
        let base = if k < 0 { self.chi.inv().expect("x is a unit when pi != x") } else { self.chi.clone() };
        base.pow(k.unsigned_abs())
    }

    /// `[n] = x^(q^n) - x`.
    pub fn bracket(&self, n: usize) -> LocalSeries {
        let mut cache = self.cache.lock().unwrap();
        while cache.brackets.len() <= n {
            let k = cache.brackets.len() as u32;
            let b = &self.chi.q_power_capped(k, self.precision) - &self.chi;
            cache.brackets.push(b);
        }
        cache.brackets[n].clone()
    }

    /// `1/[n]`, `n >= 1`.
    pub fn bracket_inv(&self, n: usize) -> LocalSeries {
        assert!(n >= 1, "[0] = 0 has no inverse");
        {
            let cache = self.cache.lock().unwrap();
            if let Some(Some(v)) = cache.bracket_invs.get(n) {
                return v.clone();
            }
        }
        let inv = self.bracket(n).inv().expect("[n] is nonzero for n >= 1");
        let mut cache = self.cache.lock().unwrap();
        if cache.bracket_invs.len() <= n {
            cache.bracket_invs.resize(n + 1, None);
        }
        cache.bracket_invs[n] = Some(inv.clone());
        inv
    }

    /// `L_i = [i][i-1]...[1]`, `L_0 = 1`.
    pub fn l_factorial(&self, i: usize) -> LocalSeries {
        {
            let cache = self.cache.lock().unwrap();
            if let Some(v) = cache.l_fact.get(i) {
                return v.clone();
            }
        }
        let mut acc = self.one();
        let mut out = vec![acc.clone()];
        for k in 1..=i {
            acc = &acc * &self.bracket(k);
            out.push(acc.clone());
        }
        let mut cache = self.cache.lock().unwrap();
        if cache.l_fact.len() < out.len() {
            cache.l_fact = out;
        }
        cache.l_fact[i].clone()
    }

    /// `D_i = [i][i-1]^q ... [1]^(q^(i-1))`, `D_0 = 1`, with `precision`
    /// digits past its valuation.
    pub fn d_factorial(&self, i: usize) -> LocalSeries {
        let rel = self.precision;
        let mut acc = self.one();
        for k in 1..=i {
            let b = self.bracket(k);
            let e = (i - k) as u32;
            let factor = b.q_power_capped(e, b.val_lb().saturating_mul(self.q().pow(e) as i64) + rel);
            acc = &acc * &factor;
        }
        acc
    }
}

fn horner(level: &Arc<Level>, f: &[u64], x: &LocalSeries, precision: i64) -> LocalSeries {
    let mut acc = LocalSeries::zero(level, precision);
    for &c in f.iter().rev() {
        acc = &(&acc * x) + &LocalSeries::monomial(level, c, 0, precision);
    }
    acc
}

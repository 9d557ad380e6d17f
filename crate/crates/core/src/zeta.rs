//! The `F_q`-linear zeta function on `K_x`: `zeta(0) = 0` and, for
//! `t = x^(-n) alpha` with `alpha` in `O_x`, `zeta(t) = Delta^(alpha) l_n (1)`.
//! Also the identities it satisfies, each measured as a defect valuation,
//! and the formal Dirichlet series behind the Euler product for `c_i`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::carlitz::{a_row, delta_n_point, delta_pow_point, FunctionHandle, Memoized, SeriesKey, BOUND_CAP};
use crate::error::{Error, Result};
use crate::hyperdiff::{frac_delta, hyperdiff, BaseDigitSeries};
use crate::place::PlaceCtx;
use crate::polylog::{PolylogHandle, PolylogSet};
use crate::series::{LocalSeries, Valuation};

/// A measured defect and the valuation it is certified to reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Defect {
    pub defect: Valuation,
    pub bound: i64,
}

impl Defect {
    fn of(diff: &LocalSeries, bound: i64) -> Self {
        Defect { defect: diff.valuation(), bound }
    }

    /// The defect reaches `min(bound, cap)`.
    pub fn meets(&self, cap: i64) -> bool {
        self.defect.lower_bound() >= self.bound.min(cap)
    }
}

pub struct ZetaEvaluator {
    set: Arc<PolylogSet>,
    handles: Vec<Arc<Memoized<PolylogHandle>>>,
    cache: Mutex<HashMap<SeriesKey, LocalSeries>>,
}

impl ZetaEvaluator {
    pub fn new(set: Arc<PolylogSet>) -> Result<Self> {
        if !set.place().is_pi_x() {
            return Err(Error::RequiresPiX);
        }
        let handles = (1..=set.n_max())
            .map(|n| set.handle(n).map(|h| Arc::new(Memoized::new(h))))
            .collect::<Result<_>>()?;
        Ok(ZetaEvaluator { set, handles, cache: Mutex::new(HashMap::new()) })
    }

    pub fn place(&self) -> &Arc<PlaceCtx> {
        self.set.place()
    }

    pub fn polylogs(&self) -> &PolylogSet {
        &self.set
    }

    /// The memoized `l_n`.
    pub fn handle(&self, n: usize) -> Result<Arc<Memoized<PolylogHandle>>> {
        if n == 0 || n > self.handles.len() {
            return Err(Error::DepthExceeded { needed: n, built: self.handles.len() });
        }
        Ok(self.handles[n - 1].clone())
    }

    fn one(&self) -> LocalSeries {
        self.place().one()
    }

    /// `zeta(t)` through `n = max(1, -v(t))`.
    pub fn zeta(&self, t: &BaseDigitSeries) -> Result<LocalSeries> {
        let s = t.series();
        if s.is_zero() {
            return Ok(LocalSeries::zero(self.place().residue(), s.precision().min(self.place().precision())));
        }
        let key = SeriesKey::from(s);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let n = (-s.val_lb()).max(1) as usize;
        let v = self.zeta_via(t, n)?;
        self.cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// `Delta^(x^n t) l_n (1)` for any admissible `n >= max(1, -v(t))`.
    pub fn zeta_via(&self, t: &BaseDigitSeries, n: usize) -> Result<LocalSeries> {
        let s = t.series();
        if n == 0 || (!s.is_zero() && s.val_lb() + (n as i64) < 0) {
            return Err(Error::InvalidArgument(format!("x^{n} t is not integral")));
        }
        let handle = self.handle(n)?;
        let alpha = BaseDigitSeries::new(s.shift(n as i64))?;
        frac_delta(self.place(), &alpha, handle.as_ref(), &self.one())
    }

    /// `zeta(x^k)`.
    pub fn zeta_x_pow(&self, k: i64) -> Result<LocalSeries> {
        let t = BaseDigitSeries::new(self.place().x_pow(k))?;
        self.zeta(&t)
    }

    /// `zeta(x^m) = Delta^(m+1) l_1 (1)`.
    pub fn zeta_special_pos(&self, m: usize) -> Result<LocalSeries> {
        delta_pow_point(self.place(), self.handle(1)?.as_ref(), m + 1, &self.one())
    }

    /// Lower bound on `v(zeta(t))` valid for `v(t) >= m`.
    pub fn zeta_bound(&self, m: i64) -> i64 {
        if m < 0 {
            let n = (-m) as usize;
            return self.set.carlitz(n).map(|c| c.min_coeff_valuation()).unwrap_or(i64::MIN / 4);
        }
        // alpha = x t has v >= m + 1, so v(D_k(hat alpha)) >= m + 1 - k
        let l1 = &self.handles[0];
        (0..=m + 2)
            .map(|k| (m + 1 - k).max(0).saturating_add(l1.modulus_bound(k)))
            .min()
            .unwrap_or(BOUND_CAP)
    }

    /// `l_n(t) - sum_{i <= i_cut} zeta(x^(i-n)) D_i(t)`, `v(t) >= 0`.
    pub fn verify_expansion(&self, n: usize, t: &BaseDigitSeries, i_cut: usize) -> Result<Defect> {
        let s = t.series();
        let lhs = self.handle(n)?.eval(s)?;
        let mut rhs = LocalSeries::zero(self.place().residue(), self.place().precision());
        for i in 0..=i_cut {
            let d = hyperdiff(i as u64, t)?;
            if d.is_zero() && d.precision() >= rhs.precision() {
                continue;
            }
            rhs = &rhs + &(&self.zeta_x_pow(i as i64 - n as i64)? * &d);
        }
        let v_t = if s.is_zero() { BOUND_CAP } else { s.val_lb() };
        let bound = (i_cut + 1..i_cut + 65)
            .map(|i| {
                let d = (v_t - i as i64).max(0);
                self.zeta_bound(i as i64 - n as i64).saturating_add(d)
            })
            .min()
            .unwrap_or(BOUND_CAP);
        Ok(Defect::of(&(&lhs - &rhs), bound))
    }

    /// `sum_{r=1}^{i} A_{i,r} zeta(x^(r-n))`.
    fn c_from_zeta(&self, i: usize, n: usize) -> Result<LocalSeries> {
        let row = a_row(self.place(), i);
        let mut acc = LocalSeries::zero(self.place().residue(), self.place().precision());
        for (r, a) in row.iter().enumerate().skip(1) {
            acc = &acc + &(a * &self.zeta_x_pow(r as i64 - n as i64)?);
        }
        Ok(acc)
    }

    /// `c_i^(n) - sum_r A_{i,r} zeta(x^(r-n))` and `c_i^(n) - (Delta_i l_n)(1)`.
    pub fn verify_coefficients(&self, i: usize, n: usize) -> Result<(Defect, Defect)> {
        if i == 0 {
            return Err(Error::InvalidArgument("the identity needs i >= 1".into()));
        }
        let c = self.set.carlitz(n)?.coeffs().get(i).cloned().ok_or_else(|| {
            Error::InvalidArgument(format!("i = {i} exceeds i_max = {}", self.set.i_max()))
        })?;
        let via_zeta = self.c_from_zeta(i, n)?;
        let pointwise = delta_n_point(self.place(), self.handle(n)?.as_ref(), i, &self.one())?;
        Ok((Defect::of(&(&c - &via_zeta), BOUND_CAP), Defect::of(&(&c - &pointwise), BOUND_CAP)))
    }

    /// `zeta(x^(-n)) - sum_{i=1}^{i_cut} (-1)^(i+1) L_i^(-1) sum_r A_{i,r} zeta(x^(r-n))`,
    /// summed over `i` on the outside.
    pub fn verify_functional_eq(&self, n: usize, i_cut: usize) -> Result<Defect> {
        let place = self.place();
        let lhs = self.zeta_x_pow(-(n as i64))?;
        let mut rhs = LocalSeries::zero(place.residue(), place.precision());
        for i in 1..=i_cut {
            let inner = self.c_from_zeta(i, n)?.div(&place.l_factorial(i))?;
            rhs = if i % 2 == 1 { &rhs + &inner } else { &rhs - &inner };
        }
        // the omitted terms equal c_i^(n)/L_i
        let cf = self.set.carlitz(n)?;
        let delta = place.delta();
        let bound = (i_cut + 1..i_cut + 65)
            .map(|i| {
                let v = if i <= cf.i_max() { cf.coeff(i).val_lb() } else { cf.tail().at(i) };
                v.saturating_sub((i / delta) as i64)
            })
            .min()
            .unwrap_or(BOUND_CAP);
        Ok(Defect::of(&(&lhs - &rhs), bound))
    }

    /// `z_i = (c_{i-1} [i-1])^q` from `l_1`, `i >= 2`.
    pub fn euler_argument(&self, i: usize) -> Result<LocalSeries> {
        if i < 2 {
            return Err(Error::InvalidArgument("z_i needs i >= 2".into()));
        }
        let l1 = self.set.carlitz(1)?;
        let c = l1.coeffs().get(i - 1).ok_or_else(|| Error::InvalidArgument(format!("i = {i} exceeds i_max")))?;
        Ok((c * &self.place().bracket(i - 1)).q_power_capped(1, self.place().precision()))
    }

    /// The partial Euler product for `c_i`, evaluated at `z_i`, with its
    /// comparison against `sum_{j >= 1} z_i^(q^j)` and against `c_i`.
    /// The truncated Euler product evaluated at the argument for `c_i`.
    pub fn euler_partial_value(&self, i: usize, primes_up_to: u64, depth: u64) -> Result<LocalSeries> {
        let z = self.euler_argument(i)?;
        let prec = self.place().precision();
        Ok(FormalDirichlet::euler_product(primes_up_to, depth).eval(&z, self.place().q(), prec))
    }

    pub fn euler_partial(&self, i: usize, primes_up_to: u64, depth: u64) -> Result<EulerReport> {
        let z = self.euler_argument(i)?;
        let prec = self.place().precision();
        let q = self.place().q();
        let product = FormalDirichlet::euler_product(primes_up_to, depth);
        let value = product.eval(&z, q, prec);
        let direct = FormalDirichlet::geometric(1, max_index(&z, q, prec)).eval(&z, q, prec);
        let smallest_missing = (1..).find(|&m| product.coeff(m) != 1).expect("finite support");
        let certified = power_valuation(&z, q, smallest_missing).min(prec);
        let c_i = self.set.carlitz(1)?.coeff(i).clone();
        Ok(EulerReport {
            i,
            primes_up_to,
            depth,
            smallest_missing_index: smallest_missing,
            certified_precision: certified,
            agreement: (&value - &direct).valuation(),
            j0_discrepancy: (&c_i - &value).valuation(),
            z_valuation: z.valuation(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerReport {
    pub i: usize,
    pub primes_up_to: u64,
    pub depth: u64,
    pub smallest_missing_index: u64,
    /// Valuation of the first term the product omits, capped at precision.
    pub certified_precision: i64,
    /// `v(product - sum_{j >= 1} z^(q^j))`.
    pub agreement: Valuation,
    /// `v(c_i - product)`; the omitted `j = 0` term `z_i` accounts for it.
    pub j0_discrepancy: Valuation,
    pub z_valuation: Valuation,
}

impl EulerReport {
    pub fn passes(&self) -> bool {
        self.agreement.lower_bound() >= self.certified_precision && self.j0_discrepancy == self.z_valuation
    }
}

/// `q^m v(z)`, saturating.
fn power_valuation(z: &LocalSeries, q: u64, m: u64) -> i64 {
    let v = z.val_lb().max(1);
    let mut acc = v;
    for _ in 0..m {
        acc = acc.saturating_mul(q as i64);
        if acc >= BOUND_CAP {
            return BOUND_CAP;
        }
    }
    acc
}

/// Largest `m` with `q^m v(z) < prec`.
fn max_index(z: &LocalSeries, q: u64, prec: i64) -> u64 {
    let mut m = 0;
    while power_valuation(z, q, m + 1) < prec {
        m += 1;
    }
    m
}

/// A finitely supported formal sum `sum_j kappa_j z^(q^j)`, `j >= 1`,
/// coefficients in `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FormalDirichlet {
    p: u64,
    coeffs: BTreeMap<u64, u64>,
}

impl FormalDirichlet {
    pub fn new(p: u64) -> Self {
        FormalDirichlet { p, coeffs: BTreeMap::new() }
    }

    /// `z^(q^j)`.
    pub fn monomial(p: u64, j: u64) -> Self {
        let mut out = Self::new(p);
        out.add_term(j, 1);
        out
    }

    /// The `otimes` unit `z^(q^1)`.
    pub fn unit(p: u64) -> Self {
        Self::monomial(p, 1)
    }

    /// `sum_{j=lo}^{hi} z^(q^j)`.
    pub fn geometric(lo: u64, hi: u64) -> Self {
        let mut out = Self::new(0);
        for j in lo.max(1)..=hi {
            out.coeffs.insert(j, 1);
        }
        out
    }

    pub fn add_term(&mut self, j: u64, kappa: u64) {
        assert!(j >= 1, "indices start at 1");
        let e = self.coeffs.entry(j).or_insert(0);
        *e = if self.p == 0 { *e + kappa } else { (*e + kappa) % self.p };
        if *e == 0 {
            self.coeffs.remove(&j);
        }
    }

    pub fn coeff(&self, j: u64) -> u64 {
        self.coeffs.get(&j).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.coeffs.iter().map(|(&j, &k)| (j, k))
    }

    /// `z^(q^i) (x) z^(q^j) = z^(q^(ij))`, extended bilinearly.
    pub fn otimes(&self, other: &Self) -> Self {
        let p = self.p.max(other.p);
        let mut out = Self::new(p);
        for (&i, &a) in &self.coeffs {
            for (&j, &b) in &other.coeffs {
                let kappa = if p == 0 { a * b } else { a * b % p };
                out.add_term(i * j, kappa);
            }
        }
        out
    }

    /// `prod_{p <= primes_up_to} sum_{p^n <= depth} z^(q^(p^n))`.
    pub fn euler_product(primes_up_to: u64, depth: u64) -> Self {
        let mut acc = Self::unit(0);
        for prime in (2..=primes_up_to).filter(|&n| is_prime(n)) {
            let mut factor = Self::new(0);
            let mut power = 1u64;
            while power <= depth {
                factor.add_term(power, 1);
                power = match power.checked_mul(prime) {
                    Some(v) => v,
                    None => break,
                };
            }
            acc = acc.otimes(&factor);
        }
        acc
    }

    /// `sum_j kappa_j z^(q^j)`, dropping terms past precision `prec`.
    pub fn eval(&self, z: &LocalSeries, q: u64, prec: i64) -> LocalSeries {
        let mut acc = LocalSeries::zero(z.level(), prec);
        for (&j, &kappa) in &self.coeffs {
            if power_valuation(z, q, j) >= prec {
                continue;
            }
            let Ok(e) = u32::try_from(j) else { continue };
            let term = z.q_power_capped(e, prec).scale_int(kappa as i64);
            acc = &acc + &term;
        }
        acc
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::delta_on_carlitz;
    use crate::field::FqConfig;

    fn evaluator(p: u64, prec: i64, i_max: usize, n_max: usize) -> ZetaEvaluator {
        let place = Arc::new(PlaceCtx::new(FqConfig::new(p, 1).unwrap(), vec![0, 1], prec).unwrap());
        ZetaEvaluator::new(Arc::new(PolylogSet::build(place, &[], i_max, n_max).unwrap())).unwrap()
    }

    #[test]
    fn otimes_rules() {
        let a = FormalDirichlet::monomial(2, 2);
        let b = FormalDirichlet::monomial(2, 3);
        assert_eq!(a.otimes(&b), FormalDirichlet::monomial(2, 6));
        let mut c = FormalDirichlet::new(2);
        c.add_term(4, 1);
        c.add_term(9, 1);
        assert_eq!(FormalDirichlet::unit(2).otimes(&c), c);
    }

    #[test]
    fn euler_product_covers_smooth_indices() {
        let e = FormalDirichlet::euler_product(7, 32);
        for m in 1..=10 {
            assert_eq!(e.coeff(m), 1, "m={m}");
        }
        assert_eq!(e.coeff(11), 0);
        assert_eq!(e.coeff(64), 0);
    }

    #[test]
    fn special_values() {
        let ev = evaluator(2, 48, 10, 2);
        let l1 = ev.polylogs().carlitz(1).unwrap().clone();
        assert!(ev.zeta(&BaseDigitSeries::new(ev.place().zero()).unwrap()).unwrap().is_zero());
        assert!(ev.zeta_x_pow(-1).unwrap().agrees_with(l1.coeff(0)));
        assert!(ev.zeta_x_pow(0).unwrap().agrees_with(l1.coeff(1)));
        assert!(ev.zeta_special_pos(0).unwrap().agrees_with(l1.coeff(1)));
        let d2 = delta_on_carlitz(&delta_on_carlitz(&l1));
        assert!(ev.zeta_special_pos(1).unwrap().agrees_with(d2.coeff(0)));
        for m in 0..=3 {
            assert!(ev.zeta_special_pos(m).unwrap().agrees_with(&ev.zeta_x_pow(m as i64).unwrap()), "m={m}");
        }
    }

    #[test]
    fn identities_small() {
        let ev = evaluator(2, 48, 10, 2);
        let (a, b) = ev.verify_coefficients(1, 1).unwrap();
        assert!(a.meets(36) && b.meets(36), "{a:?} {b:?}");
        let (a, b) = ev.verify_coefficients(2, 2).unwrap();
        assert!(a.meets(36) && b.meets(36), "{a:?} {b:?}");
        let t = BaseDigitSeries::new(ev.place().embed_poly(&[0, 1, 0, 1])).unwrap();
        let d = ev.verify_expansion(1, &t, 8).unwrap();
        assert!(d.meets(40), "{d:?}");
        let zero = BaseDigitSeries::new(ev.place().zero()).unwrap();
        assert!(ev.verify_expansion(1, &zero, 4).unwrap().defect.lower_bound() >= 40);
        let d = ev.verify_functional_eq(1, 4).unwrap();
        assert!(d.meets(40), "{d:?}");
    }

    #[test]
    fn euler_for_c2() {
        let ev = evaluator(2, 48, 10, 1);
        let r = ev.euler_partial(2, 7, 32).unwrap();
        assert!(r.passes(), "{r:?}");
        assert_eq!(r.smallest_missing_index, 11);
    }
}

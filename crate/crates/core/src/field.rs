//! Finite fields as an append-only tower of extensions over `F_p`.
//!
//! An element of a level is stored as a single packed integer: its
//! coordinates over `F_p` in the tower's monomial basis, read as a base-`p`
//! number with coordinate 0 least significant. The basis of level `L` is the
//! basis of level `L-1` times powers of the new generator, so the inclusion of
//! a level into any deeper level leaves the packed value unchanged.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Levels up to this many elements get exp/log tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// The base field `F_q`, `q = p^upsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FqConfig {
    pub p: u64,
    pub upsilon: u32,
}

impl FqConfig {
    pub fn new(p: u64, upsilon: u32) -> Result<Self> {
        if p < 2 || !is_prime(p) {
            return Err(Error::InvalidConfig(format!("p = {p} is not prime")));
        }
        if p >= 1 << 16 {
            return Err(Error::InvalidConfig(format!("p = {p} too large")));
        }
        if upsilon == 0 {
            return Err(Error::InvalidConfig("upsilon must be at least 1".into()));
        }
        match p.checked_pow(upsilon) {
            Some(q) if q < TABLE_LIMIT => Ok(FqConfig { p, upsilon }),
            _ => Err(Error::InvalidConfig(format!("q = {p}^{upsilon} too large"))),
        }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.upsilon)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

struct Tables {
    exp: Vec<u64>,
    log: Vec<u64>,
}

/// One level of the tower.
pub struct Level {
    config: FqConfig,
    index: usize,
    rel_degree: usize,
    abs_degree: usize,
    size: u64,
    parent: Option<Arc<Level>>,
    /// Monic defining polynomial over the parent, constant term first.
    modulus: Vec<u64>,
    tables: OnceLock<Option<Tables>>,
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Level")
            .field("index", &self.index)
            .field("abs_degree", &self.abs_degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl Level {
    fn base(config: FqConfig) -> Self {
        Level {
            config,
            index: 0,
            rel_degree: 1,
            abs_degree: 1,
            size: config.p,
            parent: None,
            modulus: Vec::new(),
            tables: OnceLock::new(),
        }
    }

    fn child(parent: &Arc<Level>, modulus: Vec<u64>) -> Result<Self> {
        let rel_degree = modulus.len() - 1;
        let abs_degree = parent.abs_degree * rel_degree;
        let size = parent
            .size
            .checked_pow(rel_degree as u32)
            .filter(|s| *s < 1 << 62)
            .ok_or_else(|| Error::InvalidConfig("field tower too large".into()))?;
        Ok(Level {
            config: parent.config,
            index: parent.index + 1,
            rel_degree,
            abs_degree,
            size,
            parent: Some(parent.clone()),
            modulus,
            tables: OnceLock::new(),
        })
    }

    pub fn config(&self) -> FqConfig {
        self.config
    }

    pub fn p(&self) -> u64 {
        self.config.p
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Degree over `F_p`.
    pub fn degree(&self) -> usize {
        self.abs_degree
    }

    /// Degree over the previous level.
    pub fn rel_degree(&self) -> usize {
        self.rel_degree
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn parent(&self) -> Option<&Arc<Level>> {
        self.parent.as_ref()
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Ancestor at tower index `idx` (which must not exceed `self.index`).
    pub fn ancestor(self: &Arc<Self>, idx: usize) -> &Arc<Level> {
        let mut cur = self;
        while cur.index > idx {
            cur = cur.parent.as_ref().expect("index above 0 has a parent");
        }
        cur
    }

    /// Structural equality: same index and the same chain of defining
    /// polynomials.
    pub fn same_as(&self, other: &Level) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.index != other.index || self.config != other.config || self.modulus != other.modulus {
            return false;
        }
        match (&self.parent, &other.parent) {
            (None, None) => true,
            (Some(a), Some(b)) => a.same_as(b),
            _ => false,
        }
    }

    pub fn contains(&self, value: u64) -> bool {
        value < self.size
    }

    pub fn coords(&self, mut value: u64) -> Vec<u64> {
        let p = self.p();
        (0..self.abs_degree)
            .map(|_| {
                let d = value % p;
                value /= p;
                d
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<u64> {
        if coords.len() > self.abs_degree {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates for a level of degree {}",
                coords.len(),
                self.abs_degree
            )));
        }
        let p = self.p();
        let mut v = 0u64;
        for &c in coords.iter().rev() {
            if c >= p {
                return Err(Error::InvalidArgument(format!("coordinate {c} not reduced mod {p}")));
            }
            v = v * p + c;
        }
        Ok(v)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut r, mut place) = (0u64, 1u64);
        while a | b != 0 {
            r += ((a % p + b % p) % p) * place;
            place *= p;
            a /= p;
            b /= p;
        }
        r
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        self.scale(self.p() - 1, a)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if self.p() == 2 {
            return a ^ b;
        }
        self.add(a, self.neg(b))
    }

    /// Multiply by the prime-field scalar `c`.
    pub fn scale(&self, c: u64, a: u64) -> u64 {
        let p = self.p();
        let c = c % p;
        if c == 0 || a == 0 {
            return 0;
        }
        if c == 1 {
            return a;
        }
        let (mut a, mut r, mut place) = (a, 0u64, 1u64);
        while a != 0 {
            r += ((a % p) * c % p) * place;
            place *= p;
            a /= p;
        }
        r
    }

    fn tables(&self) -> Option<&Tables> {
        self.tables.get_or_init(|| self.build_tables()).as_ref()
    }

    fn build_tables(&self) -> Option<Tables> {
        if self.size > TABLE_LIMIT {
            return None;
        }
        let order = self.size - 1;
        if order == 1 {
            return Some(Tables { exp: vec![1], log: vec![0, 0] });
        }
        let factors = prime_factors(order);
        let gen = (2..self.size)
            .find(|&g| factors.iter().all(|r| self.pow_slow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u64; self.size as usize];
        let mut cur = 1u64;
        for i in 0..order {
            exp.push(cur);
            log[cur as usize] = i;
            cur = self.mul_slow(cur, gen);
        }
        Some(Tables { exp, log })
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let Some(parent) = &self.parent else {
            return a * b % self.p();
        };
        let m = self.rel_degree;
        let s = parent.size;
        let split = |mut v: u64| -> Vec<u64> {
            (0..m)
                .map(|_| {
                    let d = v % s;
                    v /= s;
                    d
                })
                .collect()
        };
        let (ac, bc) = (split(a), split(b));
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in ac.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in bc.iter().enumerate() {
                if y != 0 {
                    prod[i + j] = parent.add(prod[i + j], parent.mul(x, y));
                }
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..m {
                prod[k - m + j] = parent.sub(prod[k - m + j], parent.mul(c, self.modulus[j]));
            }
        }
        prod[..m].iter().rev().fold(0, |acc, &d| acc * s + d)
    }

    fn pow_slow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match self.tables() {
            Some(t) => {
                let order = self.size - 1;
                let e = t.log[a as usize] + t.log[b as usize];
                t.exp[(if e >= order { e - order } else { e }) as usize]
            }
            None => self.mul_slow(a, b),
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        match self.tables() {
            Some(t) => {
                let order = (self.size - 1) as u128;
                let idx = (t.log[a as usize] as u128 * (e as u128 % order)) % order;
                t.exp[idx as usize]
            }
            None => {
                let (mut base, mut acc, mut e) = (a, 1u64, e);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(acc, base);
                    }
                    base = self.mul(base, base);
                    e >>= 1;
                }
                acc
            }
        }
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        Some(match self.tables() {
            Some(t) => {
                let order = self.size - 1;
                t.exp[((order - t.log[a as usize]) % order) as usize]
            }
            None => self.pow(a, self.size - 2),
        })
    }

    /// `a^(p^e)`, with `e` taken modulo the absolute degree.
    pub fn frobenius(&self, a: u64, e: i64) -> u64 {
        let d = self.abs_degree as i64;
        let e = e.rem_euclid(d);
        if e == 0 || a < self.p() {
            return a;
        }
        match self.tables() {
            Some(t) => {
                let order = (self.size - 1) as u128;
                let mut pe = 1u128;
                for _ in 0..e {
                    pe = pe * self.p() as u128 % order;
                }
                t.exp[((t.log[a as usize] as u128 * pe) % order) as usize]
            }
            None => (0..e).fold(a, |acc, _| self.pow(acc, self.p())),
        }
    }
}

/// Common level of two operands: the deeper one, provided the shallower is
/// (structurally) one of its ancestors.
pub(crate) fn join(a: &Arc<Level>, b: &Arc<Level>) -> Arc<Level> {
    if Arc::ptr_eq(a, b) {
        return a.clone();
    }
    let (lo, hi) = if a.index <= b.index { (a, b) } else { (b, a) };
    let anc = hi.ancestor(lo.index);
    assert!(
        Arc::ptr_eq(anc, lo) || anc.same_as(lo),
        "operands belong to unrelated field towers"
    );
    hi.clone()
}

/// Information about one tower level, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelInfo {
    pub level: usize,
    pub degree: usize,
    pub rel_degree: usize,
    /// Defining polynomial over the previous level, constant term first,
    /// each coefficient as `F_p` coordinates.
    pub modulus: Vec<Vec<u64>>,
}

/// Handle to the top of a tower. Extending produces a new handle; elements of
/// the old levels remain valid in it.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    top: Arc<Level>,
}

impl FieldCtx {
    /// `F_p`, extended to `F_q` when `upsilon > 1`.
    pub fn new(config: FqConfig) -> Self {
        let ctx = FieldCtx { top: Arc::new(Level::base(config)) };
        if config.upsilon > 1 {
            ctx.extend(config.upsilon as usize).expect("degree at least 2")
        } else {
            ctx
        }
    }

    pub fn config(&self) -> FqConfig {
        self.top.config
    }

    pub fn top(&self) -> &Arc<Level> {
        &self.top
    }

    pub fn depth(&self) -> usize {
        self.top.index + 1
    }

    pub fn level(&self, idx: usize) -> &Arc<Level> {
        self.top.ancestor(idx)
    }

    /// The level realizing `F_q`.
    pub fn fq_level(&self) -> &Arc<Level> {
        self.level(if self.config().upsilon > 1 { 1 } else { 0 })
    }

    /// Adjoin a root of the lexicographically smallest monic irreducible
    /// polynomial of degree `m` over the current top level.
    pub fn extend(&self, m: usize) -> Result<FieldCtx> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("extension degree {m} < 2")));
        }
        let base = &self.top;
        let s = base.size();
        // counter over (c_0, ..., c_{m-1}); c_0 is the most significant
        let mut coeffs = vec![0u64; m];
        loop {
            let mut f = coeffs.clone();
            f.push(1);
            if poly::is_irreducible(base, &f) {
                return self.push_level(f);
            }
            let mut k = m;
            loop {
                if k == 0 {
                    unreachable!("irreducible polynomials exist in every degree");
                }
                k -= 1;
                coeffs[k] += 1;
                if coeffs[k] < s {
                    break;
                }
                coeffs[k] = 0;
            }
        }
    }

    /// Adjoin a root of the given monic polynomial over the top level.
    pub fn extend_with(&self, modulus: Vec<u64>) -> Result<FieldCtx> {
        if modulus.len() < 3 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidArgument("modulus must be monic of degree at least 2".into()));
        }
        if modulus.iter().any(|&c| !self.top.contains(c)) {
            return Err(Error::InvalidArgument("modulus coefficient outside the top level".into()));
        }
        if !poly::is_irreducible(&self.top, &modulus) {
            return Err(Error::ReduciblePi(format!("{modulus:?}")));
        }
        self.push_level(modulus)
    }

    fn push_level(&self, modulus: Vec<u64>) -> Result<FieldCtx> {
        Ok(FieldCtx { top: Arc::new(Level::child(&self.top, modulus)?) })
    }

    /// Rebuild a tower from reported level data.
    pub fn from_levels(config: FqConfig, levels: &[LevelInfo]) -> Result<FieldCtx> {
        let mut ctx = FieldCtx { top: Arc::new(Level::base(config)) };
        for info in levels.iter().filter(|l| l.level > 0) {
            let modulus = info
                .modulus
                .iter()
                .map(|c| ctx.top.from_coords(c))
                .collect::<Result<Vec<_>>>()?;
            ctx = ctx.extend_with(modulus)?;
        }
        Ok(ctx)
    }

    pub fn levels(&self) -> Vec<LevelInfo> {
        (0..self.depth())
            .map(|i| {
                let lvl = self.level(i);
                let parent_coords = |c: u64| match lvl.parent() {
                    Some(par) => par.coords(c),
                    None => vec![c],
                };
                LevelInfo {
                    level: i,
                    degree: lvl.degree(),
                    rel_degree: lvl.rel_degree(),
                    modulus: lvl.modulus().iter().map(|&c| parent_coords(c)).collect(),
                }
            })
            .collect()
    }

    pub fn element(&self, level: usize, coords: &[u64]) -> Result<FFElement> {
        let lvl = self.level(level).clone();
        let value = lvl.from_coords(coords)?;
        Ok(FFElement { level: lvl, value })
    }

    /// Keep whichever of `self` and `other` is deeper; they must lie on one
    /// chain.
    pub fn deeper(&self, other: &FieldCtx) -> FieldCtx {
        FieldCtx { top: join(&self.top, &other.top) }
    }
}

/// An element of some level of a tower.
#[derive(Clone)]
pub struct FFElement {
    level: Arc<Level>,
    value: u64,
}

impl FFElement {
    pub fn new(level: &Arc<Level>, value: u64) -> Self {
        assert!(level.contains(value), "value {value} outside level {}", level.index);
        FFElement { level: level.clone(), value }
    }

    pub fn zero(level: &Arc<Level>) -> Self {
        FFElement::new(level, 0)
    }

    pub fn one(level: &Arc<Level>) -> Self {
        FFElement::new(level, 1)
    }

    pub fn level(&self) -> &Arc<Level> {
        &self.level
    }

    /// Packed coordinates (level independent).
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn coords(&self) -> Vec<u64> {
        self.level.coords(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<FFElement> {
        self.level.inv(self.value).map(|v| FFElement { level: self.level.clone(), value: v })
    }

    pub fn pow(&self, e: u64) -> FFElement {
        FFElement { level: self.level.clone(), value: self.level.pow(self.value, e) }
    }

    pub fn frobenius(&self, e: i64) -> FFElement {
        frobenius(self, e)
    }

    /// The element viewed at a deeper level of the same tower.
    pub fn embed(&self, level: &Arc<Level>) -> FFElement {
        let l = join(&self.level, level);
        assert!(l.index == level.index, "cannot embed into a shallower level");
        FFElement { level: l, value: self.value }
    }
}

/// `a^(p^e)`; `e` may be negative (inverse Frobenius).
pub fn frobenius(a: &FFElement, e: i64) -> FFElement {
    FFElement { level: a.level.clone(), value: a.level.frobenius(a.value, e) }
}

impl PartialEq for FFElement {
    fn eq(&self, other: &Self) -> bool {
        join(&self.level, &other.level);
        self.value == other.value
    }
}

impl Eq for FFElement {}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.coords(), self.level.index)
    }
}

macro_rules! ff_binop {
    ($trait:ident, $method:ident, $op:ident) => {
        impl $trait for &FFElement {
            type Output = FFElement;
            fn $method(self, rhs: &FFElement) -> FFElement {
                let level = join(&self.level, &rhs.level);
                let value = level.$op(self.value, rhs.value);
                FFElement { level, value }
            }
        }
        impl $trait for FFElement {
            type Output = FFElement;
            fn $method(self, rhs: FFElement) -> FFElement {
                (&self).$method(&rhs)
            }
        }
    };
}

ff_binop!(Add, add, add);
ff_binop!(Sub, sub, sub);
ff_binop!(Mul, mul, mul);

impl Neg for &FFElement {
    type Output = FFElement;
    fn neg(self) -> FFElement {
        FFElement { level: self.level.clone(), value: self.level.neg(self.value) }
    }
}

impl Neg for FFElement {
    type Output = FFElement;
    fn neg(self) -> FFElement {
        -&self
    }
}

/// All `q` roots of `z^q - z = xi`, at the first level of the chain (from
/// `xi`'s level upward, extending by degree `p` when needed) that contains
/// one. Roots are ordered `z_0 + c` with `c` running over `F_q` by packed
/// value, `z_0` being the solution of the linear system with free
/// coordinates set to zero.
pub fn artin_schreier_residue(ctx: &FieldCtx, xi: &FFElement) -> Result<(FieldCtx, Vec<FFElement>)> {
    let mut ctx = ctx.deeper(&FieldCtx { top: xi.level.clone() });
    let cfg = ctx.config();
    let mut idx = xi.level.index.max(ctx.fq_level().index);
    // a root generates an extension of p-power degree dividing q
    let mut budget = cfg.upsilon as usize + 1;
    loop {
        while idx < ctx.depth() {
            let level = ctx.level(idx).clone();
            if let Some(z0) = solve_affine_frobenius(&level, xi.value, cfg.upsilon) {
                let roots = (0..cfg.q())
                    .map(|c| FFElement { level: level.clone(), value: level.add(z0, c) })
                    .collect();
                return Ok((ctx, roots));
            }
            idx += 1;
        }
        if budget == 0 {
            return Err(Error::InvalidArgument("Artin-Schreier root not found".into()));
        }
        budget -= 1;
        ctx = ctx.extend(cfg.p as usize)?;
    }
}

/// Solve `z^q - z = xi` over `F_p` coordinates of `level`.
fn solve_affine_frobenius(level: &Level, xi: u64, upsilon: u32) -> Option<u64> {
    let p = level.p();
    let d = level.degree();
    // rows: equations (coordinates), columns: unknowns, last column: rhs
    let mut m = vec![vec![0u64; d + 1]; d];
    let mut basis = 1u64;
    for col in 0..d {
        let img = level.sub(level.frobenius(basis, upsilon as i64), basis);
        for (row, c) in level.coords(img).into_iter().enumerate() {
            m[row][col] = c;
        }
        basis *= p;
    }
    for (row, c) in level.coords(xi).into_iter().enumerate() {
        m[row][d] = c;
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..d {
        let Some(piv) = (r..d).find(|&i| m[i][col] != 0) else { continue };
        m.swap(r, piv);
        let inv = mod_inv(m[r][col], p);
        for c in col..=d {
            m[r][c] = m[r][c] * inv % p;
        }
        for i in 0..d {
            if i != r && m[i][col] != 0 {
                let f = m[i][col];
                for c in col..=d {
                    m[i][c] = (m[i][c] + p * p - f * m[r][c] % p) % p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| row[d] != 0) {
        return None;
    }
    let mut sol = vec![0u64; d];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = m[i][d];
    }
    Some(sol.iter().rev().fold(0, |acc, &c| acc * p + c))
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// `binom(n, k) mod p` by Lucas' theorem; zero when `k > n`.
pub fn lucas_binomial(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        // binom(ni, ki) mod p with ni < p
        let mut num = 1u64;
        let mut den = 1u64;
        for j in 0..ki {
            num = num * (ni - j) % p;
            den = den * (j + 1) % p;
        }
        acc = acc * num % p * mod_inv(den, p) % p;
        n /= p;
        k /= p;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldCtx {
        FieldCtx::new(FqConfig::new(2, 1).unwrap())
    }

    #[test]
    fn extend_f2_quadratic() {
        let ctx = f2().extend(2).unwrap();
        assert_eq!(ctx.top().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn extend_f3_quadratic_is_x2_plus_1() {
        // oracle: enumerate all monic quadratics over F_3, keep the rootless ones
        let irreducible: Vec<(u64, u64)> = (0..3)
            .flat_map(|c0| (0..3).map(move |c1| (c0, c1)))
            .filter(|&(c0, c1)| (0..3).all(|z| (z * z + c1 * z + c0) % 3 != 0))
            .collect();
        assert_eq!(irreducible.len(), 3);
        let ctx = FieldCtx::new(FqConfig::new(3, 1).unwrap()).extend(2).unwrap();
        assert_eq!(ctx.top().modulus(), &[irreducible[0].0, irreducible[0].1, 1]);
        assert_eq!(ctx.top().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn extend_rejects_degree_one() {
        assert!(f2().extend(1).is_err());
    }

    #[test]
    fn extend_is_deterministic() {
        let a = f2().extend(3).unwrap().extend(2).unwrap();
        let b = f2().extend(3).unwrap().extend(2).unwrap();
        assert_eq!(a.levels(), b.levels());
        assert!(a.top().same_as(b.top()));
    }

    #[test]
    fn frobenius_in_f4() {
        let ctx = f2().extend(2).unwrap();
        let w = ctx.element(1, &[0, 1]).unwrap();
        assert_eq!(frobenius(&w, 1).coords(), vec![1, 1]);
        assert_eq!(frobenius(&w, 0), w);
        assert_eq!(frobenius(&frobenius(&w, -1), 1), w);
    }

    #[test]
    fn frobenius_fixes_everything_after_full_degree() {
        let ctx = FieldCtx::new(FqConfig::new(3, 1).unwrap()).extend(3).unwrap().extend(2).unwrap();
        let top = ctx.top().clone();
        for v in (0..top.size()).step_by(37) {
            assert_eq!(top.frobenius(v, top.degree() as i64), v);
            assert_eq!(top.pow(v, top.size()), v);
        }
    }

    #[test]
    fn slow_and_table_multiplication_agree() {
        let ctx = f2().extend(2).unwrap().extend(2).unwrap();
        let top = ctx.top();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(top.mul(a, b), top.mul_slow(a, b));
            }
        }
    }

    #[test]
    fn artin_schreier_q2_xi1() {
        let ctx = f2();
        let one = FFElement::one(ctx.top());
        assert!(solve_affine_frobenius(ctx.top(), 1, 1).is_none());
        let (ctx2, roots) = artin_schreier_residue(&ctx, &one).unwrap();
        assert_eq!(ctx2.top().degree(), 2);
        assert_eq!(roots.len(), 2);
        for z in &roots {
            assert_eq!(&z.pow(2) - z, one);
        }
        assert_eq!(roots[0].coords(), vec![0, 1]);
        assert_eq!(roots[1].coords(), vec![1, 1]);
    }

    #[test]
    fn artin_schreier_q2_xi0() {
        let ctx = f2();
        let (_, roots) = artin_schreier_residue(&ctx, &FFElement::zero(ctx.top())).unwrap();
        let vals: Vec<u64> = roots.iter().map(|r| r.value()).collect();
        assert_eq!(vals, vec![0, 1]);
    }

    #[test]
    fn artin_schreier_q3_xi1_needs_f27() {
        let ctx = FieldCtx::new(FqConfig::new(3, 1).unwrap());
        let one = FFElement::one(ctx.top());
        // nothing in F_3 works
        assert!((0..3).all(|z| (z * z * z + 3 - z) % 3 != 1));
        let (ctx2, roots) = artin_schreier_residue(&ctx, &one).unwrap();
        assert_eq!(ctx2.top().size(), 27);
        assert_eq!(roots.len(), 3);
        for z in &roots {
            assert_eq!(&z.pow(3) - z, one);
        }
    }

    #[test]
    fn artin_schreier_q4_roots_differ_by_fq() {
        let ctx = FieldCtx::new(FqConfig::new(2, 2).unwrap());
        let xi = ctx.element(1, &[1, 1]).unwrap();
        let (_, roots) = artin_schreier_residue(&ctx, &xi).unwrap();
        assert_eq!(roots.len(), 4);
        for z in &roots {
            assert_eq!(&z.pow(4) - z, xi);
            assert!((z - &roots[0]).value() < 4);
        }
    }

    #[test]
    fn lucas_matches_examples() {
        assert_eq!(lucas_binomial(5, 2, 2), 0);
        assert_eq!(lucas_binomial(3, 2, 2), 1);
        assert_eq!(lucas_binomial(7, 0, 3), 1);
        assert_eq!(lucas_binomial(2, 5, 3), 0);
    }
}

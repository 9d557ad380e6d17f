//! Dense univariate polynomials over one tower level (constant term first).
//! Only what the irreducibility test needs.

use crate::field::Level;

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mul(level: &Level, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = level.add(out[i + j], level.mul(x, y));
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a nonzero `m`.
fn rem(level: &Level, a: &[u64], m: &[u64]) -> Vec<u64> {
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = level.inv(m[dm]).expect("nonzero leading coefficient");
    let mut r = trim(a.to_vec());
    while r.len() > dm {
        let k = r.len() - 1;
        let c = level.mul(r[k], lead_inv);
        for j in 0..=dm {
            r[k - dm + j] = level.sub(r[k - dm + j], level.mul(c, m[j]));
        }
        r = trim(r);
    }
    r
}

fn gcd(level: &Level, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(level, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn powmod(level: &Level, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(level, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(level, &mul(level, &acc, &b), m);
        }
        b = rem(level, &mul(level, &b, &b), m);
        e >>= 1;
    }
    acc
}

/// Ben-Or test: a monic `f` of degree `m` is irreducible over `level` iff
/// `gcd(f, X^(Q^k) - X) = 1` for `1 <= k <= m/2`, `Q = |level|`.
pub(crate) fn is_irreducible(level: &Level, f: &[u64]) -> bool {
    let f = trim(f.to_vec());
    let m = f.len().saturating_sub(1);
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let q = level.size();
    let x = vec![0u64, 1];
    let mut g = x.clone();
    for _ in 0..m / 2 {
        g = powmod(level, &g, q, &f);
        let mut h = g.clone();
        h.resize(h.len().max(2), 0);
        h[1] = level.sub(h[1], 1);
        let d = gcd(level, &f, &trim(h));
        if d.len() > 1 {
            return false;
        }
    }
    true
}

//! Parsers for polynomials, Laurent polynomials in `x`, and ranges.

use std::collections::BTreeMap;

/// Packed `-c` in `F_q`, `q = p^upsilon`: digitwise negation in base `p`.
fn neg(c: u64, q: u64) -> u64 {
    let p = smallest_prime_factor(q);
    let (mut c, mut out, mut scale) = (c, 0, 1);
    while scale < q {
        out += ((p - c % p) % p) * scale;
        c /= p;
        scale *= p;
    }
    out
}

/// Packed `a + b` in `F_q`.
fn add(a: u64, b: u64, q: u64) -> u64 {
    let p = smallest_prime_factor(q);
    let (mut a, mut b, mut out, mut scale) = (a, b, 0, 1);
    while scale < q {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

fn smallest_prime_factor(q: u64) -> u64 {
    (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q)
}

/// Terms `exponent -> packed coefficient` of an expression such as
/// `"1 + x^3 - 2x^-2"`. Coefficients are packed `F_q` elements; for prime
/// `q` any integer is reduced modulo `q`.
pub fn laurent(text: &str, q: u64) -> Result<BTreeMap<i64, u64>, String> {
    let mut terms: BTreeMap<i64, u64> = BTreeMap::new();
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".into());
    }
    let prime = smallest_prime_factor(q) == q;
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let negative = rest.starts_with('-');
        if rest.starts_with('+') || negative {
            rest = &rest[1..];
        }
        let end = term_end(rest);
        let (term, tail) = rest.split_at(end);
        rest = tail;
        let (coeff, exp) = term_parts(term)?;
        let mut c = if prime {
            coeff % q
        } else if coeff < q {
            coeff
        } else {
            return Err(format!("coefficient {coeff} is not a packed element of F_{q}"));
        };
        if negative {
            c = neg(c, q);
        }
        let e = terms.entry(exp).or_insert(0);
        *e = add(*e, c, q);
    }
    terms.retain(|_, c| *c != 0);
    Ok(terms)
}

/// Length of the leading term; a sign right after `^` or `(` belongs to
/// the exponent.
fn term_end(s: &str) -> usize {
    let b = s.as_bytes();
    (1..b.len())
        .find(|&i| matches!(b[i], b'+' | b'-') && !matches!(b[i - 1], b'^' | b'('))
        .unwrap_or(b.len())
}

fn term_parts(term: &str) -> Result<(u64, i64), String> {
    let bad = || format!("cannot parse term {term:?}");
    match term.find('x') {
        None => Ok((term.parse().map_err(|_| bad())?, 0)),
        Some(i) => {
            let head = term[..i].trim_end_matches('*');
            let coeff = if head.is_empty() { 1 } else { head.parse().map_err(|_| bad())? };
            let tail = &term[i + 1..];
            let exp = if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^').ok_or_else(bad)?.trim_matches(['(', ')']).parse().map_err(|_| bad())?
            };
            Ok((coeff, exp))
        }
    }
}

/// Packed coefficients, constant term first. Accepts an expression in `x`
/// or a comma-separated coefficient list; a list entry is a packed value or
/// `F_p` coordinates joined by `:`, least significant first.
pub fn polynomial(text: &str, q: u64) -> Result<Vec<u64>, String> {
    if text.contains('x') {
        return expression(text, q);
    }
    let p = smallest_prime_factor(q);
    text.split(',')
        .map(|entry| {
            let mut value = 0;
            let mut scale = 1;
            for coord in entry.trim().split(':') {
                let c: u64 = coord.trim().parse().map_err(|_| format!("cannot parse coefficient {entry:?}"))?;
                if entry.contains(':') && c >= p {
                    return Err(format!("coordinate {c} is not in F_{p}"));
                }
                value += c * scale;
                scale *= p;
            }
            if value >= q {
                return Err(format!("coefficient {entry:?} is not in F_{q}"));
            }
            Ok(value)
        })
        .collect()
}

fn expression(text: &str, q: u64) -> Result<Vec<u64>, String> {
    let terms = laurent(text, q)?;
    if let Some((&e, _)) = terms.iter().next().filter(|(&e, _)| e < 0) {
        return Err(format!("negative exponent {e} in a polynomial"));
    }
    let deg = terms.keys().next_back().copied().unwrap_or(0) as usize;
    let mut out = vec![0; deg + 1];
    for (e, c) in terms {
        out[e as usize] = c;
    }
    Ok(out)
}

/// Inclusive range `"a..b"`.
pub fn range(text: &str) -> Result<(i64, i64), String> {
    let (a, b) = text.split_once("..").ok_or_else(|| format!("expected a..b, got {text:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let parse = |s: &str| s.trim().parse::<i64>().map_err(|e| format!("{s:?}: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

use std::sync::Arc;

use polyzeta_core::carlitz::eval_f;
use polyzeta_core::{lucas_binomial, FFElement, FieldCtx, FqConfig, Level, LocalSeries, PlaceCtx, Valuation};
use proptest::prelude::*;

fn tower(p: u64, upsilon: u32, extra: usize) -> FieldCtx {
    let ctx = FieldCtx::new(FqConfig::new(p, upsilon).unwrap());
    if extra > 1 {
        ctx.extend(extra).unwrap()
    } else {
        ctx
    }
}

fn configs() -> impl Strategy<Value = (u64, u32, usize)> {
    prop_oneof![Just((2, 1, 3)), Just((2, 2, 2)), Just((3, 1, 2)), Just((3, 2, 1)), Just((5, 1, 2))]
}

fn series(level: &Arc<Level>, start: i64, digits: &[u64], prec: i64) -> LocalSeries {
    let size = level.size();
    LocalSeries::from_digits(level, start, digits.iter().map(|d| d % size).collect(), prec)
}

proptest! {
    #[test]
    fn field_axioms(cfg in configs(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let ctx = tower(cfg.0, cfg.1, cfg.2);
        let top = ctx.top();
        let n = top.size();
        let (a, b, c) = (FFElement::new(top, a % n), FFElement::new(top, b % n), FFElement::new(top, c % n));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(a.pow(n), a.clone());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, FFElement::one(top));
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn lower_levels_embed_homomorphically(cfg in configs(), a in any::<u64>(), b in any::<u64>()) {
        let ctx = tower(cfg.0, cfg.1, cfg.2);
        let base = ctx.level(0);
        let n = base.size();
        let (a, b) = (FFElement::new(base, a % n), FFElement::new(base, b % n));
        let top = ctx.top();
        prop_assert_eq!((&a * &b).embed(top), &a.embed(top) * &b.embed(top));
        prop_assert_eq!((&a + &b).embed(top), &a.embed(top) + &b.embed(top));
    }

    #[test]
    fn ultrametric_and_multiplicative(
        cfg in configs(),
        va in -3i64..6, vb in -3i64..6,
        da in prop::collection::vec(any::<u64>(), 1..24),
        db in prop::collection::vec(any::<u64>(), 1..24),
    ) {
        let ctx = tower(cfg.0, cfg.1, cfg.2);
        let top = ctx.top();
        let mut da = da;
        let mut db = db;
        da[0] = 1 + da[0] % (top.size() - 1);
        db[0] = 1 + db[0] % (top.size() - 1);
        let a = series(top, va, &da, 30);
        let b = series(top, vb, &db, 30);
        let s = &a + &b;
        prop_assert!(s.val_lb() >= va.min(vb));
        if va != vb {
            prop_assert_eq!(s.valuation(), Valuation::Exact(va.min(vb)));
        }
        prop_assert_eq!((&a * &b).valuation(), Valuation::Exact(va + vb));
        let q = top.config().q() as i64;
        prop_assert_eq!(a.q_power_capped(1, 200).valuation(), Valuation::Exact(q * va));
    }

    /// Digits beyond the known precision never influence digits a result
    /// claims to know.
    #[test]
    fn precision_soundness(
        cfg in configs(),
        da in prop::collection::vec(any::<u64>(), 24),
        db in prop::collection::vec(any::<u64>(), 24),
        noise in prop::collection::vec(any::<u64>(), 8),
    ) {
        let ctx = tower(cfg.0, cfg.1, cfg.2);
        let top = ctx.top();
        let size = top.size();
        let mut da = da;
        da[0] = 1 + da[0] % (size - 1);
        let a = series(top, 0, &da, 24);
        let b = series(top, 1, &db, 25);
        let mut long = da.clone();
        long.extend(&noise);
        let a2 = series(top, 0, &long, 32);
        let pairs = [
            (&a * &b, &a2 * &b),
            (&a + &b, &a2 + &b),
            (a.inv().unwrap(), a2.inv().unwrap()),
            (a.q_power(1), a2.q_power(1)),
            ((&a * &a).div(&b.shift(-1)).unwrap(), (&a2 * &a2).div(&b.shift(-1)).unwrap()),
        ];
        for (known, perturbed) in pairs {
            prop_assert!(known.precision() <= perturbed.precision());
            prop_assert!(known.agrees_with(&perturbed));
        }
    }

    #[test]
    fn embedding_is_a_ring_map(
        f in prop::collection::vec(0u64..2, 1..9),
        g in prop::collection::vec(0u64..2, 1..9),
    ) {
        let place = PlaceCtx::new(FqConfig::new(2, 1).unwrap(), vec![1, 1, 0, 1], 40).unwrap();
        let mut fg = vec![0u64; f.len() + g.len() - 1];
        for (i, a) in f.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                fg[i + j] ^= a & b;
            }
        }
        let lhs = place.embed_poly(&fg);
        let rhs = &place.embed_poly(&f) * &place.embed_poly(&g);
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn carlitz_basis_is_fq_linear(
        i in 0usize..6,
        alpha in 0u64..3,
        s in prop::collection::vec(0u64..9, 20),
        t in prop::collection::vec(0u64..9, 20),
    ) {
        let place = PlaceCtx::new(FqConfig::new(3, 1).unwrap(), vec![2, 1, 1], 40).unwrap();
        let level = place.residue();
        let s = series(level, 0, &s, 40);
        let t = series(level, 0, &t, 40);
        let a = FFElement::new(place.fq_level(), alpha);
        let lhs = eval_f(&place, i, &(&s.scale(&a) + &t)).unwrap();
        let rhs = &eval_f(&place, i, &s).unwrap().scale(&a) + &eval_f(&place, i, &t).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }
}

fn exact_binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, j| acc * u128::from(n - j) / u128::from(j + 1))
}

#[test]
fn lucas_matches_exact_binomials() {
    for p in [2u64, 3, 5, 7] {
        for n in 0..=64u64 {
            for k in 0..=n {
                assert_eq!(u128::from(lucas_binomial(n, k, p)), exact_binomial(n, k) % u128::from(p), "C({n},{k}) mod {p}");
            }
        }
    }
}

#[test]
fn frobenius_order_is_absolute_degree() {
    let ctx = tower(3, 2, 2);
    let top = ctx.top();
    for v in 0..top.size() {
        let a = FFElement::new(top, v);
        assert_eq!(a.pow(3u64.pow(top.degree() as u32)), a);
    }
}

#[test]
fn extensions_are_deterministic() {
    let a = tower(2, 2, 3).levels();
    let b = tower(2, 2, 3).levels();
    assert_eq!(a, b);
}

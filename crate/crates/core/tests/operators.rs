use std::sync::Arc;

use polyzeta_core::carlitz::{a_row, delta_n_point, delta_pow_point, eval_f_upto, Memoized};
use polyzeta_core::hyperdiff::{frac_delta, hyperdiff, BaseDigitSeries};
use polyzeta_core::polylog::PolylogSet;
use polyzeta_core::{FqConfig, LocalSeries, PlaceCtx};

fn set(p: u64, pi: Vec<u64>, prec: i64, i_max: usize) -> PolylogSet {
    let place = Arc::new(PlaceCtx::new(FqConfig::new(p, 1).unwrap(), pi, prec).unwrap());
    PolylogSet::build(place, &[], i_max, 2).unwrap()
}

fn digits(place: &PlaceCtx, d: &[u64]) -> BaseDigitSeries {
    BaseDigitSeries::from_coeffs(place, d, place.precision()).unwrap()
}

#[test]
fn delta_n_expands_in_powers_of_delta() {
    for (p, pi) in [(2, vec![0, 1]), (3, vec![0, 1]), (2, vec![1, 1, 1])] {
        let set = set(p, pi, 80, 12);
        let place = set.place().clone();
        let u = Memoized::new(set.handle(1).unwrap());
        let t = &place.embed_poly(&[1, 0, 1, 1]) + &place.x_pow(5);
        for n in 1..=5 {
            let lhs = delta_n_point(&place, &u, n, &t).unwrap();
            let row = a_row(&place, n);
            let mut rhs = LocalSeries::zero(place.residue(), place.precision());
            for (r, a) in row.iter().enumerate().skip(1) {
                rhs = &rhs + &(a * &delta_pow_point(&place, &u, r, &t).unwrap());
            }
            let d = (&lhs - &rhs).valuation();
            assert!(d.lower_bound() >= 70, "p={p} n={n}: defect {d}");
        }
    }
}

#[test]
fn hyperdifferentiation_expands_in_the_carlitz_basis() {
    let i_max = 24;
    for p in [2u64, 3] {
        let place = PlaceCtx::new(FqConfig::new(p, 1).unwrap(), vec![0, 1], 96).unwrap();
        // a dense argument, so that no f_n(t) vanishes identically
        let d: Vec<u64> = (0..96u64).map(|k| (k * k + 3 * k + 1) % p).collect();
        let t = digits(&place, &d);
        let f = eval_f_upto(&place, i_max, t.series()).unwrap();
        let rows: Vec<_> = (0..=i_max).map(|n| if n == 0 { Vec::new() } else { a_row(&place, n) }).collect();
        for r in 1..=4 {
            let mut partial = LocalSeries::zero(place.residue(), place.precision());
            for n in r..=i_max {
                partial = &partial + &(&rows[n][r] * &f[n]);
            }
            // v(A_{n,r}) >= n - r, so the omitted terms start at i_max + 1 - r
            let bound = (i_max + 1 - r) as i64;
            let d = (&hyperdiff(r as u64, &t).unwrap() - &partial).valuation();
            assert!(d.lower_bound() >= bound, "p={p} r={r}: defect {d}, bound {bound}");
        }
    }
}

#[test]
fn fractional_delta_is_additive_in_the_exponent() {
    let set = set(3, vec![0, 1], 80, 12);
    let place = set.place().clone();
    let u = Memoized::new(set.handle(1).unwrap());
    let t = place.embed_poly(&[2, 1, 0, 1]);
    let alphas = [digits(&place, &[1, 2, 0, 1]), digits(&place, &[0, 0, 2, 2, 1]), digits(&place, &[2])];
    for a in &alphas {
        for b in &alphas {
            let sum = BaseDigitSeries::new(a.series() + b.series()).unwrap();
            let lhs = frac_delta(&place, &sum, &u, &t).unwrap();
            let rhs = &frac_delta(&place, a, &u, &t).unwrap() + &frac_delta(&place, b, &u, &t).unwrap();
            assert!((&lhs - &rhs).val_lb() >= 76);
        }
    }
    for n in 0..=3usize {
        let mut c = vec![0; n + 1];
        c[n] = 1;
        let lhs = frac_delta(&place, &digits(&place, &c), &u, &t).unwrap();
        assert!((&lhs - &delta_pow_point(&place, &u, n, &t).unwrap()).val_lb() >= 76);
    }
}

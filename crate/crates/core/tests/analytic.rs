use std::sync::Arc;

use polyzeta_core::carlitz::{delta_point, FunctionHandle, Memoized};
use polyzeta_core::polylog::{build_alternative_branch, PolylogSet};
use polyzeta_core::zeta::ZetaEvaluator;
use polyzeta_core::{FqConfig, LocalSeries, PlaceCtx};

fn place(p: u64, pi: Vec<u64>, prec: i64) -> Arc<PlaceCtx> {
    Arc::new(PlaceCtx::new(FqConfig::new(p, 1).unwrap(), pi, prec).unwrap())
}

fn root_free_defect(place: &PlaceCtx, u: &dyn FunctionHandle, t: &LocalSeries) -> i64 {
    let d = delta_point(place, u, t).unwrap();
    let lhs = &d - &d.q_power_capped(1, d.precision());
    (&lhs - &t.q_power_capped(1, place.precision())).val_lb()
}

#[test]
fn l1_is_little_o_of_t_at_zero() {
    for (p, pi) in [(2, vec![0, 1]), (3, vec![0, 1]), (2, vec![1, 1, 1])] {
        let pl = place(p, pi, 200);
        let set = PolylogSet::build(pl.clone(), &[], 14, 1).unwrap();
        let l1 = set.carlitz(1).unwrap();
        let mut prev = i64::MIN;
        for k in 1..=12 {
            let t = pl.uniformizer().pow(k as u64);
            let gap = l1.eval_cf(&t).unwrap().val_lb() - k;
            assert!(gap > prev, "p={p} k={k}: v(l_1(pi^k)) - k = {gap} after {prev}");
            prev = gap;
        }
    }
}

#[test]
fn zeta_of_high_powers_is_small() {
    let pl = place(2, vec![0, 1], 100);
    let set = Arc::new(PolylogSet::build(pl.clone(), &[], 14, 2).unwrap());
    let ev = ZetaEvaluator::new(set).unwrap();
    for m in 0..=12i64 {
        let v = ev.zeta_x_pow(m).unwrap().val_lb();
        assert!(v >= m, "v(zeta(x^{m})) = {v}");
    }
}

#[test]
fn alternative_branch_is_a_different_solution() {
    for (p, pi) in [(2, vec![0, 1]), (3, vec![0, 1]), (2, vec![1, 1, 1])] {
        let pl = place(p, pi, 96);
        let set = PolylogSet::build(pl.clone(), &[], 14, 1).unwrap();
        let principal = Memoized::new(set.carlitz(1).unwrap().clone());
        let (_, alt) = build_alternative_branch(&pl, 2, 14).unwrap();
        let alt = Memoized::new(alt.function);
        let samples = [pl.one(), pl.embed_poly(&[1, 1, 0, 1]), pl.uniformizer()];
        let mut differ = false;
        for t in &samples {
            assert!(root_free_defect(&pl, &alt, t) >= 90, "p={p}");
            assert!(root_free_defect(&pl, &principal, t) >= 90, "p={p}");
            let a = principal.eval(t).unwrap();
            let b = alt.eval(t).unwrap();
            differ |= !a.agrees_with(&b);
        }
        assert!(differ, "p={p}: branches coincide on every sample");
    }
}

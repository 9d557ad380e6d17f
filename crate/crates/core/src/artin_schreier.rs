//! All `q` roots of `z^q - z = xi` over the unramified local field, for
//! `v(xi) >= 0`.
//!
//! For `v(xi) > 0` the principal root is `-sum_j xi^(q^j)`; it is the only
//! root with `v(z) = v(xi)` and the others are units. For `v(xi) = 0` every
//! root is a unit: a residue root `z_0` is found first (possibly extending
//! the residue field) and the residual `xi - (z_0^q - z_0)` is absorbed by
//! the principal series.

use crate::error::{Error, Result};
use crate::field::{artin_schreier_residue, FFElement, FieldCtx};
use crate::series::LocalSeries;

#[derive(Debug, Clone)]
pub struct AsRoots {
    /// The tower the roots live in; deeper than the input when the residue
    /// equation needed an extension.
    pub fields: FieldCtx,
    /// Principal root first when it exists, then by the `F_q` offset in
    /// packed order.
    pub roots: Vec<LocalSeries>,
    pub principal: Option<usize>,
}

/// `-sum_j xi^(q^j)`, for `v(xi) > 0`, known to the precision of `xi`.
pub fn principal_root(xi: &LocalSeries) -> LocalSeries {
    let prec = xi.precision();
    let mut acc = LocalSeries::zero(xi.level(), prec);
    if xi.is_zero() {
        return acc;
    }
    debug_assert!(xi.val_lb() > 0);
    let mut term = xi.clone();
    while !term.is_zero() {
        acc = &acc - &term;
        term = term.q_power_capped(1, prec);
    }
    acc
}

/// Roots of `z^q - z = xi`.
pub fn solve(ctx: &FieldCtx, xi: &LocalSeries) -> Result<AsRoots> {
    let q = ctx.config().q();
    let fq = ctx.fq_level().clone();
    let offsets = |base: &LocalSeries| -> Vec<LocalSeries> {
        (0..q)
            .map(|c| base + &LocalSeries::constant(&FFElement::new(&fq, c), base.precision()))
            .collect()
    };

    if xi.is_zero() || xi.val_lb() > 0 {
        let z = principal_root(xi);
        return Ok(AsRoots { fields: ctx.clone(), roots: offsets(&z), principal: Some(0) });
    }
    if xi.val_lb() < 0 {
        return Err(Error::NoUnramifiedSolution(xi.val_lb()));
    }

    let head = xi.digit(0).expect("unit has a constant digit");
    let (fields, residue_roots) = artin_schreier_residue(ctx, &head)?;
    let prec = xi.precision();
    let z0 = LocalSeries::constant(&residue_roots[0], prec);
    let residual = xi - &(&z0.q_power_capped(1, prec) - &z0);
    debug_assert!(residual.is_zero() || residual.val_lb() > 0);
    let z = &z0 + &principal_root(&residual);
    Ok(AsRoots { fields, roots: offsets(&z), principal: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FqConfig;
    use crate::series::Valuation;

    fn check(roots: &AsRoots, xi: &LocalSeries) {
        for z in &roots.roots {
            let lhs = &z.q_power_capped(1, xi.precision()) - z;
            assert!(lhs.agrees_with(xi), "{z} fails");
        }
    }

    #[test]
    fn principal_root_q2() {
        let ctx = FieldCtx::new(FqConfig::new(2, 1).unwrap());
        let xi = LocalSeries::monomial(ctx.top(), 1, 1, 16);
        let r = solve(&ctx, &xi).unwrap();
        let expect = LocalSeries::from_digits(ctx.top(), 1, vec![1, 1, 0, 1, 0, 0, 0, 1], 16);
        assert_eq!(r.roots[0], expect);
        assert_eq!(r.principal, Some(0));
        assert_eq!(r.roots[1].valuation(), Valuation::Exact(0));
        check(&r, &xi);
    }

    #[test]
    fn unit_branch_q2_xi_one() {
        let ctx = FieldCtx::new(FqConfig::new(2, 1).unwrap());
        let xi = LocalSeries::one(ctx.top(), 16);
        let r = solve(&ctx, &xi).unwrap();
        assert_eq!(r.principal, None);
        assert_eq!(r.fields.top().size(), 4);
        let heads: Vec<u64> = r.roots.iter().map(|z| z.digit_value(0)).collect();
        assert_eq!(heads, vec![2, 3]);
        assert!(r.roots.iter().all(|z| z.raw_digits()[1..].iter().all(|&d| d == 0)));
        check(&r, &xi);
    }

    #[test]
    fn zero_gives_fq() {
        let ctx = FieldCtx::new(FqConfig::new(3, 1).unwrap());
        let r = solve(&ctx, &LocalSeries::zero(ctx.top(), 10)).unwrap();
        assert_eq!(r.principal, Some(0));
        for (c, z) in r.roots.iter().enumerate() {
            assert_eq!(z, &LocalSeries::monomial(ctx.top(), c as u64, 0, 10));
        }
    }

    #[test]
    fn mixed_unit_q3() {
        let ctx = FieldCtx::new(FqConfig::new(3, 1).unwrap());
        let xi = LocalSeries::from_digits(ctx.top(), 0, vec![1, 2, 0, 1, 1], 20);
        let r = solve(&ctx, &xi).unwrap();
        assert_eq!(r.roots.len(), 3);
        check(&r, &xi);
        for z in &r.roots {
            assert_eq!(z.valuation(), Valuation::Exact(0));
        }
    }

    #[test]
    fn negative_valuation_rejected() {
        let ctx = FieldCtx::new(FqConfig::new(2, 1).unwrap());
        let xi = LocalSeries::monomial(ctx.top(), 1, -1, 8);
        assert_eq!(solve(&ctx, &xi).unwrap_err(), Error::NoUnramifiedSolution(-1));
    }
}

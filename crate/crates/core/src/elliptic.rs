//! Weierstrass cubics over K: the b/c/discriminant formulas, the u^12
//! transformation law, discriminant classes mod twelfth powers of units,
//! and realization of every unit class by a good-reduction cubic.

use crate::error::{Error, Result};
use crate::local::{LFElement, LocalFieldDesc};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeierstrassCubic {
    pub a1: LFElement,
    pub a2: LFElement,
    pub a3: LFElement,
    pub a4: LFElement,
    pub a6: LFElement,
    pub b2: LFElement,
    pub b4: LFElement,
    pub b6: LFElement,
    pub b8: LFElement,
    pub c4: LFElement,
    pub c6: LFElement,
    pub d: LFElement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscClass12 {
    pub representative: LFElement,
    pub valuation: u32,
}

pub fn weierstrass_invariants(
    kf: &LocalFieldDesc,
    a1: &LFElement,
    a2: &LFElement,
    a3: &LFElement,
    a4: &LFElement,
    a6: &LFElement,
) -> Result<WeierstrassCubic> {
    let int = |x: i128| kf.from_int(x);
    let b2 = kf.add(&kf.mul(a1, a1), &kf.mul(&int(4), a2));
    let b4 = kf.add(&kf.mul(&int(2), a4), &kf.mul(a1, a3));
    let b6 = kf.add(&kf.mul(a3, a3), &kf.mul(&int(4), a6));
    let b8 = {
        let t1 = kf.mul(&kf.mul(a1, a1), a6);
        let t2 = kf.mul(&int(4), &kf.mul(a2, a6));
        let t3 = kf.mul(&kf.mul(a1, a3), a4);
        let t4 = kf.mul(a2, &kf.mul(a3, a3));
        let t5 = kf.mul(a4, a4);
        kf.sub(&kf.add(&kf.add(&t1, &t2), &t4), &kf.add(&t3, &t5))
    };
    let c4 = kf.sub(&kf.mul(&b2, &b2), &kf.mul(&int(24), &b4));
    let c6 = {
        let t1 = kf.mul(&b2, &kf.mul(&b2, &b2));
        let t2 = kf.mul(&int(36), &kf.mul(&b2, &b4));
        let t3 = kf.mul(&int(216), &b6);
        kf.sub(&t2, &kf.add(&t1, &t3))
    };
    let d = {
        let t1 = kf.mul(&kf.mul(&b2, &b2), &b8);
        let t2 = kf.mul(&int(8), &kf.mul(&b4, &kf.mul(&b4, &b4)));
        let t3 = kf.mul(&int(27), &kf.mul(&b6, &b6));
        let t4 = kf.mul(&int(9), &kf.mul(&b2, &kf.mul(&b4, &b6)));
        kf.sub(&t4, &kf.add(&kf.add(&t1, &t2), &t3))
    };
    // 4 b8 = b2 b6 - b4^2 and c6^2 = c4^3 - 1728 d
    assert!(kf.eq_at(
        &kf.mul(&int(4), &b8),
        &kf.sub(&kf.mul(&b2, &b6), &kf.mul(&b4, &b4)),
        d.prec,
    ));
    assert!(kf.eq_at(
        &kf.mul(&c6, &c6),
        &kf.sub(&kf.mul(&c4, &kf.mul(&c4, &c4)), &kf.mul(&int(1728), &d)),
        d.prec,
    ));
    if kf.valuation(&d).exact().is_none() {
        return Err(Error::SingularCubic);
    }
    Ok(WeierstrassCubic {
        a1: a1.clone(),
        a2: a2.clone(),
        a3: a3.clone(),
        a4: a4.clone(),
        a6: a6.clone(),
        b2,
        b4,
        b6,
        b8,
        c4,
        c6,
        d,
    })
}

/// Change of variables x = u^2 x' + r, y = u^3 y' + u^2 s x' + t; the new
/// cubic g satisfies d_f = u^12 d_g.
pub fn transform_cubic(
    kf: &LocalFieldDesc,
    c: &WeierstrassCubic,
    u: &LFElement,
    r: &LFElement,
    s: &LFElement,
    t: &LFElement,
) -> Result<WeierstrassCubic> {
    if !kf.is_unit(u) {
        return Err(Error::NonUnitScale);
    }
    let int = |x: i128| kf.from_int(x);
    let ui = kf.inv_unit(u)?;
    let ui2 = kf.mul(&ui, &ui);
    let ui3 = kf.mul(&ui2, &ui);
    let ui4 = kf.mul(&ui2, &ui2);
    let ui6 = kf.mul(&ui3, &ui3);
    let a1 = kf.mul(&ui, &kf.add(&c.a1, &kf.mul(&int(2), s)));
    let a2 = {
        let x = kf.add(
            &kf.sub(&c.a2, &kf.mul(s, &c.a1)),
            &kf.sub(&kf.mul(&int(3), r), &kf.mul(s, s)),
        );
        kf.mul(&ui2, &x)
    };
    let a3 = {
        let x = kf.add(&kf.add(&c.a3, &kf.mul(r, &c.a1)), &kf.mul(&int(2), t));
        kf.mul(&ui3, &x)
    };
    let a4 = {
        let x1 = kf.sub(&c.a4, &kf.mul(s, &c.a3));
        let x2 = kf.mul(&int(2), &kf.mul(r, &c.a2));
        let x3 = kf.mul(&kf.add(t, &kf.mul(r, s)), &c.a1);
        let x4 = kf.mul(&int(3), &kf.mul(r, r));
        let x5 = kf.mul(&int(2), &kf.mul(s, t));
        kf.sub(&kf.add(&kf.add(&x1, &x2), &x4), &kf.add(&x3, &x5))
    };
    let a6 = {
        let x1 = kf.add(&c.a6, &kf.mul(r, &c.a4));
        let x2 = kf.add(
            &kf.mul(&kf.mul(r, r), &c.a2),
            &kf.mul(r, &kf.mul(r, r)),
        );
        let x3 = kf.add(&kf.mul(t, &c.a3), &kf.mul(t, t));
        let x4 = kf.mul(r, &kf.mul(t, &c.a1));
        kf.sub(&kf.add(&x1, &x2), &kf.add(&x3, &x4))
    };
    let a4 = kf.mul(&ui4, &a4);
    let a6 = kf.mul(&ui6, &a6);
    weierstrass_invariants(kf, &a1, &a2, &a3, &a4, &a6)
}

/// Discriminant class in K^x / (unit twelfth powers) of an integral cubic
/// with v(d) < 12 (the minimality certificate this suite supports).
pub fn disc_class(kf: &LocalFieldDesc, c: &WeierstrassCubic) -> Result<DiscClass12> {
    let v = kf.valuation(&c.d).exact().ok_or(Error::SingularCubic)?;
    if v >= 12 {
        return Err(Error::MinimalityNotCertified);
    }
    Ok(DiscClass12 { representative: c.d.clone(), valuation: v })
}

/// A good-reduction cubic whose discriminant is exactly delta.
pub fn realize_disc(kf: &LocalFieldDesc, delta: &LFElement) -> Result<WeierstrassCubic> {
    if kf.valuation(delta).exact() != Some(0) {
        return Err(Error::NotAUnit);
    }
    let int = |x: i128| kf.from_int(x);
    if kf.p == 2 || kf.p == 3 {
        // y^2 + xy = x^3 + a6 has d = -a6 - 432 a6^2; solve for a6 by
        // Newton from a6 = -delta (432 is topologically nilpotent here)
        let poly = vec![delta.clone(), kf.one(), int(432)];
        let a6 = kf.newton_root(&poly, &kf.neg(delta))?;
        return weierstrass_invariants(kf, &kf.one(), &kf.zero(), &kf.zero(), &kf.zero(), &a6);
    }
    // p >= 5: find (xi, eta) with eta^2 = xi^3 - 1728 delta and eta a unit,
    // then y^2 = x^3 + a4 x + a6 with c4 = xi, c6 = eta has d = delta
    let k = &kf.residue_field;
    let rhs_shift = kf.mul(&int(1728), delta);
    let mut found = None;
    for xbar in k.elements() {
        let xi = kf.lift_residue(&xbar);
        let rhs = kf.sub(&kf.mul(&xi, &kf.mul(&xi, &xi)), &rhs_shift);
        let Ok(r) = kf.residue(&rhs) else { continue };
        if k.is_zero(&r) {
            continue;
        }
        if k.pow(&r, (k.q() - 1) / 2) != k.one() {
            continue;
        }
        // Hensel square root: x^2 - rhs from the residue square root
        let r0 = k
            .elements()
            .into_iter()
            .find(|s| k.mul(s, s) == r)
            .expect("Euler criterion certified a square");
        let eta = kf.newton_root(&vec![kf.neg(&rhs), kf.zero(), kf.one()], &kf.lift_residue(&r0))?;
        found = Some((xi, eta));
        break;
    }
    if found.is_none() {
        // every residue point has eta = 0 (possible for small q, e.g.
        // q = 7, 1728*delta = cube): take the exact cube root xi_c and
        // perturb xi = xi_c + pi^2 s with s = 3 xi_c^2, so that
        // rhs = pi^2 (3 xi_c^2)^2 (1 + O(pi)) is a square of valuation 2
        if let Some(xbar) = k
            .elements()
            .into_iter()
            .find(|x| k.pow(x, 3) == kf.residue(&rhs_shift).expect("unit"))
        {
            let cube = vec![kf.neg(&rhs_shift), kf.zero(), kf.zero(), kf.one()];
            let xi_c = kf.newton_root(&cube, &kf.lift_residue(&xbar))?;
            let s = kf.mul(&int(3), &kf.mul(&xi_c, &xi_c));
            let xi = kf.add(&xi_c, &kf.mul(&kf.mul(&kf.pi(), &kf.pi()), &s));
            let rhs = kf.sub(&kf.mul(&xi, &kf.mul(&xi, &xi)), &rhs_shift);
            let unit_part = kf.div_pi_pow(&rhs, 2)?;
            let r0 = {
                let r = kf.residue(&unit_part)?;
                k.elements()
                    .into_iter()
                    .find(|c| k.mul(c, c) == r)
                    .ok_or(Error::PointSearchFailed)?
            };
            let sqrt = kf.newton_root(
                &vec![kf.neg(&unit_part), kf.zero(), kf.one()],
                &kf.lift_residue(&r0),
            )?;
            let eta = kf.mul(&kf.pi(), &sqrt);
            found = Some((xi, eta));
        }
    }
    let (xi, eta) = found.ok_or(Error::PointSearchFailed)?;
    let a4 = kf.neg(&kf.div(&xi, &int(48))?);
    let a6 = kf.neg(&kf.div(&eta, &int(864))?);
    weierstrass_invariants(kf, &kf.zero(), &kf.zero(), &kf.zero(), &a4, &a6)
}

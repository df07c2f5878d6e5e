//! Discriminant classes mod unit squares: unramified extensions, the
//! characteristic-2 discriminant recovered by lifting, splitting types of
//! quadratic-style lines, the relative-discriminant pipeline over a tower,
//! and the archimedean sign rule.

use crate::error::{Error, Result};
use crate::filtration::{solve_lth_power, trivial_threshold, unit_level, Level};
use crate::finite::{abs_trace, ff_factor, ff_poly_disc, FqDesc, FqPoly};
use crate::kummer::{classify_line, LineReport};
use crate::local::{ext_norm, lf_make_with_modulus, LFElement, LocalFieldDesc};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

/// A class in K^x / (unit squares), carried by a unit representative with
/// its level certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscClass {
    pub representative: LFElement,
    pub trivial: bool,
    pub level_certificate: Level,
}

/// Discriminant class of the degree-r unramified extension of K: trivial
/// for odd r; for even r the one nontrivial unramified-line class
/// (1 + 4*omega with omega of nonzero absolute trace when p = 2, a
/// Teichmueller non-square otherwise).
pub fn unramified_disc(kf: &LocalFieldDesc, r: u32) -> Result<DiscClass> {
    if r == 0 {
        return Err(Error::ZeroInput);
    }
    if r % 2 == 1 {
        return Ok(DiscClass {
            representative: kf.one(),
            trivial: true,
            level_certificate: Level::Trivial,
        });
    }
    let k = &kf.residue_field;
    let rep = if kf.p == 2 {
        let omega = k
            .elements()
            .into_iter()
            .find(|c| abs_trace(k, c) != 0)
            .expect("char 2 residue field has an element of nonzero trace");
        kf.add(
            &kf.one(),
            &kf.mul(&kf.from_int(4), &kf.lift_residue(&omega)),
        )
    } else {
        let non = k
            .elements()
            .into_iter()
            .filter(|s| !k.is_zero(s))
            .find(|s| k.pow(s, (k.q() - 1) / 2) != k.one())
            .expect("odd residue field has a non-square");
        kf.teichmuller(&non)?
    };
    let level_certificate = unit_level(kf, 2, &rep)?;
    Ok(DiscClass { representative: rep, trivial: false, level_certificate })
}

fn lf_poly_derivative(kf: &LocalFieldDesc, a: &[LFElement]) -> Vec<LFElement> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| kf.mul(&kf.from_int(i as i128), c))
        .collect()
}

/// Discriminant of a monic polynomial over K: (-1)^(n(n-1)/2) Res(g, g'),
/// the resultant taken as the norm of g' in K[x]/(g).
fn lf_poly_disc(kf: &LocalFieldDesc, g: &[LFElement]) -> Result<LFElement> {
    let n = g.len() - 1;
    let dg = lf_poly_derivative(kf, g);
    let r = ext_norm(kf, g, &dg)?;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { kf.neg(&r) } else { r })
}

/// Discriminant class of a separable monic polynomial over a finite field k
/// of characteristic 2, as an element of k / (x^2 - x)(k) identified with
/// F_2 by the absolute trace: lift each irreducible factor to the
/// unramified 2-adic field with residue field k, multiply the factor
/// discriminants (cross-resultants are squares and drop out), and read the
/// deep-unit class through eta -> (eta - 1)/4.
pub fn disc_class_via_lift(k: &FqDesc, g: &FqPoly) -> Result<u64> {
    if k.p != 2 {
        return Err(Error::ConditionFailed);
    }
    let disc = ff_poly_disc(k, g)?;
    if k.is_zero(&disc) {
        return Err(Error::InseparablePolynomial);
    }
    let kf = lf_make_with_modulus(2, k.f, Some(k.modulus.clone()), &[vec![-2], vec![1]], None)?;
    let mut eta = kf.one();
    for (irr, mult) in ff_factor(k, g)? {
        debug_assert_eq!(mult, 1);
        if irr.degree() == Some(1) {
            continue;
        }
        let lift: Vec<LFElement> = irr.c.iter().map(|c| kf.lift_residue(c)).collect();
        eta = kf.mul(&eta, &lf_poly_disc(&kf, &lift)?);
    }
    let cap = trivial_threshold(&kf);
    let solve = solve_lth_power(&kf, 2, &eta, cap)?;
    match solve.level {
        Level::Trivial => Ok(0),
        Level::Finite(m) if m == cap - 1 => {
            // eta / xi^2 lies in U_{2e}; its class is ((eta/xi^2) - 1)/4
            let deep = kf.div(&eta, &kf.mul(&solve.witness, &solve.witness))?;
            let c = kf.div(&kf.sub(&deep, &kf.one()), &kf.from_int(4))?;
            Ok(abs_trace(k, &kf.residue(&c)?) % 2)
        }
        Level::Finite(m) => Err(Error::OracleMismatch(format!(
            "etale discriminant at unit level {m}, outside the unramified line"
        ))),
    }
}

/// Split / inert / ramified behaviour of the degree-l Kummer datum mu.
pub fn splitting_type(kf: &LocalFieldDesc, l: u64, mu: &LFElement) -> Result<SplittingType> {
    match classify_line(kf, l, mu) {
        Err(Error::NotALine) => Ok(SplittingType::Split),
        Ok(rep) if rep.is_unramified => Ok(SplittingType::Inert),
        Ok(_) => Ok(SplittingType::Ramified),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    /// v over the bottom field of the discriminant of the top of the tower
    pub total_v_base: u64,
    pub links: Vec<LineReport>,
}

/// Valuation over the bottom field of d_{M|K} for a flattened tower given
/// as links (K_i, l_i, mu_i), composing per-link discriminants through
/// d_{L|K} = d_{M|K}^{[L:M]} * N_{M|K}(d_{L|M}): with T_i = v_{K_i}(d_{M|K_i}),
/// T_i = [M : K_{i+1}] * v_disc_i + f_i * T_{i+1}.
pub fn relative_disc_pipeline(
    chain: &[(&LocalFieldDesc, u64, LFElement)],
) -> Result<PipelineResult> {
    if chain.is_empty() {
        return Err(Error::ZeroInput);
    }
    let mut links = Vec::with_capacity(chain.len());
    for (i, (kf, l, mu)) in chain.iter().enumerate() {
        if mu.field_id != kf.id {
            return Err(Error::ChainMismatch {
                link: i,
                detail: "generator does not belong to the link's field".into(),
            });
        }
        let rep = classify_line(kf, *l, mu)?;
        if let Some((next, _, _)) = chain.get(i + 1) {
            let (we, wf) = if rep.is_unramified {
                (kf.e, kf.f * *l as usize)
            } else {
                (kf.e * *l as usize, kf.f)
            };
            if next.p != kf.p || next.e != we || next.f != wf {
                return Err(Error::ChainMismatch {
                    link: i + 1,
                    detail: format!(
                        "expected (e, f) = ({we}, {wf}) over p = {}, got ({}, {})",
                        kf.p, next.e, next.f
                    ),
                });
            }
        }
        links.push(rep);
    }
    let mut total = 0u64;
    // T accumulates from the top of the tower down
    for (i, rep) in links.iter().enumerate().rev() {
        let above: u64 = links[i + 1..].iter().map(|r| r.l).product();
        let f_rel = if rep.is_unramified { rep.l } else { 1 };
        total = above * rep.v_disc + f_rel * total;
    }
    Ok(PipelineResult { total_v_base: total, links })
}

/// Sign of the discriminant of a degree-n real algebra with h irreducible
/// real factors: (-1)^(n-h).
pub fn arch_disc_sign(n: u32, h: u32) -> Result<i32> {
    if n == 0 || h == 0 || h > n {
        return Err(Error::ConditionFailed);
    }
    Ok(if (n - h) % 2 == 1 { -1 } else { 1 })
}

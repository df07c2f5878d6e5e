//! Degree-l Kummer lines over K: classification (unramified detection,
//! ramification break, discriminant valuation, uniformiser recipe), the
//! explicit pairing with its Galois oracle, break censuses, mass-formula
//! contributions, and the ramification filtration of the maximal elementary
//! abelian extension.

use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::filtration::{
    enumerate_units, filtration_dims, solve_lth_power, trivial_threshold, unit_level, Level,
};
use crate::finite::abs_trace;
use crate::local::{ext_norm, unramified_extension, LFElement, LocalFieldDesc};
use num_bigint::BigInt;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct KummerLine {
    pub l: u64,
    pub generator: LFElement,
}

/// Which quotient the level m was computed in (the unit group alone, or all
/// of K^x including valuations).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MConvention {
    UnitGroup,
    FullGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum UniformiserRecipe {
    /// L = K(l-th root of the normalized generator), Eisenstein of degree l
    RootOfGenerator { generator: LFElement },
    /// Lambda = (xi - root)^x * pi^y with m*x + l*y = 1
    XiMinusRoot { x: u64, y: i64, xi: LFElement },
    /// L|K unramified: pi stays a uniformiser
    BaseUniformiser,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineReport {
    pub l: u64,
    pub m: u32,
    pub m_convention: MConvention,
    pub is_unramified: bool,
    /// ramification break, or -1 for unramified
    pub t: i64,
    pub v_disc: u64,
    pub uniformiser_recipe: UniformiserRecipe,
    pub precision_used: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakCensus {
    pub l: u64,
    pub rows: Vec<(u32, u64)>,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingResult {
    pub exponent: u64,
    pub value: LFElement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaloisFiltration {
    pub upper_breaks: Vec<(u32, u32)>,
    pub v_disc_m: u64,
}

fn require_hypothesis(kf: &LocalFieldDesc, l: u64) -> Result<()> {
    if kf.has_mu_l(l) {
        Ok(())
    } else {
        Err(Error::KummerHypothesisFails)
    }
}

/// p*e1 as an integer; callers must have checked the Kummer hypothesis for
/// l = p, which forces (p-1) | e.
fn le1(kf: &LocalFieldDesc) -> u32 {
    trivial_threshold(kf) - 1
}

fn inv_mod(a: u64, l: u64) -> u64 {
    (1..l).find(|&x| a * x % l == 1).expect("unit mod prime")
}

/// Strip l-th powers of pi and normalize a generator with l | v to its unit
/// part, or a generator with l not dividing v to valuation exactly 1.
fn normalize(kf: &LocalFieldDesc, l: u64, mu: &LFElement) -> Result<(LFElement, u64)> {
    let v = kf
        .valuation(mu)
        .exact()
        .ok_or(Error::ZeroInput)? as u64;
    let vr = v % l;
    if vr == 0 {
        Ok((kf.div_pi_pow(mu, v as u32)?, 0))
    } else {
        // mu^k has valuation = 1 mod l; divide down to exactly 1
        let k = inv_mod(vr, l);
        let nu = kf.pow(mu, k);
        let vn = k * v;
        let down = (vn - 1) as u32;
        Ok((kf.div_pi_pow(&nu, down)?, 1))
    }
}

pub fn classify_line(kf: &LocalFieldDesc, l: u64, mu: &LFElement) -> Result<LineReport> {
    require_hypothesis(kf, l)?;
    let (norm, vnorm) = normalize(kf, l, mu)?;
    let prec = trivial_threshold(kf);
    if vnorm == 1 {
        // totally ramified, Eisenstein T^l - mu'
        let (t, v_disc) = if l == kf.p {
            let t = le1(kf) as u64;
            (t, (l - 1) * (1 + t))
        } else {
            (0, l - 1)
        };
        return Ok(LineReport {
            l,
            m: 0,
            m_convention: MConvention::FullGroup,
            is_unramified: false,
            t: t as i64,
            v_disc,
            uniformiser_recipe: UniformiserRecipe::RootOfGenerator { generator: norm },
            precision_used: prec,
        });
    }
    // unit generator
    let u = norm;
    match unit_level(kf, l, &u)? {
        Level::Trivial => Err(Error::NotALine),
        Level::Finite(m) => {
            if l != kf.p {
                // residue non-l-th-power: the unramified line
                debug_assert_eq!(m, 0);
                return Ok(LineReport {
                    l,
                    m,
                    m_convention: MConvention::UnitGroup,
                    is_unramified: true,
                    t: -1,
                    v_disc: 0,
                    uniformiser_recipe: UniformiserRecipe::BaseUniformiser,
                    precision_used: prec,
                });
            }
            let top = le1(kf);
            if m == top {
                return Ok(LineReport {
                    l,
                    m,
                    m_convention: MConvention::UnitGroup,
                    is_unramified: true,
                    t: -1,
                    v_disc: 0,
                    uniformiser_recipe: UniformiserRecipe::BaseUniformiser,
                    precision_used: prec,
                });
            }
            // ramified unit line: break t = l*e1 - m, m prime to l
            debug_assert!(m >= 1 && m % l as u32 != 0);
            let t = (top - m) as u64;
            let solve = solve_lth_power(kf, l, &u, m)?;
            let x = inv_mod(m as u64 % l, l);
            let y = (1i64 - (m as i64) * (x as i64)) / l as i64;
            Ok(LineReport {
                l,
                m,
                m_convention: MConvention::UnitGroup,
                is_unramified: false,
                t: t as i64,
                v_disc: (l - 1) * (1 + t),
                uniformiser_recipe: UniformiserRecipe::XiMinusRoot { x, y, xi: solve.witness },
                precision_used: prec,
            })
        }
    }
}

/// A generator of the unique unramified degree-l Kummer line.
pub fn unramified_line_generator(kf: &LocalFieldDesc, l: u64) -> Result<LFElement> {
    require_hypothesis(kf, l)?;
    let k = &kf.residue_field;
    if l != kf.p {
        // Teichmueller lift of a non-l-th-power in the residue field
        let non = k
            .elements()
            .into_iter()
            .filter(|s| !k.is_zero(s))
            .find(|s| k.pow(s, (k.q() - 1) / num_integer::gcd(l, k.q() - 1)) != k.one())
            .ok_or(Error::KummerHypothesisFails)?;
        return kf.teichmuller(&non);
    }
    // eta = 1 - u * p * (1 - zeta), u a lift of a generator of k modulo the
    // image of x -> x^p - x (nonzero absolute trace)
    let zeta = kf.zeta().ok_or(Error::KummerHypothesisFails)?;
    let gen = k
        .elements()
        .into_iter()
        .find(|c| abs_trace(k, c) != 0)
        .ok_or(Error::KummerHypothesisFails)?;
    let u = kf.lift_residue(&gen);
    let depth = kf.mul(
        &kf.mul(&u, &kf.from_int(kf.p as i128)),
        &kf.sub(&kf.one(), &zeta),
    );
    Ok(kf.sub(&kf.one(), &depth))
}

/// Explicit pairing with the Frobenius: <phi^a, eta> = zeta^(a*S(c)) with
/// c = (eta-1)/(p(1-zeta)).  The sign of c is forced by the Galois side:
/// for eta = 1 - pu(1-zeta), a p-th root is xi = 1 + (1-zeta)b with
/// residue(b)^p - residue(b) = residue(u), so phi(xi)/xi is congruent to
/// 1 + (1-zeta)*S(u) = zeta^(-S(u)) mod pi^(e1+1).
pub fn kummer_pairing(kf: &LocalFieldDesc, eta: &LFElement, a: u64) -> Result<PairingResult> {
    let p = kf.p;
    require_hypothesis(kf, p)?;
    let zeta = kf.zeta().expect("hypothesis checked");
    let top = le1(kf);
    let num = kf.sub(eta, &kf.one());
    if !kf.valuation(&num).at_least(top) {
        return Err(Error::NotDeepEnough);
    }
    let den = kf.mul(&kf.from_int(p as i128), &kf.sub(&kf.one(), &zeta));
    let c = kf.div(&num, &den)?;
    let s = abs_trace(&kf.residue_field, &kf.residue(&c)?);
    let exponent = a % p * s % p;
    Ok(PairingResult { exponent, value: kf.pow(&zeta, exponent) })
}

/// Independent Galois-side computation of the pairing with the Frobenius:
/// lift a p-th root of eta in the degree-p unramified extension and measure
/// sigma(xi)/xi against powers of zeta.
pub fn pairing_oracle(kf: &LocalFieldDesc, eta: &LFElement) -> Result<u64> {
    let p = kf.p;
    require_hypothesis(kf, p)?;
    let top = le1(kf);
    if !kf.valuation(&kf.sub(&kf.one(), eta)).at_least(top) {
        return Err(Error::NotDeepEnough);
    }
    let ext = unramified_extension(kf, p as usize)?;
    let lf = &ext.ext;
    let eta_l = ext.embed(kf, eta);
    let target = lf.prec_pi - 2 * lf.e as u32;
    let solve = solve_lth_power(lf, p, &eta_l, target)?;
    if solve.level != Level::Trivial {
        return Err(Error::LiftFailed);
    }
    let xi = solve.witness;
    let rho = lf.div(&ext.frobenius(&xi), &xi)?;
    let zeta = ext.embed(kf, &kf.zeta().expect("hypothesis checked"));
    let depth = kf.e1().expect("hypothesis forces integral e1") + 1;
    (0..p)
        .find(|&j| lf.eq_at(&rho, &lf.pow(&zeta, j), depth))
        .ok_or_else(|| Error::OracleMismatch("sigma(xi)/xi is not a root of unity".into()))
}

// ---- quotient-ring arithmetic for the break oracle ----

struct QuotRing<'a> {
    kf: &'a LocalFieldDesc,
    l: usize,
    /// x^l = mu
    mu: LFElement,
}

impl QuotRing<'_> {
    fn zero(&self) -> Vec<LFElement> {
        vec![self.kf.zero(); self.l]
    }

    fn mul(&self, a: &[LFElement], b: &[LFElement]) -> Vec<LFElement> {
        let kf = self.kf;
        let mut prod = vec![kf.zero(); 2 * self.l - 1];
        for i in 0..self.l {
            for j in 0..self.l {
                let t = kf.mul(&a[i], &b[j]);
                prod[i + j] = kf.add(&prod[i + j], &t);
            }
        }
        let mut out = self.zero();
        for (k, c) in prod.into_iter().enumerate() {
            if k < self.l {
                out[k] = kf.add(&out[k], &c);
            } else {
                let t = kf.mul(&c, &self.mu);
                out[k - self.l] = kf.add(&out[k - self.l], &t);
            }
        }
        out
    }

    fn pow(&self, a: &[LFElement], mut e: u64) -> Vec<LFElement> {
        let mut base = a.to_vec();
        let mut acc = self.zero();
        acc[0] = self.kf.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// sigma(x) = zeta * x on coefficients
    fn sigma(&self, a: &[LFElement], zeta: &LFElement) -> Vec<LFElement> {
        let kf = self.kf;
        let mut zp = kf.one();
        a.iter()
            .map(|c| {
                let r = kf.mul(c, &zp);
                zp = kf.mul(&zp, zeta);
                r
            })
            .collect()
    }

    /// v_L via the norm to K (totally ramified degree l)
    fn v_l(&self, a: &[LFElement]) -> Result<u64> {
        let kf = self.kf;
        let mut g = vec![kf.neg(&self.mu)];
        for _ in 1..self.l {
            g.push(kf.zero());
        }
        g.push(kf.one());
        let n = ext_norm(kf, &g, a)?;
        kf.valuation(&n).exact().map(|v| v as u64).ok_or(Error::PrecisionExhausted)
    }
}

/// Direct Galois computation of the ramification break of a ramified line,
/// from the action of sigma on the uniformiser recipe.
pub fn break_oracle(kf: &LocalFieldDesc, l: u64, mu: &LFElement) -> Result<u64> {
    let report = classify_line(kf, l, mu)?;
    if report.is_unramified {
        return Err(Error::ConditionFailed);
    }
    let zeta = if l == kf.p {
        kf.zeta().expect("hypothesis checked")
    } else {
        // Teichmueller lift of a primitive l-th root of unity in k
        let k = &kf.residue_field;
        let w = k
            .elements()
            .into_iter()
            .filter(|s| !k.is_zero(s))
            .find(|s| k.order(s) == l)
            .ok_or(Error::KummerHypothesisFails)?;
        kf.teichmuller(&w)?
    };
    match &report.uniformiser_recipe {
        UniformiserRecipe::BaseUniformiser => unreachable!("ramified"),
        UniformiserRecipe::RootOfGenerator { generator } => {
            // Lambda = x; sigma(Lambda) - Lambda = (zeta - 1) x
            let ring = QuotRing { kf, l: l as usize, mu: generator.clone() };
            let mut lam = ring.zero();
            lam[1] = kf.one();
            let w = {
                let s = ring.sigma(&lam, &zeta);
                s.iter().zip(&lam).map(|(a, b)| kf.sub(a, b)).collect::<Vec<_>>()
            };
            Ok(ring.v_l(&w)? - 1)
        }
        UniformiserRecipe::XiMinusRoot { x, y, xi } => {
            // Lambda = (xi - root)^x pi^y; the pi^y part is Galois-stable,
            // so t + 1 = v_L(sigma(A^x) - A^x) + l*y
            let (norm_mu, _) = normalize(kf, l, mu)?;
            let ring = QuotRing { kf, l: l as usize, mu: norm_mu };
            let mut a = ring.zero();
            a[0] = xi.clone();
            a[1] = kf.from_int(-1);
            let ax = ring.pow(&a, *x);
            let sax = ring.sigma(&ax, &zeta);
            let w: Vec<LFElement> = sax.iter().zip(&ax).map(|(s, b)| kf.sub(s, b)).collect();
            let vw = ring.v_l(&w)? as i64;
            let t = vw + l as i64 * y - 1;
            if t < 0 {
                return Err(Error::OracleMismatch("negative break".into()));
            }
            Ok(t as u64)
        }
    }
}

fn delta_l(l: u64, n: u64) -> u64 {
    // (l^(1+n) - 1)/(l - 1)
    let mut acc = 0u64;
    let mut pw = 1u64;
    for _ in 0..=n {
        acc += pw;
        pw *= l;
    }
    acc
}

/// Census of ramified lines by break, via the counting formula, with an
/// exhaustive classification cross-check at desk scale.
pub fn count_by_break(kf: &LocalFieldDesc, l: u64) -> Result<BreakCensus> {
    require_hypothesis(kf, l)?;
    let f = kf.f as u64;
    let d = kf.d as u64;
    if l != kf.p {
        // tame: l lines of break 0 plus the unramified one (not listed)
        return Ok(BreakCensus { l, rows: vec![(0, l)], total: l });
    }
    let top = le1(kf) as u64;
    let mu_of = |t: u64| -> u64 { (t - t / l) * f };
    let mut rows: Vec<(u32, u64)> = vec![];
    for t in 1..top {
        if t % l == 0 {
            continue;
        }
        let n = delta_l(l, mu_of(t)) - delta_l(l, mu_of(t - 1));
        rows.push((t as u32, n));
    }
    let top_n = l.checked_pow(1 + d as u32).ok_or(Error::TooLarge)?;
    rows.push((top as u32, top_n));
    let total = rows.iter().map(|r| r.1).sum();
    // cross-check by classifying every line when feasible
    if delta_l(l, 1 + d) <= 100_000 {
        if let Some(counts) = census_by_enumeration(kf, l)? {
            let mut formula: Vec<(u32, u64)> = rows.clone();
            formula.sort_unstable();
            let mut brute: Vec<(u32, u64)> = counts;
            brute.sort_unstable();
            if formula != brute {
                return Err(Error::OracleMismatch(format!(
                    "census formula {:?} vs enumeration {:?}",
                    formula, brute
                )));
            }
        }
    }
    Ok(BreakCensus { l, rows, total })
}

/// Classify every class of K^x/K^xl (via exhaustive unit enumeration) and
/// tally ramified lines by break. Returns None when the enumeration bound
/// is exceeded.
fn census_by_enumeration(kf: &LocalFieldDesc, l: u64) -> Result<Option<Vec<(u32, u64)>>> {
    let cap = trivial_threshold(kf);
    let units = match enumerate_units(kf, cap) {
        Ok(u) => u,
        Err(Error::TooLarge) => return Ok(None),
        Err(e) => return Err(e),
    };
    if units.len() as u64 * l > 200_000 {
        return Ok(None);
    }
    let classes = l.checked_pow(2 + kf.d as u32).ok_or(Error::TooLarge)?;
    let reps = units.len() as u64 * l / classes;
    let mut tally: std::collections::BTreeMap<u32, u64> = Default::default();
    let mut unram = 0u64;
    let mut trivial = 0u64;
    for u in &units {
        for v in 0..l {
            let mu = kf.mul(u, &kf.pow(&kf.pi(), v));
            match classify_line(kf, l, &mu) {
                Ok(rep) => {
                    if rep.is_unramified {
                        unram += 1;
                    } else {
                        *tally.entry(rep.t as u32).or_insert(0) += 1;
                    }
                }
                Err(Error::NotALine) => trivial += 1,
                Err(e) => return Err(e),
            }
        }
    }
    // sanity on multiplicities: the trivial class and the unramified line
    if trivial != reps || unram != reps * (l - 1) {
        return Err(Error::OracleMismatch(format!(
            "class multiplicities off: trivial {} unram {} reps {}",
            trivial, unram, reps
        )));
    }
    let denom = reps * (l - 1);
    let mut out = vec![];
    for (t, c) in tally {
        if c % denom != 0 {
            return Err(Error::OracleMismatch(format!(
                "count at break {} not a multiple of line size: {}",
                t, c
            )));
        }
        out.push((t, c / denom));
    }
    Ok(Some(out))
}

/// Contribution of the degree-l kummerian extensions to the degree-l mass
/// formula: sum of n_i / l^((l-1) t_i f).
pub fn mass_contribution(kf: &LocalFieldDesc, l: u64) -> Result<ExactRational> {
    let census = count_by_break(kf, l)?;
    let mut acc = ExactRational::zero();
    for &(t, n) in &census.rows {
        let term = ExactRational::power_fraction(
            BigInt::from(n),
            l,
            (l - 1) * t as u64 * kf.f as u64,
        );
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Break over a base without the roots of unity, from the break t' over the
/// cyclotomic extension and the relative ramification index s.
pub fn base_change_break(t_prime: u64, s: u64) -> Result<u64> {
    if s == 0 {
        return Err(Error::ZeroInput);
    }
    if t_prime % s != 0 {
        return Err(Error::NotDivisible);
    }
    Ok(t_prime / s)
}

/// Does the plane spanned by two ramified lines contain the unramified one?
pub fn compositum_is_unramified(
    kf: &LocalFieldDesc,
    l: u64,
    mu1: &LFElement,
    mu2: &LFElement,
) -> Result<bool> {
    require_hypothesis(kf, l)?;
    let r1 = classify_line(kf, l, mu1).map_err(|e| match e {
        Error::NotALine => Error::DegenerateLines,
        e => e,
    })?;
    let r2 = classify_line(kf, l, mu2).map_err(|e| match e {
        Error::NotALine => Error::DegenerateLines,
        e => e,
    })?;
    if r1.is_unramified || r2.is_unramified {
        return Err(Error::DegenerateLines);
    }
    // distinctness: no combination mu1^a mu2^b with (a,b) != (0,0) trivial
    let mut found_unram = false;
    for a in 0..l {
        for b in 0..l {
            if a == 0 && b == 0 {
                continue;
            }
            let nu = kf.mul(&kf.pow(mu1, a), &kf.pow(mu2, b));
            match classify_line(kf, l, &nu) {
                Ok(rep) => {
                    if rep.is_unramified {
                        found_unram = true;
                    }
                }
                Err(Error::NotALine) => return Err(Error::DegenerateLines),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(found_unram)
}

/// Upper-numbering ramification data of M|K (M the maximal elementary
/// abelian p-extension) by orthogonality with the unit filtration, and the
/// discriminant valuation from the conductor-style sum.
pub fn galois_filtration_m(kf: &LocalFieldDesc) -> Result<GaloisFiltration> {
    let p = kf.p;
    require_hypothesis(kf, p)?;
    let table = filtration_dims(kf, p);
    let total = table.total_dim; // 2 + d
    let top = le1(kf);
    let dim_u = |n: u32| -> u32 {
        if n == 0 {
            total
        } else {
            table.entries[n as usize].dim
        }
    };
    let mut upper_breaks = vec![];
    for n in 1..=(top + 1) {
        let dim = total - dim_u(top + 1 - n);
        upper_breaks.push((n, dim));
    }
    // inertia has dimension 1 + d (the unramified line splits off);
    // with integer upper jumps, v_M of the different is
    // (|G_0| - 1) + sum_n [G^0 : G^n] (|G^n| - 1), and v_K of the
    // discriminant multiplies by the residue degree p of M|K
    let dim_g0 = (1 + kf.d) as u32;
    let pw = |e: u32| -> Result<u64> { p.checked_pow(e).ok_or(Error::TooLarge) };
    let mut v_m = pw(dim_g0)? - 1;
    for &(n, dim) in &upper_breaks {
        if n > top || dim == 0 {
            continue;
        }
        let index = pw(dim_g0 - dim)?;
        v_m += index * (pw(dim)? - 1);
    }
    let v_disc_m = p * v_m;
    Ok(GaloisFiltration { upper_breaks, v_disc_m })
}

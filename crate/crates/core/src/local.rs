//! Local fields K|Q_p as an unramified step plus an Eisenstein step:
//! construction, element arithmetic at fixed pi-adic precision, valuations,
//! Teichmueller lifts, roots of unity, cyclotomic fields, resultant norms,
//! and unramified extensions with their Frobenius.

use crate::error::{Error, Result};
use crate::exact::pow_u64;
use crate::finite::{FqDesc, FqElement};
use std::sync::atomic::{AtomicU64, Ordering};

static NEXT_FIELD_ID: AtomicU64 = AtomicU64::new(1);

/// Coefficient in the unramified ring Z_p[y]/(gt), as a length-f coordinate
/// vector mod p^M.
pub type UnCo = Vec<u64>;

/// Arithmetic context for the unramified coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnRing {
    pub p: u64,
    pub m: u32,
    pub pm: u64,
    pub f: usize,
    /// monic lift of the residue modulus, little-endian, length f+1,
    /// coefficients in [0, p)
    pub gt: Vec<u64>,
}

impl UnRing {
    pub fn zero(&self) -> UnCo {
        vec![0; self.f]
    }

    pub fn one(&self) -> UnCo {
        self.from_scalar(1)
    }

    pub fn from_scalar(&self, s: i128) -> UnCo {
        let mut c = vec![0; self.f];
        c[0] = s.rem_euclid(self.pm as i128) as u64;
        c
    }

    pub fn from_fq(&self, x: &FqElement) -> UnCo {
        x.c.iter().map(|&v| v % self.pm).collect()
    }

    pub fn add(&self, a: &UnCo, b: &UnCo) -> UnCo {
        a.iter()
            .zip(b)
            .map(|(x, y)| ((*x as u128 + *y as u128) % self.pm as u128) as u64)
            .collect()
    }

    pub fn sub(&self, a: &UnCo, b: &UnCo) -> UnCo {
        a.iter()
            .zip(b)
            .map(|(x, y)| ((*x as u128 + (self.pm - *y) as u128) % self.pm as u128) as u64)
            .collect()
    }

    pub fn neg(&self, a: &UnCo) -> UnCo {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &UnCo, b: &UnCo) -> UnCo {
        let pm = self.pm as u128;
        let mut prod = vec![0u128; 2 * self.f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % pm;
            }
        }
        // reduce by the monic modulus gt
        for k in (self.f..prod.len()).rev() {
            let c = prod[k];
            if c != 0 {
                for i in 0..self.f {
                    let t = c * self.gt[i] as u128 % pm;
                    prod[k - self.f + i] = (prod[k - self.f + i] + pm - t) % pm;
                }
            }
            prod[k] = 0;
        }
        prod[..self.f].iter().map(|&x| x as u64).collect()
    }

    pub fn pow(&self, a: &UnCo, mut e: u64) -> UnCo {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation (min over coordinates), capped at M.
    pub fn vp(&self, a: &UnCo) -> u32 {
        let mut best = self.m;
        for &c in a {
            if c == 0 {
                continue;
            }
            let mut v = 0u32;
            let mut x = c;
            while x % self.p == 0 {
                x /= self.p;
                v += 1;
            }
            best = best.min(v);
        }
        best
    }

    pub fn is_unit(&self, a: &UnCo) -> bool {
        self.vp(a) == 0
    }

    /// Exact division by p^k (requires p^k | every coordinate).
    pub fn div_exact_p(&self, a: &UnCo, k: u32) -> Result<UnCo> {
        let pk = pow_u64(self.p, k).ok_or(Error::PrecisionUnrepresentable)?;
        let mut out = Vec::with_capacity(self.f);
        for &c in a {
            if c % pk != 0 {
                return Err(Error::NonUnitInverse);
            }
            out.push(c / pk);
        }
        Ok(out)
    }

    pub fn residue(&self, a: &UnCo) -> FqElement {
        FqElement { c: a.iter().map(|&c| c % self.p).collect() }
    }

    /// Inverse of a unit, by Newton from the residue inverse.
    pub fn inv(&self, a: &UnCo, k: &FqDesc) -> Result<UnCo> {
        if !self.is_unit(a) {
            return Err(Error::NonUnitInverse);
        }
        let r = self.residue(a);
        let ri = k.inv(&r)?;
        let mut x = self.from_fq(&ri);
        for _ in 0..(64 - self.m.leading_zeros() + 1) {
            // x <- x(2 - a x)
            let ax = self.mul(a, &x);
            let two = self.from_scalar(2);
            let t = self.sub(&two, &ax);
            x = self.mul(&x, &t);
        }
        debug_assert_eq!(self.mul(a, &x), self.one());
        Ok(x)
    }

    pub fn reduce_mod(&self, a: &UnCo, pk: u64) -> UnCo {
        a.iter().map(|&c| c % pk).collect()
    }

    /// Newton root of a polynomial (UnCo coefficients, little-endian) whose
    /// derivative at x0 is a unit and with f(x0) = 0 mod p.
    pub fn newton_root(&self, poly: &[UnCo], x0: &UnCo, k: &FqDesc) -> Result<UnCo> {
        let eval = |x: &UnCo| -> UnCo {
            let mut acc = self.zero();
            for c in poly.iter().rev() {
                acc = self.add(&self.mul(&acc, x), c);
            }
            acc
        };
        let deval = |x: &UnCo| -> UnCo {
            let mut acc = self.zero();
            for (i, c) in poly.iter().enumerate().rev() {
                if i == 0 {
                    break;
                }
                let ic = self.mul(&self.from_scalar(i as i128), c);
                acc = self.add(&self.mul(&acc, x), &ic);
            }
            acc
        };
        let mut x = x0.clone();
        if self.vp(&eval(&x)) == 0 {
            return Err(Error::ConditionFailed);
        }
        for _ in 0..(64 - self.m.leading_zeros() + 2) {
            let fx = eval(&x);
            if self.vp(&fx) >= self.m {
                return Ok(x);
            }
            let dfx = deval(&x);
            let inv = self.inv(&dfx, k)?;
            x = self.sub(&x, &self.mul(&fx, &inv));
        }
        let fx = eval(&x);
        if self.vp(&fx) >= self.m {
            Ok(x)
        } else {
            Err(Error::LiftFailed)
        }
    }
}

/// pi-adic valuation result: exact, or indistinguishable from 0 at precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val {
    Exact(u32),
    AtLeast(u32),
}

impl Val {
    pub fn exact(self) -> Option<u32> {
        match self {
            Val::Exact(v) => Some(v),
            Val::AtLeast(_) => None,
        }
    }

    pub fn at_least(self, n: u32) -> bool {
        match self {
            Val::Exact(v) => v >= n,
            Val::AtLeast(v) => v >= n,
        }
    }
}

/// Element of the integer ring of K: layers c[i] (coefficient of pi^i in the
/// unramified ring), 0 <= i < e, plus the pi-adic precision it is known to.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LFElement {
    pub field_id: u64,
    pub prec: u32,
    pub c: Vec<UnCo>,
}

/// Immutable description of K = unramified step (residue degree f) followed
/// by a totally ramified Eisenstein step of degree e.
#[derive(Debug, Clone)]
pub struct LocalFieldDesc {
    pub id: u64,
    pub p: u64,
    pub f: usize,
    pub e: usize,
    pub d: usize,
    pub prec_pi: u32,
    pub ring: UnRing,
    pub residue_field: FqDesc,
    /// Eisenstein polynomial, little-endian, length e+1, monic
    pub eis: Vec<UnCo>,
    /// e1 = e/(p-1) as an exact fraction
    pub e1_num: u32,
    pub e1_den: u32,
    // cached data
    u0inv: UnCo,
    inv_series: Vec<UnCo>,
    eps: Vec<UnCo>,
    pub eps_bar: FqElement,
    mu_p: Option<MuPData>,
}

#[derive(Debug, Clone)]
struct MuPData {
    zeta: Vec<UnCo>,
    root_minus_p: Vec<UnCo>,
}

impl LocalFieldDesc {
    pub fn q(&self) -> u64 {
        self.residue_field.q()
    }

    /// p*e1 when integral (the top interesting filtration level for l = p).
    pub fn pe1(&self) -> Option<u32> {
        if self.e1_den == 1 {
            Some(self.p as u32 * self.e1_num)
        } else {
            None
        }
    }

    /// e1 when integral.
    pub fn e1(&self) -> Option<u32> {
        if self.e1_den == 1 {
            Some(self.e1_num)
        } else {
            None
        }
    }

    pub fn default_prec(p: u64, e: usize) -> u32 {
        let e = e as u32;
        let p32 = p as u32;
        if e % (p32 - 1).max(1) == 0 && p32 > 1 {
            let e1 = if p32 == 2 { e } else { e / (p32 - 1) };
            2 * (p32 * e1 + 1) + 4 * e
        } else {
            6 * e + 8
        }
    }

    // ---- element constructors ----

    pub fn zero(&self) -> LFElement {
        LFElement { field_id: self.id, prec: self.prec_pi, c: vec![self.ring.zero(); self.e] }
    }

    pub fn one(&self) -> LFElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i128) -> LFElement {
        let mut z = self.zero();
        z.c[0] = self.ring.from_scalar(n);
        self.canon(z)
    }

    pub fn from_unco(&self, u: UnCo) -> LFElement {
        let mut z = self.zero();
        z.c[0] = u;
        self.canon(z)
    }

    /// lift of a residue-field element (layer 0, coordinate lift)
    pub fn lift_residue(&self, r: &FqElement) -> LFElement {
        self.from_unco(self.ring.from_fq(r))
    }

    pub fn pi(&self) -> LFElement {
        if self.e == 1 {
            self.from_unco(self.ring.neg(&self.eis[0]))
        } else {
            let mut z = self.zero();
            z.c[1] = self.ring.one();
            z
        }
    }

    fn check(&self, a: &LFElement) -> Result<()> {
        if a.field_id != self.id {
            return Err(Error::MixedFields);
        }
        Ok(())
    }

    /// Canonical form at the element's own precision: layer i reduced mod
    /// p^ceil((prec - i)/e).
    pub fn canon(&self, mut a: LFElement) -> LFElement {
        let e = self.e as u32;
        for (i, layer) in a.c.iter_mut().enumerate() {
            let i = i as u32;
            let mi = if a.prec > i { (a.prec - i).div_ceil(e).min(self.ring.m) } else { 0 };
            let pk = pow_u64(self.p, mi).expect("modulus fits");
            *layer = self.ring.reduce_mod(layer, pk);
        }
        a
    }

    pub fn with_prec(&self, a: &LFElement, prec: u32) -> LFElement {
        let mut b = a.clone();
        b.prec = prec.min(self.prec_pi);
        self.canon(b)
    }

    pub fn add(&self, a: &LFElement, b: &LFElement) -> LFElement {
        debug_assert!(a.field_id == b.field_id && a.field_id == self.id);
        let c = a.c.iter().zip(&b.c).map(|(x, y)| self.ring.add(x, y)).collect();
        self.canon(LFElement { field_id: self.id, prec: a.prec.min(b.prec), c })
    }

    pub fn sub(&self, a: &LFElement, b: &LFElement) -> LFElement {
        debug_assert!(a.field_id == b.field_id && a.field_id == self.id);
        let c = a.c.iter().zip(&b.c).map(|(x, y)| self.ring.sub(x, y)).collect();
        self.canon(LFElement { field_id: self.id, prec: a.prec.min(b.prec), c })
    }

    pub fn neg(&self, a: &LFElement) -> LFElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &LFElement, b: &LFElement) -> LFElement {
        debug_assert!(a.field_id == b.field_id && a.field_id == self.id);
        let e = self.e;
        let mut prod = vec![self.ring.zero(); 2 * e - 1];
        for i in 0..e {
            if self.ring.vp(&a.c[i]) >= self.ring.m {
                continue;
            }
            for j in 0..e {
                let t = self.ring.mul(&a.c[i], &b.c[j]);
                prod[i + j] = self.ring.add(&prod[i + j], &t);
            }
        }
        // pi^k = -sum_i eis[i] pi^(k-e+i) for k >= e
        for k in (e..prod.len()).rev() {
            let top = std::mem::replace(&mut prod[k], self.ring.zero());
            if self.ring.vp(&top) >= self.ring.m {
                continue;
            }
            for i in 0..e {
                let t = self.ring.mul(&top, &self.eis[i]);
                prod[k - e + i] = self.ring.sub(&prod[k - e + i], &t);
            }
        }
        prod.truncate(e);
        self.canon(LFElement { field_id: self.id, prec: a.prec.min(b.prec), c: prod })
    }

    pub fn pow(&self, a: &LFElement, mut n: u64) -> LFElement {
        let mut base = a.clone();
        let mut acc = self.with_prec(&self.one(), a.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn valuation(&self, a: &LFElement) -> Val {
        let a = self.canon(a.clone());
        let mut best = a.prec;
        for (i, layer) in a.c.iter().enumerate() {
            let vp = self.ring.vp(layer);
            if vp < self.ring.m {
                let v = self.e as u32 * vp + i as u32;
                best = best.min(v);
            }
        }
        if best >= a.prec {
            Val::AtLeast(a.prec)
        } else {
            Val::Exact(best)
        }
    }

    pub fn is_unit(&self, a: &LFElement) -> bool {
        self.valuation(a) == Val::Exact(0)
    }

    pub fn residue(&self, a: &LFElement) -> Result<FqElement> {
        if a.prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
        Ok(self.ring.residue(&a.c[0]))
    }

    /// Inverse of a unit.
    pub fn inv_unit(&self, a: &LFElement) -> Result<LFElement> {
        self.check(a)?;
        if !self.is_unit(a) {
            return Err(Error::NonUnitInverse);
        }
        let r = self.residue(a)?;
        let ri = self.residue_field.inv(&r)?;
        let mut x = self.with_prec(&self.lift_residue(&ri), a.prec);
        let two = self.with_prec(&self.from_int(2), a.prec);
        for _ in 0..(64 - a.prec.leading_zeros() + 2) {
            let t = self.sub(&two, &self.mul(a, &x));
            x = self.mul(&x, &t);
        }
        debug_assert!(self
            .valuation(&self.sub(&self.mul(a, &x), &self.one()))
            .at_least(a.prec));
        Ok(x)
    }

    /// Divide by pi once; requires v(a) >= 1. Result precision drops by one.
    pub fn div_pi(&self, a: &LFElement) -> Result<LFElement> {
        self.check(a)?;
        if a.prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
        if !self.valuation(a).at_least(1) {
            return Err(Error::NonUnitInverse);
        }
        let a = self.canon(a.clone());
        // a/pi = sum_{i>=1} a_i pi^(i-1) + a_0 * pi^(e-1) * (-1/c_0) * ...
        // with a_0/pi = -(a_0/p) * u0inv * pi^(e-1) * inv_series
        let mut shifted = self.zero();
        for i in 1..self.e {
            shifted.c[i - 1] = a.c[i].clone();
        }
        shifted.prec = a.prec - 1;
        let a0_div_p = self.ring.div_exact_p(&a.c[0], 1)?;
        let t = self.ring.neg(&self.ring.mul(&a0_div_p, &self.u0inv));
        // t * pi^(e-1) * inv_series
        let mut corr = self.zero();
        corr.c[self.e - 1] = t;
        corr.prec = a.prec - 1;
        let series = LFElement { field_id: self.id, prec: a.prec - 1, c: self.inv_series.clone() };
        let corr = self.mul(&corr, &series);
        Ok(self.canon(self.add(&shifted, &corr)))
    }

    /// Divide by pi^k.
    pub fn div_pi_pow(&self, a: &LFElement, k: u32) -> Result<LFElement> {
        let mut x = a.clone();
        for _ in 0..k {
            x = self.div_pi(&x)?;
        }
        Ok(x)
    }

    /// a / b where v(b) <= v(a) (exact valuation required for b).
    pub fn div(&self, a: &LFElement, b: &LFElement) -> Result<LFElement> {
        let vb = self.valuation(b).exact().ok_or(Error::NonUnitInverse)?;
        let a2 = self.div_pi_pow(a, vb)?;
        let b2 = self.div_pi_pow(b, vb)?;
        self.mul_checked(&a2, &self.inv_unit(&b2)?)
    }

    fn mul_checked(&self, a: &LFElement, b: &LFElement) -> Result<LFElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Equality at a shared precision level n.
    pub fn eq_at(&self, a: &LFElement, b: &LFElement, n: u32) -> bool {
        let n = n.min(a.prec).min(b.prec);
        self.valuation(&self.sub(a, b)).at_least(n)
    }

    /// Canonical byte key of the class of a mod pi^n (for hashing).
    pub fn key_at(&self, a: &LFElement, n: u32) -> Vec<u64> {
        let mut b = a.clone();
        b.prec = n.min(self.prec_pi);
        let b = self.canon(b);
        let mut out = vec![];
        for layer in &b.c {
            out.extend_from_slice(layer);
        }
        out
    }

    // ---- Teichmueller and roots of unity ----

    pub fn teichmuller(&self, r: &FqElement) -> Result<LFElement> {
        if self.residue_field.is_zero(r) {
            return Err(Error::ZeroResidue);
        }
        let q = self.q();
        let mut x = self.lift_residue(r);
        for _ in 0..(self.prec_pi + 5) {
            let y = self.pow(&x, q);
            if self.eq_at(&x, &y, self.prec_pi) {
                return Ok(y);
            }
            x = y;
        }
        Err(Error::LiftFailed)
    }

    /// Teichmueller part and 1-unit part of a unit: u = omega * u1.
    pub fn unit_split(&self, u: &LFElement) -> Result<(LFElement, LFElement)> {
        if !self.is_unit(u) {
            return Err(Error::NotAUnit);
        }
        let omega = self.teichmuller(&self.residue(u)?)?;
        let u1 = self.mul(u, &self.inv_unit(&omega)?);
        Ok((omega, u1))
    }

    /// epsilon with -p = epsilon * pi^e (a unit), cached at construction.
    pub fn eps(&self) -> LFElement {
        LFElement { field_id: self.id, prec: self.prec_pi, c: self.eps.clone() }
    }

    pub fn has_mu_l(&self, l: u64) -> bool {
        if l == self.p {
            self.mu_p.is_some()
        } else {
            (self.q() - 1) % l == 0
        }
    }

    pub fn root_of_minus_p(&self) -> Option<LFElement> {
        self.mu_p.as_ref().map(|d| LFElement {
            field_id: self.id,
            prec: self.prec_pi,
            c: d.root_minus_p.clone(),
        })
    }

    /// Stored primitive p-th root of unity, when mu_p is contained in K.
    pub fn zeta(&self) -> Option<LFElement> {
        self.mu_p.as_ref().map(|d| LFElement {
            field_id: self.id,
            prec: self.prec_pi,
            c: d.zeta.clone(),
        })
    }

    pub fn torsion_level(&self, n: u32) -> Result<u32> {
        let phi = pow_u64(self.p, n - 1).ok_or(Error::TooLarge)? * (self.p - 1);
        if self.e as u64 % phi != 0 {
            return Err(Error::NoSuchTorsion);
        }
        Ok((self.e as u64 / phi) as u32)
    }

    /// Newton iteration for a root of a polynomial over K whose derivative at
    /// x0 is a unit, from a residue-exact start (v(f(x0)) >= 1).
    pub fn newton_root(&self, poly: &[LFElement], x0: &LFElement) -> Result<LFElement> {
        let eval = |x: &LFElement| -> LFElement {
            let mut acc = self.with_prec(&self.zero(), x.prec);
            for c in poly.iter().rev() {
                acc = self.add(&self.mul(&acc, x), c);
            }
            acc
        };
        let deval = |x: &LFElement| -> LFElement {
            let mut acc = self.with_prec(&self.zero(), x.prec);
            for (i, c) in poly.iter().enumerate().rev() {
                if i == 0 {
                    break;
                }
                let ic = self.mul(&self.from_int(i as i128), c);
                acc = self.add(&self.mul(&acc, x), &ic);
            }
            acc
        };
        let mut x = x0.clone();
        if !self.valuation(&eval(&x)).at_least(1) {
            return Err(Error::ConditionFailed);
        }
        if !self.is_unit(&deval(&x)) {
            return Err(Error::ConditionFailed);
        }
        for _ in 0..(64 - self.prec_pi.leading_zeros() + 3) {
            let fx = eval(&x);
            if self.valuation(&fx).at_least(x.prec) {
                return Ok(x);
            }
            let inv = self.inv_unit(&deval(&x))?;
            x = self.sub(&x, &self.mul(&fx, &inv));
        }
        let fx = eval(&x);
        if self.valuation(&fx).at_least(x.prec) {
            Ok(x)
        } else {
            Err(Error::LiftFailed)
        }
    }
}

fn validate_eisenstein(ring: &UnRing, eis: &[UnCo]) -> Result<()> {
    let e = eis.len() - 1;
    if e < 1 {
        return Err(Error::NotEisenstein);
    }
    if eis[e] != ring.one() {
        return Err(Error::NotEisenstein);
    }
    if ring.vp(&eis[0]) != 1 {
        return Err(Error::NotEisenstein);
    }
    for c in eis.iter().take(e).skip(1) {
        if ring.vp(c) < 1 {
            return Err(Error::NotEisenstein);
        }
    }
    Ok(())
}

/// Build K from (p, f, Eisenstein coefficients over the unramified ring).
/// Coefficients are signed F_p-coordinate lifts, little-endian in pi.
pub fn lf_make(
    p: u64,
    f: usize,
    eis_coeffs: &[Vec<i64>],
    prec_pi: Option<u32>,
) -> Result<LocalFieldDesc> {
    lf_make_with_modulus(p, f, None, eis_coeffs, prec_pi)
}

pub fn lf_make_with_modulus(
    p: u64,
    f: usize,
    unram_modulus: Option<Vec<u64>>,
    eis_coeffs: &[Vec<i64>],
    prec_pi: Option<u32>,
) -> Result<LocalFieldDesc> {
    let residue_field = match unram_modulus {
        Some(m) => FqDesc::new(p, f, m)?,
        None => FqDesc::canonical(p, f)?,
    };
    if eis_coeffs.len() < 2 {
        return Err(Error::NotEisenstein);
    }
    let e = eis_coeffs.len() - 1;
    let needed = LocalFieldDesc::default_prec(p, e);
    let prec_pi = prec_pi.unwrap_or(needed);
    if prec_pi < needed {
        return Err(Error::PrecisionTooLow { given: prec_pi, needed });
    }
    let m = prec_pi.div_ceil(e as u32) + 2;
    let pm = pow_u64(p, m)
        .filter(|&md| md <= (1u64 << 63))
        .ok_or(Error::PrecisionUnrepresentable)?;
    let gt: Vec<u64> = residue_field.modulus.clone();
    let ring = UnRing { p, m, pm, f, gt };
    let eis: Vec<UnCo> = eis_coeffs
        .iter()
        .map(|co| {
            let mut u = ring.zero();
            for (j, &v) in co.iter().enumerate() {
                if j >= f {
                    if v != 0 {
                        return Err(Error::NotEisenstein);
                    }
                    continue;
                }
                u[j] = (v as i128).rem_euclid(pm as i128) as u64;
            }
            Ok(u)
        })
        .collect::<Result<Vec<_>>>()?;
    lf_make_raw(p, residue_field, ring, eis, prec_pi)
}

/// Internal constructor from already-embedded Eisenstein coefficients.
pub fn lf_make_raw(
    p: u64,
    residue_field: FqDesc,
    ring: UnRing,
    eis: Vec<UnCo>,
    prec_pi: u32,
) -> Result<LocalFieldDesc> {
    validate_eisenstein(&ring, &eis)?;
    let e = eis.len() - 1;
    let f = ring.f;
    let g = num_integer::gcd(e as u32, (p - 1) as u32);
    let (e1_num, e1_den) = (e as u32 / g, (p - 1) as u32 / g);
    let id = NEXT_FIELD_ID.fetch_add(1, Ordering::Relaxed);

    // u0 = c_0/p is a unit; u0inv = p/c_0
    let u0 = ring.div_exact_p(&eis[0], 1)?;
    let u0inv = ring.inv(&u0, &residue_field)?;

    let mut desc = LocalFieldDesc {
        id,
        p,
        f,
        e,
        d: e * f,
        prec_pi,
        ring: ring.clone(),
        residue_field: residue_field.clone(),
        eis: eis.clone(),
        e1_num,
        e1_den,
        u0inv: u0inv.clone(),
        inv_series: vec![ring.one(); 1],
        eps: vec![ring.zero(); e],
        eps_bar: residue_field.zero(),
        mu_p: None,
    };
    // placeholder inv_series of full length so elements are well-formed
    desc.inv_series = {
        let mut v = vec![ring.zero(); e];
        v[0] = ring.one();
        v
    };

    // series W = 1 + sum_{i>=1} (c_i/c_0) pi^i; inv_series = W^{-1}
    let mut w = desc.zero();
    w.c[0] = ring.one();
    for i in 1..e {
        let ci_div_p = ring.div_exact_p(&eis[i], 1)?;
        w.c[i] = ring.mul(&ci_div_p, &u0inv);
    }
    let winv = desc.inv_unit(&w)?;
    desc.inv_series = winv.c.clone();

    // eps = -p / pi^e = (p/c_0) * W^{-1}
    let eps = desc.mul(&desc.from_unco(u0inv.clone()), &winv);
    desc.eps_bar = desc.residue(&eps)?;
    desc.eps = eps.c.clone();

    // sanity: -p = eps * pi^e at precision
    let lhs = desc.from_int(-(p as i128));
    let rhs = desc.mul(&eps, &desc.pow(&desc.pi(), e as u64));
    debug_assert!(desc.eq_at(&lhs, &rhs, desc.prec_pi));

    desc.mu_p = compute_mu_p(&desc)?;
    Ok(desc)
}

/// Determine whether mu_p lives in K, cross-validating the unit-criterion
/// against the direct root-finding oracle for T^(p-1) + p; on success cache
/// the root and a primitive p-th root of unity.
fn compute_mu_p(desc: &LocalFieldDesc) -> Result<Option<MuPData>> {
    let p = desc.p;
    let k = &desc.residue_field;
    if desc.e1_den != 1 {
        // (p-1) does not divide e: a root of T^(p-1) = -p would need
        // fractional valuation e/(p-1), so criterion and oracle agree on "no".
        return Ok(None);
    }
    let e1 = desc.e1_num;
    // criterion: eps_bar is a (p-1)-th power in the residue field
    let q = desc.q();
    let gcd = num_integer::gcd(p - 1, q - 1);
    let criterion = desc.residue_field.pow(&desc.eps_bar, (q - 1) / gcd) == k.one();
    // oracle: exhaustive residue search for s with s^(p-1) = eps_bar, then a
    // Newton lift of S^(p-1) - eps and a direct check of Pi^(p-1) + p
    let sbar = if p == 2 {
        // s^1 = eps_bar directly
        Some(desc.eps_bar.clone())
    } else {
        if q > (1 << 16) {
            return Err(Error::TooLarge);
        }
        k.elements()
            .into_iter()
            .filter(|s| !k.is_zero(s))
            .find(|s| k.pow(s, p - 1) == desc.eps_bar)
    };
    let oracle_root = match sbar {
        None => None,
        Some(sbar) => {
            if p == 2 {
                // S = eps itself (T^1 = eps has the obvious root)
                Some(desc.eps())
            } else {
                // f(S) = S^(p-1) - eps, f'(sbar) unit since p-1 is prime to p
                let mut poly = vec![desc.neg(&desc.eps())];
                for _ in 1..(p - 1) {
                    poly.push(desc.zero());
                }
                poly.push(desc.one());
                Some(desc.newton_root(&poly, &desc.lift_residue(&sbar))?)
            }
        }
    };
    let oracle = match &oracle_root {
        None => false,
        Some(s) => {
            let cap = desc.pow(&desc.pi(), e1 as u64);
            let big_pi = desc.mul(s, &cap);
            let check = desc.add(&desc.pow(&big_pi, p - 1), &desc.from_int(p as i128));
            desc.valuation(&check).at_least(desc.prec_pi.saturating_sub(desc.e as u32))
        }
    };
    if criterion != oracle {
        return Err(Error::CriterionOracleMismatch {
            detail: format!(
                "criterion {} vs root oracle {} (p={}, e={}, f={})",
                criterion, oracle, p, desc.e, desc.f
            ),
        });
    }
    if !criterion {
        return Ok(None);
    }
    let s = oracle_root.expect("oracle found a root");
    let big_pi = desc.mul(&s, &desc.pow(&desc.pi(), e1 as u64));
    let zeta = compute_zeta(desc, &big_pi)?;
    Ok(Some(MuPData { zeta: zeta.c, root_minus_p: big_pi.c }))
}

/// Primitive p-th root of unity from a root Pi of T^(p-1) + p: solve the
/// Eisenstein equation for 1 - zeta rescaled by Pi.
fn compute_zeta(desc: &LocalFieldDesc, big_pi: &LFElement) -> Result<LFElement> {
    let p = desc.p;
    if p == 2 {
        return Ok(desc.from_int(-1));
    }
    // G(x) = Phi_p(1-x) has coefficients g_i = (-1)^i C(p, i+1); the root
    // 1 - zeta = Pi*s with s a 1-unit satisfying
    // s^(p-1) + sum_{i<p-1} (-(g_i/p)) Pi^i s^i = 0  (using p = -Pi^(p-1)).
    let mut poly: Vec<LFElement> = Vec::with_capacity(p as usize);
    let mut pi_pow = desc.one();
    for i in 0..(p - 1) {
        let gi = binomial(p as i128, i as i128 + 1) * if i % 2 == 1 { -1 } else { 1 };
        let coeff = desc.from_int(-(gi / p as i128));
        poly.push(desc.mul(&coeff, &pi_pow));
        pi_pow = desc.mul(&pi_pow, big_pi);
    }
    poly.push(desc.one());
    let s = desc.newton_root(&poly, &desc.one())?;
    let zeta = desc.sub(&desc.one(), &desc.mul(big_pi, &s));
    // checks: v(1 - zeta) = e1 and zeta^p = 1 at (nearly full) precision
    let slack = desc.prec_pi.saturating_sub(2 * desc.e as u32);
    let zp = desc.pow(&zeta, p);
    if !desc.eq_at(&zp, &desc.one(), slack) {
        return Err(Error::LiftFailed);
    }
    if desc.valuation(&desc.sub(&desc.one(), &zeta)) != Val::Exact(desc.e1_num) {
        return Err(Error::LiftFailed);
    }
    Ok(zeta)
}

fn binomial(n: i128, k: i128) -> i128 {
    let mut num = 1i128;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}

/// Multiplicative order of q mod n (degree of the unramified extension
/// generated by a primitive n-th root of unity, n prime to p).
pub fn cyclotomic_unramified_degree(q: u64, n: u64) -> Result<u64> {
    if n == 0 || num_integer::gcd(q, n) != 1 {
        return Err(Error::NotCoprime { n, p: q });
    }
    if n == 1 {
        return Ok(1);
    }
    let mut acc = q % n;
    let mut ord = 1u64;
    while acc != 1 {
        acc = acc * q % n;
        ord += 1;
    }
    Ok(ord)
}

/// Q_p(zeta_p) with pi = 1 - zeta: Eisenstein polynomial Phi_p(1-x).
pub fn build_cyclotomic(p: u64, prec: Option<u32>) -> Result<(LocalFieldDesc, LFElement)> {
    // coefficient of x^i in Phi_p(1-x) is (-1)^i C(p, i+1); for p = 2 we
    // normalize 2 - x by -1 to keep the polynomial monic.
    let deg = (p - 1).max(1) as usize;
    let mut coeffs: Vec<Vec<i64>> = Vec::with_capacity(deg + 1);
    let sign = if p == 2 { -1 } else { 1 };
    for i in 0..=deg as i128 {
        let c = binomial(p as i128, i + 1) * if i % 2 == 1 { -1 } else { 1 };
        coeffs.push(vec![(sign * c) as i64]);
    }
    let desc = lf_make(p, 1, &coeffs, prec)?;
    let zeta = desc.sub(&desc.one(), &desc.pi());
    let stored = desc.zeta().ok_or_else(|| Error::CriterionOracleMismatch {
        detail: "cyclotomic field must contain zeta".into(),
    })?;
    // the stored zeta is some primitive root; 1 - pi must also be one
    let zp = desc.pow(&zeta, p);
    debug_assert!(desc.eq_at(&zp, &desc.one(), desc.prec_pi.saturating_sub(2 * desc.e as u32)));
    let _ = stored;
    Ok((desc, zeta))
}

// ---- resultant norm ----

/// Reduce a polynomial over K modulo a monic g (in place of true division).
fn poly_mod_monic(kf: &LocalFieldDesc, a: &[LFElement], g: &[LFElement]) -> Vec<LFElement> {
    let n = g.len() - 1;
    let mut r: Vec<LFElement> = a.to_vec();
    while r.len() > n {
        let top = r.pop().unwrap();
        let shift = r.len() - n;
        for i in 0..n {
            let t = kf.mul(&top, &g[i]);
            r[shift + i] = kf.sub(&r[shift + i], &t);
        }
    }
    while r.len() < n {
        r.push(kf.zero());
    }
    r
}

/// Res(g, a) for monic g: the determinant of multiplication by a on K[x]/(g),
/// i.e. the norm of a from that algebra. Computed by cofactor expansion.
pub fn ext_norm(kf: &LocalFieldDesc, g: &[LFElement], a: &[LFElement]) -> Result<LFElement> {
    let n = g.len() - 1;
    if n == 0 {
        return Ok(kf.one());
    }
    let a = poly_mod_monic(kf, a, g);
    // columns: x^j * a mod g
    let mut cols: Vec<Vec<LFElement>> = Vec::with_capacity(n);
    let mut cur = a.clone();
    cols.push(cur.clone());
    for _ in 1..n {
        // multiply by x
        let mut shifted = vec![kf.zero()];
        shifted.extend(cur.iter().cloned());
        cur = poly_mod_monic(kf, &shifted, g);
        cols.push(cur.clone());
    }
    // matrix m[row][col]
    let m: Vec<Vec<LFElement>> = (0..n)
        .map(|row| (0..n).map(|col| cols[col][row].clone()).collect())
        .collect();
    Ok(det_laplace(kf, &m))
}

fn det_laplace(kf: &LocalFieldDesc, m: &[Vec<LFElement>]) -> LFElement {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = kf.zero();
    for col in 0..n {
        let minor: Vec<Vec<LFElement>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let sub = det_laplace(kf, &minor);
        let term = kf.mul(&m[0][col], &sub);
        if col % 2 == 0 {
            acc = kf.add(&acc, &term);
        } else {
            acc = kf.sub(&acc, &term);
        }
    }
    acc
}

// ---- unramified extensions with Frobenius over the base ----

/// Degree-r unramified extension L of K, with the embedding K -> L and the
/// Frobenius of L over K.
pub struct UnramExt {
    pub ext: LocalFieldDesc,
    pub rel_degree: usize,
    /// image of the old unramified generator y in the new ring
    y_image: UnCo,
    /// image of the new generator under the q-power Frobenius lift
    frob_gen: UnCo,
}

pub fn unramified_extension(kf: &LocalFieldDesc, r: usize) -> Result<UnramExt> {
    let p = kf.p;
    let newf = kf.f * r;
    let residue_field = FqDesc::canonical(p, newf)?;
    if residue_field.q() > (1 << 16) {
        return Err(Error::TooLarge);
    }
    let ring = UnRing {
        p,
        m: kf.ring.m,
        pm: kf.ring.pm,
        f: newf,
        gt: residue_field.modulus.clone(),
    };
    // root of the old residue modulus in the new residue field
    let old_mod = &kf.residue_field.modulus;
    let beta = residue_field
        .elements()
        .into_iter()
        .find(|b| {
            let mut acc = residue_field.zero();
            for &c in old_mod.iter().rev() {
                acc = residue_field.add(
                    &residue_field.mul(&acc, b),
                    &residue_field.from_scalar(c),
                );
            }
            residue_field.is_zero(&acc)
        })
        .ok_or(Error::LiftFailed)?;
    // Newton-lift beta to a root of the lifted old modulus in the new ring
    let poly: Vec<UnCo> = old_mod.iter().map(|&c| ring.from_scalar(c as i128)).collect();
    let y_image = ring.newton_root(&poly, &ring.from_fq(&beta), &residue_field)?;
    // embed the Eisenstein coefficients
    let embed_unco = |u: &UnCo| -> UnCo {
        let mut acc = ring.zero();
        for &c in u.iter().rev() {
            let cc = ring.from_scalar(c as i128);
            acc = ring.add(&ring.mul(&acc, &y_image), &cc);
        }
        acc
    };
    let eis: Vec<UnCo> = kf.eis.iter().map(|c| embed_unco(c)).collect();
    let ext = lf_make_raw(p, residue_field.clone(), ring.clone(), eis, kf.prec_pi)?;
    // Frobenius over K on the unramified layer: the root of the new modulus
    // congruent to (y')^q mod p
    let q = kf.q();
    let gen = {
        let mut g = ring.zero();
        if newf > 1 {
            g[1] = 1;
        } else {
            g = ring.from_scalar(0);
        }
        g
    };
    let start = ring.pow(&gen, q);
    let newpoly: Vec<UnCo> = residue_field
        .modulus
        .iter()
        .map(|&c| ring.from_scalar(c as i128))
        .collect();
    let frob_gen = ring.newton_root(&newpoly, &start, &residue_field)?;
    Ok(UnramExt { ext, rel_degree: r, y_image, frob_gen })
}

impl UnramExt {
    pub fn embed(&self, kf: &LocalFieldDesc, a: &LFElement) -> LFElement {
        let ring = &self.ext.ring;
        let embed_unco = |u: &UnCo| -> UnCo {
            let mut acc = ring.zero();
            for &c in u.iter().rev() {
                let cc = ring.from_scalar(c as i128);
                acc = ring.add(&ring.mul(&acc, &self.y_image), &cc);
            }
            acc
        };
        let _ = kf;
        let c = a.c.iter().map(embed_unco).collect();
        self.ext
            .canon(LFElement { field_id: self.ext.id, prec: a.prec, c })
    }

    /// Frobenius of L over K: the q-power map on the residue tower, fixing pi.
    pub fn frobenius(&self, a: &LFElement) -> LFElement {
        let ring = &self.ext.ring;
        let apply = |u: &UnCo| -> UnCo {
            let mut acc = ring.zero();
            for &c in u.iter().rev() {
                let cc = ring.from_scalar(c as i128);
                acc = ring.add(&ring.mul(&acc, &self.frob_gen), &cc);
            }
            acc
        };
        let c = a.c.iter().map(apply).collect();
        self.ext
            .canon(LFElement { field_id: self.ext.id, prec: a.prec, c })
    }
}

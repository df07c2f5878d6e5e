//! Arithmetic substrate: residues mod p^M, exact rationals, p-adic valuations
//! of integers, and Hensel lifting.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Integer residue mod p^M with its modulus carried along.
///
/// The modulus p^M must fit in 63 bits so products fit in u128; every field
/// descriptor checks this once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicInt {
    pub p: u64,
    pub m: u32,
    modulus: u64,
    value: u64,
}

pub fn pow_u64(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl PadicInt {
    pub fn new(value: i128, p: u64, m: u32) -> Result<Self> {
        let modulus = pow_u64(p, m)
            .filter(|&md| md <= (1u64 << 63))
            .ok_or(Error::PrecisionUnrepresentable)?;
        let md = modulus as i128;
        let v = value.rem_euclid(md) as u64;
        Ok(PadicInt { p, m, modulus, value: v })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.m != other.m {
            return Err(Error::ModulusMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let v = ((self.value as u128 + other.value as u128) % self.modulus as u128) as u64;
        Ok(Self { value: v, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let v = (self.value as u128 + (self.modulus - other.value) as u128) % self.modulus as u128;
        Ok(Self { value: v as u64, ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let v = (self.value as u128 * other.value as u128) % self.modulus as u128;
        Ok(Self { value: v as u64, ..*self })
    }

    /// p-adic valuation of the value, capped at M (the zero residue reports M).
    pub fn val(&self) -> u32 {
        let mut v = self.value;
        if v == 0 {
            return self.m;
        }
        let mut count = 0;
        while v % self.p == 0 {
            v /= self.p;
            count += 1;
        }
        count
    }

    /// Inverse of a unit mod p^M.
    pub fn inv(&self) -> Result<Self> {
        if self.value % self.p == 0 {
            return Err(Error::NonUnitInverse);
        }
        // Newton: x <- x(2 - ax), starting from the inverse mod p.
        let mut x = inv_mod_u64(self.value % self.p, self.p);
        let md = self.modulus as u128;
        for _ in 0..(64 - self.m.leading_zeros() + 1) {
            let ax = (self.value as u128 * x as u128) % md;
            let two_minus = (2 + md - ax) % md;
            x = ((x as u128 * two_minus) % md) as u64;
        }
        debug_assert_eq!((self.value as u128 * x as u128) % md, 1);
        Ok(Self { value: x, ..*self })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self { value: 1 % self.modulus, ..*self };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// Exact division by p^k; requires p^k | value. Keeps the modulus (the top
    /// k digits of the result are unconstrained and left zero).
    pub fn div_exact_p(&self, k: u32) -> Result<Self> {
        let pk = pow_u64(self.p, k).ok_or(Error::PrecisionUnrepresentable)?;
        if self.value % pk != 0 {
            return Err(Error::NonUnitInverse);
        }
        Ok(Self { value: self.value / pk, ..*self })
    }

    /// Reduce to a smaller precision m2 <= m (same p), canonical representative.
    pub fn reduce_to(&self, m2: u32) -> Result<Self> {
        if m2 > self.m {
            return Err(Error::PrecisionExceeded { requested: m2, available: self.m });
        }
        PadicInt::new(self.value as i128, self.p, m2)
    }
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    // extended Euclid mod a prime
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "inverse of non-unit");
    t.rem_euclid(p as i128) as u64
}

/// n = u * p^v with p not dividing u.
pub fn val_p(n: i128, p: u64) -> Result<(u32, i128)> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let p = p as i128;
    let mut u = n;
    let mut v = 0u32;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    Ok((v, u))
}

/// Polynomial over Z/p^M, little-endian coefficients.
#[derive(Debug, Clone)]
pub struct ZpPoly {
    pub coeffs: Vec<PadicInt>,
}

impl ZpPoly {
    pub fn new(coeffs: Vec<PadicInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        for w in coeffs.windows(2) {
            w[0].check(&w[1])?;
        }
        Ok(ZpPoly { coeffs })
    }

    pub fn from_i128(coeffs: &[i128], p: u64, m: u32) -> Result<Self> {
        let cs = coeffs
            .iter()
            .map(|&c| PadicInt::new(c, p, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cs)
    }

    pub fn eval(&self, x: &PadicInt) -> PadicInt {
        let mut acc = PadicInt { value: 0, ..self.coeffs[0] };
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).unwrap().add(c).unwrap();
        }
        acc
    }

    pub fn derivative(&self) -> ZpPoly {
        if self.coeffs.len() == 1 {
            return ZpPoly { coeffs: vec![PadicInt { value: 0, ..self.coeffs[0] }] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let k = PadicInt::new(i as i128, c.p, c.m).unwrap();
                c.mul(&k).unwrap()
            })
            .collect();
        ZpPoly { coeffs }
    }
}

/// Newton lift of an approximate root. Requires the strengthened condition
/// v(f(x0)) > 2 v(f'(x0)) at the working precision.
pub fn hensel_lift(f: &ZpPoly, x0: PadicInt, target_m: u32) -> Result<PadicInt> {
    let m = x0.m;
    if target_m > m {
        return Err(Error::PrecisionExceeded { requested: target_m, available: m });
    }
    let df = f.derivative();
    let k = df.eval(&x0).val();
    let v0 = f.eval(&x0).val();
    if v0 <= 2 * k {
        return Err(Error::ConditionFailed);
    }
    let mut x = x0;
    for _ in 0..(m + 2) {
        let fx = f.eval(&x);
        if fx.val() >= target_m {
            return Ok(x);
        }
        // x <- x - f(x) / f'(x); f'(x) = p^k * w with w a unit.
        let dfx = df.eval(&x);
        if dfx.val() != k {
            return Err(Error::LiftFailed);
        }
        let w = dfx.div_exact_p(k)?;
        let t = fx.div_exact_p(k)?;
        let delta = t.mul(&w.inv()?)?;
        x = x.sub(&delta)?;
    }
    Err(Error::LiftFailed)
}

/// Reduced fraction with positive denominator, printed as "n/d" ("n" when
/// the denominator is 1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        ExactRational(BigRational::new(num, den))
    }

    pub fn from_integer(n: i64) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        ExactRational(&self.0 + &other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        ExactRational(&self.0 * &other.0)
    }

    pub fn numerator(&self) -> BigInt {
        self.0.numer().clone()
    }

    pub fn denominator(&self) -> BigInt {
        self.0.denom().clone()
    }

    /// n / l^k as an exact rational.
    pub fn power_fraction(n: BigInt, l: u64, k: u64) -> Self {
        let mut den = BigInt::one();
        for _ in 0..k {
            den *= l;
        }
        ExactRational(BigRational::new(n, den))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        debug_assert!(self.0.denom().is_positive() || self.0.is_zero());
        if self.0.denom().is_one() {
            write!(fmt, "{}", self.0.numer())
        } else {
            write!(fmt, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

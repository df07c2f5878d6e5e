//! Finite-field arithmetic over F_q = F_p[y]/(g): elements, polynomials,
//! factorization, traces, Artin-Schreier classes, discriminant parity.

use crate::error::{Error, Result};
use crate::exact::pow_u64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- polynomials over F_p (plain u64 coefficient vectors, little-endian) ----

fn fp_trim(c: &mut Vec<u64>) {
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
    if c.is_empty() {
        c.push(0);
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(&mut out);
    out
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = (r[r.len() - 1] * lead_inv) % p;
        if c != 0 {
            for i in 0..=dm {
                let idx = k + i;
                r[idx] = (r[idx] + p - (c * m[i]) % p) % p;
            }
        }
        r.pop();
        fp_trim(&mut r);
        if r.len() == 1 && r[0] == 0 {
            break;
        }
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    // monic-normalize
    let li = mod_inv(*x.last().unwrap(), p);
    for c in &mut x {
        *c = (*c * li) % p;
    }
    x
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// x^(p^k) mod m over F_p, by repeated p-powering of x.
fn fp_frob_pow(k: u32, m: &[u64], p: u64) -> Vec<u64> {
    let mut x = vec![0u64, 1];
    x = fp_rem(&x, m, p);
    for _ in 0..k {
        x = fp_pow_mod(&x, p, m, p);
    }
    x
}

fn fp_pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = fp_rem(a, m, p);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(&fp_mul(&acc, &base, p), m, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    acc
}

fn fp_irreducible(m: &[u64], p: u64) -> bool {
    let f = m.len() - 1;
    if f == 0 {
        return false;
    }
    // x^(p^f) == x mod m, and gcd(x^(p^(f/r)) - x, m) == 1 for prime r | f
    let xpf = fp_frob_pow(f as u32, m, p);
    let xr = fp_rem(&[0, 1], m, p);
    if xpf != xr {
        return false;
    }
    let mut n = f;
    let mut r = 2;
    let mut primes = vec![];
    while n > 1 {
        if n % r == 0 {
            primes.push(r);
            while n % r == 0 {
                n /= r;
            }
        }
        r += 1;
    }
    for r in primes {
        let mut d = fp_frob_pow((f / r) as u32, m, p);
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = (d[1] + p - 1) % p;
        fp_trim(&mut d);
        let g = fp_gcd(&d, m, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

// ---- F_q descriptor and elements ----

/// Residue field F_q = F_p[y]/(modulus), q = p^f.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FqDesc {
    pub p: u64,
    pub f: usize,
    /// monic irreducible over F_p, little-endian, length f+1
    pub modulus: Vec<u64>,
}

/// Element of F_q in the power basis of the modulus; length-f coordinate
/// vector over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FqElement {
    pub c: Vec<u64>,
}

impl FqDesc {
    pub fn new(p: u64, f: usize, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if modulus.len() != f + 1 || modulus[f] % p != 1 {
            return Err(Error::ReducibleModulus(modulus.len().saturating_sub(1)));
        }
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if !fp_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus(f));
        }
        Ok(FqDesc { p, f, modulus })
    }

    /// Canonical field of size p^f: lexicographically least monic irreducible
    /// modulus (coefficients compared from the constant term up).
    pub fn canonical(p: u64, f: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let total = pow_u64(p, f as u32).ok_or(Error::TooLarge)?;
        for idx in 0..total {
            let mut m = Vec::with_capacity(f + 1);
            let mut t = idx;
            for _ in 0..f {
                m.push(t % p);
                t /= p;
            }
            m.push(1);
            if fp_irreducible(&m, p) {
                return Ok(FqDesc { p, f, modulus: m });
            }
        }
        Err(Error::ReducibleModulus(f))
    }

    pub fn q(&self) -> u64 {
        pow_u64(self.p, self.f as u32).expect("q overflow")
    }

    pub fn zero(&self) -> FqElement {
        FqElement { c: vec![0; self.f] }
    }

    pub fn one(&self) -> FqElement {
        self.from_scalar(1)
    }

    pub fn from_scalar(&self, s: u64) -> FqElement {
        let mut c = vec![0; self.f];
        c[0] = s % self.p;
        FqElement { c }
    }

    /// generator y of the power basis (for f = 1 this is the scalar 0 image,
    /// so only meaningful when f > 1)
    pub fn gen(&self) -> FqElement {
        let mut c = vec![0; self.f];
        if self.f > 1 {
            c[1] = 1;
        }
        FqElement { c }
    }

    pub fn is_zero(&self, a: &FqElement) -> bool {
        a.c.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement {
            c: a.c.iter().zip(&b.c).map(|(x, y)| (x + y) % self.p).collect(),
        }
    }

    pub fn sub(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement {
            c: a.c.iter().zip(&b.c).map(|(x, y)| (x + self.p - y) % self.p).collect(),
        }
    }

    pub fn neg(&self, a: &FqElement) -> FqElement {
        self.sub(&self.zero(), a)
    }

    pub fn scalar_mul(&self, s: u64, a: &FqElement) -> FqElement {
        FqElement { c: a.c.iter().map(|x| x * (s % self.p) % self.p).collect() }
    }

    pub fn mul(&self, a: &FqElement, b: &FqElement) -> FqElement {
        let prod = fp_mul(&a.c, &b.c, self.p);
        let r = fp_rem(&prod, &self.modulus, self.p);
        let mut c = r;
        c.resize(self.f, 0);
        FqElement { c }
    }

    pub fn pow(&self, a: &FqElement, mut e: u64) -> FqElement {
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

    pub fn inv(&self, a: &FqElement) -> Result<FqElement> {
        if self.is_zero(a) {
            return Err(Error::NonUnitInverse);
        }
        Ok(self.pow(a, self.q() - 2))
    }

    /// p-th root (Frobenius is bijective): a^(q/p).
    pub fn pth_root(&self, a: &FqElement) -> FqElement {
        self.pow(a, self.q() / self.p)
    }

    /// All q elements, in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<FqElement> {
        let q = self.q();
        (0..q)
            .map(|idx| {
                let mut c = Vec::with_capacity(self.f);
                let mut t = idx;
                for _ in 0..self.f {
                    c.push(t % self.p);
                    t /= self.p;
                }
                FqElement { c }
            })
            .collect()
    }

    pub fn random(&self, rng: &mut impl Rng) -> FqElement {
        FqElement { c: (0..self.f).map(|_| rng.gen_range(0..self.p)).collect() }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: &FqElement) -> u64 {
        let n = self.q() - 1;
        let mut ord = n;
        let mut m = n;
        let mut r = 2;
        while r * r <= m {
            if m % r == 0 {
                while m % r == 0 {
                    m /= r;
                }
                while ord % r == 0 && self.pow(a, ord / r) == self.one() {
                    ord /= r;
                }
            }
            r += 1;
        }
        if m > 1 {
            while ord % m == 0 && self.pow(a, ord / m) == self.one() {
                ord /= m;
            }
        }
        ord
    }
}

// ---- traces and Artin-Schreier ----

/// Trace of x relative to the subfield of degree sub_f: sum of the conjugates
/// x^(p^(sub_f * i)). The result lies in the subfield (as an element of F_q).
pub fn ff_trace(k: &FqDesc, x: &FqElement, sub_f: usize) -> Result<FqElement> {
    if sub_f == 0 || k.f % sub_f != 0 {
        return Err(Error::NotASubfield { sub_f, f: k.f });
    }
    let step = pow_u64(k.p, sub_f as u32).ok_or(Error::TooLarge)?;
    let mut acc = k.zero();
    let mut conj = x.clone();
    for _ in 0..(k.f / sub_f) {
        acc = k.add(&acc, &conj);
        conj = k.pow(&conj, step);
    }
    Ok(acc)
}

/// Absolute trace as a scalar in F_p.
pub fn abs_trace(k: &FqDesc, x: &FqElement) -> u64 {
    let t = ff_trace(k, x, 1).expect("sub_f = 1 always divides f");
    debug_assert!(t.c[1..].iter().all(|&v| v == 0), "trace not in prime field");
    t.c[0]
}

/// Solve y^p - y = c in F_q. Returns the lexicographically least solution,
/// or None when the absolute trace of c is nonzero.
pub fn artin_schreier_solve(k: &FqDesc, c: &FqElement) -> Option<FqElement> {
    if abs_trace(k, c) != 0 {
        return None;
    }
    // F_p-linear system: matrix of x -> x^p - x in the power basis.
    let f = k.f;
    let p = k.p;
    let mut cols = Vec::with_capacity(f);
    for j in 0..f {
        let mut basis = k.zero();
        basis.c[j] = 1;
        let img = k.sub(&k.pow(&basis, p), &basis);
        cols.push(img.c);
    }
    let particular = solve_linear_mod_p(&cols, &c.c, p)?;
    // kernel of the Artin-Schreier map is F_p (the constants); take the
    // least representative among particular + t*1.
    let mut best: Option<Vec<u64>> = None;
    for t in 0..p {
        let mut cand = particular.clone();
        cand[0] = (cand[0] + t) % p;
        let elem = FqElement { c: cand.clone() };
        if k.sub(&k.pow(&elem, p), &elem) == *c {
            match &best {
                Some(b) if *b <= cand => {}
                _ => best = Some(cand),
            }
        }
    }
    best.map(|c| FqElement { c })
}

/// Solve sum_j cols[j] * v[j] = b over F_p. Returns one solution.
fn solve_linear_mod_p(cols: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let rows = b.len();
    let ncols = cols.len();
    // augmented matrix, row-major
    let mut a = vec![vec![0u64; ncols + 1]; rows];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..rows {
            a[i][j] = col[i] % p;
        }
    }
    for i in 0..rows {
        a[i][ncols] = b[i] % p;
    }
    let mut pivot_cols = vec![];
    let mut row = 0;
    for col in 0..ncols {
        let piv = (row..rows).find(|&r| a[r][col] != 0);
        let Some(piv) = piv else { continue };
        a.swap(row, piv);
        let inv = mod_inv(a[row][col], p);
        for x in a[row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != row && a[r][col] != 0 {
                let factor = a[r][col];
                for cc in 0..=ncols {
                    a[r][cc] = (a[r][cc] + p - factor * a[row][cc] % p) % p;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    // consistency
    for r in row..rows {
        if a[r][..ncols].iter().all(|&x| x == 0) && a[r][ncols] != 0 {
            return None;
        }
    }
    let mut v = vec![0u64; ncols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        v[col] = a[r][ncols];
    }
    Some(v)
}

// ---- polynomials over F_q ----

/// Polynomial over F_q, little-endian, canonical (no trailing zeros; the zero
/// polynomial is an empty coefficient vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FqPoly {
    pub c: Vec<FqElement>,
}

impl FqPoly {
    pub fn new(k: &FqDesc, mut c: Vec<FqElement>) -> FqPoly {
        while let Some(last) = c.last() {
            if k.is_zero(last) {
                c.pop();
            } else {
                break;
            }
        }
        FqPoly { c }
    }

    pub fn zero() -> FqPoly {
        FqPoly { c: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn from_scalars(k: &FqDesc, scalars: &[u64]) -> FqPoly {
        FqPoly::new(k, scalars.iter().map(|&s| k.from_scalar(s)).collect())
    }

    pub fn x(k: &FqDesc) -> FqPoly {
        FqPoly::new(k, vec![k.zero(), k.one()])
    }

    pub fn constant(k: &FqDesc, a: FqElement) -> FqPoly {
        FqPoly::new(k, vec![a])
    }

    pub fn lc(&self) -> &FqElement {
        self.c.last().expect("lc of zero polynomial")
    }

    pub fn is_monic(&self, k: &FqDesc) -> bool {
        !self.is_zero() && *self.lc() == k.one()
    }
}

pub fn poly_add(k: &FqDesc, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let n = a.c.len().max(b.c.len());
    let mut c = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.c.get(i).cloned().unwrap_or_else(|| k.zero());
        let y = b.c.get(i).cloned().unwrap_or_else(|| k.zero());
        c.push(k.add(&x, &y));
    }
    FqPoly::new(k, c)
}

pub fn poly_sub(k: &FqDesc, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let n = a.c.len().max(b.c.len());
    let mut c = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.c.get(i).cloned().unwrap_or_else(|| k.zero());
        let y = b.c.get(i).cloned().unwrap_or_else(|| k.zero());
        c.push(k.sub(&x, &y));
    }
    FqPoly::new(k, c)
}

pub fn poly_mul(k: &FqDesc, a: &FqPoly, b: &FqPoly) -> FqPoly {
    if a.is_zero() || b.is_zero() {
        return FqPoly::zero();
    }
    let mut c = vec![k.zero(); a.c.len() + b.c.len() - 1];
    for (i, x) in a.c.iter().enumerate() {
        for (j, y) in b.c.iter().enumerate() {
            let t = k.mul(x, y);
            c[i + j] = k.add(&c[i + j], &t);
        }
    }
    FqPoly::new(k, c)
}

/// Euclidean division; divisor must be nonzero.
pub fn poly_divrem(k: &FqDesc, a: &FqPoly, b: &FqPoly) -> Result<(FqPoly, FqPoly)> {
    if b.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let db = b.c.len() - 1;
    let lcinv = k.inv(b.lc())?;
    let mut r = a.c.clone();
    let mut q = vec![k.zero(); a.c.len().saturating_sub(db)];
    while r.len() > db || (r.len() == db && db == 0 && !r.is_empty()) {
        if r.len() < db + 1 {
            break;
        }
        let top = r.last().unwrap().clone();
        if k.is_zero(&top) {
            r.pop();
            continue;
        }
        let shift = r.len() - 1 - db;
        let c = k.mul(&top, &lcinv);
        q[shift] = k.add(&q[shift], &c);
        for i in 0..=db {
            let t = k.mul(&c, &b.c[i]);
            r[shift + i] = k.sub(&r[shift + i], &t);
        }
        r.pop();
    }
    Ok((FqPoly::new(k, q), FqPoly::new(k, r)))
}

pub fn poly_rem(k: &FqDesc, a: &FqPoly, b: &FqPoly) -> FqPoly {
    poly_divrem(k, a, b).expect("nonzero divisor").1
}

pub fn poly_gcd(k: &FqDesc, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = poly_rem(k, &x, &y);
        x = y;
        y = r;
    }
    if x.is_zero() {
        return x;
    }
    let li = k.inv(x.lc()).unwrap();
    FqPoly::new(k, x.c.iter().map(|c| k.mul(c, &li)).collect())
}

pub fn poly_derivative(k: &FqDesc, a: &FqPoly) -> FqPoly {
    if a.c.len() <= 1 {
        return FqPoly::zero();
    }
    let c = a
        .c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, x)| k.scalar_mul(i as u64 % k.p, x))
        .collect();
    FqPoly::new(k, c)
}

pub fn poly_eval(k: &FqDesc, a: &FqPoly, x: &FqElement) -> FqElement {
    let mut acc = k.zero();
    for c in a.c.iter().rev() {
        acc = k.add(&k.mul(&acc, x), c);
    }
    acc
}

pub fn poly_pow_mod(k: &FqDesc, a: &FqPoly, mut e: u64, m: &FqPoly) -> FqPoly {
    let mut base = poly_rem(k, a, m);
    let mut acc = FqPoly::from_scalars(k, &[1]);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(k, &poly_mul(k, &acc, &base), m);
        }
        base = poly_rem(k, &poly_mul(k, &base, &base), m);
        e >>= 1;
    }
    acc
}

fn poly_monic(k: &FqDesc, a: &FqPoly) -> FqPoly {
    let li = k.inv(a.lc()).unwrap();
    FqPoly::new(k, a.c.iter().map(|c| k.mul(c, &li)).collect())
}

// ---- factorization ----

/// Full factorization into monic irreducibles with multiplicities,
/// deterministic output order (degree, then lexicographic coefficients).
pub fn ff_factor(k: &FqDesc, g: &FqPoly) -> Result<Vec<(FqPoly, usize)>> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if g.degree() == Some(0) {
        return Ok(vec![]);
    }
    let monic = poly_monic(k, g);
    let mut factors: Vec<(FqPoly, usize)> = vec![];
    for (w, mult) in squarefree_parts(k, &monic) {
        for irr in factor_squarefree(k, &w) {
            factors.push((irr, mult));
        }
    }
    factors.sort_by(|a, b| {
        (a.0.c.len(), &a.0.c).cmp(&(b.0.c.len(), &b.0.c))
    });
    Ok(factors)
}

/// Squarefree decomposition in characteristic p: list of (squarefree monic
/// part, multiplicity), parts pairwise coprime.
fn squarefree_parts(k: &FqDesc, g: &FqPoly) -> Vec<(FqPoly, usize)> {
    let mut out: Vec<(FqPoly, usize)> = vec![];
    collect_squarefree(k, g, 1, &mut out);
    out
}

fn collect_squarefree(k: &FqDesc, g: &FqPoly, outer_mult: usize, out: &mut Vec<(FqPoly, usize)>) {
    if g.degree() == Some(0) {
        return;
    }
    let dg = poly_derivative(k, g);
    if dg.is_zero() {
        // g is a p-th power: g(T) = h(T^p) with h coefficients the p-th roots
        let p = k.p as usize;
        let mut hc = vec![];
        for (i, c) in g.c.iter().enumerate() {
            if i % p == 0 {
                hc.push(k.pth_root(c));
            } else {
                debug_assert!(k.is_zero(c));
            }
        }
        let h = FqPoly::new(k, hc);
        collect_squarefree(k, &h, outer_mult * p, out);
        return;
    }
    let mut c = poly_gcd(k, g, &dg);
    let mut w = poly_divrem(k, g, &c).unwrap().0;
    // w = product of squarefree factors of multiplicity not divisible by p
    let mut i = 1usize;
    while w.degree() != Some(0) {
        let y = poly_gcd(k, &w, &c);
        let part = poly_divrem(k, &w, &y).unwrap().0;
        if part.degree() != Some(0) {
            out.push((part, outer_mult * i));
        }
        w = y;
        c = poly_divrem(k, &c, &w).unwrap().0;
        i += 1;
    }
    if c.degree() != Some(0) {
        // leftover multiplicities divisible by p
        collect_squarefree(k, &c, outer_mult, out);
    }
}

/// Factor a squarefree monic polynomial: distinct-degree then equal-degree.
fn factor_squarefree(k: &FqDesc, g: &FqPoly) -> Vec<FqPoly> {
    let mut out = vec![];
    let mut rest = g.clone();
    let q = k.q();
    let mut h = FqPoly::x(k);
    let mut d = 0usize;
    while rest.degree().map_or(false, |dg| dg > 0) {
        d += 1;
        if 2 * d > rest.degree().unwrap() {
            out.push(rest.clone());
            break;
        }
        h = poly_pow_mod(k, &h, q, &rest);
        let diff = poly_sub(k, &h, &FqPoly::x(k));
        let gd = poly_gcd(k, &diff, &rest);
        if gd.degree().map_or(false, |dd| dd > 0) {
            equal_degree_split(k, &gd, d, &mut out);
            rest = poly_divrem(k, &rest, &gd).unwrap().0;
            h = poly_rem(k, &h, &rest);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting with a fixed-seed PRNG for
/// reproducible runs.
fn equal_degree_split(k: &FqDesc, g: &FqPoly, d: usize, out: &mut Vec<FqPoly>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11ab);
    let mut stack = vec![g.clone()];
    while let Some(cur) = stack.pop() {
        let dc = cur.degree().unwrap();
        if dc == d {
            out.push(cur);
            continue;
        }
        loop {
            let h = random_poly(k, dc, &mut rng);
            if h.degree().is_none() {
                continue;
            }
            let split = if k.p == 2 {
                // gcd with the absolute trace of h in F_{2^(f*d)}
                let mut tr = poly_rem(k, &h, &cur);
                let mut pw = tr.clone();
                for _ in 1..(k.f * d) {
                    pw = poly_rem(k, &poly_mul(k, &pw, &pw), &cur);
                    tr = poly_add(k, &tr, &pw);
                }
                poly_gcd(k, &tr, &cur)
            } else {
                let e = (pow_u64(k.q(), d as u32).expect("q^d overflow") - 1) / 2;
                let hp = poly_pow_mod(k, &h, e, &cur);
                let hm1 = poly_sub(k, &hp, &FqPoly::from_scalars(k, &[1]));
                poly_gcd(k, &hm1, &cur)
            };
            if let Some(ds) = split.degree() {
                if ds > 0 && ds < dc {
                    let other = poly_divrem(k, &cur, &split).unwrap().0;
                    stack.push(split);
                    stack.push(other);
                    break;
                }
            }
        }
    }
}

fn random_poly(k: &FqDesc, max_deg: usize, rng: &mut impl Rng) -> FqPoly {
    let deg = rng.gen_range(1..=max_deg.max(1));
    let c = (0..=deg).map(|_| k.random(rng)).collect();
    FqPoly::new(k, c)
}

// ---- resultant and discriminant ----

/// Resultant of two polynomials over F_q via the Euclidean algorithm.
pub fn ff_resultant(k: &FqDesc, a: &FqPoly, b: &FqPoly) -> FqElement {
    let mut f = a.clone();
    let mut g = b.clone();
    let mut res = k.one();
    let mut sign_odd = false;
    loop {
        if g.is_zero() {
            return if f.degree() == Some(0) { if sign_odd { k.neg(&res) } else { res } } else { k.zero() };
        }
        if g.degree() == Some(0) {
            let df = f.degree().unwrap_or(0) as u64;
            let t = k.pow(&g.c[0], df);
            res = k.mul(&res, &t);
            return if sign_odd { k.neg(&res) } else { res };
        }
        let r = poly_rem(k, &f, &g);
        let df = f.degree().unwrap();
        let dg = g.degree().unwrap();
        let dr = r.degree().map_or(0, |d| d);
        // Res(f, g) = (-1)^(df*dg) * lc(g)^(df - dr) * Res(g, r)
        if df * dg % 2 == 1 {
            sign_odd = !sign_odd;
        }
        let t = k.pow(g.lc(), (df - dr) as u64);
        res = k.mul(&res, &t);
        if r.is_zero() {
            // Res(g, 0) = 0 unless deg g == 0, handled next loop
            f = g;
            g = FqPoly::zero();
        } else {
            f = g;
            g = r;
        }
    }
}

/// Discriminant of a monic polynomial: (-1)^(n(n-1)/2) Res(g, g').
pub fn ff_poly_disc(k: &FqDesc, g: &FqPoly) -> Result<FqElement> {
    let n = g.degree().ok_or(Error::ZeroPolynomial)?;
    if n < 1 {
        return Err(Error::ZeroPolynomial);
    }
    let dg = poly_derivative(k, g);
    if dg.is_zero() {
        return Ok(k.zero());
    }
    let r = ff_resultant(k, g, &dg);
    Ok(if (n * (n - 1) / 2) % 2 == 1 { k.neg(&r) } else { r })
}

// ---- discriminant parity ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscParity {
    pub even_degree_factor_count: usize,
    pub class_trivial: bool,
}

/// Parity of the number of even-degree irreducible factors of a separable
/// monic polynomial; for p odd the result is cross-checked against the
/// Euler-criterion square test on the discriminant.
pub fn disc_parity(k: &FqDesc, g: &FqPoly) -> Result<DiscParity> {
    let disc = ff_poly_disc(k, g)?;
    if k.is_zero(&disc) {
        return Err(Error::InseparablePolynomial);
    }
    let factors = ff_factor(k, g)?;
    let count: usize = factors
        .iter()
        .filter(|(f, _)| f.degree().unwrap() % 2 == 0)
        .map(|(_, m)| m)
        .sum();
    let class_trivial = count % 2 == 0;
    if k.p != 2 {
        let is_square = k.pow(&disc, (k.q() - 1) / 2) == k.one();
        if is_square != class_trivial {
            return Err(Error::OracleMismatch(format!(
                "factor parity {} vs Euler square test {}",
                class_trivial, is_square
            )));
        }
    }
    Ok(DiscParity { even_degree_factor_count: count, class_trivial })
}

//! The unit filtration U_n and its image in K^x/K^{xl}: l-th-power tests at
//! finite level, unit levels, graded dimension tables, the rho_n maps, and
//! brute-force unit-group structure.

use crate::error::{Error, Result};
use crate::exact::pow_u64;
use crate::finite::FqElement;
use crate::local::{LFElement, LocalFieldDesc, Val};
use serde::Serialize;
use std::collections::HashMap;

/// Level of a unit class: the deepest n with the class still an l-th power
/// mod pi^n, or Trivial when it is an l-th power outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Finite(u32),
    Trivial,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationRow {
    pub n: u32,
    pub graded_dim: u32,
    pub dim: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationTable {
    pub l: u64,
    pub entries: Vec<FiltrationRow>,
    pub total_dim: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupStructure {
    pub elementary_divisors: Vec<u64>,
    pub generators: Vec<LFElement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RhoRecord {
    pub lambda_n: u32,
    pub ker_order: u64,
    pub coker_order: u64,
}

/// Outcome of the greedy graded l-th-root solve: a witness xi and the level
/// it certifies (xi^l = u mod pi^level, with no continuation past a Finite
/// level).
#[derive(Debug, Clone)]
pub struct PowerSolve {
    pub witness: LFElement,
    pub level: Level,
}

// level comparisons against the fractional thresholds e1 and p*e1
fn below_pe1(kf: &LocalFieldDesc, j: u32) -> bool {
    (j as u64) * (kf.e1_den as u64) < kf.p * kf.e1_num as u64
}

fn at_pe1(kf: &LocalFieldDesc, j: u32) -> bool {
    (j as u64) * kf.e1_den as u64 == kf.p * kf.e1_num as u64
}

fn below_e1(kf: &LocalFieldDesc, n: u32) -> bool {
    (n as u64) * (kf.e1_den as u64) < kf.e1_num as u64
}

fn at_e1(kf: &LocalFieldDesc, n: u32) -> bool {
    (n as u64) * kf.e1_den as u64 == kf.e1_num as u64
}

/// First level at which the greedy solve, having arrived, continues forever:
/// floor(p*e1) + 1.
pub fn trivial_threshold(kf: &LocalFieldDesc) -> u32 {
    (kf.p as u32 * kf.e1_num) / kf.e1_den + 1
}

/// Solve x^p - eps_bar*x = c in the residue field (the graded form of the
/// p-th power map at the critical level), returning the lexicographically
/// least solution.
fn h_solve(kf: &LocalFieldDesc, c: &FqElement) -> Option<FqElement> {
    let k = &kf.residue_field;
    let p = kf.p;
    let f = kf.f;
    // columns of the F_p-linear map on coordinates
    let cols: Vec<Vec<u64>> = (0..f)
        .map(|j| {
            let mut b = k.zero();
            b.c[j] = 1;
            let img = k.sub(&k.pow(&b, p), &k.mul(&kf.eps_bar, &b));
            img.c.clone()
        })
        .collect();
    let (part, null) = gaussian_solve(&cols, &c.c, p)?;
    // kernel dimension is at most 1; pick the lexicographically least lift
    let mut best = part.clone();
    if let Some(k0) = null {
        for t in 1..p {
            let cand: Vec<u64> = part
                .iter()
                .zip(&k0)
                .map(|(&x, &y)| (x + t * y) % p)
                .collect();
            if cand < best {
                best = cand;
            }
        }
    }
    Some(FqElement { c: best })
}

/// Solve M x = b over F_p where M is given by columns; returns a particular
/// solution and one null-space vector if the kernel is nontrivial.
fn gaussian_solve(cols: &[Vec<u64>], b: &[u64], p: u64) -> Option<(Vec<u64>, Option<Vec<u64>>)> {
    let n = cols.len();
    let rows = b.len();
    // augmented matrix, row-major
    let mut m: Vec<Vec<u64>> = (0..rows)
        .map(|r| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[r] % p).collect();
            row.push(b[r] % p);
            row
        })
        .collect();
    let inv_mod = |a: u64| -> u64 {
        // p prime, a != 0
        let mut r = 1u64;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        r
    };
    let mut pivot_col_of_row = vec![];
    let mut row = 0usize;
    for col in 0..n {
        let Some(pr) = (row..rows).find(|&r| m[r][col] % p != 0) else {
            continue;
        };
        m.swap(row, pr);
        let inv = inv_mod(m[row][col]);
        for x in m[row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != row && m[r][col] != 0 {
                let factor = m[r][col];
                for cix in 0..=n {
                    let t = factor * m[row][cix] % p;
                    m[r][cix] = (m[r][cix] + p - t) % p;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    // consistency
    for r in row..rows {
        if m[r][n] % p != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; n];
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        x[pc] = m[r][n];
    }
    // one null-space vector from the first free column, if any
    let free = (0..n).find(|c| !pivot_col_of_row.contains(c));
    let null = free.map(|fc| {
        let mut v = vec![0u64; n];
        v[fc] = 1;
        for (r, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = (p - m[r][fc] % p) % p;
        }
        v
    });
    Some((x, null))
}

/// Greedy graded l-th-root solve for a unit u, aiming at level target.
pub fn solve_lth_power(
    kf: &LocalFieldDesc,
    l: u64,
    u: &LFElement,
    target: u32,
) -> Result<PowerSolve> {
    if !kf.is_unit(u) {
        return Err(Error::NotAUnit);
    }
    if target > kf.prec_pi {
        return Err(Error::PrecisionTooLow { given: kf.prec_pi, needed: target });
    }
    let k = &kf.residue_field;
    if l != kf.p {
        // prime-to-p: everything is decided by the residue; 1-units have
        // exact l-th roots by Newton since l is invertible
        if k.q() > (1 << 16) {
            return Err(Error::TooLarge);
        }
        let ubar = kf.residue(u)?;
        let sbar = k
            .elements()
            .into_iter()
            .filter(|s| !k.is_zero(s))
            .find(|s| k.pow(s, l) == ubar);
        let Some(sbar) = sbar else {
            // not even an l-th power in the residue field
            return Ok(PowerSolve { witness: kf.one(), level: Level::Finite(0) });
        };
        // Newton on x^l - u from the residue root (derivative l x^(l-1) unit)
        let mut poly = vec![kf.neg(u)];
        for _ in 1..l {
            poly.push(kf.zero());
        }
        poly.push(kf.one());
        let xi = kf.newton_root(&poly, &kf.lift_residue(&sbar))?;
        return Ok(PowerSolve { witness: xi, level: Level::Trivial });
    }
    // l = p: Teichmueller part first (p-th power map is bijective on k^x)
    let p = kf.p;
    let ubar = kf.residue(u)?;
    let sbar = k.pth_root(&ubar);
    let mut xi = kf.teichmuller(&sbar)?;
    let threshold = trivial_threshold(kf);
    let mut last_j = 0u32;
    loop {
        let cur = kf.mul(u, &kf.inv_unit(&kf.pow(&xi, p))?);
        let diff = kf.sub(&cur, &kf.one());
        let j = match kf.valuation(&diff) {
            Val::AtLeast(v) => return Ok(finish(xi, v, threshold)),
            Val::Exact(v) => v,
        };
        if j >= target {
            return Ok(finish(xi, j, threshold));
        }
        if j <= last_j && last_j > 0 {
            return Err(Error::LiftFailed);
        }
        last_j = j;
        let cbar = kf.residue(&kf.div_pi_pow(&diff, j)?)?;
        // find i and a with (1 + a pi^i)^p cancelling c pi^j
        let (i, abar) = if below_pe1(kf, j) {
            if j % p as u32 != 0 {
                // no graded preimage: the level is exactly j
                return Ok(finish(xi, j, threshold));
            }
            (j / p as u32, k.pth_root(&cbar))
        } else if at_pe1(kf, j) {
            // critical level: a^p - eps_bar a = c
            match h_solve(kf, &cbar) {
                Some(a) => (kf.e1_num, a),
                None => return Ok(finish(xi, j, threshold)),
            }
        } else {
            // j > p e1: leading term of (1+a pi^(j-e))^p is -eps a pi^j,
            // and dividing cur by it leaves (c + eps a) pi^j, so a = -c/eps
            let a = k.neg(&k.mul(&cbar, &k.inv(&kf.eps_bar)?));
            (j - kf.e as u32, a)
        };
        let w = kf.add(&kf.one(), &kf.mul(&kf.lift_residue(&abar), &kf.pow(&kf.pi(), i as u64)));
        xi = kf.mul(&xi, &w);
    }
}

fn finish(xi: LFElement, reached: u32, threshold: u32) -> PowerSolve {
    if reached >= threshold {
        PowerSolve { witness: xi, level: Level::Trivial }
    } else {
        PowerSolve { witness: xi, level: Level::Finite(reached) }
    }
}

/// Is u an l-th power in (o/pi^n)^x?
pub fn is_lth_power_mod(kf: &LocalFieldDesc, l: u64, u: &LFElement, n: u32) -> Result<bool> {
    if !kf.is_unit(u) {
        return Err(Error::NotAUnit);
    }
    if n < 1 || n > kf.prec_pi {
        return Err(Error::PrecisionTooLow { given: kf.prec_pi, needed: n.max(1) });
    }
    let solve = solve_lth_power(kf, l, u, n)?;
    Ok(match solve.level {
        Level::Trivial => true,
        Level::Finite(m) => m >= n,
    })
}

/// Level of the unit u in the l-filtration.
pub fn unit_level(kf: &LocalFieldDesc, l: u64, u: &LFElement) -> Result<Level> {
    if !kf.is_unit(u) {
        return Err(Error::NotAUnit);
    }
    let solve = solve_lth_power(kf, l, u, trivial_threshold(kf))?;
    Ok(solve.level)
}

/// Graded dimension of bar-U_n / bar-U_{n+1} for l = p.
fn graded_dim_p(kf: &LocalFieldDesc, n: u32) -> u32 {
    if n == 0 {
        // k^x has no p-torsion quotient
        return 0;
    }
    if below_pe1(kf, n) {
        if n % kf.p as u32 == 0 {
            0
        } else {
            kf.f as u32
        }
    } else if at_pe1(kf, n) {
        if kf.has_mu_l(kf.p) {
            1
        } else {
            0
        }
    } else {
        0
    }
}

pub fn filtration_dims(kf: &LocalFieldDesc, l: u64) -> FiltrationTable {
    if l == kf.p {
        let top = trivial_threshold(kf);
        let graded: Vec<u32> = (0..=top).map(|n| graded_dim_p(kf, n)).collect();
        let mut entries = Vec::with_capacity(graded.len());
        for n in 0..=top {
            let dim: u32 = (n..=top).map(|m| graded[m as usize]).sum();
            entries.push(FiltrationRow { n, graded_dim: graded[n as usize], dim });
        }
        let dim_u1 = entries[1].dim;
        // K^x/K^xp: one dimension for the valuation, plus bar-U_1
        let total_dim = 1 + dim_u1;
        FiltrationTable { l, entries, total_dim }
    } else {
        // e1 = 0: only the residue level matters
        let d0 = if (kf.q() - 1) % l == 0 { 1 } else { 0 };
        let entries = vec![
            FiltrationRow { n: 0, graded_dim: d0, dim: d0 },
            FiltrationRow { n: 1, graded_dim: 0, dim: 0 },
        ];
        FiltrationTable { l, entries, total_dim: 1 + d0 }
    }
}

/// Kernel and cokernel of the graded p-th power map rho_n, by brute force
/// over the residue field.
pub fn rho_analysis(kf: &LocalFieldDesc, n: u32) -> Result<RhoRecord> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let k = &kf.residue_field;
    if k.q() > (1 << 16) {
        return Err(Error::TooLarge);
    }
    let p = kf.p;
    let lambda_n = (p as u32 * n).min(n + kf.e as u32);
    let map = |a: &FqElement| -> FqElement {
        if below_e1(kf, n) {
            k.pow(a, p)
        } else if at_e1(kf, n) {
            k.sub(&k.pow(a, p), &k.mul(&kf.eps_bar, a))
        } else {
            k.neg(&k.mul(&kf.eps_bar, a))
        }
    };
    let mut ker = 0u64;
    let mut image = std::collections::HashSet::new();
    for a in k.elements() {
        let img = map(&a);
        if k.is_zero(&img) {
            ker += 1;
        }
        image.insert(img.c.clone());
    }
    Ok(RhoRecord {
        lambda_n,
        ker_order: ker,
        coker_order: k.q() / image.len() as u64,
    })
}

/// All residues mod pi^n that are units, as elements at full precision
/// (exact digit lifts). Guarded at q^n <= 2^20.
pub fn enumerate_units(kf: &LocalFieldDesc, n: u32) -> Result<Vec<LFElement>> {
    if kf.q().checked_pow(n).is_none_or(|s| s > (1 << 20)) {
        return Err(Error::TooLarge);
    }
    // digit bounds: layer i coordinate modulus p^ceil((n-i)/e)
    let e = kf.e as u32;
    let mut radices: Vec<u64> = vec![];
    let mut slots: Vec<(usize, usize)> = vec![]; // (layer, coord)
    for i in 0..kf.e {
        let mi = if n > i as u32 { (n - i as u32).div_ceil(e) } else { 0 };
        let pk = pow_u64(kf.p, mi).ok_or(Error::TooLarge)?;
        for j in 0..kf.f {
            if pk > 1 {
                radices.push(pk);
                slots.push((i, j));
            }
        }
    }
    let mut out = vec![];
    let mut counter = vec![0u64; radices.len()];
    loop {
        let mut x = kf.zero();
        for (s, &(i, j)) in slots.iter().enumerate() {
            x.c[i][j] = counter[s];
        }
        if x.c[0].iter().any(|&v| v % kf.p != 0) {
            out.push(kf.canon(x));
        }
        // increment mixed-radix counter
        let mut pos = 0usize;
        loop {
            if pos == counter.len() {
                return Ok(out);
            }
            counter[pos] += 1;
            if counter[pos] < radices[pos] {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
    }
}

/// Structure of (o/pi^n)^x by exhaustive computation.
pub fn unit_group_structure(kf: &LocalFieldDesc, n: u32) -> Result<GroupStructure> {
    let units = enumerate_units(kf, n)?;
    let g = units.len() as u64;
    if g <= 1 {
        return Ok(GroupStructure { elementary_divisors: vec![], generators: vec![] });
    }
    // order of each element
    let factors = factorize(g);
    let order_of = |x: &LFElement| -> u64 {
        let mut ord = g;
        for &(r, k) in &factors {
            for _ in 0..k {
                if kf.eq_at(&kf.pow(x, ord / r), &kf.one(), n) {
                    ord /= r;
                } else {
                    break;
                }
            }
        }
        ord
    };
    let orders: Vec<u64> = units.iter().map(|x| order_of(x)).collect();
    // per-prime cyclic exponents from counts of x with x^(r^k) = 1
    let mut per_prime: Vec<(u64, Vec<u32>)> = vec![];
    for &(r, kmax) in &factors {
        let mut counts = vec![1u64]; // c_0 = 1
        for k in 1..=kmax {
            let rk = pow_u64(r, k).ok_or(Error::TooLarge)?;
            let c = orders
                .iter()
                .filter(|&&o| {
                    // order divides r^k iff o is an r-power <= r^k
                    rk % o == 0
                })
                .count() as u64;
            counts.push(c);
        }
        // d_k = number of cyclic r-factors with exponent >= k
        let mut exps: Vec<u32> = vec![];
        for k in 1..=kmax as usize {
            let ratio = counts[k] / counts[k - 1];
            let mut d = 0u32;
            let mut t = ratio;
            while t > 1 {
                t /= r;
                d += 1;
            }
            exps.push(d);
        }
        // convert "count with exponent >= k" into the exponent multiset
        let mut multiset: Vec<u32> = vec![];
        if let Some(&d1) = exps.first() {
            multiset = vec![0; d1 as usize];
            for (k, &dk) in exps.iter().enumerate() {
                for item in multiset.iter_mut().take(dk as usize) {
                    *item = (k + 1) as u32;
                }
            }
        }
        multiset.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push((r, multiset));
    }
    // invariant factors: align per-prime exponents, largest first
    let nfac = per_prime.iter().map(|(_, m)| m.len()).max().unwrap_or(0);
    let mut divisors: Vec<u64> = vec![];
    for i in 0..nfac {
        let mut v = 1u64;
        for (r, m) in &per_prime {
            if let Some(&a) = m.get(i) {
                v *= pow_u64(*r, a).ok_or(Error::TooLarge)?;
            }
        }
        divisors.push(v);
    }
    divisors.sort_unstable();
    // generators: a true basis, found greedily from the largest divisor down
    let mut closure: HashMap<Vec<u64>, LFElement> = HashMap::new();
    closure.insert(kf.key_at(&kf.one(), n), kf.one());
    let mut gens: Vec<LFElement> = vec![];
    for &v in divisors.iter().rev() {
        let mut found = false;
        for (x, &o) in units.iter().zip(&orders) {
            if o != v {
                continue;
            }
            // does <closure, x> have size |closure| * v?
            let mut new_cl = HashMap::new();
            let mut pow_x = kf.one();
            let mut ok = true;
            'grow: for j in 0..v {
                if j > 0 && closure.contains_key(&kf.key_at(&pow_x, n)) {
                    ok = false;
                    break 'grow;
                }
                for b in closure.values() {
                    let y = kf.mul(b, &pow_x);
                    new_cl.insert(kf.key_at(&y, n), y);
                }
                pow_x = kf.mul(&pow_x, x);
            }
            if ok {
                closure = new_cl;
                gens.push(x.clone());
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::OracleMismatch(
                "no independent generator for an invariant factor".into(),
            ));
        }
    }
    gens.reverse();
    Ok(GroupStructure { elementary_divisors: divisors, generators: gens })
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = vec![];
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

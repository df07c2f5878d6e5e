//! Command implementations for the llab binary: field-spec ingestion,
//! JSON report emission, and reproduction of the worked unit-square,
//! discriminant-class, and unramified-extension examples.

use clap::{Parser, Subcommand};
use llab_core::disc::{
    arch_disc_sign, disc_class_via_lift, relative_disc_pipeline, splitting_type, unramified_disc,
};
use llab_core::elliptic::{disc_class, realize_disc, weierstrass_invariants};
use llab_core::filtration::{
    enumerate_units, trivial_threshold, unit_group_structure, unit_level, Level,
};
use llab_core::finite::{disc_parity, FqDesc, FqPoly};
use llab_core::kummer::{
    classify_line, count_by_break, galois_filtration_m, kummer_pairing, mass_contribution,
    unramified_line_generator, UniformiserRecipe,
};
use llab_core::local::{lf_make_with_modulus, LFElement, LocalFieldDesc};
use llab_core::Error;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub f: usize,
    #[serde(default)]
    pub unram_modulus: Option<Vec<u64>>,
    pub eisenstein: Vec<Vec<i64>>,
    #[serde(default)]
    pub prec_pi: Option<u32>,
}

/// Build a field descriptor from the JSON schema; LLAB_PREC overrides the
/// default precision when the spec leaves it unset.
pub fn parse_field_spec(text: &str) -> Result<LocalFieldDesc, CmdError> {
    let spec: FieldSpec = serde_json::from_str(text)
        .map_err(|e| CmdError::domain(format!("field spec is not valid JSON: {e}")))?;
    let prec = spec.prec_pi.or_else(|| {
        std::env::var("LLAB_PREC").ok().and_then(|s| s.parse().ok())
    });
    lf_make_with_modulus(spec.p, spec.f, spec.unram_modulus, &spec.eisenstein, prec)
        .map_err(CmdError::from)
}

fn load_field(path: &str) -> Result<LocalFieldDesc, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::domain(format!("cannot read {path}: {e}")))?;
    parse_field_spec(&text)
}

pub struct CmdError {
    pub code: i32,
    pub detail: String,
}

impl CmdError {
    fn domain(detail: impl Into<String>) -> Self {
        CmdError { code: 2, detail: detail.into() }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionTooLow { .. }
            | Error::PrecisionUnrepresentable
            | Error::PrecisionExceeded { .. }
            | Error::PrecisionExhausted => 3,
            _ => 2,
        };
        CmdError { code, detail: e.to_string() }
    }
}

fn mu_elt(kf: &LocalFieldDesc, int: i128, pi_pow: u32) -> LFElement {
    kf.mul(&kf.from_int(int), &kf.pow(&kf.pi(), pi_pow as u64))
}

/// Short printable form: nonzero pi-layers with their residue coordinates.
fn element_digits(kf: &LocalFieldDesc, a: &LFElement) -> Vec<Value> {
    let c = kf.canon(a.clone());
    c.c.iter()
        .enumerate()
        .filter(|(_, u)| u.iter().any(|&x| x != 0))
        .map(|(i, u)| json!([i, u]))
        .collect()
}

fn level_json(l: &Level) -> Value {
    match l {
        Level::Finite(m) => json!(m),
        Level::Trivial => json!("trivial"),
    }
}

/// Recompute a classify report's certificates from the witnesses alone.
pub fn verify_report(
    kf: &LocalFieldDesc,
    l: u64,
    mu: &LFElement,
    report: &llab_core::kummer::LineReport,
) -> Result<bool, Error> {
    let pe1 = trivial_threshold(kf) - 1;
    match &report.uniformiser_recipe {
        UniformiserRecipe::BaseUniformiser => {
            Ok(report.is_unramified && report.t == -1 && report.v_disc == 0)
        }
        UniformiserRecipe::RootOfGenerator { generator } => {
            let v = kf.valuation(generator).exact();
            let t_ok = if l == kf.p {
                report.t == pe1 as i64
            } else {
                report.t == 0
            };
            Ok(v == Some(1)
                && t_ok
                && report.v_disc == (l - 1) * (1 + report.t as u64)
                && !report.is_unramified)
        }
        UniformiserRecipe::XiMinusRoot { x, y, xi } => {
            // the witness certifies the level: v(xi^l - mu') = m with mu'
            // the unit part of mu
            let v = kf.valuation(mu).exact().ok_or(Error::ZeroInput)?;
            let unit = kf.div_pi_pow(mu, v)?;
            let diff = kf.sub(&kf.pow(xi, l), &unit);
            let m_ok = kf.valuation(&diff).exact() == Some(report.m);
            Ok(m_ok
                && report.m as i64 * *x as i64 + l as i64 * y == 1
                && report.t == (pe1 - report.m) as i64
                && report.v_disc == (l - 1) * (1 + report.t as u64))
        }
    }
}

#[derive(Parser)]
#[command(name = "llab", about = "Kummer lines, unit filtrations, and local discriminants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Invariants of a field descriptor
    FieldInfo {
        #[arg(long)]
        field: String,
    },
    /// Level of a unit in the filtration of K^x / K^xl
    UnitLevel {
        #[arg(long)]
        field: String,
        #[arg(long)]
        l: u64,
        #[arg(long, allow_hyphen_values = true)]
        mu: i128,
        #[arg(long, default_value_t = 0)]
        pi_pow: u32,
    },
    /// Full report on the Kummer line of mu
    Classify {
        #[arg(long)]
        field: String,
        #[arg(long)]
        l: u64,
        #[arg(long, allow_hyphen_values = true)]
        mu: i128,
        #[arg(long, default_value_t = 0)]
        pi_pow: u32,
        /// recompute certificates from the emitted witnesses
        #[arg(long)]
        verify: bool,
    },
    /// Split / inert / ramified behaviour of mu
    Splitting {
        #[arg(long)]
        field: String,
        #[arg(long)]
        l: u64,
        #[arg(long, allow_hyphen_values = true)]
        mu: i128,
        #[arg(long, default_value_t = 0)]
        pi_pow: u32,
    },
    /// Ramified-line census by break
    Census {
        #[arg(long)]
        field: String,
        #[arg(long)]
        l: u64,
    },
    /// Mass-formula contribution as an exact rational
    Mass {
        #[arg(long)]
        field: String,
        #[arg(long)]
        l: u64,
    },
    /// Explicit pairing of a deep unit with the Frobenius power a
    Pairing {
        #[arg(long)]
        field: String,
        #[arg(long, conflicts_with = "generator", allow_hyphen_values = true)]
        eta: Option<i128>,
        /// pair the canonical unramified-line generator
        #[arg(long)]
        generator: bool,
        #[arg(long, default_value_t = 1)]
        a: u64,
    },
    /// Ramification filtration of the maximal elementary abelian extension
    FiltrationM {
        #[arg(long)]
        field: String,
    },
    /// Relative discriminant of a flattened tower (JSON chain file)
    Pipeline {
        #[arg(long)]
        chain: String,
    },
    /// Discriminant data of a polynomial over a finite field
    FfDisc {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: usize,
        /// little-endian scalar coefficients, comma separated
        #[arg(long)]
        poly: String,
    },
    /// Good-reduction cubic with prescribed unit discriminant
    EcRealize {
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: i128,
    },
    /// Discriminant class of an integral cubic
    EcClass {
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a1: i128,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a2: i128,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a3: i128,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a4: i128,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a6: i128,
    },
    /// Replay a worked example: ex47, ex48, or ex50
    Reproduce { name: String },
    /// Elementary divisors of (o / pi^n o)^x
    UnitGroup {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: u32,
    },
    /// Sign of an archimedean discriminant
    ArchSign {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        h: u32,
    },
}

#[derive(Debug, Deserialize)]
struct ChainLink {
    field: FieldSpec,
    l: u64,
    mu: i128,
    #[serde(default)]
    pi_pow: u32,
}

fn field_info_json(kf: &LocalFieldDesc) -> Value {
    json!({
        "p": kf.p,
        "f": kf.f,
        "e": kf.e,
        "d": kf.d,
        "q": kf.q(),
        "e1": format!("{}/{}", kf.e1_num, kf.e1_den),
        "prec_pi": kf.prec_pi,
        "has_mu_p": kf.has_mu_l(kf.p),
    })
}

pub fn run(cli: Cli) -> Result<Value, CmdError> {
    match cli.command {
        Cmd::FieldInfo { field } => {
            let kf = load_field(&field)?;
            Ok(json!({"command": "field-info", "result": field_info_json(&kf)}))
        }
        Cmd::UnitLevel { field, l, mu, pi_pow } => {
            let kf = load_field(&field)?;
            let elt = mu_elt(&kf, mu, pi_pow);
            let lvl = unit_level(&kf, l, &elt)?;
            Ok(json!({
                "command": "unit-level",
                "inputs": {"l": l, "mu": mu, "pi_pow": pi_pow},
                "result": level_json(&lvl),
                "precision_used": kf.prec_pi,
            }))
        }
        Cmd::Classify { field, l, mu, pi_pow, verify } => {
            let kf = load_field(&field)?;
            let elt = mu_elt(&kf, mu, pi_pow);
            let report = classify_line(&kf, l, &elt)?;
            let verified = if verify {
                Some(verify_report(&kf, l, &elt, &report)?)
            } else {
                None
            };
            Ok(json!({
                "command": "classify",
                "inputs": {"l": l, "mu": mu, "pi_pow": pi_pow},
                "result": report,
                "verified": verified,
                "precision_used": report.precision_used,
            }))
        }
        Cmd::Splitting { field, l, mu, pi_pow } => {
            let kf = load_field(&field)?;
            let t = splitting_type(&kf, l, &mu_elt(&kf, mu, pi_pow))?;
            Ok(json!({
                "command": "splitting",
                "inputs": {"l": l, "mu": mu, "pi_pow": pi_pow},
                "result": format!("{t:?}"),
            }))
        }
        Cmd::Census { field, l } => {
            let kf = load_field(&field)?;
            let c = count_by_break(&kf, l)?;
            Ok(json!({
                "command": "census",
                "inputs": {"l": l},
                "result": {"rows": c.rows, "total": c.total},
            }))
        }
        Cmd::Mass { field, l } => {
            let kf = load_field(&field)?;
            let m = mass_contribution(&kf, l)?;
            Ok(json!({
                "command": "mass",
                "inputs": {"l": l},
                "result": m.to_string(),
            }))
        }
        Cmd::Pairing { field, eta, generator, a } => {
            let kf = load_field(&field)?;
            let eta = if generator {
                unramified_line_generator(&kf, kf.p)?
            } else {
                kf.from_int(eta.ok_or_else(|| CmdError::domain("--eta or --generator required"))?)
            };
            let r = kummer_pairing(&kf, &eta, a)?;
            Ok(json!({
                "command": "pairing",
                "inputs": {"a": a, "eta": element_digits(&kf, &eta)},
                "result": {"exponent": r.exponent, "value": element_digits(&kf, &r.value)},
                "precision_used": kf.prec_pi,
            }))
        }
        Cmd::FiltrationM { field } => {
            let kf = load_field(&field)?;
            let g = galois_filtration_m(&kf)?;
            Ok(json!({
                "command": "filtration-m",
                "result": {"upper_breaks": g.upper_breaks, "v_disc_m": g.v_disc_m},
            }))
        }
        Cmd::Pipeline { chain } => {
            let text = std::fs::read_to_string(&chain)
                .map_err(|e| CmdError::domain(format!("cannot read {chain}: {e}")))?;
            let links: Vec<ChainLink> =
                serde_json::from_str(&text).map_err(|e| CmdError::domain(e.to_string()))?;
            let mut fields = Vec::with_capacity(links.len());
            for link in &links {
                let prec = link.field.prec_pi;
                fields.push(
                    lf_make_with_modulus(
                        link.field.p,
                        link.field.f,
                        link.field.unram_modulus.clone(),
                        &link.field.eisenstein,
                        prec,
                    )
                    .map_err(CmdError::from)?,
                );
            }
            let chain_data: Vec<(&LocalFieldDesc, u64, LFElement)> = links
                .iter()
                .zip(&fields)
                .map(|(link, kf)| (kf, link.l, mu_elt(kf, link.mu, link.pi_pow)))
                .collect();
            let r = relative_disc_pipeline(&chain_data)?;
            Ok(json!({
                "command": "pipeline",
                "result": {"total_v_base": r.total_v_base, "links": r.links},
            }))
        }
        Cmd::FfDisc { p, f, poly } => {
            let k = FqDesc::canonical(p, f).map_err(CmdError::from)?;
            let coeffs: Vec<u64> = poly
                .split(',')
                .map(|s| s.trim().parse::<u64>().map_err(|e| CmdError::domain(e.to_string())))
                .collect::<Result<_, _>>()?;
            let g = FqPoly::new(&k, coeffs.iter().map(|&c| k.from_scalar(c)).collect());
            let par = disc_parity(&k, &g)?;
            let lift_class = if p == 2 { Some(disc_class_via_lift(&k, &g)?) } else { None };
            Ok(json!({
                "command": "ff-disc",
                "inputs": {"p": p, "f": f, "poly": coeffs},
                "result": {
                    "even_degree_factor_count": par.even_degree_factor_count,
                    "class_trivial": par.class_trivial,
                    "lift_class": lift_class,
                },
            }))
        }
        Cmd::EcRealize { field, delta } => {
            let kf = load_field(&field)?;
            let c = realize_disc(&kf, &kf.from_int(delta))?;
            Ok(json!({
                "command": "ec-realize",
                "inputs": {"delta": delta},
                "result": {
                    "a1": element_digits(&kf, &c.a1),
                    "a2": element_digits(&kf, &c.a2),
                    "a3": element_digits(&kf, &c.a3),
                    "a4": element_digits(&kf, &c.a4),
                    "a6": element_digits(&kf, &c.a6),
                    "d": element_digits(&kf, &c.d),
                },
                "precision_used": kf.prec_pi,
            }))
        }
        Cmd::EcClass { field, a1, a2, a3, a4, a6 } => {
            let kf = load_field(&field)?;
            let c = weierstrass_invariants(
                &kf,
                &kf.from_int(a1),
                &kf.from_int(a2),
                &kf.from_int(a3),
                &kf.from_int(a4),
                &kf.from_int(a6),
            )?;
            let cls = disc_class(&kf, &c)?;
            Ok(json!({
                "command": "ec-class",
                "inputs": {"a1": a1, "a2": a2, "a3": a3, "a4": a4, "a6": a6},
                "result": {
                    "valuation": cls.valuation,
                    "representative": element_digits(&kf, &cls.representative),
                },
            }))
        }
        Cmd::Reproduce { name } => reproduce(&name),
        Cmd::UnitGroup { field, n } => {
            let kf = load_field(&field)?;
            let g = unit_group_structure(&kf, n)?;
            let order: u64 = g.elementary_divisors.iter().product();
            Ok(json!({
                "command": "unit-group",
                "inputs": {"n": n},
                "result": {"elementary_divisors": g.elementary_divisors, "order": order},
            }))
        }
        Cmd::ArchSign { n, h } => {
            let sign = arch_disc_sign(n, h)?;
            Ok(json!({"command": "arch-sign", "inputs": {"n": n, "h": h}, "result": sign}))
        }
    }
}

fn q2_cbrt2() -> Result<LocalFieldDesc, Error> {
    lf_make_with_modulus(2, 1, None, &[vec![-2], vec![0], vec![0], vec![1]], None)
}

/// Replay the worked examples and fail loudly on any deviation.
fn reproduce(name: &str) -> Result<Value, CmdError> {
    match name {
        // squares of (o/4o)^x over Q_2(cbrt 2): exactly four classes
        "ex47" => {
            let kf = q2_cbrt2()?;
            let depth = 6; // 4 = pi^6
            let mut squares: Vec<Vec<u64>> = vec![];
            for u in enumerate_units(&kf, depth)? {
                let sq = kf.mul(&u, &u);
                let key = kf.key_at(&sq, depth);
                if !squares.contains(&key) {
                    squares.push(key);
                }
            }
            squares.sort();
            let expect_elts = [
                kf.one(),
                // 1 + pi^2 + pi^4
                kf.add(&kf.add(&kf.one(), &kf.pow(&kf.pi(), 2)), &kf.pow(&kf.pi(), 4)),
                // 1 + pi^2 + pi^5
                kf.add(&kf.add(&kf.one(), &kf.pow(&kf.pi(), 2)), &kf.pow(&kf.pi(), 5)),
                // 1 + pi^4 + pi^5
                kf.add(&kf.add(&kf.one(), &kf.pow(&kf.pi(), 4)), &kf.pow(&kf.pi(), 5)),
            ];
            let mut expect: Vec<Vec<u64>> =
                expect_elts.iter().map(|e| kf.key_at(e, depth)).collect();
            expect.sort();
            if squares != expect {
                return Err(CmdError::domain("square classes do not match the expected four"));
            }
            Ok(json!({
                "command": "reproduce",
                "inputs": {"name": "ex47"},
                "result": ["1", "1+pi^2+pi^4", "1+pi^2+pi^5", "1+pi^4+pi^5"],
                "checks": ["squares of (o/4o)^x match the four listed classes exactly"],
            }))
        }
        // unramified discriminant classes over Q_2(cbrt 2): {1, 1 + pi^6}
        "ex48" => {
            let kf = q2_cbrt2()?;
            let odd = unramified_disc(&kf, 3)?;
            if !odd.trivial {
                return Err(CmdError::domain("odd-degree class is not trivial"));
            }
            let even = unramified_disc(&kf, 2)?;
            let canonical = kf.add(&kf.one(), &kf.pow(&kf.pi(), 6));
            // 1 + 4*omega = 5 = 1 + pi^6 exactly here (pi^3 = 2)
            if !kf.eq_at(&even.representative, &canonical, 7) {
                return Err(CmdError::domain("even-degree class is not 1 + pi^6 mod pi^7"));
            }
            if unit_level(&kf, 2, &canonical)? != Level::Finite(6) {
                return Err(CmdError::domain("1 + pi^6 should sit at level 6, not be a square"));
            }
            Ok(json!({
                "command": "reproduce",
                "inputs": {"name": "ex48"},
                "result": ["1", "1+pi^6"],
                "checks": [
                    "odd degree gives the trivial class",
                    "even degree gives 1 + pi^6 mod pi^7, a non-square of level 6",
                ],
            }))
        }
        // K = Q_2(sqrt 3): K(sqrt -1) | K is unramified, level of -1 is 4
        "ex50" => {
            let kf = lf_make_with_modulus(2, 1, None, &[vec![-2], vec![2], vec![1]], None)?;
            let lvl = unit_level(&kf, 2, &kf.from_int(-1))?;
            if lvl != Level::Finite(4) {
                return Err(CmdError::domain(format!("level of -1 is {lvl:?}, expected 4")));
            }
            let rep = classify_line(&kf, 2, &kf.from_int(-1))?;
            if !rep.is_unramified {
                return Err(CmdError::domain("K(sqrt -1) | K should be unramified"));
            }
            Ok(json!({
                "command": "reproduce",
                "inputs": {"name": "ex50"},
                "result": {"level": 4, "is_unramified": true},
                "checks": ["unit level of -1 is 4 = 2 e1", "the line of -1 is the unramified one"],
            }))
        }
        other => Err(CmdError::domain(format!("unknown example {other}"))),
    }
}

pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            0
        }
        Err(e) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({"error": e.code, "detail": e.detail}))
                    .expect("serializable")
            );
            e.code
        }
    }
}

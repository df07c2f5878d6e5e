use thiserror::Error;

/// Crate-wide error type. Variant names follow the operation contracts.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero input where a nonzero value is required")]
    ZeroInput,
    #[error("Hensel precondition failed: v(f(x0)) must exceed 2*v(f'(x0))")]
    ConditionFailed,
    #[error("requested precision {requested} exceeds available precision {available}")]
    PrecisionExceeded { requested: u32, available: u32 },
    #[error("operands have mismatched modulus (p, M)")]
    ModulusMismatch,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("inseparable polynomial (vanishing discriminant)")]
    InseparablePolynomial,
    #[error("modulus of degree {0} is not irreducible over F_p")]
    ReducibleModulus(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("sub_f = {sub_f} does not divide f = {f}")]
    NotASubfield { sub_f: usize, f: usize },
    #[error("gcd({n}, {p}) != 1")]
    NotCoprime { n: u64, p: u64 },
    #[error("polynomial is not Eisenstein over the unramified ring")]
    NotEisenstein,
    #[error("precision {given} below the required minimum {needed}")]
    PrecisionTooLow { given: u32, needed: u32 },
    #[error("coefficient modulus p^M does not fit in 63 bits")]
    PrecisionUnrepresentable,
    #[error("elements belong to different fields")]
    MixedFields,
    #[error("inverse of a non-unit")]
    NonUnitInverse,
    #[error("operand is not a unit")]
    NotAUnit,
    #[error("no precision left after valuation shift")]
    PrecisionExhausted,
    #[error("residue is zero")]
    ZeroResidue,
    #[error("mu_p criterion disagrees with the root-finding oracle: {detail}")]
    CriterionOracleMismatch { detail: String },
    #[error("no torsion of the requested order: phi(p^n) does not divide e")]
    NoSuchTorsion,
    #[error("Newton iteration failed to converge")]
    LiftFailed,
    #[error("enumeration size exceeds the brute-force bound")]
    TooLarge,
    #[error("Kummer hypothesis fails: K does not contain the l-th roots of unity")]
    KummerHypothesisFails,
    #[error("generator is an l-th power at precision: not a line")]
    NotALine,
    #[error("eta is not deep enough: v(1 - eta) < p*e1")]
    NotDeepEnough,
    #[error("s does not divide t'")]
    NotDivisible,
    #[error("the two generators do not span distinct nontrivial lines")]
    DegenerateLines,
    #[error("chain link {link}: {detail}")]
    ChainMismatch { link: usize, detail: String },
    #[error("cubic is singular at precision (d = 0)")]
    SingularCubic,
    #[error("change of variables requires a unit scale u")]
    NonUnitScale,
    #[error("v(d) >= 12: minimality not certified without Tate's algorithm")]
    MinimalityNotCertified,
    #[error("point search failed on the auxiliary curve")]
    PointSearchFailed,
    #[error("internal oracle mismatch: {0}")]
    OracleMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

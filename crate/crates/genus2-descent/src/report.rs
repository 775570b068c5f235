//! Deterministic structured reports for the command-line tool, and
//! regeneration of the three reference tables against checked-in data.
//!
//! Every report is a single self-describing JSON document with stable key
//! order (struct declaration order); a plain-text renderer sits on top in
//! the binary. Timing is kept out of the document unless explicitly
//! requested, so byte-identical output only depends on the inputs and the
//! tool version.

use crate::algebra::{prime_splitting, primes_up_to, Splitting};
use crate::counting::jacobian_order;
use crate::descent::{generators_of, DescentOutcome};
use crate::family::{bad_primes, family_q, family_r, specialize, FamilyError};
use crate::quadrank::{
    decide_rank_over_l, m_search, representatives_per_l, LCandidate, QuadRankError,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no witness prime below {bound} for l = {l}")]
    NoWitnessPrime { l: u64, bound: u64 },
    #[error("row for l = {l}: expected a conclusive rank-4 witness, got rank {rank}")]
    InconclusiveRow { l: u64, rank: u32 },
    #[error("table deserialisation failed: {0}")]
    BadTable(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    QuadRank(#[from] QuadRankError),
    #[error(transparent)]
    Count(#[from] crate::counting::CountError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// Envelope for one command run.
#[derive(Serialize)]
pub struct Report<I: Serialize, R: Serialize> {
    pub command: String,
    pub inputs: I,
    pub results: R,
    pub log: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// Reduced rational as a stable string, "a" or "a/b".
pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse "a" or "a/b".
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts.next()?.trim().parse().ok()?;
    match parts.next() {
        None => Some(BigRational::from(num)),
        Some(d) => {
            let den: BigInt = d.trim().parse().ok()?;
            if den == BigInt::from(0) {
                None
            } else {
                Some(BigRational::new(num, den))
            }
        }
    }
}

/// Human-readable polynomial rendering, highest degree first.
pub fn poly_display(p: &crate::poly::RatPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let one = BigRational::from(BigInt::from(1));
    let mut parts = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let coeff = fmt_rational(c);
        let term = match i {
            0 => coeff,
            1 if c == &one => "X".to_string(),
            1 => format!("{coeff}·X"),
            _ if c == &one => format!("X^{i}"),
            _ => format!("{coeff}·X^{i}"),
        };
        parts.push(term);
    }
    parts.join(" + ").replace("+ -", "- ")
}

/// One reference-table row: a prime l with its witness point and the

/// auxiliary prime whose jacobian order certifies the torsion bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub l: u64,
    pub m: String,
    pub x: String,
    pub y_coeff: String,
    pub p: u64,
    pub jacobian_order: u64,
}

/// The reference block for one family member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyTable {
    pub description: String,
    pub n: u32,
    pub q: i64,
    pub r: i64,
    /// Quartic factor of the first model, lowest degree first.
    pub f4: Vec<i64>,
    /// Inner quartic of the second model (the overall factor 3 removed).
    pub f4_prime_inner: Vec<i64>,
    pub rows: Vec<TableRow>,
}

/// The auxiliary prime for a table row: the smallest good prime other
/// than 3, split in ℚ(√l), whose jacobian order is coprime to 3 (then its
/// gcd with the order 36 at p = 3 is automatically a power of 2).
pub fn witness_prime(n: u32, l: u64) -> Result<(u64, u64), ReportError> {
    let pair = specialize(n, false)?;
    let bad = bad_primes(&pair)?;
    const BOUND: u64 = 200;
    for p in primes_up_to(BOUND) {
        if p <= 3 || bad.contains(&p) || p == l {
            continue;
        }
        if prime_splitting(p, l)? != Splitting::Split {
            continue;
        }
        let order = jacobian_order(&pair.c, p)?.jacobian_order;
        if order % 3 != 0 {
            return Ok((p, order));
        }
    }
    Err(ReportError::NoWitnessPrime { l, bound: BOUND })
}

/// Regenerate the full reference block for one n: models, q, r, and one
/// row per suitable prime l (bounds 10/10 on m, l capped), each row
/// carrying a verified rank-4 witness.
pub fn generate_table(n: u32, l_max: u64) -> Result<FamilyTable, ReportError> {
    let pair = specialize(n, false)?;
    let to_i64 = |q: &BigRational| q.numer().try_into().expect("family coefficients fit i64");
    let f4: Vec<i64> = pair.c.f4.coeffs().iter().map(to_i64).collect();
    let three = BigRational::from(BigInt::from(3));
    let f4_prime_inner: Vec<i64> = pair
        .c_prime
        .f4
        .coeffs()
        .iter()
        .map(|c| to_i64(&(c / &three)))
        .collect();
    let mut rows = Vec::new();
    let candidates = representatives_per_l(&m_search(n, 10, 10)?);
    for cand in candidates.iter().filter(|c| c.l <= l_max) {
        let (decision, _torsion) = decide_rank_over_l(n, cand.l, cand)?;
        if !decision.conclusive || decision.rank != 4 {
            return Err(ReportError::InconclusiveRow {
                l: cand.l,
                rank: decision.rank,
            });
        }
        let (p, order) = witness_prime(n, cand.l)?;
        rows.push(TableRow {
            l: cand.l,
            m: fmt_rational(&cand.m),
            x: fmt_rational(&cand.x),
            y_coeff: fmt_rational(&cand.y_coeff),
            p,
            jacobian_order: order,
        });
    }
    Ok(FamilyTable {
        description: format!("reference data for the family member n = {n}"),
        n,
        q: family_q(n),
        r: family_r(n),
        f4,
        f4_prime_inner,
        rows,
    })
}

/// Field-level differences between two table blocks; empty means equal.
pub fn diff_tables(expected: &FamilyTable, actual: &FamilyTable) -> Vec<String> {
    let mut diffs = Vec::new();
    let mut check = |field: &str, e: &dyn std::fmt::Debug, a: &dyn std::fmt::Debug| {
        let (es, as_) = (format!("{e:?}"), format!("{a:?}"));
        if es != as_ {
            diffs.push(format!("n{}.{field}: expected {es}, got {as_}", expected.n));
        }
    };
    check("n", &expected.n, &actual.n);
    check("q", &expected.q, &actual.q);
    check("r", &expected.r, &actual.r);
    check("f4", &expected.f4, &actual.f4);
    check(
        "f4_prime_inner",
        &expected.f4_prime_inner,
        &actual.f4_prime_inner,
    );
    if expected.rows.len() != actual.rows.len() {
        diffs.push(format!(
            "n{}.rows: expected {} rows, got {}",
            expected.n,
            expected.rows.len(),
            actual.rows.len()
        ));
    }
    for (i, (e, a)) in expected.rows.iter().zip(actual.rows.iter()).enumerate() {
        for (field, es, as_) in [
            ("l", e.l.to_string(), a.l.to_string()),
            ("m", e.m.clone(), a.m.clone()),
            ("x", e.x.clone(), a.x.clone()),
            ("y_coeff", e.y_coeff.clone(), a.y_coeff.clone()),
            ("p", e.p.to_string(), a.p.to_string()),
            (
                "jacobian_order",
                e.jacobian_order.to_string(),
                a.jacobian_order.to_string(),
            ),
        ] {
            if es != as_ {
                diffs.push(format!(
                    "n{}.rows[{i}].{field}: expected {es}, got {as_}",
                    expected.n
                ));
            }
        }
    }
    diffs
}

/// Checked-in reference tables.
pub const TABLE_N0: &str = include_str!("../fixtures/tables/n0.json");
pub const TABLE_N6: &str = include_str!("../fixtures/tables/n6.json");
pub const TABLE_N9: &str = include_str!("../fixtures/tables/n9.json");

pub fn reference_table(n: u32) -> Result<FamilyTable, ReportError> {
    let raw = match n {
        0 => TABLE_N0,
        6 => TABLE_N6,
        9 => TABLE_N9,
        _ => {
            return Err(ReportError::BadTable(format!(
                "no reference table for n = {n}"
            )))
        }
    };
    serde_json::from_str(raw).map_err(|e| ReportError::BadTable(e.to_string()))
}

// ---------------------------------------------------------------------------
// Serializable views of the module outputs
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct DescentView {
    pub rank: u32,
    pub rank_upper: u32,
    pub exact: bool,
    pub group_i: Vec<String>,
    pub group_i_generators: Vec<String>,
    pub group_i_prime: Vec<String>,
    pub group_i_prime_generators: Vec<String>,
}

impl DescentView {
    pub fn new(outcome: &DescentOutcome) -> Self {
        let fmt_set = |s: &std::collections::BTreeSet<crate::algebra::SquareClass>| {
            s.iter().map(|c| c.to_string()).collect::<Vec<_>>()
        };
        DescentView {
            rank: outcome.rank.rank_lower,
            rank_upper: outcome.rank.rank_upper,
            exact: outcome.rank.exact,
            group_i: fmt_set(&outcome.state.bounds_i.lower),
            group_i_generators: generators_of(&outcome.state.bounds_i.lower)
                .iter()
                .map(|c| c.to_string())
                .collect(),
            group_i_prime: fmt_set(&outcome.state.bounds_i_prime.lower),
            group_i_prime_generators: generators_of(&outcome.state.bounds_i_prime.lower)
                .iter()
                .map(|c| c.to_string())
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct CandidateView {
    pub l: u64,
    pub m: String,
    pub x: String,
    pub y_coeff: String,
}

impl CandidateView {
    pub fn new(c: &LCandidate) -> Self {
        CandidateView {
            l: c.l,
            m: fmt_rational(&c.m),
            x: fmt_rational(&c.x),
            y_coeff: fmt_rational(&c.y_coeff),
        }
    }
}

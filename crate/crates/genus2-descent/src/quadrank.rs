//! Mordell-Weil ranks over real quadratic fields L = ℚ(√l): the rank is 4
//! when the jacobian has a point over L no multiple of which is rational,
//! and 2 otherwise.
//!
//! The machinery: an m-search produces curve points over ℚ(√l) from
//! rational m via x = -4m/(2m²-2m+1), for which F₂(x) is automatically
//! minus a rational square, so l appears whenever -F₄(x) is a square
//! times a prime. The torsion of J over L is pinned to {0, P₀} by a gcd
//! of jacobian orders at two good primes split in L, the 2-torsion survey
//! over L, and the order-4 exclusion (r is not a square in L). A witness
//! point P then certifies rank 4 exactly when P - σ(P) avoids {0, P₀}.

use crate::algebra::{
    is_prime_u64, prime_splitting, primes_up_to, squarefree_part, AlgebraError, Splitting,
};
use crate::counting::{jacobian_order, CountError};
use crate::family::{bad_primes, family_r, specialize, FamilyError};
use crate::field::{rat_int, rational_sqrt, Quad};
use crate::jacobian::{
    curve_over_quad, galois_conjugate, kernel_class_quadratic, two_torsion_classes,
    BalancedDivisor, Curve, JacobianError, TorsionField,
};
use crate::poly::{PolyError, Polynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadRankError {
    #[error("l = {l} fails the field conditions for n = {n}: {reason}")]
    ConditionsFailed { n: u32, l: u64, reason: String },
    #[error("torsion over ℚ(√{l}) undecided: no witness pair of split primes up to {bound}")]
    TorsionUndecided { l: u64, bound: u64 },
    #[error("2-torsion over ℚ(√{l}) is larger than the kernel class")]
    ExtraTwoTorsion { l: u64 },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A candidate prime l with its witness point [(x, y_coeff·√l) - ∞⁺].
#[derive(Clone, Debug, PartialEq)]
pub struct LCandidate {
    pub n: u32,
    pub l: u64,
    pub m: BigRational,
    pub x: BigRational,
    /// Positive; the point has y = y_coeff·√l.
    pub y_coeff: BigRational,
}

/// Diagnostics of the field conditions on l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LConditions {
    pub ok: bool,
    pub l_is_prime: bool,
    pub l_mod_8: u64,
    pub two_inert: bool,
    pub r_inert: bool,
    pub diagnostics: Vec<String>,
}

/// l must be prime with 2 and r inert in ℚ(√l). Two being inert forces
/// l ≡ 5 (mod 8), which gives l ≡ 1 (mod 4) for free.
pub fn check_l_conditions(n: u32, l: u64) -> Result<LConditions, QuadRankError> {
    let mut diagnostics = Vec::new();
    let l_is_prime = is_prime_u64(l);
    if !l_is_prime {
        diagnostics.push(format!("l = {l} is not prime"));
    }
    let l_mod_8 = l % 8;
    let mut two_inert = false;
    let mut r_inert = false;
    if l_is_prime && l % 4 == 1 {
        two_inert = prime_splitting(2, l)? == Splitting::Inert;
        if !two_inert {
            diagnostics.push(format!("2 is not inert: l ≡ {l_mod_8} (mod 8)"));
        }
        let r_abs = family_r(n).unsigned_abs();
        r_inert = prime_splitting(r_abs, l)? == Splitting::Inert;
        if !r_inert {
            diagnostics.push(format!("|r| = {r_abs} is not inert in ℚ(√{l})"));
        }
    } else if l_is_prime {
        diagnostics.push(format!(
            "l ≡ {} (mod 4), field discriminant unsuitable",
            l % 4
        ));
    }
    Ok(LConditions {
        ok: l_is_prime && l % 4 == 1 && two_inert && r_inert,
        l_is_prime,
        l_mod_8,
        two_inert,
        r_inert,
        diagnostics,
    })
}

/// Scan reduced m = a/b with |a| ≤ num_bound, 1 ≤ b ≤ den_bound; keep
/// those where -F₄(-4m/(2m²-2m+1)) is a square times a prime l passing
/// the field conditions. Runs the grid in parallel and returns candidates
/// sorted by (l, m).
///
/// The identity F₂(x) = -(2(2m²-1)/(2m²-2m+1))² makes F₂(x)·F₄(x) the
/// exact square y_coeff²·l, which is verified for every emitted candidate.
pub fn m_search(n: u32, num_bound: i64, den_bound: i64) -> Result<Vec<LCandidate>, QuadRankError> {
    let pair = specialize(n, false)?;
    let f2 = pair.c.f2.clone();
    let f4 = pair.c.f4.clone();
    let grid: Vec<(i64, i64)> = (1..=den_bound)
        .flat_map(|b| (-num_bound..=num_bound).map(move |a| (a, b)))
        .filter(|(a, b)| a.gcd(b) == 1)
        .collect();
    let mut out: Vec<LCandidate> = grid
        .into_par_iter()
        .map(|(a, b)| -> Result<Option<LCandidate>, QuadRankError> {
            let m = BigRational::new(BigInt::from(a), BigInt::from(b));
            let denom = rat_int(2) * &m * &m - rat_int(2) * &m + rat_int(1);
            let x = rat_int(-4) * &m / &denom;
            let z = -f4.evaluate(&x);
            if !z.is_positive() {
                return Ok(None);
            }
            // square-free part: a residual the factoriser cannot certify is
            // necessarily a square-free composite, hence never a prime l
            let class = match squarefree_part(&z) {
                Ok(c) => c,
                Err(AlgebraError::FactorBound(_)) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            let Some(l) = class.rep_i64().and_then(|v| v.to_u64()) else {
                return Ok(None);
            };
            if !is_prime_u64(l) || !check_l_conditions(n, l)?.ok {
                return Ok(None);
            }
            // y² = F₂(x)F₄(x) = y_coeff²·l, exactly
            let y2_over_l = f2.evaluate(&x) * f4.evaluate(&x) / rat_int(l as i64);
            let y_coeff =
                rational_sqrt(&y2_over_l).expect("F₂(x) is minus a square, so F₂F₄/l is a square");
            debug_assert!({
                let two_m2_minus_1 = rat_int(2) * &m * &m - rat_int(1);
                let expected = -(rat_int(2) * &two_m2_minus_1 / &denom).pow(2);
                f2.evaluate(&x) == expected
            });
            Ok(Some(LCandidate {
                n,
                l,
                m,
                x,
                y_coeff,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    out.sort_by(|p, q| (p.l, &p.m).cmp(&(q.l, &q.m)));
    Ok(out)
}

/// One representative candidate per prime l: the height-minimal m
/// (smallest |numerator| + |denominator|, ties by m). The substitution
/// sends m and 1/(2m) to the same x, so most primes are found twice.
pub fn representatives_per_l(candidates: &[LCandidate]) -> Vec<LCandidate> {
    let height =
        |m: &BigRational| -> (BigInt, BigRational) { (m.numer().abs() + m.denom(), m.clone()) };
    let mut best: Vec<LCandidate> = Vec::new();
    for cand in candidates {
        match best.iter_mut().find(|b| b.l == cand.l) {
            None => best.push(cand.clone()),
            Some(b) => {
                if height(&cand.m) < height(&b.m) {
                    *b = cand.clone();
                }
            }
        }
    }
    best.sort_by_key(|c| c.l);
    best
}

/// Torsion of J over L = ℚ(√l), decided by the gcd bound at two good
/// split primes, the 2-torsion survey over L, and the order-4 exclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionOverL {
    pub l: u64,
    /// Always 2 when decided: the group is {0, P₀}.
    pub order: u32,
    pub witness: (u64, u64),
    pub witness_orders: (u64, u64),
    pub order_four_exclusion: String,
}

const SPLIT_PRIME_BOUND: u64 = 100;

/// Good primes split in ℚ(√l), smallest first, with 3 leading when 3 | n.
fn split_witness_primes(n: u32, l: u64) -> Result<Vec<u64>, QuadRankError> {
    let pair = specialize(n, false)?;
    let bad = bad_primes(&pair)?;
    let mut out = Vec::new();
    for p in primes_up_to(SPLIT_PRIME_BOUND) {
        if bad.contains(&p) || p == l || p == 2 {
            continue;
        }
        if prime_splitting(p, l)? == Splitting::Split {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn torsion_over_l(n: u32, l: u64) -> Result<TorsionOverL, QuadRankError> {
    let conditions = check_l_conditions(n, l)?;
    if !conditions.ok {
        return Err(QuadRankError::ConditionsFailed {
            n,
            l,
            reason: conditions.diagnostics.join("; "),
        });
    }
    let pair = specialize(n, false)?;

    // (i) two split primes whose jacobian orders have a 2-power gcd
    let split_primes = split_witness_primes(n, l)?;
    let mut computed: Vec<(u64, u64)> = Vec::new();
    let mut witness = None;
    'outer: for &p in &split_primes {
        let order = jacobian_order(&pair.c, p)?.jacobian_order;
        for &(p0, o0) in &computed {
            if (o0.gcd(&order)).is_power_of_two() {
                witness = Some(((p0, o0), (p, order)));
                break 'outer;
            }
        }
        computed.push((p, order));
    }
    let Some(((p1, o1), (p2, o2))) = witness else {
        return Err(QuadRankError::TorsionUndecided {
            l,
            bound: SPLIT_PRIME_BOUND,
        });
    };

    // (ii) the only 2-torsion class defined over L is the kernel class
    let survey = two_torsion_classes(&pair.c, TorsionField::Quadratic(l as i64))?;
    let defined = survey.defined();
    let kernel_only = defined.len() == 1
        && defined[0].is_rational()
        && defined[0].u_plain.as_ref() == Some(&kernel_class_quadratic(&pair.c));
    if !kernel_only {
        return Err(QuadRankError::ExtraTwoTorsion { l });
    }

    // (iii) no point of order 4: the kernel class maps to [r], which is
    // not a square in L
    let r = family_r(n);
    let order_four_exclusion = if r < 0 {
        format!("r = {r} < 0 cannot be a square in a real field")
    } else {
        // r is a prime inert in L, in particular distinct from l
        format!("r = {r} is inert in ℚ(√{l}), hence not a square there")
    };

    Ok(TorsionOverL {
        l,
        order: 2,
        witness: (p1, p2),
        witness_orders: (o1, o2),
        order_four_exclusion,
    })
}

/// Outcome of the rank dichotomy over ℚ(√l).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDecision {
    pub rank: u32,
    /// True when a witness point certified rank 4; false means this
    /// candidate was inconclusive and the rank stays at 2 unless another
    /// candidate resolves it.
    pub conclusive: bool,
    pub detail: String,
}

/// The dichotomy on one witness point P: rank 4 exactly when P - σ(P)
/// avoids the torsion {0, P₀}.
pub fn decide_rank_over_l(
    n: u32,
    l: u64,
    candidate: &LCandidate,
) -> Result<(RankDecision, TorsionOverL), QuadRankError> {
    let torsion = torsion_over_l(n, l)?;
    let pair = specialize(n, false)?;
    let d = l as i64;
    let curve = curve_over_quad(&pair.c, d)?;
    let x = Quad::from_rational(candidate.x.clone(), d);
    let y = Quad::new(
        BigRational::from(BigInt::from(0)),
        candidate.y_coeff.clone(),
        d,
    );
    let point = curve.point_minus_infinity(x, y, true)?;
    let decision = shift_decision(&pair.c, &curve, &point, d)?;
    Ok((decision, torsion))
}

/// Shared decision core: with torsion pinned to {0, P₀}, a point whose
/// difference from its conjugate leaves {0, P₀} has no multiple defined
/// over ℚ.
pub fn shift_decision(
    model: &crate::family::GenusTwoCurve,
    curve: &Curve<Quad>,
    point: &BalancedDivisor<Quad>,
    d: i64,
) -> Result<RankDecision, QuadRankError> {
    let p0 = curve.divisor(
        kernel_class_quadratic(model).map(|c| Quad::from_rational(c.clone(), d)),
        Polynomial::zero(),
        0,
    )?;
    let conj = galois_conjugate(curve, point);
    let t = curve.sub(point, &conj)?;
    if curve.is_identity(&t) {
        return Ok(RankDecision {
            rank: 2,
            conclusive: false,
            detail: "P - σ(P) is trivial: the point is rational".into(),
        });
    }
    if t == p0 {
        return Ok(RankDecision {
            rank: 2,
            conclusive: false,
            detail: "P - σ(P) is the kernel class: some multiple of P is rational".into(),
        });
    }
    Ok(RankDecision {
        rank: 4,
        conclusive: true,
        detail: "P - σ(P) is non-torsion, so no multiple of P is rational".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn find(cands: &[LCandidate], l: u64) -> &LCandidate {
        cands.iter().find(|c| c.l == l).unwrap()
    }

    #[test]
    fn the_substitution_is_two_to_one() {
        // m and 1/(2m) give the same x, hence the same point and prime
        let c0 = m_search(0, 10, 10).unwrap();
        let hits: Vec<&LCandidate> = c0.iter().filter(|c| c.l == 71341).collect();
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].m, rat(1, 4));
        assert_eq!(hits[1].m, rat_int(2));
        assert_eq!(hits[0].x, hits[1].x);
        assert_eq!(hits[0].y_coeff, hits[1].y_coeff);
    }

    #[test]
    fn field_conditions() {
        assert!(check_l_conditions(0, 13).unwrap().ok);
        let c17 = check_l_conditions(0, 17).unwrap();
        assert!(!c17.ok && !c17.two_inert); // 17 ≡ 1 (mod 8): 2 splits
        assert!(check_l_conditions(9, 157).unwrap().ok);
        assert!(!check_l_conditions(0, 15).unwrap().l_is_prime);
        // 5 ≡ 1 (mod 4) with 2 inert, but r = -2087 must also be inert
        let c5 = check_l_conditions(0, 5).unwrap();
        assert_eq!(c5.ok, c5.r_inert);
    }

    #[test]
    fn m_search_reproduces_the_tables() {
        let c0 = representatives_per_l(&m_search(0, 10, 10).unwrap());
        let ls: Vec<u64> = c0.iter().map(|c| c.l).filter(|&l| l <= 999_983).collect();
        assert_eq!(ls, vec![13, 47269, 71341]);
        let r1 = find(&c0, 13);
        assert_eq!(
            (&r1.m, &r1.x, &r1.y_coeff),
            (&rat_int(0), &rat_int(0), &rat_int(2))
        );
        let r2 = find(&c0, 47269);
        assert_eq!(r2.m, rat_int(-3));
        assert_eq!(r2.x, rat(12, 25));
        assert_eq!(r2.y_coeff, rat(238, 15625));
        let r3 = find(&c0, 71341);
        assert_eq!(r3.m, rat_int(2));
        assert_eq!(r3.x, rat(-8, 5));
        assert_eq!(r3.y_coeff, rat(14, 125));

        let c6 = representatives_per_l(&m_search(6, 10, 10).unwrap());
        let ls6: Vec<u64> = c6.iter().map(|c| c.l).filter(|&l| l <= 999_983).collect();
        assert_eq!(ls6, vec![658069]);
        let r = find(&c6, 658069);
        assert_eq!(r.m, rat(-1, 3));
        assert_eq!(r.x, rat(12, 17));
        assert_eq!(r.y_coeff, rat(14, 4913));

        let c9 = representatives_per_l(&m_search(9, 10, 10).unwrap());
        let ls9: Vec<u64> = c9.iter().map(|c| c.l).filter(|&l| l <= 999_983).collect();
        assert_eq!(ls9, vec![157, 679741]);
        assert_eq!(find(&c9, 157).m, rat_int(0));
        assert_eq!(find(&c9, 157).y_coeff, rat_int(2));
        assert_eq!(find(&c9, 679741).m, rat_int(2));
        assert_eq!(find(&c9, 679741).x, rat(-8, 5));
        assert_eq!(find(&c9, 679741).y_coeff, rat(14, 125));
    }

    #[test]
    fn every_candidate_satisfies_the_point_identity() {
        let pair = specialize(0, false).unwrap();
        for cand in m_search(0, 10, 10).unwrap() {
            let lhs = pair.c.f2.evaluate(&cand.x) * pair.c.f4.evaluate(&cand.x);
            let rhs = &cand.y_coeff * &cand.y_coeff * rat_int(cand.l as i64);
            assert_eq!(lhs, rhs, "l = {}", cand.l);
        }
    }

    #[test]
    fn torsion_over_l_values() {
        let t = torsion_over_l(0, 13).unwrap();
        assert_eq!(t.order, 2);
        assert_eq!(t.witness, (3, 17));
        assert_eq!(t.witness_orders, (36, 400));
        let t2 = torsion_over_l(0, 47269).unwrap();
        assert_eq!(t2.witness, (3, 5));
        assert_eq!(t2.witness_orders, (36, 62));
        let t9 = torsion_over_l(9, 679741).unwrap();
        assert_eq!(t9.witness, (3, 5));
        assert_eq!(t9.witness_orders, (36, 28));
        // conditions failure propagates
        assert!(matches!(
            torsion_over_l(0, 17),
            Err(QuadRankError::ConditionsFailed { .. })
        ));
    }

    #[test]
    fn rank_four_for_the_first_table_row() {
        let cands = m_search(0, 10, 10).unwrap();
        let cand = find(&cands, 13);
        let (decision, torsion) = decide_rank_over_l(0, 13, cand).unwrap();
        assert_eq!(decision.rank, 4);
        assert!(decision.conclusive);
        assert_eq!(torsion.order, 2);
    }

    #[test]
    fn rational_points_are_inconclusive() {
        // (1, 4) on C lifts to ℚ(√13); its conjugate difference is trivial
        let pair = specialize(0, false).unwrap();
        let curve = curve_over_quad(&pair.c, 13).unwrap();
        let p = curve
            .point_minus_infinity(
                Quad::from_rational(rat_int(1), 13),
                Quad::from_rational(rat_int(4), 13),
                true,
            )
            .unwrap();
        let d = shift_decision(&pair.c, &curve, &p, 13).unwrap();
        assert_eq!(d.rank, 2);
        assert!(!d.conclusive);
    }
}

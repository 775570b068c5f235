//! The four-parameter curve-pair construction and its one-parameter
//! specialisation.
//!
//! `build_family` transcribes the two displayed sextics exactly as given,
//! with kernel quadratics X²+UX+V and (U-2)X²+2(V-U+2)X+2(U-V) dividing
//! them. `specialize` produces the integer models used everywhere else:
//!
//! ```text
//! C : Y² = (X²+4X-4)(4X⁴+20X³-(16n+9)X²+(32n+14)X-16n-13)
//! C': Y² = 3(X-1)(X-2)((320n+232)X⁴-(768n+456)X³+(656n+481)X²-(240n+219)X+32n+34)
//! ```
//!
//! with q = 8n+11 and r = 256n²-2912n-2087. A specialisation is admissible
//! when |q| and |r| are both prime and the sextic is separable.

use crate::algebra::{factor, is_prime_u64, AlgebraError};
use crate::field::rat_int;
use crate::poly::{rat_poly, PolyError, Polynomial, RatPoly};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest supported family parameter; keeps q, r inside the range the
/// exact factoring and primality routines certify.
pub const MAX_N: u32 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("trivial family member: U·V·Δ·(V-2) must be nonzero")]
    Trivial,
    #[error("family member has a multiple zero (discriminant vanishes)")]
    MultipleZeros,
    #[error("n = {n} is not admissible: {reason}")]
    NotAdmissible { n: u32, reason: String },
    #[error("n = {0} exceeds the supported parameter range")]
    ParameterRange(u32),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Parameters of the general construction.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyParams {
    pub u: BigRational,
    pub v: BigRational,
    pub w: BigRational,
    pub delta: BigRational,
}

impl FamilyParams {
    pub fn new(u: BigRational, v: BigRational, w: BigRational, delta: BigRational) -> Self {
        FamilyParams { u, v, w, delta }
    }

    /// The specialisation U = 4, V = -4, Δ = 4, W = 3/4 - 4n.
    pub fn specialized(n: u32) -> Self {
        FamilyParams {
            u: rat_int(4),
            v: rat_int(-4),
            w: BigRational::new(3.into(), 4.into()) - rat_int(4) * rat_int(n as i64),
            delta: rat_int(4),
        }
    }
}

/// A genus-2 curve Y² = F₂(X)·F₄(X) with the order-2 kernel point sitting
/// over the zeros of F₂.
#[derive(Clone, Debug, PartialEq)]
pub struct GenusTwoCurve {
    pub f2: RatPoly,
    pub f4: RatPoly,
}

impl GenusTwoCurve {
    pub fn new(f2: RatPoly, f4: RatPoly) -> Result<Self, FamilyError> {
        let d2 = f2.degree().unwrap_or(0);
        let d4 = f4.degree().unwrap_or(0);
        if f2.is_zero() || f4.is_zero() || d2 > 2 || d4 > 4 || !(5..=6).contains(&(d2 + d4)) {
            return Err(FamilyError::Trivial);
        }
        let model = f2.mul(&f4);
        if Zero::is_zero(&model.discriminant()?) {
            return Err(FamilyError::MultipleZeros);
        }
        Ok(GenusTwoCurve { f2, f4 })
    }

    /// The full sextic (or quintic) model F₂·F₄.
    pub fn f6(&self) -> RatPoly {
        self.f2.mul(&self.f4)
    }
}

/// The pair (C, C') with its specialisation data when built from n.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePair {
    pub c: GenusTwoCurve,
    pub c_prime: GenusTwoCurve,
    pub n: Option<u32>,
    pub q: Option<i64>,
    pub r: Option<i64>,
}

/// The two sextics of the general construction, exactly as displayed.
///
/// Fails on trivial output or when either sextic has a multiple zero.
pub fn build_family(params: &FamilyParams) -> Result<(RatPoly, RatPoly), FamilyError> {
    let (f6, f6p) = raw_family(params);
    if f6.degree() != Some(6) || f6p.degree() != Some(6) {
        return Err(FamilyError::Trivial);
    }
    if Zero::is_zero(&f6.discriminant()?) || Zero::is_zero(&f6p.discriminant()?) {
        return Err(FamilyError::MultipleZeros);
    }
    Ok((f6, f6p))
}

/// The same data split as curve models: F₂ the kernel quadratic and F₄
/// the cofactor.
pub fn curve_pair_from_params(params: &FamilyParams) -> Result<CurvePair, FamilyError> {
    build_family(params)?; // validates non-triviality and separability
    let (quad, quartic, quad_p, quartic_p) = raw_family_parts(params);
    Ok(CurvePair {
        c: GenusTwoCurve::new(quad, quartic)?,
        c_prime: GenusTwoCurve::new(quad_p, quartic_p)?,
        n: None,
        q: None,
        r: None,
    })
}

fn raw_family(params: &FamilyParams) -> (RatPoly, RatPoly) {
    let (quad, quartic, quad_p, quartic_p) = raw_family_parts(params);
    (quad.mul(&quartic), quad_p.mul(&quartic_p))
}

/// Kernel quadratics and scaled quartic cofactors of the two sextics.
fn raw_family_parts(params: &FamilyParams) -> (RatPoly, RatPoly, RatPoly, RatPoly) {
    let (u, v, w) = (&params.u, &params.v, &params.w);
    let one = rat_int(1);
    let c = rat_int;

    let duv = &params.delta * u * v;

    // X² + U X + V
    let quad = Polynomial::new(vec![v.clone(), u.clone(), one.clone()]);
    // W(U-V)(U+V)/4 recurs in two coefficients of the first bracket
    let wuv4 = w * (u - v) * (u + v) / c(4);
    let bracket = Polynomial::new(vec![
        u * v * (w - c(4)),
        w * (u * u + v * v) - c(4) * (v * v + c(4)),
        u * (&wuv4 + v * v + v * w - c(4)),
        v * (&wuv4 + v * v + c(4)),
        u * v,
    ]);
    let quartic = bracket.scale(&duv);

    // (U-2)X² + 2(V-U+2)X + 2(U-V)
    let quad_p = Polynomial::new(vec![c(2) * (u - v), c(2) * (v - u + c(2)), u - c(2)]);
    let b4 = w * (v - &one) * (u - v) * (u - v)
        - c(4) * (v * (u - v) * (u - v) - (v - c(2)) * (v - c(2)));
    let b3 = c(2)
        * (w * (u - v) * (c(2) * (&one - v) * u + v * (c(3) * v - c(2)))
            + c(4) * (c(2) * u * v * (u - c(2) * (v + &one)) + (c(3) * v - c(2)) * (v * v + c(4))));
    let b2 = w
        * (u * ((v * v + c(4) * (v - &one)) * u - c(6) * v * (c(3) * v - c(2)))
            - v * v * (v * v - c(2) * (c(7) * v - c(2))))
        + c(4)
            * (c(4) * u * v * (c(3) * (v + c(2)) - c(2) * u)
                + (v * v + c(4)) * (v * v - c(2) * (c(7) * v - c(2))));
    let b1 = -c(2)
        * v
        * (w * (u * (u * v + c(4) * (&one - c(2) * v)) + v * v * (c(6) - v))
            - c(4) * (c(4) * u * (u - v - c(4)) - (v - c(6)) * (v * v + c(4))));
    let b0 = w * v * v * (u - v) * (u + v - c(4))
        - c(4) * v * (c(4) * u * (u - c(4)) - (v - c(4)) * (v * v + c(4)));
    let bracket_p = Polynomial::new(vec![b0, b1, b2, b3, b4]);
    let quartic_p = bracket_p.scale(&(&duv * (v - c(2))));

    (quad, quartic, quad_p, quartic_p)
}

/// Admissibility data for one value of n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub n: u32,
    pub q: i64,
    pub r: i64,
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

pub fn family_q(n: u32) -> i64 {
    8 * n as i64 + 11
}

pub fn family_r(n: u32) -> i64 {
    let n = n as i64;
    256 * n * n - 2912 * n - 2087
}

/// Whether |8n+11| and |256n²-2912n-2087| are prime and the model is
/// separable, with human-readable diagnostics.
pub fn admissible(n: u32) -> Result<Admissibility, FamilyError> {
    if n > MAX_N {
        return Err(FamilyError::ParameterRange(n));
    }
    let q = family_q(n);
    let r = family_r(n);
    let mut diagnostics = Vec::new();
    let q_ok = is_prime_u64(q.unsigned_abs());
    if !q_ok {
        diagnostics.push(format!("q={} is composite", q));
    }
    let r_ok = is_prime_u64(r.unsigned_abs());
    if !r_ok {
        diagnostics.push(format!("r={} is composite", r));
    }
    let mut ok = q_ok && r_ok;
    if ok {
        // distinctness of 2, 3, q, r and separability
        let qa = q.unsigned_abs();
        let ra = r.unsigned_abs();
        if qa <= 3 || ra <= 3 || qa == ra {
            diagnostics.push(format!(
                "2, 3, |q|={}, |r|={} are not mutually distinct",
                qa, ra
            ));
            ok = false;
        }
        let (mc, mcp) = specialized_models(n);
        if Zero::is_zero(&mc.f6().discriminant()?) || Zero::is_zero(&mcp.f6().discriminant()?) {
            diagnostics.push("model has a multiple zero".to_string());
            ok = false;
        }
    }
    Ok(Admissibility {
        n,
        q,
        r,
        ok,
        diagnostics,
    })
}

fn specialized_models(n: u32) -> (GenusTwoCurve, GenusTwoCurve) {
    let n = n as i64;
    let c = GenusTwoCurve {
        f2: rat_poly(&[-4, 4, 1]),
        f4: rat_poly(&[-(16 * n + 13), 32 * n + 14, -(16 * n + 9), 20, 4]),
    };
    let c_prime = GenusTwoCurve {
        f2: rat_poly(&[2, -3, 1]),
        f4: rat_poly(&[
            32 * n + 34,
            -(240 * n + 219),
            656 * n + 481,
            -(768 * n + 456),
            320 * n + 232,
        ])
        .scale(&rat_int(3)),
    };
    (c, c_prime)
}

/// Specialise the family at n. Requires admissibility unless forced.
pub fn specialize(n: u32, force: bool) -> Result<CurvePair, FamilyError> {
    let adm = admissible(n)?;
    if !adm.ok && !force {
        return Err(FamilyError::NotAdmissible {
            n,
            reason: adm.diagnostics.join("; "),
        });
    }
    let (c, c_prime) = specialized_models(n);
    Ok(CurvePair {
        c,
        c_prime,
        n: Some(n),
        q: Some(adm.q),
        r: Some(adm.r),
    })
}

/// Primes of bad reduction: {2, |q|, |r|} for a specialised pair, and in
/// general 2 together with the odd prime support of disc(F₂F₄).
pub fn bad_primes(pair: &CurvePair) -> Result<BTreeSet<u64>, FamilyError> {
    if let (Some(q), Some(r)) = (pair.q, pair.r) {
        return Ok([2, q.unsigned_abs(), r.unsigned_abs()].into());
    }
    let mut out: BTreeSet<u64> = [2].into();
    for model in [&pair.c, &pair.c_prime] {
        let disc = model.f6().discriminant()?;
        for part in [disc.numer().clone(), disc.denom().clone()] {
            for (p, _) in factor(&part)? {
                if p != 2 {
                    out.insert(p);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn specialization_matches_displayed_models() {
        // the three smallest admissible members, frozen coefficient by
        // coefficient from the displayed models
        let p0 = specialize(0, false).unwrap();
        assert_eq!(p0.c.f2, rat_poly(&[-4, 4, 1]));
        assert_eq!(p0.c.f4, rat_poly(&[-13, 14, -9, 20, 4]));
        assert_eq!(p0.c_prime.f2, rat_poly(&[2, -3, 1]));
        assert_eq!(
            p0.c_prime.f4,
            rat_poly(&[34, -219, 481, -456, 232]).scale(&rat_int(3))
        );
        assert_eq!((p0.q, p0.r), (Some(11), Some(-2087)));

        let p6 = specialize(6, false).unwrap();
        assert_eq!(p6.c.f4, rat_poly(&[-109, 206, -105, 20, 4]));
        assert_eq!(
            p6.c_prime.f4,
            rat_poly(&[226, -1659, 4417, -5064, 2152]).scale(&rat_int(3))
        );
        assert_eq!((p6.q, p6.r), (Some(59), Some(-10343)));

        let p9 = specialize(9, false).unwrap();
        assert_eq!(p9.c.f4, rat_poly(&[-157, 302, -153, 20, 4]));
        assert_eq!(
            p9.c_prime.f4,
            rat_poly(&[322, -2379, 6385, -7368, 3112]).scale(&rat_int(3))
        );
        assert_eq!((p9.q, p9.r), (Some(83), Some(-7559)));
    }

    #[test]
    fn raw_family_agrees_with_specialization() {
        // C: the raw sextic is 2⁸·F₂F₄; C': substituting X -> 2X gives 2¹⁶·F₂'F₄'
        for n in 0..=50u32 {
            let adm = admissible(n).unwrap();
            if !adm.ok {
                continue;
            }
            let params = FamilyParams::specialized(n);
            let (f6, f6p) = build_family(&params).unwrap();
            let pair = specialize(n, false).unwrap();
            assert_eq!(f6, pair.c.f6().scale(&rat_int(256)), "n = {n}");
            let two_x = rat_poly(&[0, 2]);
            assert_eq!(
                f6p.compose(&two_x),
                pair.c_prime.f6().scale(&rat_int(65536)),
                "n = {n}"
            );
        }
    }

    #[test]
    fn raw_c_prime_display_form() {
        // before normalisation: 2¹²·3(X-2)(X-4)((80n+58)X⁴ - (384n+228)X³ + ...)
        for n in [0u32, 6, 9] {
            let (_, f6p) = build_family(&FamilyParams::specialized(n)).unwrap();
            let ni = n as i64;
            let quartic = rat_poly(&[
                128 * ni + 136,
                -(480 * ni + 438),
                656 * ni + 481,
                -(384 * ni + 228),
                80 * ni + 58,
            ]);
            let expect = rat_poly(&[8, -6, 1]) // (X-2)(X-4)
                .mul(&quartic)
                .scale(&rat_int(4096 * 3));
            assert_eq!(f6p, expect, "n = {n}");
        }
    }

    #[test]
    fn kernel_quadratics_divide_the_sextics() {
        let params = FamilyParams::new(rat(1, 2), rat_int(3), rat(-2, 5), rat_int(1));
        let (f6, f6p) = build_family(&params).unwrap();
        let quad = Polynomial::new(vec![params.v.clone(), params.u.clone(), rat_int(1)]);
        assert!(f6.rem(&quad).unwrap().is_zero());
        let quad_p = Polynomial::new(vec![
            rat_int(2) * (&params.u - &params.v),
            rat_int(2) * (&params.v - &params.u + rat_int(2)),
            &params.u - rat_int(2),
        ]);
        assert!(f6p.rem(&quad_p).unwrap().is_zero());
    }

    #[test]
    fn admissibility_scan() {
        assert!(admissible(0).unwrap().ok);
        assert!(admissible(6).unwrap().ok);
        assert!(admissible(9).unwrap().ok);
        let a3 = admissible(3).unwrap();
        assert!(!a3.ok);
        assert!(a3.diagnostics.iter().any(|d| d.contains("q=35")));
        // the three smallest admissible values
        let small: Vec<u32> = (0..=9).filter(|&n| admissible(n).unwrap().ok).collect();
        assert_eq!(small, vec![0, 6, 9]);
        // admissibility forces 3 | n
        for n in 0..=60u32 {
            if admissible(n).unwrap().ok {
                assert_eq!(n % 3, 0, "n = {n}");
            }
        }
    }

    #[test]
    fn trivial_parameters_rejected() {
        let params = FamilyParams::new(rat_int(0), rat_int(1), rat_int(1), rat_int(1));
        assert_eq!(build_family(&params), Err(FamilyError::Trivial));
    }

    #[test]
    fn bad_prime_sets() {
        let p0 = specialize(0, false).unwrap();
        assert_eq!(bad_primes(&p0).unwrap(), [2, 11, 2087].into());
        let p6 = specialize(6, false).unwrap();
        assert_eq!(bad_primes(&p6).unwrap(), [2, 59, 10343].into());
        // generic pair: prime support of the discriminants plus 2
        let pair = curve_pair_from_params(&FamilyParams::specialized(0)).unwrap();
        let bp = bad_primes(&pair).unwrap();
        assert!(bp.contains(&2) && bp.contains(&11) && bp.contains(&2087));
    }

    #[test]
    fn specialize_requires_admissibility() {
        assert!(matches!(
            specialize(3, false),
            Err(FamilyError::NotAdmissible { .. })
        ));
        assert!(specialize(3, true).is_ok());
    }
}

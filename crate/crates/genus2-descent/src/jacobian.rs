//! Genus-2 jacobian arithmetic on degree-6 models Y² = F₆(X), in balanced
//! Mumford representation, over any field of the tower.
//!
//! A degree-6 model has two points ∞⁺, ∞⁻ at infinity (rational exactly
//! when the leading coefficient is a square in the base field, with ∞⁺
//! the branch where Y/X³ tends to the canonical square root). Divisor
//! classes are represented as
//!
//! ```text
//! [affine part (u, v) + w·∞⁺ + (2 - deg u - w)·∞⁻  -  ∞⁺ - ∞⁻]
//! ```
//!
//! with u monic of degree ≤ 2, deg v < deg u, u | F₆ - v², and
//! 0 ≤ w ≤ 2 - deg u. This canonical form is unique per class; the
//! identity is (u, v, w) = (1, 0, 1). Composition is Cantor's algorithm;
//! reduction follows the function y - Ṽ(x) with Ṽ chosen congruent to v
//! mod u and matched against the expansion of y at whichever infinity is
//! in deficit, which drops degrees and returns the balancing weights to
//! range. Over fields where the leading coefficient is not a square,
//! only weight-symmetric classes exist and no matching is ever needed.

use crate::family::GenusTwoCurve;
use crate::field::rational_sqrt;
use crate::field::{FieldElement, Fp, Quad};
use crate::poly::{
    conjugate_quadratic_split, factor_low_degree, reduce_mod_p, PolyError, Polynomial, RatPoly,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JacobianError {
    #[error("model must be a separable sextic")]
    NotASeparableSextic,
    #[error("jacobian arithmetic requires odd characteristic")]
    CharacteristicTwo,
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error("divisor does not satisfy the membership identity on this curve")]
    NotOnCurve,
    #[error("class references a point at infinity that is not rational here")]
    InfinityNotRational,
    #[error("bad reduction at {0}")]
    BadReduction(u64),
    #[error("operation requires a point not fixed by conjugation")]
    RationalPoint,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A degree-6 hyperelliptic model with cached infinity data.
#[derive(Clone, Debug)]
pub struct Curve<F: FieldElement> {
    f: Polynomial<F>,
    /// Canonical square root of lc(F₆) when it exists in the field.
    inf_sqrt: Option<F>,
    /// Cubic part of the expansion of Y at ∞⁺ (needs `inf_sqrt`).
    v_plus: Option<Polynomial<F>>,
}

/// A divisor class in canonical balanced form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedDivisor<F: FieldElement> {
    u: Polynomial<F>,
    v: Polynomial<F>,
    w: u8,
}

impl<F: FieldElement> BalancedDivisor<F> {
    pub fn u(&self) -> &Polynomial<F> {
        &self.u
    }
    pub fn v(&self) -> &Polynomial<F> {
        &self.v
    }
    pub fn weight_plus(&self) -> u8 {
        self.w
    }
    pub fn weight_minus(&self) -> u8 {
        2 - self.u.degree().unwrap_or(0) as u8 - self.w
    }
}

impl<F: FieldElement> Curve<F> {
    /// Build a curve Y² = f with f a separable sextic over a field of odd
    /// or zero characteristic.
    pub fn new(f: Polynomial<F>) -> Result<Self, JacobianError> {
        if f.degree() != Some(6) {
            return Err(JacobianError::NotASeparableSextic);
        }
        let lc = f.lc().unwrap().clone();
        if lc.embed_int(2).inv().is_none() {
            return Err(JacobianError::CharacteristicTwo);
        }
        if f.discriminant()?.is_zero() {
            return Err(JacobianError::NotASeparableSextic);
        }
        let inf_sqrt = lc.sqrt();
        let v_plus = inf_sqrt.as_ref().map(|g| expansion_at_infinity(&f, g));
        Ok(Curve {
            f,
            inf_sqrt,
            v_plus,
        })
    }

    pub fn model(&self) -> &Polynomial<F> {
        &self.f
    }

    /// Whether ∞⁺ and ∞⁻ are rational over the base field.
    pub fn infinity_rational(&self) -> bool {
        self.inf_sqrt.is_some()
    }

    pub fn identity(&self) -> BalancedDivisor<F> {
        BalancedDivisor {
            u: Polynomial::constant(self.f.lc().unwrap().one()),
            v: Polynomial::zero(),
            w: 1,
        }
    }

    /// Validate and build a divisor in canonical form.
    pub fn divisor(
        &self,
        u: Polynomial<F>,
        v: Polynomial<F>,
        w: u8,
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        let du = u
            .degree()
            .ok_or_else(|| JacobianError::InvalidDivisor("u must be nonzero".into()))?;
        if du > 2 || !u.is_monic() {
            return Err(JacobianError::InvalidDivisor(
                "u must be monic of degree ≤ 2".into(),
            ));
        }
        if w as usize + du > 2 {
            return Err(JacobianError::InvalidDivisor(format!(
                "weight {w} out of range for deg u = {du}"
            )));
        }
        if !v.is_zero() && v.degree().unwrap() >= du.max(1) {
            return Err(JacobianError::InvalidDivisor(
                "v must have degree below deg u".into(),
            ));
        }
        if du == 0 && !v.is_zero() {
            return Err(JacobianError::InvalidDivisor(
                "v must vanish when u = 1".into(),
            ));
        }
        let dv = BalancedDivisor { u, v, w };
        if !self.is_member(&dv) {
            return Err(JacobianError::NotOnCurve);
        }
        // asymmetric infinity weights need rational infinite points
        if dv.w != dv.weight_minus() && !self.infinity_rational() {
            return Err(JacobianError::InfinityNotRational);
        }
        Ok(dv)
    }

    fn is_member(&self, dv: &BalancedDivisor<F>) -> bool {
        let fv = self.f.sub(&dv.v.mul(&dv.v));
        fv.rem(&dv.u).map(|r| r.is_zero()).unwrap_or(false)
    }

    pub fn is_identity(&self, dv: &BalancedDivisor<F>) -> bool {
        dv.u.degree() == Some(0) && dv.w == 1
    }

    /// The class [P₁ + P₂ - ∞⁺ - ∞⁻] of two affine points. Doubling uses
    /// the tangent line; a point plus its hyperelliptic image gives the
    /// identity.
    pub fn from_affine_pair(
        &self,
        p1: (F, F),
        p2: (F, F),
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        for (x, y) in [&p1, &p2] {
            if !self.f.evaluate(x).sub(&y.mul(y)).is_zero() {
                return Err(JacobianError::InvalidDivisor(
                    "point does not lie on the curve".into(),
                ));
            }
        }
        let (x1, y1) = p1;
        let (x2, y2) = p2;
        if x1 == x2 {
            if y1 == y2.neg() {
                // P + ι(P) is the hyperelliptic class: the identity
                return Ok(self.identity());
            }
            // tangent line at a doubled point
            let u = Polynomial::new(vec![x1.mul(&x1), x1.neg().mul(&x1.embed_int(2)), x1.one()]);
            let fp = self.f.derivative().evaluate(&x1);
            let slope = fp.mul(
                &y1.mul(&y1.embed_int(2))
                    .inv()
                    .expect("tangent at a non-Weierstrass point"),
            );
            let v = Polynomial::new(vec![y1.sub(&slope.mul(&x1)), slope]);
            return self.divisor(u, v, 0);
        }
        let u = Polynomial::new(vec![x1.mul(&x2), x1.add(&x2).neg(), x1.one()]);
        let slope = y2.sub(&y1).mul(&x2.sub(&x1).inv().expect("distinct x"));
        let v = Polynomial::new(vec![y1.sub(&slope.mul(&x1)), slope]);
        self.divisor(u, v, 0)
    }

    /// The class [P - ∞⁺] (or [P - ∞⁻]) of one affine point against one
    /// rational point at infinity.
    pub fn point_minus_infinity(
        &self,
        x: F,
        y: F,
        against_plus: bool,
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        if !self.infinity_rational() {
            return Err(JacobianError::InfinityNotRational);
        }
        let u = Polynomial::new(vec![x.neg(), x.one()]);
        let v = Polynomial::constant(y);
        self.divisor(u, v, if against_plus { 0 } else { 1 })
    }

    /// The class [P - Q] of two affine points.
    pub fn point_minus_point(
        &self,
        p: (F, F),
        q: (F, F),
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        let iq = (q.0.clone(), q.1.neg());
        self.from_affine_pair(p, iq)
    }

    pub fn neg(&self, dv: &BalancedDivisor<F>) -> BalancedDivisor<F> {
        BalancedDivisor {
            u: dv.u.clone(),
            v: dv.v.neg(),
            w: dv.weight_minus(),
        }
    }

    /// Cantor composition followed by balanced reduction.
    pub fn add(
        &self,
        a: &BalancedDivisor<F>,
        b: &BalancedDivisor<F>,
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        if !self.is_member(a) || !self.is_member(b) {
            return Err(JacobianError::NotOnCurve);
        }
        // composition
        let (d1, ea, eb) = a.u.xgcd(&b.u);
        let vsum = a.v.add(&b.v);
        let (s, c2, e3) = d1.xgcd(&vsum);
        let e1 = c2.mul(&ea);
        let e2 = c2.mul(&eb);
        let u = a.u.exact_div(&s).mul(&b.u.exact_div(&s));
        let num = e1
            .mul(&a.u)
            .mul(&b.v)
            .add(&e2.mul(&b.u).mul(&a.v))
            .add(&e3.mul(&a.v.mul(&b.v).add(&self.f)));
        let v = num.exact_div(&s).rem(&u)?;
        let t = s.degree().unwrap() as i32;
        let wp = a.w as i32 + b.w as i32 + t - 1;
        let wm = a.weight_minus() as i32 + b.weight_minus() as i32 + t - 1;
        self.reduce(u, v, wp, wm)
    }

    pub fn sub(
        &self,
        a: &BalancedDivisor<F>,
        b: &BalancedDivisor<F>,
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        self.add(a, &self.neg(b))
    }

    /// Scalar multiple by left-to-right double-and-add.
    pub fn smul(
        &self,
        k: i64,
        dv: &BalancedDivisor<F>,
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        if k == 0 {
            return Ok(self.identity());
        }
        let base = if k < 0 { self.neg(dv) } else { dv.clone() };
        let k = k.unsigned_abs();
        let mut acc = self.identity();
        for bit in (0..64 - k.leading_zeros()).rev() {
            acc = self.add(&acc, &acc)?;
            if k >> bit & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
        }
        Ok(acc)
    }

    /// Reduce a semi-reduced state to canonical balanced form.
    fn reduce(
        &self,
        u: Polynomial<F>,
        v: Polynomial<F>,
        wp: i32,
        wm: i32,
    ) -> Result<BalancedDivisor<F>, JacobianError> {
        let mut u = u.monic().expect("semi-reduced u is nonzero");
        let mut v = v;
        let (mut wp, mut wm) = (wp, wm);
        for _ in 0..64 {
            let d = u.degree().unwrap() as i32;
            debug_assert_eq!(d + wp + wm, 2, "weight invariant violated");
            if d <= 2 && wp >= 0 && wm >= 0 {
                let v = if d == 0 {
                    Polynomial::zero()
                } else {
                    v.rem(&u)?
                };
                return Ok(BalancedDivisor { u, v, w: wp as u8 });
            }
            let vt = self.choose_reduction_v(&u, &v, wp, wm)?;
            let fv = self.f.sub(&vt.mul(&vt));
            debug_assert!(!fv.is_zero(), "separable model is never a square");
            let big_d = fv.degree().unwrap() as i32;
            let u_next = fv.exact_div(&u).monic().unwrap();
            let a = self.ord_at_infinity(&vt, true, big_d);
            let b = self.ord_at_infinity(&vt, false, big_d);
            let du_next = u_next.degree().unwrap() as i32;
            wp = wp - du_next - a;
            wm = wm - du_next - b;
            v = vt.neg().rem(&u_next)?;
            u = u_next;
        }
        unreachable!("balanced reduction did not terminate");
    }

    /// A representative Ṽ ≡ v (mod u). When the infinite points are
    /// rational it is matched against the expansion of y at the infinity
    /// with the smaller weight, which is what moves weight back there.
    fn choose_reduction_v(
        &self,
        u: &Polynomial<F>,
        v: &Polynomial<F>,
        wp: i32,
        wm: i32,
    ) -> Result<Polynomial<F>, JacobianError> {
        match &self.v_plus {
            Some(vp) => {
                if wp < wm {
                    let r = v.add(vp).rem(u)?;
                    Ok(vp.neg().add(&r))
                } else {
                    let r = v.sub(vp).rem(u)?;
                    Ok(vp.add(&r))
                }
            }
            None => {
                let vt = v.rem(u)?;
                if vt.degree() == Some(3) {
                    let lc2 = vt.lc().unwrap().mul(vt.lc().unwrap());
                    assert!(
                        lc2 != *self.f.lc().unwrap(),
                        "leading square root undetected"
                    );
                }
                if wp != wm {
                    return Err(JacobianError::InfinityNotRational);
                }
                Ok(vt)
            }
        }
    }

    /// Order of vanishing of y - Ṽ at ∞⁺ or ∞⁻ (negative = pole).
    fn ord_at_infinity(&self, vt: &Polynomial<F>, plus: bool, big_d: i32) -> i32 {
        match &self.v_plus {
            Some(vp) => {
                let reference = if plus { vp.clone() } else { vp.neg() };
                let diff = reference.sub(vt);
                match diff.degree() {
                    None => 3 - big_d, // Ṽ is the expansion itself
                    Some(k) => -(k as i32),
                }
            }
            // without a rational square root there is never cancellation
            None => -3,
        }
    }
}

/// Cubic V⁺ with deg(f - V⁺²) ≤ 2: the polynomial part of the expansion
/// of Y at ∞⁺ for the chosen square root γ of lc(f).
fn expansion_at_infinity<F: FieldElement>(f: &Polynomial<F>, gamma: &F) -> Polynomial<F> {
    let two_g_inv = gamma
        .mul(&gamma.embed_int(2))
        .inv()
        .expect("odd characteristic, nonzero γ");
    let ctx = gamma.zero();
    let f5 = f.coeff(5, &ctx);
    let f4 = f.coeff(4, &ctx);
    let f3 = f.coeff(3, &ctx);
    let g2 = f5.mul(&two_g_inv);
    let g1 = f4.sub(&g2.mul(&g2)).mul(&two_g_inv);
    let g0 = f3.sub(&g2.mul(&g1).mul(&gamma.embed_int(2))).mul(&two_g_inv);
    Polynomial::new(vec![g0, g1, g2, gamma.clone()])
}

// ---------------------------------------------------------------------------
// Base change and reduction of curves and divisors
// ---------------------------------------------------------------------------

/// The jacobian of a family model over ℚ.
pub fn curve_over_q(model: &GenusTwoCurve) -> Result<Curve<BigRational>, JacobianError> {
    Curve::new(model.f6())
}

/// Base change to ℚ(√d).
pub fn curve_over_quad(model: &GenusTwoCurve, d: i64) -> Result<Curve<Quad>, JacobianError> {
    Curve::new(model.f6().map(|c| Quad::from_rational(c.clone(), d)))
}

/// Reduction mod an odd prime of good reduction.
pub fn curve_mod_p(model: &GenusTwoCurve, p: u64) -> Result<Curve<Fp>, JacobianError> {
    if p == 2 {
        return Err(JacobianError::BadReduction(2));
    }
    let f = reduce_mod_p(&model.f6(), p).map_err(|_| JacobianError::BadReduction(p))?;
    Curve::new(f).map_err(|_| JacobianError::BadReduction(p))
}

/// Lift a rational divisor into ℚ(√d).
pub fn divisor_to_quad(dv: &BalancedDivisor<BigRational>, d: i64) -> BalancedDivisor<Quad> {
    BalancedDivisor {
        u: dv.u.map(|c| Quad::from_rational(c.clone(), d)),
        v: dv.v.map(|c| Quad::from_rational(c.clone(), d)),
        w: dv.w,
    }
}

/// Reduce a rational divisor mod p (good reduction; denominators must
/// avoid p).
pub fn divisor_mod_p(
    curve_p: &Curve<Fp>,
    dv: &BalancedDivisor<BigRational>,
    p: u64,
) -> Result<BalancedDivisor<Fp>, JacobianError> {
    let u = reduce_mod_p(&dv.u, p).map_err(|_| JacobianError::BadReduction(p))?;
    let v = reduce_mod_p(&dv.v, p).map_err(|_| JacobianError::BadReduction(p))?;
    if u.degree() != dv.u.degree() {
        return Err(JacobianError::BadReduction(p));
    }
    curve_p.divisor(u, v, dv.w)
}

/// Galois conjugation √d ↦ -√d applied to a divisor class. The infinity
/// weight flips exactly when the square root of the leading coefficient
/// is itself irrational.
pub fn galois_conjugate(curve: &Curve<Quad>, dv: &BalancedDivisor<Quad>) -> BalancedDivisor<Quad> {
    let u = dv.u.map(|c| c.conj());
    let v = dv.v.map(|c| c.conj());
    let swaps = curve
        .inf_sqrt
        .as_ref()
        .map(|g| !Zero::is_zero(&g.b))
        .unwrap_or(false);
    let w = if swaps { dv.weight_minus() } else { dv.w };
    BalancedDivisor { u, v, w }
}

/// Whether conjugation shifts the class by exactly the distinguished
/// 2-torsion point: σ(D) = P₀ + D. Requires D not fixed by σ.
pub fn sigma_shift_test(
    curve: &Curve<Quad>,
    dv: &BalancedDivisor<Quad>,
    p0: &BalancedDivisor<Quad>,
) -> Result<bool, JacobianError> {
    let conj = galois_conjugate(curve, dv);
    if conj == *dv {
        return Err(JacobianError::RationalPoint);
    }
    Ok(curve.add(p0, dv)? == conj)
}

// ---------------------------------------------------------------------------
// 2-torsion classes
// ---------------------------------------------------------------------------

/// Query field for the 2-torsion survey.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionField {
    Rational,
    Quadratic(i64),
}

/// One pair-class of Weierstrass points, with its defining monic
/// quadratic u = u_plain + √d·u_surd when the class is defined over the
/// query field.
#[derive(Clone, Debug)]
pub struct TwoTorsionClass {
    pub label: String,
    pub defined: bool,
    pub u_plain: Option<RatPoly>,
    pub u_surd: Option<RatPoly>,
}

impl TwoTorsionClass {
    fn defined_rational(label: String, u: RatPoly) -> Self {
        TwoTorsionClass {
            label,
            defined: true,
            u_plain: Some(u),
            u_surd: Some(Polynomial::zero()),
        }
    }

    fn undefined(label: String) -> Self {
        TwoTorsionClass {
            label,
            defined: false,
            u_plain: None,
            u_surd: None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.defined && self.u_surd.as_ref().map(|s| s.is_zero()).unwrap_or(false)
    }

    /// The 2-torsion divisor over ℚ(√d), when defined there.
    pub fn divisor_quad(
        &self,
        curve: &Curve<Quad>,
        d: i64,
    ) -> Result<BalancedDivisor<Quad>, JacobianError> {
        let (up, us) = match (&self.u_plain, &self.u_surd) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(JacobianError::InvalidDivisor("class not defined".into())),
        };
        let one = BigRational::from(BigInt::from(1));
        let coeffs = (0..3)
            .map(|i| Quad::new(up.coeff(i, &one), us.coeff(i, &one), d))
            .collect();
        curve.divisor(Polynomial::new(coeffs), Polynomial::zero(), 0)
    }

    /// The 2-torsion divisor over ℚ, for rational classes.
    pub fn divisor_rational(
        &self,
        curve: &Curve<BigRational>,
    ) -> Result<BalancedDivisor<BigRational>, JacobianError> {
        if !self.is_rational() {
            return Err(JacobianError::InvalidDivisor("class not rational".into()));
        }
        curve.divisor(self.u_plain.clone().unwrap(), Polynomial::zero(), 0)
    }
}

/// All pair-classes of the six Weierstrass points, flagged by whether
/// they are defined over the query field.
#[derive(Clone, Debug)]
pub struct TwoTorsionSurvey {
    pub classes: Vec<TwoTorsionClass>,
}

impl TwoTorsionSurvey {
    pub fn total(&self) -> usize {
        self.classes.len()
    }

    pub fn defined(&self) -> Vec<&TwoTorsionClass> {
        self.classes.iter().filter(|c| c.defined).collect()
    }
}

/// The distinguished 2-torsion class sits over the zeros of F₂.
pub fn kernel_class_quadratic(model: &GenusTwoCurve) -> RatPoly {
    model.f2.monic().expect("F₂ is nonzero")
}

/// Enumerate the 15 Weierstrass pair-classes of a sextic model and decide
/// which are defined over the query field, exactly.
///
/// The factorisation of F₂ and F₄ over ℚ is exact (degree ≤ 4); pairs
/// inside an irreducible quartic defined over ℚ(√d) are exactly those
/// arising from a conjugate quadratic split, and a cross pair is defined
/// over the query field only when both roots individually are.
pub fn two_torsion_classes(
    model: &GenusTwoCurve,
    field: TorsionField,
) -> Result<TwoTorsionSurvey, JacobianError> {
    let mut factors = factor_low_degree(&model.f2)?;
    factors.extend(factor_low_degree(&model.f4)?);
    factors.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| format!("{a:?}").cmp(&format!("{b:?}")))
    });
    let d_query = match field {
        TorsionField::Rational => None,
        TorsionField::Quadratic(d) => Some(d),
    };
    let mut classes = Vec::new();
    let roots_of: Vec<Vec<(BigRational, BigRational)>> = factors
        .iter()
        .map(|g| roots_over_query(g, d_query))
        .collect();

    for (i, gi) in factors.iter().enumerate() {
        // pairs within one irreducible factor
        match gi.degree().unwrap() {
            1 => {}
            2 => {
                classes.push(TwoTorsionClass::defined_rational(
                    format!("pair within factor #{i}"),
                    gi.clone(),
                ));
            }
            3 => {
                for k in 0..3 {
                    classes.push(TwoTorsionClass::undefined(format!(
                        "pair #{k} within cubic factor #{i}"
                    )));
                }
            }
            4 => {
                let mut defined = 0usize;
                if let Some(d) = d_query {
                    let one = BigRational::from(BigInt::from(1));
                    let ctx = Quad::from_rational(one, d);
                    for (si, split) in conjugate_quadratic_split(gi, d)?.iter().enumerate() {
                        for (tag, g) in [("+", &split.g), ("-", &split.g_conj)] {
                            let plain =
                                Polynomial::new((0..3).map(|k| g.coeff(k, &ctx).a).collect());
                            let surd =
                                Polynomial::new((0..3).map(|k| g.coeff(k, &ctx).b).collect());
                            classes.push(TwoTorsionClass {
                                label: format!("split #{si}{tag} of quartic factor #{i}"),
                                defined: true,
                                u_plain: Some(plain),
                                u_surd: Some(surd),
                            });
                            defined += 1;
                        }
                    }
                }
                for k in 0..(6 - defined) {
                    classes.push(TwoTorsionClass::undefined(format!(
                        "pair #{k} within quartic factor #{i} (not over the query field)"
                    )));
                }
            }
            _ => unreachable!("factors of a sextic split as F₂·F₄ have degree ≤ 4"),
        }
        // cross pairs between distinct factors: defined exactly when both
        // roots individually lie in the query field
        for (j, gj) in factors.iter().enumerate().skip(i + 1) {
            let di = gi.degree().unwrap();
            let dj = gj.degree().unwrap();
            let mut defined = 0usize;
            for (a_idx, alpha) in roots_of[i].iter().enumerate() {
                for (b_idx, beta) in roots_of[j].iter().enumerate() {
                    let d = d_query.unwrap_or(-1);
                    let a = Quad::new(alpha.0.clone(), alpha.1.clone(), d);
                    let b = Quad::new(beta.0.clone(), beta.1.clone(), d);
                    let u1 = a.add(&b).neg();
                    let u0 = a.mul(&b);
                    classes.push(TwoTorsionClass {
                        label: format!(
                            "root #{a_idx} of factor #{i} with root #{b_idx} of factor #{j}"
                        ),
                        defined: true,
                        u_plain: Some(Polynomial::new(vec![
                            u0.a.clone(),
                            u1.a.clone(),
                            BigRational::from(BigInt::from(1)),
                        ])),
                        u_surd: Some(Polynomial::new(vec![u0.b, u1.b])),
                    });
                    defined += 1;
                }
            }
            for k in 0..(di * dj - defined) {
                classes.push(TwoTorsionClass::undefined(format!(
                    "cross pair #{k} between factors #{i} and #{j} (not over the query field)"
                )));
            }
        }
    }
    debug_assert_eq!(classes.len(), 15, "a sextic has 15 Weierstrass pairs");
    Ok(TwoTorsionSurvey { classes })
}

/// Deterministic scan of divisor classes over F_p, in a fixed order:
/// weight-2 classes (u, v) lexicographically, then degree-1 classes when
/// the infinite points are rational. Used by order cross-checks.
pub fn sample_divisors_mod_p(curve: &Curve<Fp>, limit: usize) -> Vec<BalancedDivisor<Fp>> {
    let p = curve.model().lc().unwrap().p;
    let ctx = Fp::new(0, p);
    let mut out = Vec::new();
    'outer: for a in 0..p {
        for b in 0..p {
            let u = Polynomial::new(vec![Fp::from_u64(b, p), Fp::from_u64(a, p), ctx.one()]);
            let fm = curve.model().rem(&u).expect("monic u");
            for v1 in 0..p {
                for v0 in 0..p {
                    let v = Polynomial::new(vec![Fp::from_u64(v0, p), Fp::from_u64(v1, p)]);
                    if fm.sub(&v.mul(&v)).rem(&u).unwrap().is_zero() {
                        out.push(BalancedDivisor {
                            u: u.clone(),
                            v,
                            w: 0,
                        });
                        if out.len() >= limit {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    if out.len() < limit && curve.infinity_rational() {
        'deg1: for x in 0..p {
            let fx = curve.model().evaluate(&Fp::from_u64(x, p));
            if let Some(y) = fx.sqrt() {
                let ys = if y.is_zero() {
                    vec![y]
                } else {
                    vec![y, y.neg()]
                };
                for yy in ys {
                    out.push(
                        curve
                            .point_minus_infinity(Fp::from_u64(x, p), yy, true)
                            .expect("valid point"),
                    );
                    if out.len() >= limit {
                        break 'deg1;
                    }
                }
            }
        }
    }
    out
}

/// The 2-torsion survey over a prime field F_p (good odd p, p ≤ 1000):
/// classes defined over F_p are the pairs of F_p-rational Weierstrass
/// points together with the conjugate pairs cut out by the irreducible
/// quadratic factors of the reduced sextic.
#[derive(Clone, Debug)]
pub struct TwoTorsionSurveyModP {
    /// Monic pair-quadratics of the classes defined over F_p.
    pub defined: Vec<Polynomial<Fp>>,
    /// All pair-classes of the six Weierstrass points.
    pub total: usize,
}

pub fn two_torsion_classes_mod_p(
    model: &GenusTwoCurve,
    p: u64,
) -> Result<TwoTorsionSurveyModP, JacobianError> {
    if p > 1000 {
        return Err(JacobianError::InvalidDivisor(
            "prime-field torsion survey supports p ≤ 1000".into(),
        ));
    }
    let curve = curve_mod_p(model, p)?;
    let f = curve.model();
    if f.degree() != Some(6) {
        return Err(JacobianError::BadReduction(p));
    }
    let ctx = Fp::new(0, p);
    let roots: Vec<Fp> = (0..p)
        .map(|x| Fp::from_u64(x, p))
        .filter(|x| f.evaluate(x).is_zero())
        .collect();
    let mut defined = Vec::new();
    for (i, a) in roots.iter().enumerate() {
        for b in roots.iter().skip(i + 1) {
            defined.push(Polynomial::new(vec![
                a.mul(b),
                a.add(b).neg(),
                ctx.one(),
            ]));
        }
    }
    // conjugate pairs: monic irreducible quadratics dividing f
    for a in 0..p {
        for b in 0..p {
            let g = Polynomial::new(vec![Fp::from_u64(b, p), Fp::from_u64(a, p), ctx.one()]);
            let has_root = (0..p).any(|x| g.evaluate(&Fp::from_u64(x, p)).is_zero());
            if !has_root && f.rem(&g).map(|r| r.is_zero()).unwrap_or(false) {
                defined.push(g);
            }
        }
    }
    Ok(TwoTorsionSurveyModP { defined, total: 15 })
}

/// Roots of an irreducible monic factor expressed as plain + surd·√d over
/// the query field; empty when the roots do not lie there.
fn roots_over_query(g: &RatPoly, d_query: Option<i64>) -> Vec<(BigRational, BigRational)> {
    let one = BigRational::from(BigInt::from(1));
    match g.degree().unwrap() {
        1 => vec![(g.coeff(0, &one).neg(), one.zero())],
        2 => {
            let Some(d) = d_query else {
                return Vec::new();
            };
            let b = g.coeff(1, &one);
            let c = g.coeff(0, &one);
            let disc = &b * &b - BigRational::from(BigInt::from(4)) * c;
            // roots (-b ± s√d)/2 with disc = s²·d
            let ratio = disc / BigRational::from(BigInt::from(d));
            let Some(s) = rational_sqrt(&ratio) else {
                return Vec::new();
            };
            let half = BigRational::new(1.into(), 2.into());
            let mb = b.neg() * &half;
            let sh = s * &half;
            vec![(mb.clone(), sh.clone()), (mb, sh.neg())]
        }
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::specialize;
    use crate::field::rat_int;
    use crate::poly::rat_poly;

    fn n0_curve_q() -> Curve<BigRational> {
        curve_over_q(&specialize(0, false).unwrap().c).unwrap()
    }

    #[test]
    fn kernel_point_has_order_two() {
        let curve = n0_curve_q();
        let p0 = curve
            .divisor(rat_poly(&[-4, 4, 1]), Polynomial::zero(), 0)
            .unwrap();
        let sum = curve.add(&p0, &p0).unwrap();
        assert!(curve.is_identity(&sum));
        assert_eq!(curve.neg(&p0), p0);
    }

    #[test]
    fn infinity_classes_on_c() {
        // lc(F₂F₄) = 4 is a square, so ∞± are rational on C
        let curve = n0_curve_q();
        assert!(curve.infinity_rational());
        let inf_diff = curve
            .divisor(Polynomial::constant(rat_int(1)), Polynomial::zero(), 2)
            .unwrap();
        let neg = curve.neg(&inf_diff);
        assert!(curve.is_identity(&curve.add(&inf_diff, &neg).unwrap()));
        assert!(!curve.is_identity(&curve.add(&inf_diff, &inf_diff).unwrap()));
    }

    #[test]
    fn c_prime_infinity_not_rational() {
        let curve = curve_over_q(&specialize(0, false).unwrap().c_prime).unwrap();
        assert!(!curve.infinity_rational());
        // the kernel class still works fine
        let p0 = curve
            .divisor(rat_poly(&[2, -3, 1]), Polynomial::zero(), 0)
            .unwrap();
        assert!(curve.is_identity(&curve.add(&p0, &p0).unwrap()));
        // a weight-asymmetric class is rejected
        assert_eq!(
            curve
                .divisor(Polynomial::constant(rat_int(1)), Polynomial::zero(), 2)
                .unwrap_err(),
            JacobianError::InfinityNotRational
        );
    }

    #[test]
    fn rational_point_arithmetic() {
        // (1, 4) lies on C for n = 0: F₂(1)·F₄(1) = 1·16
        let curve = n0_curve_q();
        let p = curve
            .point_minus_infinity(rat_int(1), rat_int(4), true)
            .unwrap();
        let q = curve.neg(&p);
        assert!(curve.is_identity(&curve.add(&p, &q).unwrap()));
        // repeated addition agrees with double-and-add
        let mut acc = curve.identity();
        for _ in 0..8 {
            acc = curve.add(&acc, &p).unwrap();
            assert!(acc.u().degree().unwrap_or(0) <= 2);
        }
        assert_eq!(acc, curve.smul(8, &p).unwrap());
        assert_eq!(curve.smul(0, &p).unwrap(), curve.identity());
        assert!(curve.is_identity(
            &curve
                .add(&curve.smul(5, &p).unwrap(), &curve.smul(-5, &p).unwrap())
                .unwrap()
        ));
    }

    fn all_divisors_mod_p(curve: &Curve<Fp>) -> Vec<BalancedDivisor<Fp>> {
        let p = curve.model().lc().unwrap().p;
        let ctx = Fp::new(0, p);
        let mut out = vec![curve.identity()];
        if curve.infinity_rational() {
            for w in [0u8, 2] {
                out.push(
                    curve
                        .divisor(Polynomial::constant(ctx.one()), Polynomial::zero(), w)
                        .unwrap(),
                );
            }
            for x in 0..p {
                let fx = curve.model().evaluate(&Fp::from_u64(x, p));
                if let Some(y) = fx.sqrt() {
                    let ys = if y.is_zero() {
                        vec![y]
                    } else {
                        vec![y, y.neg()]
                    };
                    for yy in ys {
                        for w in [0u8, 1] {
                            out.push(
                                curve
                                    .divisor(
                                        Polynomial::new(vec![Fp::from_u64(x, p).neg(), ctx.one()]),
                                        Polynomial::constant(yy),
                                        w,
                                    )
                                    .unwrap(),
                            );
                        }
                    }
                }
            }
        }
        // degree-2 classes by brute force over (u, v)
        for a in 0..p {
            for b in 0..p {
                let u = Polynomial::new(vec![Fp::from_u64(b, p), Fp::from_u64(a, p), ctx.one()]);
                for v1 in 0..p {
                    for v0 in 0..p {
                        let v = Polynomial::new(vec![Fp::from_u64(v0, p), Fp::from_u64(v1, p)]);
                        if curve.model().sub(&v.mul(&v)).rem(&u).unwrap().is_zero() {
                            out.push(curve.divisor(u.clone(), v, 0).unwrap());
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn group_law_exhaustive_f3() {
        // |J(F₃)| = 36 for the n = 0 member
        let curve = curve_mod_p(&specialize(0, false).unwrap().c, 3).unwrap();
        let all = all_divisors_mod_p(&curve);
        assert_eq!(all.len(), 36);
        for dv in &all {
            assert_eq!(curve.add(dv, &curve.identity()).unwrap(), *dv);
            assert!(curve.is_identity(&curve.add(dv, &curve.neg(dv)).unwrap()));
            assert!(curve.is_identity(&curve.smul(36, dv).unwrap()));
        }
        for a in &all {
            for b in &all {
                assert_eq!(curve.add(a, b).unwrap(), curve.add(b, a).unwrap());
            }
        }
        for a in &all {
            for b in &all {
                let ab = curve.add(a, b).unwrap();
                for c in &all {
                    let bc = curve.add(b, c).unwrap();
                    assert_eq!(
                        curve.add(&ab, c).unwrap(),
                        curve.add(a, &bc).unwrap(),
                        "associativity failed"
                    );
                }
            }
        }
    }

    #[test]
    fn group_law_exhaustive_f5() {
        // |J(F₅)| = 62 for the n = 0 member
        let curve = curve_mod_p(&specialize(0, false).unwrap().c, 5).unwrap();
        let all = all_divisors_mod_p(&curve);
        assert_eq!(all.len(), 62);
        for dv in &all {
            assert!(curve.is_identity(&curve.smul(62, dv).unwrap()));
            assert!(curve.is_identity(&curve.add(dv, &curve.neg(dv)).unwrap()));
        }
        for a in &all {
            for b in &all {
                let ab = curve.add(a, b).unwrap();
                assert_eq!(ab, curve.add(b, a).unwrap());
                for c in all.iter().step_by(7) {
                    let bc = curve.add(b, c).unwrap();
                    assert_eq!(curve.add(&ab, c).unwrap(), curve.add(a, &bc).unwrap());
                }
            }
        }
    }

    #[test]
    fn quad_field_inverse_and_conjugation() {
        // [(0, 2√13) - ∞⁺] on C for n = 0: F₆(0) = 52 = (2√13)²
        let curve = curve_over_quad(&specialize(0, false).unwrap().c, 13).unwrap();
        let y = Quad::new(rat_int(0), rat_int(2), 13);
        let p = curve
            .point_minus_infinity(Quad::from_rational(rat_int(0), 13), y, true)
            .unwrap();
        assert!(curve.is_identity(&curve.add(&p, &curve.neg(&p)).unwrap()));
        // conjugation is an involution and commutes with addition
        let pc = galois_conjugate(&curve, &p);
        assert_eq!(galois_conjugate(&curve, &pc), p);
        let sum = curve.add(&p, &pc).unwrap();
        assert_eq!(
            galois_conjugate(&curve, &sum),
            curve
                .add(
                    &galois_conjugate(&curve, &p),
                    &galois_conjugate(&curve, &pc)
                )
                .unwrap()
        );
    }

    #[test]
    fn sigma_shift_on_the_split_class() {
        // the ℚ(√22) split of F₄ (n = 0) is shifted by P₀ under conjugation
        let pair = specialize(0, false).unwrap();
        let curve = curve_over_quad(&pair.c, 22).unwrap();
        let splits = conjugate_quadratic_split(&pair.c.f4, 22).unwrap();
        assert_eq!(splits.len(), 1);
        let t = curve
            .divisor(splits[0].g.clone(), Polynomial::zero(), 0)
            .unwrap();
        let p0 = curve
            .divisor(
                rat_poly(&[-4, 4, 1]).map(|c| Quad::from_rational(c.clone(), 22)),
                Polynomial::zero(),
                0,
            )
            .unwrap();
        assert!(sigma_shift_test(&curve, &t, &p0).unwrap());
        // the split class is 2-torsion
        assert!(curve.is_identity(&curve.add(&t, &t).unwrap()));
    }

    #[test]
    fn sigma_shift_negative_and_precondition() {
        let pair = specialize(0, false).unwrap();
        let curve = curve_over_quad(&pair.c, 13).unwrap();
        let p0 = curve
            .divisor(
                rat_poly(&[-4, 4, 1]).map(|c| Quad::from_rational(c.clone(), 13)),
                Polynomial::zero(),
                0,
            )
            .unwrap();
        // a point over ℚ(√13) that is not conjugation-shifted by P₀
        let y = Quad::new(rat_int(0), rat_int(2), 13);
        let p = curve
            .point_minus_infinity(Quad::from_rational(rat_int(0), 13), y, true)
            .unwrap();
        assert_eq!(sigma_shift_test(&curve, &p, &p0), Ok(false));
        // rational points are a precondition violation
        assert_eq!(
            sigma_shift_test(&curve, &p0, &p0),
            Err(JacobianError::RationalPoint)
        );
    }

    #[test]
    fn addition_commutes_with_reduction() {
        let model = specialize(0, false).unwrap().c;
        let curve = curve_over_q(&model).unwrap();
        let p = curve
            .point_minus_infinity(rat_int(1), rat_int(4), true)
            .unwrap();
        let q = curve.add(&p, &p).unwrap();
        let sum = curve.add(&p, &q).unwrap();
        let mut checked = 0;
        for prime in [7u64, 13, 17, 19, 23, 29] {
            let cp = curve_mod_p(&model, prime).unwrap();
            // reduction is only defined when no denominator meets the prime
            let (Ok(pr), Ok(qr), Ok(sum_r)) = (
                divisor_mod_p(&cp, &p, prime),
                divisor_mod_p(&cp, &q, prime),
                divisor_mod_p(&cp, &sum, prime),
            ) else {
                continue;
            };
            assert_eq!(sum_r, cp.add(&pr, &qr).unwrap(), "p = {prime}");
            checked += 1;
        }
        assert!(checked >= 3, "too few good primes exercised");
    }

    #[test]
    fn two_torsion_surveys() {
        let pair = specialize(0, false).unwrap();
        // over ℚ(√13): only the kernel pair is defined
        let survey = two_torsion_classes(&pair.c, TorsionField::Quadratic(13)).unwrap();
        assert_eq!(survey.total(), 15);
        assert_eq!(survey.defined().len(), 1);
        assert!(survey.defined()[0].is_rational());
        // over ℚ(√2): the kernel pair is defined over ℚ already; cross
        // pairs would need the quartic roots individually, which fails
        let survey2 = two_torsion_classes(&pair.c, TorsionField::Quadratic(2)).unwrap();
        assert_eq!(survey2.defined().len(), 1);
        // over ℚ(√22): the kernel pair plus the two split classes
        let survey22 = two_torsion_classes(&pair.c, TorsionField::Quadratic(22)).unwrap();
        assert_eq!(survey22.defined().len(), 3);
        // a model with six rational Weierstrass points has all 15 defined
        let model = crate::family::GenusTwoCurve::new(
            rat_poly(&[0, 1]).mul(&rat_poly(&[-1, 1])),
            rat_poly(&[-2, 1])
                .mul(&rat_poly(&[-3, 1]))
                .mul(&rat_poly(&[-4, 1]))
                .mul(&rat_poly(&[-5, 1])),
        )
        .unwrap();
        let survey_all = two_torsion_classes(&model, TorsionField::Rational).unwrap();
        assert_eq!(survey_all.total(), 15);
        assert_eq!(survey_all.defined().len(), 15);
        let curve = curve_over_q(&model).unwrap();
        for class in survey_all.defined() {
            let dv = class.divisor_rational(&curve).unwrap();
            assert!(curve.is_identity(&curve.add(&dv, &dv).unwrap()));
        }
    }

    #[test]
    fn two_torsion_split_classes_are_two_torsion() {
        let pair = specialize(0, false).unwrap();
        let curve = curve_over_quad(&pair.c, 22).unwrap();
        let survey = two_torsion_classes(&pair.c, TorsionField::Quadratic(22)).unwrap();
        for class in survey.defined() {
            let dv = class.divisor_quad(&curve, 22).unwrap();
            assert!(curve.is_identity(&curve.smul(2, &dv).unwrap()));
        }
    }

    #[test]
    fn membership_is_validated() {
        let curve = n0_curve_q();
        assert_eq!(
            curve
                .divisor(rat_poly(&[1, 1, 1]), Polynomial::zero(), 0)
                .unwrap_err(),
            JacobianError::NotOnCurve
        );
        // a divisor from a different curve is caught by the membership check
        // ((1, 4) happens to lie on every member; its double does not)
        let other = curve_over_q(&specialize(6, false).unwrap().c).unwrap();
        let p_other = other
            .point_minus_infinity(rat_int(1), rat_int(4), true)
            .unwrap();
        let d_other = other.add(&p_other, &p_other).unwrap();
        assert_eq!(
            curve.add(&d_other, &curve.identity()).unwrap_err(),
            JacobianError::NotOnCurve
        );
    }

    #[test]
    fn order_annihilation_f17() {
        // |J(F₁₇)| = 400 for the n = 0 member
        let curve = curve_mod_p(&specialize(0, false).unwrap().c, 17).unwrap();
        let divisors = all_divisors_mod_p(&curve);
        assert_eq!(divisors.len(), 400);
        for dv in divisors.iter().step_by(17).take(20) {
            assert!(curve.is_identity(&curve.smul(400, dv).unwrap()));
        }
    }

    #[test]
    fn two_torsion_mod_p_matches_group_structure() {
        // the defined classes over F_p are exactly the nontrivial
        // 2-torsion of J(F_p), counted exhaustively
        let pair = specialize(0, false).unwrap();
        for p in [3u64, 5, 7, 13] {
            let survey = two_torsion_classes_mod_p(&pair.c, p).unwrap();
            let curve = curve_mod_p(&pair.c, p).unwrap();
            // each defined class is genuinely killed by 2
            for u in &survey.defined {
                let dv = curve.divisor(u.clone(), Polynomial::zero(), 0).unwrap();
                assert!(curve.is_identity(&curve.add(&dv, &dv).unwrap()), "p = {p}");
            }
            let all = all_divisors_mod_p(&curve);
            let two_torsion = all
                .iter()
                .filter(|dv| {
                    !curve.is_identity(dv) && curve.is_identity(&curve.add(dv, dv).unwrap())
                })
                .count();
            assert_eq!(survey.defined.len(), two_torsion, "p = {p}");
        }
    }

    #[test]
    fn weierstrass_cross_pair_points() {
        // [P - Q] for Weierstrass points P = (1,0), Q = (2,0) on C' (n = 0)
        let model = specialize(0, false).unwrap().c_prime;
        let curve = curve_over_q(&model).unwrap();
        let t = curve
            .point_minus_point((rat_int(1), rat_int(0)), (rat_int(2), rat_int(0)))
            .unwrap();
        // this is the kernel class: u = (X-1)(X-2)
        assert_eq!(t.u(), &rat_poly(&[2, -3, 1]));
        assert!(curve.is_identity(&curve.add(&t, &t).unwrap()));
    }
}

//! Dense univariate polynomials over any field of the tower, with
//! resultants and discriminants, reduction mod p, square-free
//! decomposition in characteristic p, the "constant times a square" test,
//! and splitting of quartics into conjugate quadratics over ℚ(√d).

use crate::algebra::{factor, AlgebraError};
use crate::field::{rat_int, rational_sqrt, FieldElement, Fp, Quad};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("discriminant of a constant polynomial")]
    ConstantInput,
    #[error("coefficient denominator divisible by {0}")]
    DenominatorDivisibleBy(u64),
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("expected a quartic with distinct roots")]
    NotASeparableQuartic,
    #[error("√d split requires d ∉ {{0, 1}}")]
    TrivialSurd,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Dense polynomial, coefficients lowest degree first, trailing zeros
/// trimmed. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial<F: FieldElement> {
    coeffs: Vec<F>,
}

impl<F: FieldElement> Polynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Polynomial::new(vec![c])
    }

    /// Build from small integer coefficients in the field of `ctx`.
    pub fn from_ints(ctx: &F, coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| ctx.embed_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of X^i, cloning zero from context when absent.
    pub fn coeff(&self, i: usize, ctx: &F) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lc(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lc()
            .map(|c| c.sub(&c.one()).is_zero())
            .unwrap_or(false)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(c);
        }
        Polynomial::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let zero = self.coeffs[0].zero();
        let mut out = vec![zero; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        Polynomial::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        if e == 0 {
            if let Some(lc) = self.lc() {
                return Polynomial::constant(lc.one());
            }
            return Polynomial::zero();
        }
        let mut base = self.clone();
        let mut acc: Option<Polynomial<F>> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base),
                    None => base.clone(),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    pub fn divmod(&self, rhs: &Self) -> Result<(Self, Self), PolyError> {
        let dlc = rhs.lc().ok_or(PolyError::DivisionByZero)?;
        let dinv = dlc.inv().ok_or(PolyError::DivisionByZero)?;
        let dd = rhs.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() < rhs.coeffs.len() {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let zero = dlc.zero();
        let mut quot = vec![zero; qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + dd].mul(&dinv);
            if c.is_zero() {
                continue;
            }
            for (i, dc) in rhs.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].sub(&c.mul(dc));
            }
            quot[k] = c;
        }
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    pub fn rem(&self, rhs: &Self) -> Result<Self, PolyError> {
        Ok(self.divmod(rhs)?.1)
    }

    /// Division known to be exact; panics on a nonzero remainder.
    pub fn exact_div(&self, rhs: &Self) -> Self {
        let (q, r) = self.divmod(rhs).expect("exact_div by zero");
        assert!(r.is_zero(), "division expected to be exact");
        q
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic().unwrap_or(a)
    }

    /// Extended gcd: returns monic g and s, t with s·self + t·rhs = g.
    pub fn xgcd(&self, rhs: &Self) -> (Self, Self, Self) {
        if self.is_zero() && rhs.is_zero() {
            return (Polynomial::zero(), Polynomial::zero(), Polynomial::zero());
        }
        let one = self
            .lc()
            .or(rhs.lc())
            .map(|c| Polynomial::constant(c.one()))
            .unwrap();
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut s0, mut s1) = (one.clone(), Polynomial::zero());
        let (mut t0, mut t1) = (Polynomial::zero(), one);
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("nonzero divisor");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        let lci = r0.lc().unwrap().inv().expect("nonzero gcd");
        let c = Polynomial::constant(lci);
        (r0.mul(&c), s0.mul(&c), t0.mul(&c))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&c.embed_int(i as i64)))
                .collect(),
        )
    }

    pub fn evaluate(&self, x: &F) -> F {
        let mut acc = x.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Composition self(g(X)).
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Polynomial::constant(c.clone()));
        }
        acc
    }

    pub fn monic(&self) -> Option<Self> {
        let lci = self.lc()?.inv()?;
        Some(Polynomial::new(
            self.coeffs.iter().map(|c| c.mul(&lci)).collect(),
        ))
    }

    /// Map coefficients into another field.
    pub fn map<G: FieldElement>(&self, f: impl Fn(&F) -> G) -> Polynomial<G> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    /// Resultant of two polynomials, by the Euclidean remainder sequence.
    pub fn resultant(&self, rhs: &Self) -> F {
        let ctx = match self.lc().or(rhs.lc()) {
            Some(c) => c.clone(),
            None => panic!("resultant of two zero polynomials"),
        };
        if self.is_zero() || rhs.is_zero() {
            return ctx.zero();
        }
        let mut acc = ctx.one();
        let mut a = self.clone();
        let mut b = rhs.clone();
        loop {
            let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
            if db == 0 {
                return acc.mul(&pow_elem(b.lc().unwrap(), da as u32));
            }
            if da < db {
                if da % 2 == 1 && db % 2 == 1 {
                    acc = acc.neg();
                }
                std::mem::swap(&mut a, &mut b);
                continue;
            }
            let r = a.rem(&b).expect("nonzero divisor");
            if r.is_zero() {
                return ctx.zero();
            }
            let dr = r.degree().unwrap();
            if (da + dr) * db % 2 == 1 {
                acc = acc.neg();
            }
            acc = acc.mul(&pow_elem(b.lc().unwrap(), (da - dr) as u32));
            a = r;
        }
    }

    /// Discriminant: (-1)^(n(n-1)/2) · Res(f, f') / lc(f). Zero exactly
    /// when f has a multiple root.
    pub fn discriminant(&self) -> Result<F, PolyError> {
        let n = self.degree().ok_or(PolyError::ConstantInput)?;
        if n == 0 {
            return Err(PolyError::ConstantInput);
        }
        let fp = self.derivative();
        let lci = self.lc().unwrap().inv().expect("nonzero lc");
        if fp.is_zero() {
            return Ok(lci.zero());
        }
        let res = self.resultant(&fp);
        let d = res.mul(&lci);
        Ok(if (n * (n - 1) / 2) % 2 == 1 {
            d.neg()
        } else {
            d
        })
    }
}

fn pow_elem<F: FieldElement>(c: &F, mut e: u32) -> F {
    let mut acc = c.one();
    let mut base = c.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    acc
}

impl<F: FieldElement> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{:?}", c)?,
                1 => write!(f, "{:?}·X", c)?,
                _ => write!(f, "{:?}·X^{}", c, i)?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Rational polynomials
// ---------------------------------------------------------------------------

pub type RatPoly = Polynomial<BigRational>;

pub fn rat_poly(coeffs: &[i64]) -> RatPoly {
    Polynomial::new(coeffs.iter().map(|&c| rat_int(c)).collect())
}

/// Coefficient-wise reduction mod p. Fails when a denominator is
/// divisible by p.
pub fn reduce_mod_p(f: &RatPoly, p: u64) -> Result<Polynomial<Fp>, PolyError> {
    let mut out = Vec::with_capacity(f.coeffs().len());
    for c in f.coeffs() {
        out.push(Fp::from_rational(c, p).ok_or(PolyError::DenominatorDivisibleBy(p))?);
    }
    Ok(Polynomial::new(out))
}

/// Clear denominators and content: a primitive integer coefficient vector
/// with the same roots.
fn primitive_integer_coeffs(f: &RatPoly) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in f.coeffs() {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return ints;
    }
    ints.iter().map(|c| c / &g).collect()
}

fn divisors_from_factorization(n: &BigInt) -> Result<Vec<BigInt>, PolyError> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factor(n)? {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    Ok(divs)
}

/// All rational roots, found exactly via the rational root theorem on the
/// primitive integer model. Candidates ±p/q are pre-filtered through the
/// divisibility of f(1) by p-q and of f(-1) by p+q; survivors are checked
/// by homogeneous integer evaluation Σ aᵢ pⁱ qⁿ⁻ⁱ.
pub fn rational_roots(f: &RatPoly) -> Result<Vec<BigRational>, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    let ints = primitive_integer_coeffs(f);
    // strip powers of X
    let shift = ints.iter().take_while(|c| c.is_zero()).count();
    if shift > 0 {
        roots.push(rat_int(0));
    }
    let ints = &ints[shift..];
    if ints.len() <= 1 {
        return Ok(roots);
    }
    let a0 = ints[0].clone();
    let ak = ints.last().unwrap().clone();
    let at_one: BigInt = ints.iter().sum();
    let at_minus_one: BigInt = ints
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
        .sum();
    let eval_int = |p: &BigInt, q: &BigInt| -> BigInt {
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        let mut terms = Vec::with_capacity(ints.len());
        for c in ints.iter().rev() {
            terms.push(c * &qpow);
            qpow *= q;
        }
        for t in terms {
            acc = acc * p + t;
        }
        acc
    };
    let divides = |d: &BigInt, m: &BigInt| {
        if d.is_zero() {
            m.is_zero()
        } else {
            (m % d).is_zero()
        }
    };
    for p in divisors_from_factorization(&a0)? {
        for q in divisors_from_factorization(&ak)? {
            if p.gcd(&q) != BigInt::one() {
                continue;
            }
            for sign in [1i64, -1] {
                let pp = &p * BigInt::from(sign);
                if !divides(&(&pp - &q), &at_one) || !divides(&(&pp + &q), &at_minus_one) {
                    continue;
                }
                if eval_int(&pp, &q).is_zero() {
                    let cand = BigRational::new(pp, q.clone());
                    if !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// Monic irreducible factors of a rational polynomial of degree ≤ 4,
/// exact. (Linear factors by the rational root theorem; a rootless
/// quartic splits into two rational quadratics exactly when the resolvent
/// cubic has a suitable rational root.)
pub fn factor_low_degree(f: &RatPoly) -> Result<Vec<RatPoly>, PolyError> {
    let mut rem = f.monic().ok_or(PolyError::ZeroPolynomial)?;
    let mut out = Vec::new();
    for r in rational_roots(f)? {
        let lin = Polynomial::new(vec![-r.clone(), rat_int(1)]);
        loop {
            let (q, rr) = rem.divmod(&lin)?;
            if rr.is_zero() {
                out.push(lin.clone());
                rem = q;
            } else {
                break;
            }
        }
    }
    match rem.degree() {
        None | Some(0) => {}
        Some(1) => out.push(rem),
        Some(2) => {
            out.extend(split_monic_quadratic(&rem));
        }
        Some(3) => out.push(rem), // no rational roots: irreducible cubic
        Some(4) => out.extend(split_rootless_quartic(&rem)?),
        Some(_) => unreachable!("factor_low_degree only handles degree ≤ 4"),
    }
    out.sort_by_key(|p| p.degree());
    Ok(out)
}

fn split_monic_quadratic(q: &RatPoly) -> Vec<RatPoly> {
    let one = rat_int(1);
    let c1 = q.coeff(1, &one);
    let c0 = q.coeff(0, &one);
    let disc = &c1 * &c1 - rat_int(4) * &c0;
    if let Some(s) = rational_sqrt(&disc) {
        let r1 = (-&c1 + &s) / rat_int(2);
        let r2 = (-&c1 - &s) / rat_int(2);
        vec![
            Polynomial::new(vec![-r1, one.clone()]),
            Polynomial::new(vec![-r2, one]),
        ]
    } else {
        vec![q.clone()]
    }
}

/// Split a monic quartic with no rational roots into two monic rational
/// quadratics when possible, via the resolvent cubic whose roots are the
/// constant-coefficient sums q+s of candidate factorisations.
fn split_rootless_quartic(h: &RatPoly) -> Result<Vec<RatPoly>, PolyError> {
    let one = rat_int(1);
    let (c3, c2, c1, c0) = (
        h.coeff(3, &one),
        h.coeff(2, &one),
        h.coeff(1, &one),
        h.coeff(0, &one),
    );
    let resolvent = Polynomial::new(vec![
        -(&c3 * &c3 * &c0 - rat_int(4) * &c2 * &c0 + &c1 * &c1),
        &c3 * &c1 - rat_int(4) * &c0,
        -c2.clone(),
        one.clone(),
    ]);
    for z in rational_roots(&resolvent)? {
        // p + r = c3, pr = c2 - z
        let pr_disc = &c3 * &c3 - rat_int(4) * (&c2 - &z);
        let Some(s) = rational_sqrt(&pr_disc) else {
            continue;
        };
        let p = (&c3 + &s) / rat_int(2);
        let r = (&c3 - &s) / rat_int(2);
        let (qc, sc) = if p != r {
            // q(r - p) = c1 - p z
            let q = (&c1 - &p * &z) / (&r - &p);
            let sc = &z - &q;
            (q, sc)
        } else {
            // equal linear parts: q, s are roots of T² - zT + c0
            let d2 = &z * &z - rat_int(4) * &c0;
            let Some(sd) = rational_sqrt(&d2) else {
                continue;
            };
            ((&z + &sd) / rat_int(2), (&z - &sd) / rat_int(2))
        };
        let g1 = Polynomial::new(vec![qc, p, one.clone()]);
        let g2 = Polynomial::new(vec![sc, r, one.clone()]);
        if g1.mul(&g2) == *h {
            let mut parts = Vec::new();
            for g in [g1, g2] {
                parts.extend(split_monic_quadratic(&g));
            }
            return Ok(parts);
        }
    }
    Ok(vec![h.clone()])
}

// ---------------------------------------------------------------------------
// Square-free structure over F_p
// ---------------------------------------------------------------------------

/// Square-free decomposition over F_p: monic pairwise-coprime square-free
/// parts with their multiplicities. Handles the characteristic-p wrinkle
/// f' = 0 (then f is a p-th power of a deflation, since Frobenius fixes F_p).
pub fn squarefree_decomposition(
    f: &Polynomial<Fp>,
) -> Result<Vec<(Polynomial<Fp>, u32)>, PolyError> {
    let f = f.monic().ok_or(PolyError::ZeroPolynomial)?;
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let p = f.lc().unwrap().p;
    let fp = f.derivative();
    if fp.is_zero() {
        // f = g(X^p) = g(X)^p over the prime field
        let g = deflate(&f, p as usize);
        let inner = squarefree_decomposition(&g)?;
        return Ok(inner.into_iter().map(|(h, m)| (h, m * p as u32)).collect());
    }
    let mut out = Vec::new();
    let g0 = f.gcd(&fp);
    let mut w = f.exact_div(&g0);
    let mut g = g0;
    let mut i = 1u32;
    while w.degree() != Some(0) {
        let y = w.gcd(&g);
        let z = w.exact_div(&y);
        if z.degree().unwrap_or(0) > 0 {
            out.push((z, i));
        }
        g = g.exact_div(&y);
        w = y;
        i += 1;
    }
    if g.degree().unwrap_or(0) > 0 {
        // multiplicities divisible by p remain; g' = 0 by construction
        out.extend(squarefree_decomposition(&g)?);
    }
    Ok(out)
}

fn deflate(f: &Polynomial<Fp>, p: usize) -> Polynomial<Fp> {
    Polynomial::new(f.coeffs().iter().step_by(p).copied().collect::<Vec<_>>())
}

/// Whether f = c·g² over F_p for a constant c: every square-free factor
/// must occur with even multiplicity.
pub fn is_constant_times_square(f: &Polynomial<Fp>) -> Result<bool, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(squarefree_decomposition(f)?.iter().all(|(_, m)| m % 2 == 0))
}

// ---------------------------------------------------------------------------
// Conjugate quadratic splits of quartics
// ---------------------------------------------------------------------------

/// A factorisation f = lc · g · ḡ with g a monic quadratic over ℚ(√d),
/// not rational, and ḡ its conjugate.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateSplit {
    pub g: Polynomial<Quad>,
    pub g_conj: Polynomial<Quad>,
}

/// The cubic in t = a₁²·d whose rational roots drive the conjugate
/// splits of a quartic; its coefficients do not involve d, so its roots
/// can be found once and reused across every √d.
pub fn pairing_cubic_roots(f: &RatPoly) -> Result<Vec<BigRational>, PolyError> {
    if f.degree() != Some(4) {
        return Err(PolyError::NotASeparableQuartic);
    }
    if Zero::is_zero(&f.discriminant()?) {
        return Err(PolyError::NotASeparableQuartic);
    }
    let h = f.monic().unwrap();
    let one = rat_int(1);
    let (c3, c2, c1, c0) = (
        h.coeff(3, &one),
        h.coeff(2, &one),
        h.coeff(1, &one),
        h.coeff(0, &one),
    );
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let big_a = &c3 * &half;
    let e = (&c2 - &big_a * &big_a) * &half;
    // C(t) = t(e + t/2)² - (A(e + t/2) - c₁/2)² - c₀t
    let quarter = &half * &half;
    let cubic = Polynomial::new(vec![
        -(&big_a * &big_a * &e * &e - &big_a * &c1 * &e + &c1 * &c1 * &quarter),
        &e * &e - &big_a * &big_a * &e + &big_a * &c1 * &half - &c0,
        &e - &big_a * &big_a * &quarter,
        quarter,
    ]);
    rational_roots(&cubic)
}

/// Split a separable rational quartic into two conjugate monic quadratics
/// over ℚ(√d), returning every such split.
///
/// Writing the monic part as X⁴+c₃X³+c₂X²+c₁X+c₀ and the factor as
/// g = X² + (c₃/2 + a₁√d)X + (b₀ + b₁√d), elimination of b₀, b₁ leaves a
/// cubic in t = a₁²·d whose coefficients do not involve d; rational roots
/// t with t/d a nonzero rational square give the a₁ ≠ 0 splits, and the
/// a₁ = 0 branch is solved directly from the constant term.
pub fn conjugate_quadratic_split(f: &RatPoly, d: i64) -> Result<Vec<ConjugateSplit>, PolyError> {
    let roots = pairing_cubic_roots(f)?;
    conjugate_quadratic_split_with_roots(f, d, &roots)
}

/// The split test against precomputed pairing-cubic roots.
pub fn conjugate_quadratic_split_with_roots(
    f: &RatPoly,
    d: i64,
    cubic_roots: &[BigRational],
) -> Result<Vec<ConjugateSplit>, PolyError> {
    if d == 0 || d == 1 {
        return Err(PolyError::TrivialSurd);
    }
    if f.degree() != Some(4) {
        return Err(PolyError::NotASeparableQuartic);
    }
    let h = f.monic().unwrap();
    let one = rat_int(1);
    let (c3, c2, c1, c0) = (
        h.coeff(3, &one),
        h.coeff(2, &one),
        h.coeff(1, &one),
        h.coeff(0, &one),
    );
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let big_a = &c3 * &half;
    let e = (&c2 - &big_a * &big_a) * &half;
    let mut splits = Vec::new();

    // a₁ ≠ 0 branch
    for t in cubic_roots {
        if Zero::is_zero(t) {
            continue;
        }
        let s = t / rat_int(d);
        let Some(a1) = rational_sqrt(&s) else {
            continue;
        };
        if Zero::is_zero(&a1) {
            continue;
        }
        let b0 = &e + t * &half;
        let b1 = (&big_a * &b0 - &c1 * &half) / (&a1 * rat_int(d));
        let g = Polynomial::new(vec![
            Quad::new(b0, b1, d),
            Quad::new(big_a.clone(), a1, d),
            Quad::from_rational(one.clone(), d),
        ]);
        push_verified_split(&mut splits, &h, g);
    }

    // a₁ = 0 branch: b₀ = e forced, consistency A·b₀ = c₁/2, b₁² = (b₀²-c₀)/d
    if &big_a * &e == &c1 * &half {
        let b1sq = (&e * &e - &c0) / rat_int(d);
        if let Some(b1) = rational_sqrt(&b1sq) {
            if !Zero::is_zero(&b1) {
                let g = Polynomial::new(vec![
                    Quad::new(e.clone(), b1, d),
                    Quad::from_rational(big_a.clone(), d),
                    Quad::from_rational(one, d),
                ]);
                push_verified_split(&mut splits, &h, g);
            }
        }
    }
    Ok(splits)
}

fn push_verified_split(splits: &mut Vec<ConjugateSplit>, h: &RatPoly, g: Polynomial<Quad>) {
    let g_conj = g.map(|c| c.conj());
    // exact identity check: g·ḡ must reproduce the monic quartic
    let prod = g.mul(&g_conj);
    let h_embed = h.map(|c| Quad::from_rational(c.clone(), g.lc().unwrap().d));
    if prod != h_embed {
        return;
    }
    // must genuinely live over ℚ(√d)
    if g.coeffs().iter().all(|c| c.is_rational()) {
        return;
    }
    let canonical = canonical_split(g, g_conj);
    if !splits.contains(&canonical) {
        splits.push(canonical);
    }
}

/// Order the pair (g, ḡ) deterministically: the representative has a
/// positive surd part in its leading irrational coefficient.
fn canonical_split(g: Polynomial<Quad>, g_conj: Polynomial<Quad>) -> ConjugateSplit {
    let lead_surd = g
        .coeffs()
        .iter()
        .rev()
        .find(|c| !Zero::is_zero(&c.b))
        .map(|c| c.b.is_negative())
        .unwrap_or(false);
    if lead_surd {
        ConjugateSplit {
            g: g_conj,
            g_conj: g,
        }
    } else {
        ConjugateSplit { g, g_conj }
    }
}

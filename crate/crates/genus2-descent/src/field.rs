//! The field tower the curve machinery runs over: ℚ, real and imaginary
//! quadratic fields ℚ(√d), prime fields F_p and their quadratic
//! extensions F_{p²}.
//!
//! Field elements carry their own context (the d of ℚ(√d), the modulus of
//! F_p), so one generic polynomial and jacobian implementation serves the
//! whole tower. Every operation is exact.

use crate::algebra::{is_prime_u64, legendre};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

/// Element of a field, carrying enough context to produce further
/// elements of the same field.
pub trait FieldElement: Clone + PartialEq + fmt::Debug {
    /// Additive identity of this element's field.
    fn zero(&self) -> Self;
    /// Multiplicative identity of this element's field.
    fn one(&self) -> Self;
    /// Image of a small rational integer in this element's field.
    fn embed_int(&self, n: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// A square root in the field if one exists, canonically chosen so
    /// that repeated calls and different runs agree.
    fn sqrt(&self) -> Option<Self>;
}

// ---------------------------------------------------------------------------
// ℚ
// ---------------------------------------------------------------------------

impl FieldElement for BigRational {
    fn zero(&self) -> Self {
        rat_int(0)
    }
    fn one(&self) -> Self {
        rat_int(1)
    }
    fn embed_int(&self, n: i64) -> Self {
        BigRational::from(BigInt::from(n))
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }
}

/// Exact square root of a rational, when it is a square; the positive root.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    if Zero::is_zero(q) {
        return Some(rat_int(0));
    }
    let ns = q.numer().sqrt();
    let ds = q.denom().sqrt();
    if &(&ns * &ns) == q.numer() && &(&ds * &ds) == q.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// ℚ(√d)
// ---------------------------------------------------------------------------

/// a + b√d with a, b rational and d a fixed square-free integer ≠ 0, 1.
#[derive(Clone, PartialEq, Eq)]
pub struct Quad {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

impl Quad {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Self {
        assert!(d != 0 && d != 1, "√d requires d ∉ {{0, 1}}");
        Quad { a, b, d }
    }

    pub fn from_rational(a: BigRational, d: i64) -> Self {
        Quad::new(a, rat_int(0), d)
    }

    /// The generator √d itself.
    pub fn sqrt_d(d: i64) -> Self {
        Quad::new(rat_int(0), rat_int(1), d)
    }

    /// Galois conjugate a - b√d.
    pub fn conj(&self) -> Self {
        Quad::new(self.a.clone(), -self.b.clone(), self.d)
    }

    /// Field norm a² - d·b², a rational.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat_int(self.d) * &self.b * &self.b
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }

    fn chk(&self, rhs: &Self) {
        assert_eq!(
            self.d, rhs.d,
            "mixed quadratic fields: √{} vs √{}",
            self.d, rhs.d
        );
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.b) {
            write!(f, "{}", self.a)
        } else {
            write!(f, "({} + {}√{})", self.a, self.b, self.d)
        }
    }
}

impl FieldElement for Quad {
    fn zero(&self) -> Self {
        Quad::new(rat_int(0), rat_int(0), self.d)
    }
    fn one(&self) -> Self {
        Quad::new(rat_int(1), rat_int(0), self.d)
    }
    fn embed_int(&self, n: i64) -> Self {
        Quad::from_rational(rat_int(n), self.d)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.chk(rhs);
        Quad::new(&self.a + &rhs.a, &self.b + &rhs.b, self.d)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.chk(rhs);
        Quad::new(&self.a - &rhs.a, &self.b - &rhs.b, self.d)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.chk(rhs);
        let d = rat_int(self.d);
        Quad::new(
            &self.a * &rhs.a + &d * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
            self.d,
        )
    }
    fn neg(&self) -> Self {
        Quad::new(-self.a.clone(), -self.b.clone(), self.d)
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if Zero::is_zero(&n) {
            return None;
        }
        let c = self.conj();
        let ni = n.recip();
        Some(Quad::new(&c.a * &ni, &c.b * &ni, self.d))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn sqrt(&self) -> Option<Self> {
        // (x + y√d)² = a + b√d means x² + dy² = a and 2xy = b.
        if self.is_zero() {
            return Some(self.zero());
        }
        if Zero::is_zero(&self.b) {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(Quad::from_rational(r, self.d));
            }
            // a = d·y² with y rational
            let y2 = &self.a / rat_int(self.d);
            if let Some(y) = rational_sqrt(&y2) {
                return Some(Quad::new(rat_int(0), y, self.d));
            }
            return None;
        }
        // b ≠ 0: x² solves 4t² - 4at + d b² = 0, so t = (a ± √(a²-db²))/2.
        let disc = self.norm();
        let root = rational_sqrt(&disc)?;
        for sign in [1i64, -1] {
            let t = (&self.a + rat_int(sign) * &root) / rat_int(2);
            if let Some(x) = rational_sqrt(&t) {
                if Zero::is_zero(&x) {
                    continue;
                }
                let y = &self.b / (rat_int(2) * &x);
                let cand = Quad::new(x, y, self.d);
                if cand.mul(&cand) == *self {
                    // canonical: rational part positive, else surd part positive
                    return Some(canonical_quad_root(cand));
                }
            }
        }
        None
    }
}

fn canonical_quad_root(r: Quad) -> Quad {
    let flip = if !Zero::is_zero(&r.a) {
        r.a.is_negative()
    } else {
        r.b.is_negative()
    };
    if flip {
        r.neg()
    } else {
        r
    }
}

// ---------------------------------------------------------------------------
// F_p
// ---------------------------------------------------------------------------

/// Element of the prime field F_p, p an odd prime below 2³¹.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Self {
        debug_assert!(
            p >= 2 && p < (1 << 31) && is_prime_u64(p),
            "bad modulus {p}"
        );
        Fp {
            v: v.rem_euclid(p as i64) as u64,
            p,
        }
    }

    pub fn from_u64(v: u64, p: u64) -> Self {
        Fp { v: v % p, p }
    }

    /// Reduce a rational mod p; `None` when the denominator vanishes mod p.
    pub fn from_rational(q: &BigRational, p: u64) -> Option<Self> {
        let pb = BigInt::from(p);
        let den = q.denom().mod_floor(&pb);
        if den.is_zero() {
            return None;
        }
        let num = q.numer().mod_floor(&pb);
        let num = num.to_u64().expect("residue fits u64");
        let den = den.to_u64().expect("residue fits u64");
        let fi = Fp::from_u64(den, p).inv().expect("nonzero denominator");
        Some(Fp::from_u64(num, p).mul(&fi))
    }

    pub fn pow(&self, mut e: u64) -> Fp {
        let mut base = *self;
        let mut acc = Fp::from_u64(1, self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    fn chk(&self, rhs: &Self) {
        assert_eq!(self.p, rhs.p, "mixed prime fields");
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}₍{}₎", self.v, self.p)
    }
}

impl FieldElement for Fp {
    fn zero(&self) -> Self {
        Fp::from_u64(0, self.p)
    }
    fn one(&self) -> Self {
        Fp::from_u64(1, self.p)
    }
    fn embed_int(&self, n: i64) -> Self {
        Fp::new(n, self.p)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.chk(rhs);
        Fp::from_u64(self.v + rhs.v, self.p)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.chk(rhs);
        Fp::from_u64(self.v + self.p - rhs.v, self.p)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.chk(rhs);
        Fp {
            v: (self.v as u128 * rhs.v as u128 % self.p as u128) as u64,
            p: self.p,
        }
    }
    fn neg(&self) -> Self {
        Fp::from_u64(self.p - self.v % self.p, self.p)
    }
    fn inv(&self) -> Option<Self> {
        if self.v == 0 {
            None
        } else {
            Some(self.pow(self.p - 2))
        }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn sqrt(&self) -> Option<Self> {
        fp_sqrt(*self)
    }
}

/// Tonelli-Shanks, deterministic: the non-residue used is the smallest.
fn fp_sqrt(a: Fp) -> Option<Fp> {
    let p = a.p;
    if a.v == 0 {
        return Some(a);
    }
    if p == 2 {
        return Some(a);
    }
    if a.pow((p - 1) / 2).v != 1 {
        return None;
    }
    let r = if p % 4 == 3 {
        a.pow((p + 1) / 4)
    } else {
        // full Tonelli-Shanks
        let mut q = p - 1;
        let mut s = 0u32;
        while q & 1 == 0 {
            q >>= 1;
            s += 1;
        }
        let z = smallest_nonresidue(p);
        let mut m = s;
        let mut c = Fp::from_u64(z, p).pow(q);
        let mut t = a.pow(q);
        let mut r = a.pow((q + 1) / 2);
        while t.v != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2.v != 1 {
                t2 = t2.mul(&t2);
                i += 1;
                debug_assert!(i < m);
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = b.mul(&b);
            }
            m = i;
            c = b.mul(&b);
            t = t.mul(&c);
            r = r.mul(&b);
        }
        r
    };
    // canonical: the smaller of the two roots
    Some(if r.v <= p - r.v { r } else { r.neg() })
}

/// Smallest quadratic non-residue mod p; fixed for reproducibility.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&z| legendre(&BigInt::from(z), p) == Ok(-1))
        .expect("every odd prime field has a non-residue")
}

// ---------------------------------------------------------------------------
// F_{p²}
// ---------------------------------------------------------------------------

/// Element x + y·t of F_{p²} with t² the smallest non-residue of F_p.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Fp2 {
    pub x: Fp,
    pub y: Fp,
    /// t² = nr, validated as a non-residue by Euler's criterion.
    pub nr: u64,
}

impl Fp2 {
    pub fn new(x: Fp, y: Fp) -> Self {
        let nr = smallest_nonresidue(x.p);
        Fp2 { x, y, nr }
    }

    pub fn from_fp(x: Fp) -> Self {
        Fp2::new(x, Fp::from_u64(0, x.p))
    }

    pub fn p(&self) -> u64 {
        self.x.p
    }

    /// Norm down to F_p: (x + yt)(x - yt) = x² - nr·y².
    pub fn norm(&self) -> Fp {
        let n = Fp::from_u64(self.nr, self.p());
        self.x.mul(&self.x).sub(&n.mul(&self.y).mul(&self.y))
    }

    pub fn pow(&self, mut e: u64) -> Fp2 {
        let mut base = *self;
        let mut acc = Fp2::from_fp(Fp::from_u64(1, self.p()));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Quadratic character of F_{p²} via the norm: χ(z) = χ_p(N(z)).
    pub fn chi(&self) -> i32 {
        let n = self.norm();
        if n.v == 0 {
            0
        } else if n.pow((self.p() - 1) / 2).v == 1 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Debug for Fp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}t)₍{}²₎", self.x.v, self.y.v, self.p())
    }
}

impl FieldElement for Fp2 {
    fn zero(&self) -> Self {
        Fp2::from_fp(Fp::from_u64(0, self.p()))
    }
    fn one(&self) -> Self {
        Fp2::from_fp(Fp::from_u64(1, self.p()))
    }
    fn embed_int(&self, n: i64) -> Self {
        Fp2::from_fp(Fp::new(n, self.p()))
    }
    fn add(&self, rhs: &Self) -> Self {
        Fp2::new(self.x.add(&rhs.x), self.y.add(&rhs.y))
    }
    fn sub(&self, rhs: &Self) -> Self {
        Fp2::new(self.x.sub(&rhs.x), self.y.sub(&rhs.y))
    }
    fn mul(&self, rhs: &Self) -> Self {
        let n = Fp::from_u64(self.nr, self.p());
        Fp2::new(
            self.x.mul(&rhs.x).add(&n.mul(&self.y).mul(&rhs.y)),
            self.x.mul(&rhs.y).add(&self.y.mul(&rhs.x)),
        )
    }
    fn neg(&self) -> Self {
        Fp2::new(self.x.neg(), self.y.neg())
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        let ni = n.inv()?;
        Some(Fp2::new(self.x.mul(&ni), self.y.neg().mul(&ni)))
    }
    fn is_zero(&self) -> bool {
        self.x.v == 0 && self.y.v == 0
    }
    fn sqrt(&self) -> Option<Self> {
        fp2_sqrt(*self)
    }
}

/// Tonelli-Shanks in F_{p²} (group order p²-1), deterministic non-residue.
fn fp2_sqrt(a: Fp2) -> Option<Fp2> {
    let p = a.p();
    if a.is_zero() {
        return Some(a);
    }
    if a.chi() != 1 {
        return None;
    }
    let q2 = p * p - 1;
    let mut q = q2;
    let mut s = 0u32;
    while q & 1 == 0 {
        q >>= 1;
        s += 1;
    }
    // deterministic scan for a non-residue of F_{p²}
    let z = (0..)
        .flat_map(|y| (0..p).map(move |x| (x, y)))
        .map(|(x, y)| Fp2::new(Fp::from_u64(x, p), Fp::from_u64(y % p, p)))
        .find(|c| c.chi() == -1)
        .expect("F_{p²} has non-residues");
    let mut m = s;
    let mut c = z.pow(q);
    let mut t = a.pow(q);
    let mut r = a.pow((q + 1) / 2);
    while !(t.x.v == 1 && t.y.v == 0) {
        let mut i = 0u32;
        let mut t2 = t;
        while !(t2.x.v == 1 && t2.y.v == 0) {
            t2 = t2.mul(&t2);
            i += 1;
            if i >= m {
                return None;
            }
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = b.mul(&b);
        }
        m = i;
        c = b.mul(&b);
        t = t.mul(&c);
        r = r.mul(&b);
    }
    // canonical representative: smaller (x, y) pair of the two roots
    let other = r.neg();
    Some(if (r.x.v, r.y.v) <= (other.x.v, other.y.v) {
        r
    } else {
        other
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_ops() {
        let x = Quad::new(rat_int(3), rat_int(2), 13);
        assert_eq!(x.conj(), Quad::new(rat_int(3), rat_int(-2), 13));
        let u = Quad::new(rat_int(1), rat_int(1), 2);
        assert_eq!(u.norm(), rat_int(-1));
        assert_eq!(u.mul(&u.conj()), Quad::from_rational(rat_int(-1), 2));
        let inv = u.inv().unwrap();
        assert_eq!(u.mul(&inv), u.one());
    }

    #[test]
    fn quad_sqrt_cases() {
        // √(9/4) rational inside ℚ(√5)
        let a = Quad::from_rational(rat(9, 4), 5);
        assert_eq!(a.sqrt().unwrap(), Quad::from_rational(rat(3, 2), 5));
        // √20 = 2√5
        let b = Quad::from_rational(rat_int(20), 5);
        assert_eq!(b.sqrt().unwrap(), Quad::new(rat_int(0), rat_int(2), 5));
        // (1 + √2)² = 3 + 2√2
        let c = Quad::new(rat_int(3), rat_int(2), 2);
        assert_eq!(c.sqrt().unwrap(), Quad::new(rat_int(1), rat_int(1), 2));
        // 2 is not a square in ℚ(√3)
        assert!(Quad::from_rational(rat_int(2), 3).sqrt().is_none());
        // 696 = (2√174)² in ℚ(√174)
        let e = Quad::from_rational(rat_int(696), 174);
        assert_eq!(e.sqrt().unwrap(), Quad::new(rat_int(0), rat_int(2), 174));
    }

    #[test]
    fn fp_sqrt_all_small_primes() {
        for p in [3u64, 5, 7, 11, 13, 17, 101, 10007] {
            for v in 0..p.min(200) {
                let a = Fp::from_u64(v, p);
                match a.sqrt() {
                    Some(r) => assert_eq!(r.mul(&r), a, "p={p} v={v}"),
                    None => assert_eq!(a.pow((p - 1) / 2).v, p - 1, "p={p} v={v}"),
                }
            }
        }
    }

    #[test]
    fn fp2_multiplicative_order() {
        // z^(p²-1) = 1 for z ≠ 0, sampled
        for p in [3u64, 5, 13] {
            for x in 0..p {
                for y in 0..p {
                    let z = Fp2::new(Fp::from_u64(x, p), Fp::from_u64(y, p));
                    if z.is_zero() {
                        continue;
                    }
                    let w = z.pow(p * p - 1);
                    assert!(w.x.v == 1 && w.y.v == 0);
                }
            }
        }
    }

    #[test]
    fn fp2_sqrt_roundtrip() {
        for p in [3u64, 5, 13] {
            for x in 0..p {
                for y in 0..p {
                    let z = Fp2::new(Fp::from_u64(x, p), Fp::from_u64(y, p));
                    if let Some(r) = z.sqrt() {
                        assert_eq!(r.mul(&r), z);
                    } else {
                        assert_eq!(z.chi(), -1);
                    }
                }
            }
        }
    }

    #[test]
    fn nonresidue_is_validated_by_euler() {
        for p in [3u64, 5, 7, 11, 13, 17] {
            let nr = smallest_nonresidue(p);
            assert_eq!(Fp::from_u64(nr, p).pow((p - 1) / 2).v, p - 1);
        }
    }
}

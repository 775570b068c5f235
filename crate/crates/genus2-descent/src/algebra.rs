//! Exact integer and rational number theory: factorisation, primality,
//! square classes of ℚ*/ℚ*², Legendre symbols, p-adic square tests and
//! prime splitting in real quadratic fields.
//!
//! Everything here is exact; no floating point is used anywhere.
//!
//! Factorisation is by trial division over a prime table together with a
//! deterministic Miller-Rabin test. This completely factors any integer
//! whose prime factors are at most [`TRIAL_DIVISION_BOUND`], and any
//! integer with at most two prime factors above it (prime, square of a
//! prime, or product of two distinct primes are all recognised exactly).
//! Inputs outside that range yield [`AlgebraError::FactorBound`] rather
//! than a wrong answer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

/// All prime factors up to this bound are found by trial division.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("zero has no square class")]
    ZeroInput,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("splitting field discriminant {0} is not 1 mod 4")]
    BadSplittingField(u64),
    #[error("factor residue {0} exceeds the supported factorisation range")]
    FactorBound(BigInt),
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_DIVISION_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut p = 2usize;
        while p * p <= n {
            if sieve[p] {
                let mut q = p * p;
                while q <= n {
                    sieve[q] = false;
                    q += p;
                }
            }
            p += 1;
        }
        (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
    })
}

/// Ascending primes up to an inclusive bound (≤ [`TRIAL_DIVISION_BOUND`]).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    assert!(bound <= TRIAL_DIVISION_BOUND);
    small_primes()
        .iter()
        .copied()
        .take_while(|&p| p <= bound)
        .collect()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `u64` (the 12-witness set is proven
/// deterministic far beyond the 64-bit range).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the fixed witness set {2,...,37}, deterministic for
/// inputs below 3.3·10²⁴; every integer this artifact tests for primality
/// is far below that bound.
pub fn is_prime(n: &BigInt) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if n.is_negative() || n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &[2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigInt::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2u32), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exact integer square root test.
fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Factor |n| into primes. Errors when a residual cofactor cannot be
/// certified within the trial-division bound.
pub fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>, AlgebraError> {
    let mut m = n.abs();
    if m.is_zero() {
        return Err(AlgebraError::ZeroInput);
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        // Residual smaller than p² must be prime.
        if m.to_u64().map(|v| v < p * p).unwrap_or(false) {
            break;
        }
        let pb = BigInt::from(p);
        if (&m % &pb).is_zero() {
            let mut e = 0u32;
            loop {
                let (q, r) = m.div_rem(&pb);
                if r.is_zero() {
                    m = q;
                    e += 1;
                } else {
                    break;
                }
            }
            out.push((p, e));
        }
        // Periodically settle large residuals that became prime or a
        // recognisable two-factor shape.
        if p % 4096 == 1 && resolve_residual(&mut m, &mut out)? {
            break;
        }
    }
    if !m.is_one() && !resolve_residual(&mut m, &mut out)? {
        return Err(AlgebraError::FactorBound(m));
    }
    out.sort_unstable();
    Ok(out)
}

/// Try to finish off a residual with no factors below the trial bound
/// already removed: prime, prime², or (for square-free purposes) refuse.
fn resolve_residual(m: &mut BigInt, out: &mut Vec<(u64, u32)>) -> Result<bool, AlgebraError> {
    if m.is_one() {
        return Ok(true);
    }
    if is_prime(m) {
        let p = m
            .to_u64()
            .ok_or_else(|| AlgebraError::FactorBound(m.clone()))?;
        out.push((p, 1));
        *m = BigInt::one();
        return Ok(true);
    }
    if let Some(r) = perfect_sqrt(m) {
        if is_prime(&r) {
            let p = r
                .to_u64()
                .ok_or_else(|| AlgebraError::FactorBound(m.clone()))?;
            out.push((p, 2));
            *m = BigInt::one();
            return Ok(true);
        }
    }
    Ok(false)
}

/// An element of ℚ*/ℚ*², held canonically as a signed square-free integer.
///
/// Two classes are equal exactly when their representatives are equal.
/// The group operation never needs a factorisation: for square-free a, b
/// the square-free part of ab is ab/gcd(a,b)².
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquareClass {
    rep: BigInt,
}

impl SquareClass {
    /// Canonicalise an integer into its square class.
    pub fn new(n: impl Into<BigInt>) -> Result<Self, AlgebraError> {
        let n: BigInt = n.into();
        if n.is_zero() {
            return Err(AlgebraError::ZeroInput);
        }
        let mut rep = if n.is_negative() {
            BigInt::from(-1)
        } else {
            BigInt::one()
        };
        for (p, e) in factor(&n)? {
            if e % 2 == 1 {
                rep *= BigInt::from(p);
            }
        }
        Ok(SquareClass { rep })
    }

    /// The trivial class.
    pub fn one() -> Self {
        SquareClass { rep: BigInt::one() }
    }

    pub fn is_one(&self) -> bool {
        self.rep.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.rep.is_negative()
    }

    pub fn rep(&self) -> &BigInt {
        &self.rep
    }

    pub fn rep_i64(&self) -> Option<i64> {
        self.rep.to_i64()
    }

    /// Group law in ℚ*/ℚ*². Exact without factoring.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let g = self.rep.gcd(&other.rep);
        SquareClass {
            rep: (&self.rep * &other.rep) / (&g * &g),
        }
    }

    /// Odd primes dividing the representative.
    pub fn odd_prime_support(&self) -> Result<Vec<u64>, AlgebraError> {
        Ok(factor(&self.rep)?
            .into_iter()
            .map(|(p, _)| p)
            .filter(|&p| p != 2)
            .collect())
    }

    pub fn is_even(&self) -> bool {
        self.rep.is_even()
    }
}

impl fmt::Debug for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

impl PartialOrd for SquareClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by absolute value, positive before negative, so candidate
/// listings come out as 1, -1, 2, -2, ...
impl Ord for SquareClass {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rep.abs(), self.rep.is_negative()).cmp(&(other.rep.abs(), other.rep.is_negative()))
    }
}

/// Square-free part of a nonzero rational: the unique square-free integer
/// s with q/s a rational square. Idempotent on square-free integers.
pub fn squarefree_part(q: &BigRational) -> Result<SquareClass, AlgebraError> {
    if q.is_zero() {
        return Err(AlgebraError::ZeroInput);
    }
    // a/b differs from ab by the square b², so work over the integers.
    let num = SquareClass::new(q.numer().clone())?;
    let den = SquareClass::new(q.denom().clone())?;
    Ok(num.mul(&den))
}

/// Legendre symbol (a|p) for odd prime p, by Euler's criterion.
pub fn legendre(a: &BigInt, p: u64) -> Result<i32, AlgebraError> {
    if p == 2 || !is_prime_u64(p) {
        return Err(AlgebraError::NotOddPrime(p));
    }
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return Ok(0);
    }
    let e = powmod(r, (p - 1) / 2, p);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Whether a square class is a square in the p-adic field ℚ_p.
///
/// For odd p: the valuation must be even (for a square-free representative
/// that means p does not divide it) and the unit part a residue. For p = 2:
/// the representative must be odd and congruent to 1 mod 8.
pub fn is_square_in_qp(d: &SquareClass, p: u64) -> Result<bool, AlgebraError> {
    if !is_prime_u64(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    let rep = d.rep();
    if p == 2 {
        if rep.is_even() {
            return Ok(false);
        }
        return Ok(rep.mod_floor(&BigInt::from(8)) == BigInt::one());
    }
    if (rep % BigInt::from(p)).is_zero() {
        return Ok(false);
    }
    Ok(legendre(rep, p)? == 1)
}

/// Behaviour of a rational prime in the real quadratic field ℚ(√l),
/// for prime l ≡ 1 (mod 4) (so that l is the field discriminant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Splitting::Split => write!(f, "split"),
            Splitting::Inert => write!(f, "inert"),
            Splitting::Ramified => write!(f, "ramified"),
        }
    }
}

/// Splitting of p in ℚ(√l). Requires l prime with l ≡ 1 (mod 4).
pub fn prime_splitting(p: u64, l: u64) -> Result<Splitting, AlgebraError> {
    if !is_prime_u64(l) || l % 4 != 1 {
        return Err(AlgebraError::BadSplittingField(l));
    }
    if !is_prime_u64(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    if p == l {
        return Ok(Splitting::Ramified);
    }
    if p == 2 {
        return Ok(if l % 8 == 5 {
            Splitting::Inert
        } else {
            Splitting::Split
        });
    }
    Ok(match legendre(&BigInt::from(l), p)? {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified, // p | l cannot happen for p ≠ l prime
    })
}

/// Image of a square class in ℚ_p*/ℚ_p*², as a small exact tag.
///
/// For odd p the tag is (valuation mod 2, unit part is a non-residue);
/// for p = 2 it is (valuation mod 2, odd part mod 8); for the real place
/// it is the sign. Tags multiply componentwise, so spans of certified
/// classes can be computed without any p-adic arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalClass {
    Odd { val_odd: bool, nonresidue: bool },
    Two { val_odd: bool, odd_mod8: u8 },
    Real { negative: bool },
}

impl LocalClass {
    pub fn is_trivial(&self) -> bool {
        match *self {
            LocalClass::Odd {
                val_odd,
                nonresidue,
            } => !val_odd && !nonresidue,
            LocalClass::Two { val_odd, odd_mod8 } => !val_odd && odd_mod8 == 1,
            LocalClass::Real { negative } => !negative,
        }
    }

    pub fn mul(&self, other: &LocalClass) -> LocalClass {
        match (*self, *other) {
            (
                LocalClass::Odd {
                    val_odd: v1,
                    nonresidue: n1,
                },
                LocalClass::Odd {
                    val_odd: v2,
                    nonresidue: n2,
                },
            ) => LocalClass::Odd {
                val_odd: v1 ^ v2,
                nonresidue: n1 ^ n2,
            },
            (
                LocalClass::Two {
                    val_odd: v1,
                    odd_mod8: u1,
                },
                LocalClass::Two {
                    val_odd: v2,
                    odd_mod8: u2,
                },
            ) => LocalClass::Two {
                val_odd: v1 ^ v2,
                odd_mod8: (u1 * u2) % 8,
            },
            (LocalClass::Real { negative: s1 }, LocalClass::Real { negative: s2 }) => {
                LocalClass::Real { negative: s1 ^ s2 }
            }
            _ => panic!("local classes at different places"),
        }
    }
}

/// Localise a square class at an odd prime, at 2, or at the real place.
pub fn localize(d: &SquareClass, place: Option<u64>) -> Result<LocalClass, AlgebraError> {
    let rep = d.rep();
    match place {
        None => Ok(LocalClass::Real {
            negative: rep.is_negative(),
        }),
        Some(2) => {
            let val_odd = rep.is_even();
            let odd = if val_odd { rep / 2 } else { rep.clone() };
            let odd_mod8 = odd.mod_floor(&BigInt::from(8)).to_u8().unwrap();
            Ok(LocalClass::Two { val_odd, odd_mod8 })
        }
        Some(p) => {
            let val_odd = (rep % BigInt::from(p)).is_zero();
            let unit = if val_odd { rep / p } else { rep.clone() };
            Ok(LocalClass::Odd {
                val_odd,
                nonresidue: legendre(&unit, p)? == -1,
            })
        }
    }
}

/// Span of a set of local classes under multiplication.
pub fn local_span(tags: &[LocalClass]) -> Vec<LocalClass> {
    let mut span: Vec<LocalClass> = vec![match tags.first() {
        Some(LocalClass::Odd { .. }) | None => LocalClass::Odd {
            val_odd: false,
            nonresidue: false,
        },
        Some(LocalClass::Two { .. }) => LocalClass::Two {
            val_odd: false,
            odd_mod8: 1,
        },
        Some(LocalClass::Real { .. }) => LocalClass::Real { negative: false },
    }];
    let mut changed = true;
    while changed {
        changed = false;
        for t in tags {
            for i in 0..span.len() {
                let prod = span[i].mul(t);
                if !span.contains(&prod) {
                    span.push(prod);
                    changed = true;
                }
            }
        }
    }
    span.sort_unstable();
    span
}

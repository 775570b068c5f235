//! The descent engine: pins down the images I and I' of the two descent
//! embeddings into ℚ*/ℚ*² by a fixpoint of positive certificates and
//! negative filters, then reads the Mordell-Weil rank off
//! 2^(4+r) = |I|²·|I'|².
//!
//! Candidate square classes are supported on the bad primes. Certificates
//! only ever grow the certified subgroup (absence of a certificate never
//! excludes anything); the filters are proven necessary conditions, so an
//! exclusion is authoritative. A class that is both certified and
//! excluded aborts the run naming both rules.
//!
//! Certificate routes, cheapest preferred in reports:
//! - `DiscF2`: the curve has a rational point and disc(F₂) lands in the
//!   candidate class, so the kernel preimages live over ℚ(√D).
//! - `QuarticSplit`: F₄ splits into conjugate quadratics over ℚ(√D) and
//!   the resulting 2-torsion class is conjugation-shifted by P₀.
//! - `SigmaShift`: a searched curve point over ℚ(√D) with rational x
//!   whose class is conjugation-shifted by P₀.
//!
//! Filters: "constant times a square" mod p at odd p dividing D (and at
//! p = 2 for even D), the real sign pattern for negative D, and the
//! local/real caps on the product of the image orders (4 at odd places,
//! 8 at 2, 2 at the real place), propagated between the two groups.

use crate::algebra::{
    local_span, localize, squarefree_part, AlgebraError, LocalClass, SquareClass,
};
use crate::family::{bad_primes, CurvePair, FamilyError, GenusTwoCurve};
use crate::field::{rat_int, rational_sqrt, Quad};
use crate::jacobian::{curve_over_quad, kernel_class_quadratic, sigma_shift_test, JacobianError};
use crate::poly::{
    conjugate_quadratic_split_with_roots, is_constant_times_square, pairing_cubic_roots,
    rational_roots, reduce_mod_p, PolyError, Polynomial,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DescentError {
    #[error("candidate set must include the prime 2")]
    MissingTwo,
    #[error(
        "class {class} certified by {certificate} but excluded by {rule} — engine inconsistency"
    )]
    Inconsistent {
        class: String,
        certificate: String,
        rule: String,
    },
    #[error("certified classes already violate the {0} cap — engine inconsistency")]
    CapViolatedByCertified(String),
    #[error("quartic split for {0} failed the conjugation-shift check")]
    CertificateCheckFailed(String),
    #[error("group orders |I| = {0}, |I'| = {1} do not fit 2^(4+r)")]
    RankFormula(usize, usize),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
}

/// Which curve of the pair a rule or certificate talks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    C,
    CPrime,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::C => write!(f, "C"),
            Side::CPrime => write!(f, "C'"),
        }
    }
}

/// Positive certificate kinds, ordered by cost.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CertificateKind {
    DiscF2,
    QuarticSplit,
    SigmaShift,
    Closure,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateKind::DiscF2 => write!(f, "kernel-discriminant certificate"),
            CertificateKind::QuarticSplit => write!(f, "conjugate quartic split"),
            CertificateKind::SigmaShift => write!(f, "conjugation-shifted point"),
            CertificateKind::Closure => write!(f, "subgroup closure"),
        }
    }
}

/// Negative rules.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    SquareModP(u64),
    RealSigns,
    LocalProduct(u64),
    RealProduct,
    Closure,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::SquareModP(p) => write!(f, "square-mod-p filter at p = {p}"),
            Rule::RealSigns => write!(f, "real sign filter"),
            Rule::LocalProduct(p) => write!(f, "local image-product cap at p = {p}"),
            Rule::RealProduct => write!(f, "real image-product cap"),
            Rule::Closure => write!(f, "subgroup consistency"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Certified {
        kind: CertificateKind,
        detail: String,
    },
    Excluded {
        rule: Rule,
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogEntry {
    pub side: Side,
    pub class: SquareClass,
    pub event: Event,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.event {
            Event::Certified { kind, detail } => write!(
                f,
                "{} side: {} in the image by {kind}: {detail}",
                self.side, self.class
            ),
            Event::Excluded { rule, detail } => write!(
                f,
                "{} side: {} excluded by {rule}: {detail}",
                self.side, self.class
            ),
        }
    }
}

/// Certified lower bound (a subgroup) and candidate upper bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroupBounds {
    pub lower: BTreeSet<SquareClass>,
    pub upper: BTreeSet<SquareClass>,
}

impl ClassGroupBounds {
    pub fn exact(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Clone, Debug)]
pub struct DescentState {
    pub bounds_i: ClassGroupBounds,
    pub bounds_i_prime: ClassGroupBounds,
    pub log: Vec<LogEntry>,
}

impl DescentState {
    pub fn bounds(&self, side: Side) -> &ClassGroupBounds {
        match side {
            Side::C => &self.bounds_i,
            Side::CPrime => &self.bounds_i_prime,
        }
    }

    fn bounds_mut(&mut self, side: Side) -> &mut ClassGroupBounds {
        match side {
            Side::C => &mut self.bounds_i,
            Side::CPrime => &mut self.bounds_i_prime,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankResult {
    pub rank_lower: u32,
    pub rank_upper: u32,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct DescentOutcome {
    pub state: DescentState,
    pub rank: RankResult,
}

/// Search bounds for the point-based certificate routes.
#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    /// Numerator/denominator bound for x in the conjugation-shift search.
    pub sigma_search_bound: i64,
    /// Height bound for the rational-point existence search.
    pub rational_point_bound: i64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            sigma_search_bound: 60,
            rational_point_bound: 60,
        }
    }
}

/// All square-free classes whose odd prime support lies in the bad primes,
/// with optional sign: the subgroup generated by -1, 2 and the odd bad
/// primes.
pub fn candidate_classes(bad: &BTreeSet<u64>) -> Result<Vec<SquareClass>, DescentError> {
    if !bad.contains(&2) {
        return Err(DescentError::MissingTwo);
    }
    let mut gens: Vec<BigInt> = vec![BigInt::from(-1)];
    gens.extend(bad.iter().map(|&p| BigInt::from(p)));
    let mut out: BTreeSet<SquareClass> = [SquareClass::one()].into();
    for g in gens {
        let gc = SquareClass::new(g)?;
        let mut next = out.clone();
        for c in &out {
            next.insert(c.mul(&gc));
        }
        out = next;
    }
    Ok(out.into_iter().collect())
}

/// Exclusion test mod the primes in the class support: a class survives
/// at p only if F₂ or F₄ is a constant times a square mod p. Returns the
/// first prime at which both fail, if any.
///
/// A factor that reduces to the zero polynomial counts as a constant
/// times a square (the test is inconclusive there, never an exclusion).
pub fn filter_square_mod_p(
    model: &GenusTwoCurve,
    class: &SquareClass,
) -> Result<Option<u64>, DescentError> {
    let mut primes = class.odd_prime_support()?;
    if class.is_even() {
        primes.insert(0, 2);
    }
    for p in primes {
        let mut any_square = false;
        for poly in [&model.f2, &model.f4] {
            let reduced = match reduce_mod_p(poly, p) {
                Ok(r) => r,
                Err(_) => {
                    any_square = true; // inconclusive at this prime
                    continue;
                }
            };
            if reduced.is_zero() || is_constant_times_square(&reduced)? {
                any_square = true;
            }
        }
        if !any_square {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Real sign filter for negative classes: excluded when the leading and
/// constant coefficients of F₂ differ in sign, those of F₄ differ in
/// sign, and the two leading coefficients share a sign.
pub fn filter_real_signs(model: &GenusTwoCurve, class: &SquareClass) -> bool {
    if !class.is_negative() {
        return false;
    }
    let sign = |q: &BigRational| -> i32 {
        if Zero::is_zero(q) {
            0
        } else if q < &BigRational::from(BigInt::from(0)) {
            -1
        } else {
            1
        }
    };
    let one = BigRational::from(BigInt::from(1));
    let (l2, c2) = (sign(model.f2.lc().unwrap()), sign(&model.f2.coeff(0, &one)));
    let (l4, c4) = (sign(model.f4.lc().unwrap()), sign(&model.f4.coeff(0, &one)));
    l2 != 0 && c2 != 0 && l2 != c2 && l4 != 0 && c4 != 0 && l4 != c4 && l2 == l4
}

/// Cap on the product of local image orders at one place (None = real).
fn place_cap(place: Option<u64>) -> usize {
    match place {
        None => 2,
        Some(2) => 8,
        Some(_) => 4,
    }
}

fn span_of(
    classes: &BTreeSet<SquareClass>,
    place: Option<u64>,
) -> Result<Vec<LocalClass>, DescentError> {
    let tags: Vec<LocalClass> = classes
        .iter()
        .map(|c| localize(c, place))
        .collect::<Result<_, _>>()?;
    Ok(local_span(&tags))
}

/// Whether admitting `candidate` into its group would push the product of
/// local image orders at `place` beyond the cap, given the certified
/// lower bounds of that group and of the other one.
pub fn local_product_excludes(
    lower_self: &BTreeSet<SquareClass>,
    lower_other: &BTreeSet<SquareClass>,
    candidate: &SquareClass,
    place: Option<u64>,
) -> Result<bool, DescentError> {
    let mut with = lower_self.clone();
    with.insert(candidate.clone());
    let grown = span_of(&with, place)?.len();
    let other = span_of(lower_other, place)?.len();
    Ok(grown * other > place_cap(place))
}

/// A certificate for one class on one side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub side: Side,
    pub class: SquareClass,
    pub kind: CertificateKind,
    pub detail: String,
}

/// Does the curve have an obvious rational point: rational infinite
/// points, or an affine point of small height (Weierstrass points count)?
fn rational_point_witness(model: &GenusTwoCurve, bound: i64) -> Option<String> {
    let f6 = model.f6();
    let lc = f6.lc().unwrap();
    let lc_class = squarefree_part(&(lc.clone())).ok()?;
    if lc_class.is_one() {
        return Some("the two points at infinity are rational".into());
    }
    for den in 1..=bound {
        for num in -bound..=bound {
            if num.gcd(&den) != 1 {
                continue;
            }
            let x = BigRational::new(BigInt::from(num), BigInt::from(den));
            let z = f6.evaluate(&x);
            if Zero::is_zero(&z) {
                return Some(format!("Weierstrass point at x = {x}"));
            }
            if rational_sqrt(&z).is_some() {
                return Some(format!("affine point at x = {x}"));
            }
        }
    }
    None
}

/// An affine base point for anchoring divisor classes when the infinite
/// points are not rational: the first rational Weierstrass point.
fn weierstrass_base(model: &GenusTwoCurve) -> Option<BigRational> {
    rational_roots(&model.f6()).ok()?.into_iter().next()
}

/// The cheap certificate routes (no point search) for one class. The
/// pairing-cubic roots of F₄ are computed once by the caller and shared
/// across the candidate classes.
fn structural_certificates(
    model: &GenusTwoCurve,
    side: Side,
    class: &SquareClass,
    cubic_roots: &[BigRational],
    opts: &DescentOptions,
) -> Result<Vec<Certificate>, DescentError> {
    let mut found = Vec::new();
    if class.is_one() {
        return Ok(found);
    }
    let Some(d) = class.rep_i64() else {
        return Ok(found);
    };
    // kernel-discriminant route
    let disc_f2 = squarefree_part(&model.f2.discriminant()?)?;
    if &disc_f2 == class {
        if let Some(witness) = rational_point_witness(model, opts.rational_point_bound) {
            found.push(Certificate {
                side,
                class: class.clone(),
                kind: CertificateKind::DiscF2,
                detail: format!("disc(F₂) lies in {class}; {witness}"),
            });
        }
    }
    // conjugate quartic split, verified through the group law
    let splits = conjugate_quadratic_split_with_roots(&model.f4, d, cubic_roots)?;
    if !splits.is_empty() {
        let curve = curve_over_quad(model, d)?;
        let p0 = curve.divisor(
            kernel_class_quadratic(model).map(|c| Quad::from_rational(c.clone(), d)),
            Polynomial::zero(),
            0,
        )?;
        for split in &splits {
            let t = curve.divisor(split.g.clone(), Polynomial::zero(), 0)?;
            if !sigma_shift_test(&curve, &t, &p0)? {
                return Err(DescentError::CertificateCheckFailed(class.to_string()));
            }
        }
        found.push(Certificate {
            side,
            class: class.clone(),
            kind: CertificateKind::QuarticSplit,
            detail: format!(
                "F₄ splits into conjugate quadratics over ℚ(√{d}); shift by the kernel class verified"
            ),
        });
    }
    Ok(found)
}

/// Search for certificates of one class on one side, every route.
pub fn certify(
    model: &GenusTwoCurve,
    side: Side,
    class: &SquareClass,
    opts: &DescentOptions,
) -> Result<Vec<Certificate>, DescentError> {
    let cubic_roots = pairing_cubic_roots(&model.f4)?;
    let mut found = structural_certificates(model, side, class, &cubic_roots, opts)?;
    found.extend(sigma_search(
        model,
        side,
        std::slice::from_ref(class),
        opts,
    )?);
    found.sort_by(|a, b| a.kind.cmp(&b.kind));
    Ok(found)
}

/// One scan over rational x for every wanted class at once: a point
/// [(x, y√D) - base] whose conjugate is the point shifted by P₀
/// certifies [D]. Each class gets a bounded number of point trials;
/// giving up is sound since certificate absence never excludes.
fn sigma_search(
    model: &GenusTwoCurve,
    side: Side,
    wanted: &[SquareClass],
    opts: &DescentOptions,
) -> Result<Vec<Certificate>, DescentError> {
    const TRIALS_PER_CLASS: u32 = 4;
    let mut found = Vec::new();
    let mut remaining: Vec<(SquareClass, u32)> = wanted
        .iter()
        .filter(|c| !c.is_one() && c.rep_i64().is_some())
        .map(|c| (c.clone(), TRIALS_PER_CLASS))
        .collect();
    if remaining.is_empty() {
        return Ok(found);
    }
    let f6 = model.f6();
    let base = weierstrass_base(model);
    let bound = opts.sigma_search_bound;
    let mut curves: std::collections::BTreeMap<
        i64,
        (
            crate::jacobian::Curve<Quad>,
            crate::jacobian::BalancedDivisor<Quad>,
        ),
    > = std::collections::BTreeMap::new();
    for den in 1..=bound {
        for num in -bound..=bound {
            if remaining.is_empty() {
                return Ok(found);
            }
            if num.gcd(&den) != 1 {
                continue;
            }
            let x = BigRational::new(BigInt::from(num), BigInt::from(den));
            let z = f6.evaluate(&x);
            if Zero::is_zero(&z) {
                continue;
            }
            let mut hit = None;
            for (i, (cand, _)) in remaining.iter().enumerate() {
                let d = cand.rep_i64().unwrap();
                // z lies in [d] iff z·d is a rational square
                let scaled = &z * BigRational::from(BigInt::from(d));
                if let Some(root) = rational_sqrt(&scaled) {
                    let y_coeff = root / BigRational::from(BigInt::from(d));
                    hit = Some((i, d, y_coeff));
                    break;
                }
            }
            let Some((idx, d, y_coeff)) = hit else {
                continue;
            };
            if let std::collections::btree_map::Entry::Vacant(slot) = curves.entry(d) {
                let curve = curve_over_quad(model, d)?;
                let p0 = curve.divisor(
                    kernel_class_quadratic(model).map(|c| Quad::from_rational(c.clone(), d)),
                    Polynomial::zero(),
                    0,
                )?;
                slot.insert((curve, p0));
            }
            let (curve, p0) = &curves[&d];
            let xq = Quad::from_rational(x.clone(), d);
            let yq = Quad::new(BigRational::from(BigInt::from(0)), y_coeff, d);
            let point = if curve.infinity_rational() {
                curve.point_minus_infinity(xq, yq, true)?
            } else if let Some(b) = &base {
                curve.point_minus_point(
                    (xq, yq),
                    (
                        Quad::from_rational(b.clone(), d),
                        Quad::from_rational(rat_int(0), d),
                    ),
                )?
            } else {
                continue;
            };
            if sigma_shift_test(curve, &point, p0)? {
                let (class, _) = remaining.remove(idx);
                found.push(Certificate {
                    side,
                    class,
                    kind: CertificateKind::SigmaShift,
                    detail: format!("point at x = {x} over ℚ(√{d}) shifts by the kernel class"),
                });
            } else {
                remaining[idx].1 -= 1;
                if remaining[idx].1 == 0 {
                    remaining.remove(idx);
                }
            }
        }
    }
    Ok(found)
}

/// Subgroup generated by a set of classes.
fn close_group(set: &BTreeSet<SquareClass>) -> BTreeSet<SquareClass> {
    let mut out = set.clone();
    out.insert(SquareClass::one());
    loop {
        let mut next = out.clone();
        for a in &out {
            for b in &out {
                next.insert(a.mul(b));
            }
        }
        if next == out {
            return out;
        }
        out = next;
    }
}

/// A minimal generating set of a 2-elementary subgroup of ℚ*/ℚ*².
pub fn generators_of(group: &BTreeSet<SquareClass>) -> Vec<SquareClass> {
    let mut gens: Vec<SquareClass> = Vec::new();
    let mut span: BTreeSet<SquareClass> = [SquareClass::one()].into();
    for g in group {
        if !span.contains(g) {
            gens.push(g.clone());
            span = close_group(&gens.iter().cloned().collect());
        }
    }
    gens
}

/// Run the full descent for a curve pair.
pub fn run_descent(
    pair: &CurvePair,
    opts: &DescentOptions,
) -> Result<DescentOutcome, DescentError> {
    let bad = bad_primes(pair)?;
    let candidates = candidate_classes(&bad)?;
    let cand_set: BTreeSet<SquareClass> = candidates.iter().cloned().collect();
    let mut state = DescentState {
        bounds_i: ClassGroupBounds {
            lower: [SquareClass::one()].into(),
            upper: cand_set.clone(),
        },
        bounds_i_prime: ClassGroupBounds {
            lower: [SquareClass::one()].into(),
            upper: cand_set,
        },
        log: Vec::new(),
    };

    for (side, model) in [(Side::C, &pair.c), (Side::CPrime, &pair.c_prime)] {
        // direct negative filters
        for class in &candidates {
            if class.is_one() {
                continue;
            }
            if filter_real_signs(model, class) {
                exclude(
                    &mut state,
                    side,
                    class,
                    Rule::RealSigns,
                    "leading and constant signs of F₂ and F₄ rule out negative classes".into(),
                )?;
                continue;
            }
            if let Some(p) = filter_square_mod_p(model, class)? {
                exclude(
                    &mut state,
                    side,
                    class,
                    Rule::SquareModP(p),
                    format!("neither model factor is a constant times a square mod {p}"),
                )?;
            }
        }
        // positive certificates: structural routes per class, then one
        // point search for whatever is left uncertified
        let cubic_roots = pairing_cubic_roots(&model.f4)?;
        let mut certs: Vec<Certificate> = Vec::new();
        for class in &candidates {
            certs.extend(structural_certificates(
                model,
                side,
                class,
                &cubic_roots,
                opts,
            )?);
        }
        // the point search only chases classes that are still undecided;
        // the structural routes above ran for every candidate, so a
        // certificate clashing with an exclusion is still caught
        let have: BTreeSet<&SquareClass> = certs.iter().map(|c| &c.class).collect();
        let missing: Vec<SquareClass> = candidates
            .iter()
            .filter(|c| !c.is_one() && !have.contains(c) && state.bounds(side).upper.contains(c))
            .cloned()
            .collect();
        certs.extend(sigma_search(model, side, &missing, opts)?);

        certs.sort_by(|a, b| a.class.cmp(&b.class).then(a.kind.cmp(&b.kind)));
        let mut seen = BTreeSet::new();
        for cert in certs {
            state.bounds_mut(side).lower.insert(cert.class.clone());
            if seen.insert(cert.class.clone()) {
                state.log.push(LogEntry {
                    side,
                    class: cert.class.clone(),
                    event: Event::Certified {
                        kind: cert.kind,
                        detail: cert.detail,
                    },
                });
            }
        }
        // group closure of the certified classes
        let closed = close_group(&state.bounds(side).lower);
        let extras: Vec<SquareClass> = closed
            .difference(&state.bounds(side).lower)
            .cloned()
            .collect();
        for extra in extras {
            state.log.push(LogEntry {
                side,
                class: extra,
                event: Event::Certified {
                    kind: CertificateKind::Closure,
                    detail: "product of certified classes".into(),
                },
            });
        }
        state.bounds_mut(side).lower = closed;
    }

    // soundness of certificates against the direct exclusions
    for side in [Side::C, Side::CPrime] {
        for class in state.bounds(side).lower.clone() {
            if !state.bounds(side).upper.contains(&class) {
                return certified_excluded(&state, side, &class);
            }
        }
    }

    // fixpoint of the coupled local filters and subgroup consistency
    let places: Vec<Option<u64>> = {
        let mut odd: BTreeSet<u64> = bad.iter().copied().filter(|&p| p != 2).collect();
        odd.extend([3u64, 5, 7, 11, 13, 17, 19]);
        let mut v: Vec<Option<u64>> = vec![None, Some(2)];
        v.extend(odd.into_iter().map(Some));
        v
    };
    for _ in 0..=candidates.len() {
        let mut changed = false;
        for place in &places {
            let li = span_of(&state.bounds_i.lower, *place)?.len();
            let lp = span_of(&state.bounds_i_prime.lower, *place)?.len();
            if li * lp > place_cap(*place) {
                return Err(DescentError::CapViolatedByCertified(match place {
                    None => "real".to_string(),
                    Some(p) => format!("p = {p}"),
                }));
            }
            for (side, other) in [(Side::C, Side::CPrime), (Side::CPrime, Side::C)] {
                let lower_other = state.bounds(other).lower.clone();
                let lower_self = state.bounds(side).lower.clone();
                let pending: Vec<SquareClass> = state
                    .bounds(side)
                    .upper
                    .difference(&lower_self)
                    .cloned()
                    .collect();
                for class in pending {
                    if local_product_excludes(&lower_self, &lower_other, &class, *place)? {
                        let (rule, detail) = match place {
                            None => (
                                Rule::RealProduct,
                                "sign image would exceed the real cap".to_string(),
                            ),
                            Some(p) => (
                                Rule::LocalProduct(*p),
                                format!("local image product would exceed the cap at {p}"),
                            ),
                        };
                        exclude(&mut state, side, &class, rule, detail)?;
                        changed = true;
                    }
                }
            }
        }
        // subgroup consistency of the upper sets
        for side in [Side::C, Side::CPrime] {
            let lower = state.bounds(side).lower.clone();
            let upper = state.bounds(side).upper.clone();
            for class in upper.iter() {
                if lower.contains(class) {
                    continue;
                }
                if let Some(l) = lower.iter().find(|l| !upper.contains(&class.mul(l))) {
                    exclude(
                        &mut state,
                        side,
                        class,
                        Rule::Closure,
                        format!(
                            "product with certified {l} lands on the excluded {}",
                            class.mul(l)
                        ),
                    )?;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // canonical log order: side, then class, certificates before exclusions
    state.log.sort_by(|a, b| {
        (a.side, &a.class, event_rank(&a.event)).cmp(&(b.side, &b.class, event_rank(&b.event)))
    });

    let rank = rank_from_class_groups(&state)?;
    Ok(DescentOutcome { state, rank })
}

fn event_rank(e: &Event) -> u8 {
    match e {
        Event::Certified { .. } => 0,
        Event::Excluded { .. } => 1,
    }
}

fn certified_excluded(
    state: &DescentState,
    side: Side,
    class: &SquareClass,
) -> Result<DescentOutcome, DescentError> {
    let cert = state
        .log
        .iter()
        .find_map(|e| match &e.event {
            Event::Certified { kind, .. } if e.side == side && &e.class == class => {
                Some(kind.to_string())
            }
            _ => None,
        })
        .unwrap_or_else(|| "subgroup closure".into());
    let rule = state
        .log
        .iter()
        .find_map(|e| match &e.event {
            Event::Excluded { rule, .. } if e.side == side && &e.class == class => {
                Some(rule.to_string())
            }
            _ => None,
        })
        .unwrap_or_else(|| "unknown rule".into());
    Err(DescentError::Inconsistent {
        class: class.to_string(),
        certificate: cert,
        rule,
    })
}

fn exclude(
    state: &mut DescentState,
    side: Side,
    class: &SquareClass,
    rule: Rule,
    detail: String,
) -> Result<(), DescentError> {
    if state.bounds(side).lower.contains(class) {
        let cert = state
            .log
            .iter()
            .find_map(|e| match &e.event {
                Event::Certified { kind, .. } if e.side == side && &e.class == class => {
                    Some(kind.to_string())
                }
                _ => None,
            })
            .unwrap_or_else(|| "subgroup closure".into());
        return Err(DescentError::Inconsistent {
            class: class.to_string(),
            certificate: cert,
            rule: rule.to_string(),
        });
    }
    if state.bounds_mut(side).upper.remove(class) {
        state.log.push(LogEntry {
            side,
            class: class.clone(),
            event: Event::Excluded { rule, detail },
        });
    }
    Ok(())
}

/// 2^(4+r) = |I|²·|I'|², solved for r; exact when both bounds close.
pub fn rank_from_class_groups(state: &DescentState) -> Result<RankResult, DescentError> {
    let exact = state.bounds_i.exact() && state.bounds_i_prime.exact();
    let log2 = |n: usize| -> Option<u32> { n.is_power_of_two().then(|| n.trailing_zeros()) };
    let lo_i = state.bounds_i.lower.len();
    let lo_p = state.bounds_i_prime.lower.len();
    let (Some(ki), Some(kp)) = (log2(lo_i), log2(lo_p)) else {
        return Err(DescentError::RankFormula(lo_i, lo_p));
    };
    if ki + kp < 2 {
        return Err(DescentError::RankFormula(lo_i, lo_p));
    }
    let rank_lower = 2 * (ki + kp) - 4;
    // the true groups are 2-elementary, so their orders are the largest
    // powers of two fitting inside the upper sets
    let cap = |n: usize| -> u32 { (usize::BITS - 1) - n.leading_zeros() };
    let rank_upper =
        2 * (cap(state.bounds_i.upper.len()) + cap(state.bounds_i_prime.upper.len())) - 4;
    Ok(RankResult {
        rank_lower,
        rank_upper,
        exact,
    })
}

/// The five possible order patterns of the two torsion-quotient groups:
/// `(|J[2]|, |J[ε]|, |J'[φ']/φJ[ε]|, |J[ε]/εJ[2]|)`. In every row the
/// first number times the square of the third times the fourth is 2⁴,
/// which is why the rank formula needs no torsion input.
pub const TORSION_QUOTIENT_TABLE: [(u32, u32, u32, u32); 5] = [
    (2, 2, 2, 2),
    (4, 2, 2, 1),
    (4, 4, 1, 4),
    (8, 4, 1, 2),
    (16, 4, 1, 1),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::specialize;

    fn sq(n: i64) -> SquareClass {
        SquareClass::new(n).unwrap()
    }

    #[test]
    fn candidate_sets() {
        let c = candidate_classes(&[2, 11, 2087].into()).unwrap();
        assert_eq!(c.len(), 16);
        for d in [1i64, -1, 2, 11, 22, -2087, 2087, 2 * 11 * 2087] {
            assert!(c.contains(&sq(d)), "missing {d}");
        }
        let small = candidate_classes(&[2].into()).unwrap();
        assert_eq!(small, vec![sq(1), sq(-1), sq(2), sq(-2)]);
        assert_eq!(
            candidate_classes(&[3].into()).unwrap_err(),
            DescentError::MissingTwo
        );
    }

    #[test]
    fn sign_filter() {
        let pair = specialize(0, false).unwrap();
        // C side: F₂ and F₄ both change sign and the leading signs agree
        assert!(filter_real_signs(&pair.c, &sq(-1)));
        assert!(filter_real_signs(&pair.c, &sq(-2087)));
        assert!(!filter_real_signs(&pair.c, &sq(2)));
        // C' side: F₂' = (X-1)(X-2) has positive constant: inapplicable
        assert!(!filter_real_signs(&pair.c_prime, &sq(-1)));
    }

    #[test]
    fn square_mod_p_filter() {
        let pair = specialize(0, false).unwrap();
        // [r] and [-r] fail on the C side at p = 2087 (both factors)
        assert_eq!(
            filter_square_mod_p(&pair.c, &sq(-2087)).unwrap(),
            Some(2087)
        );
        assert_eq!(filter_square_mod_p(&pair.c, &sq(2087)).unwrap(), Some(2087));
        // [q] survives on the C side: F₄ ≡ 4(X²+8X+4)² mod 11
        assert_eq!(filter_square_mod_p(&pair.c, &sq(11)).unwrap(), None);
        // [2] survives on the C side: F₂ ≡ X² mod 2
        assert_eq!(filter_square_mod_p(&pair.c, &sq(2)).unwrap(), None);
        // on the C' side even classes die at 2, and q-classes at 11
        assert_eq!(filter_square_mod_p(&pair.c_prime, &sq(2)).unwrap(), Some(2));
        assert_eq!(
            filter_square_mod_p(&pair.c_prime, &sq(-22)).unwrap(),
            Some(2)
        );
        assert_eq!(
            filter_square_mod_p(&pair.c_prime, &sq(11)).unwrap(),
            Some(11)
        );
        assert_eq!(
            filter_square_mod_p(&pair.c_prime, &sq(-11)).unwrap(),
            Some(11)
        );
        // [r] survives on the C' side
        assert_eq!(
            filter_square_mod_p(&pair.c_prime, &sq(-2087)).unwrap(),
            None
        );
    }

    #[test]
    fn local_product_filter_at_q() {
        // with I ⊇ {1, 2, 11, 22} the image at 11 has order 4, so any I'
        // candidate that is a non-square in ℚ₁₁ is excluded; -1 is one
        let lower_i: BTreeSet<SquareClass> = [sq(1), sq(2), sq(11), sq(22)].into_iter().collect();
        let lower_ip: BTreeSet<SquareClass> = [sq(1)].into_iter().collect();
        assert!(local_product_excludes(&lower_ip, &lower_i, &sq(-1), Some(11)).unwrap());
        // but r ≡ a fourth power mod 11 survives
        assert!(!local_product_excludes(&lower_ip, &lower_i, &sq(-2087), Some(11)).unwrap());
        // trivial state excludes nothing
        let trivial: BTreeSet<SquareClass> = [sq(1)].into_iter().collect();
        assert!(!local_product_excludes(&trivial, &trivial, &sq(-1), Some(11)).unwrap());
    }

    #[test]
    fn real_product_cap_detects_contradictions() {
        // negative classes certified in both groups violate the real cap
        let a: BTreeSet<SquareClass> = [sq(1), sq(-1)].into_iter().collect();
        let b: BTreeSet<SquareClass> = [sq(1), sq(-2)].into_iter().collect();
        let sa = span_of(&a, None).unwrap().len();
        let sb = span_of(&b, None).unwrap().len();
        assert!(sa * sb > place_cap(None));
    }

    #[test]
    fn certify_routes_for_n0() {
        let pair = specialize(0, false).unwrap();
        let opts = DescentOptions::default();
        // [2] on the C side via the kernel discriminant
        let c2 = certify(&pair.c, Side::C, &sq(2), &opts).unwrap();
        assert!(c2.iter().any(|c| c.kind == CertificateKind::DiscF2));
        // [22] on the C side via the quartic split
        let c22 = certify(&pair.c, Side::C, &sq(22), &opts).unwrap();
        assert!(c22.iter().any(|c| c.kind == CertificateKind::QuarticSplit));
        // [r] on the C' side via the quartic split of F₄'
        let cr = certify(&pair.c_prime, Side::CPrime, &sq(-2087), &opts).unwrap();
        assert!(
            cr.iter().any(|c| c.kind == CertificateKind::QuarticSplit),
            "expected a split certificate for [r], got {cr:?}"
        );
    }

    #[test]
    fn full_descent_n0() {
        let pair = specialize(0, false).unwrap();
        let out = run_descent(&pair, &DescentOptions::default()).unwrap();
        assert!(out.rank.exact);
        assert_eq!(out.rank.rank_lower, 2);
        assert_eq!(out.rank.rank_upper, 2);
        let expect_i: BTreeSet<SquareClass> = [sq(1), sq(2), sq(11), sq(22)].into_iter().collect();
        let expect_ip: BTreeSet<SquareClass> = [sq(1), sq(-2087)].into_iter().collect();
        assert_eq!(out.state.bounds_i.lower, expect_i);
        assert_eq!(out.state.bounds_i.upper, expect_i);
        assert_eq!(out.state.bounds_i_prime.lower, expect_ip);
        assert_eq!(out.state.bounds_i_prime.upper, expect_ip);
        // generator reporting
        assert_eq!(
            generators_of(&out.state.bounds_i.lower),
            vec![sq(2), sq(11)]
        );
        assert_eq!(
            generators_of(&out.state.bounds_i_prime.lower),
            vec![sq(-2087)]
        );
        // the -1 exclusion from I' comes through the local cap at q = 11
        assert!(out.state.log.iter().any(|e| e.side == Side::CPrime
            && e.class == sq(-1)
            && matches!(
                &e.event,
                Event::Excluded {
                    rule: Rule::LocalProduct(11),
                    ..
                }
            )));
    }

    #[test]
    fn full_descent_n6_n9() {
        for (n, r) in [(6u32, -10343i64), (9, -7559)] {
            let pair = specialize(n, false).unwrap();
            let q = pair.q.unwrap();
            let out = run_descent(&pair, &DescentOptions::default()).unwrap();
            assert!(out.rank.exact, "n = {n}");
            assert_eq!(out.rank.rank_lower, 2, "n = {n}");
            let expect_i: BTreeSet<SquareClass> =
                [sq(1), sq(2), sq(q), sq(2 * q)].into_iter().collect();
            let expect_ip: BTreeSet<SquareClass> = [sq(1), sq(r)].into_iter().collect();
            assert_eq!(out.state.bounds_i.lower, expect_i, "n = {n}");
            assert_eq!(out.state.bounds_i_prime.lower, expect_ip, "n = {n}");
        }
    }

    #[test]
    fn torsion_quotient_table_products() {
        for (a, _b, c, d) in TORSION_QUOTIENT_TABLE {
            assert_eq!(a * c * c * d, 16);
        }
    }
}

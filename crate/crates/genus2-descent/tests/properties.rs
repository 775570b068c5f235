//! Randomised property tests for the exact arithmetic layers.

use genus2_descent::algebra::{legendre, squarefree_part, SquareClass};
use genus2_descent::field::{rat, rat_int, FieldElement, Fp, Quad};
use genus2_descent::poly::{is_constant_times_square, rat_poly, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-200i64..=200, 1i64..=40).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn squarefree_part_ignores_squares(n in -300i64..300, s in 1i64..40, d in 1i64..20) {
        prop_assume!(n != 0);
        let q = rat(n, d);
        let scaled = &q * rat(s * s, 1);
        prop_assert_eq!(
            squarefree_part(&q).unwrap(),
            squarefree_part(&scaled).unwrap()
        );
    }

    #[test]
    fn squarefree_part_is_idempotent(n in -500i64..500) {
        prop_assume!(n != 0);
        let c = SquareClass::new(n).unwrap();
        let again = SquareClass::new(c.rep().clone()).unwrap();
        prop_assert_eq!(&again, &c);
        // and the representative really is square-free
        let rep = c.rep_i64().unwrap().abs();
        for s in 2i64..=22 {
            prop_assert_ne!(rep % (s * s), 0);
        }
    }

    #[test]
    fn legendre_multiplicative(a in -80i64..80, b in -80i64..80) {
        for p in [3u64, 7, 11, 13, 101] {
            let la = legendre(&BigInt::from(a), p).unwrap();
            let lb = legendre(&BigInt::from(b), p).unwrap();
            let lab = legendre(&BigInt::from(a * b), p).unwrap();
            prop_assert_eq!(lab, la * lb);
        }
    }

    #[test]
    fn square_class_group_is_elementary(a in -300i64..300, b in -300i64..300) {
        prop_assume!(a != 0 && b != 0);
        let ca = SquareClass::new(a).unwrap();
        let cb = SquareClass::new(b).unwrap();
        // involution and commutativity
        prop_assert!(ca.mul(&ca).is_one());
        prop_assert_eq!(ca.mul(&cb), cb.mul(&ca));
    }

    #[test]
    fn discriminant_product_rule(
        c0 in small_rational(),
        c1 in small_rational(),
        d0 in small_rational(),
        d1 in small_rational(),
        d2 in small_rational(),
    ) {
        let f = Polynomial::new(vec![c0, c1, rat_int(1)]);
        let g = Polynomial::new(vec![d0, d1, d2, rat_int(1)]);
        let fg = f.mul(&g);
        let disc_fg = fg.discriminant().unwrap();
        let res = f.resultant(&g);
        let expect = f.discriminant().unwrap() * g.discriminant().unwrap() * (&res * &res);
        prop_assert_eq!(disc_fg, expect);
    }

    #[test]
    fn constant_times_square_closed_under_squaring(
        coeffs in prop::collection::vec(0i64..5, 1..5),
        c in 1i64..5,
    ) {
        for p in [3u64, 5, 7] {
            if c % p as i64 == 0 {
                continue; // the scale factor must stay a unit mod p
            }
            let ctx = Fp::new(0, p);
            let f = Polynomial::from_ints(&ctx, &coeffs);
            if f.is_zero() {
                continue;
            }
            let scaled = f.mul(&f).scale(&Fp::new(c, p));
            prop_assert!(is_constant_times_square(&scaled).unwrap());
        }
    }

    #[test]
    fn quad_field_axioms(
        a1 in small_rational(), b1 in small_rational(),
        a2 in small_rational(), b2 in small_rational(),
    ) {
        for d in [2i64, -1, 13, 22] {
            let x = Quad::new(a1.clone(), b1.clone(), d);
            let y = Quad::new(a2.clone(), b2.clone(), d);
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            // norm is multiplicative
            prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
            // conjugation is a ring homomorphism
            prop_assert_eq!(x.mul(&y).conj(), x.conj().mul(&y.conj()));
            if !x.is_zero() {
                let inv = x.inv().unwrap();
                prop_assert_eq!(x.mul(&inv), x.one());
            }
        }
    }

    #[test]
    fn polynomial_euclidean_division(
        fc in prop::collection::vec(-9i64..9, 1..7),
        gc in prop::collection::vec(-9i64..9, 1..5),
    ) {
        let f = rat_poly(&fc);
        let g = rat_poly(&gc);
        prop_assume!(!g.is_zero());
        let (q, r) = f.divmod(&g).unwrap();
        prop_assert_eq!(q.mul(&g).add(&r), f);
        if !r.is_zero() {
            prop_assert!(r.degree() < g.degree());
        }
    }

    #[test]
    fn group_law_random_triples_f7(seed in 0u64..500) {
        use genus2_descent::family::specialize;
        use genus2_descent::jacobian::{curve_mod_p, sample_divisors_mod_p};
        let pair = specialize(0, false).unwrap();
        let curve = curve_mod_p(&pair.c, 7).unwrap();
        let all = sample_divisors_mod_p(&curve, usize::MAX);
        let n = all.len();
        let a = &all[(seed as usize) % n];
        let b = &all[(seed as usize * 31 + 7) % n];
        let c = &all[(seed as usize * 17 + 3) % n];
        let left = curve.add(&curve.add(a, b).unwrap(), c).unwrap();
        let right = curve.add(a, &curve.add(b, c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

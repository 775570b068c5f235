//! Balanced Mumford arithmetic on a degree-6 model: group law, 2-torsion,
//! Galois conjugation and the conjugation-shift membership test.

use genus2_descent::family::specialize;
use genus2_descent::field::{rat_int, Quad};
use genus2_descent::jacobian::{
    curve_over_q, curve_over_quad, galois_conjugate, sigma_shift_test, two_torsion_classes,
    TorsionField,
};
use genus2_descent::poly::{conjugate_quadratic_split, rat_poly, Polynomial};
use genus2_descent::report::poly_display;

fn main() {
    let pair = specialize(0, false).unwrap();

    // rational arithmetic: P = [(1, 4) - ∞⁺] and its small multiples
    let curve = curve_over_q(&pair.c).unwrap();
    let p = curve
        .point_minus_infinity(rat_int(1), rat_int(4), true)
        .unwrap();
    for k in 1..=4 {
        let kp = curve.smul(k, &p).unwrap();
        println!("{k}·P: u = {}, weight = {}", poly_display(kp.u()), kp.weight_plus());
    }

    // the kernel class is 2-torsion
    let p0 = curve
        .divisor(rat_poly(&[-4, 4, 1]), Polynomial::zero(), 0)
        .unwrap();
    println!(
        "P₀ + P₀ is the identity: {}",
        curve.is_identity(&curve.add(&p0, &p0).unwrap())
    );

    // 2-torsion classes defined over ℚ(√22): the kernel pair plus the two
    // halves of the conjugate quartic split
    let survey = two_torsion_classes(&pair.c, TorsionField::Quadratic(22)).unwrap();
    println!(
        "2-torsion classes over Q(√22): {} of {} defined",
        survey.defined().len(),
        survey.total()
    );

    // the split class is shifted by P₀ under conjugation
    let curve22 = curve_over_quad(&pair.c, 22).unwrap();
    let split = &conjugate_quadratic_split(&pair.c.f4, 22).unwrap()[0];
    let t = curve22
        .divisor(split.g.clone(), Polynomial::zero(), 0)
        .unwrap();
    let p0_22 = curve22
        .divisor(
            rat_poly(&[-4, 4, 1]).map(|c| Quad::from_rational(c.clone(), 22)),
            Polynomial::zero(),
            0,
        )
        .unwrap();
    println!(
        "σ(T) = T + P₀ for the split class: {}",
        sigma_shift_test(&curve22, &t, &p0_22).unwrap()
    );
    println!("σ(T): u = {:?}", galois_conjugate(&curve22, &t).u());
}

//! Point counts and jacobian orders at small good primes.

use genus2_descent::counting::{jacobian_order, torsion_is_2group};
use genus2_descent::family::specialize;

fn main() {
    let pair = specialize(0, false).unwrap();
    println!("zeta data for the n = 0 member:");
    println!("  p   |C(F_p)|  |C(F_p²)|   a1   a2   |J(F_p)|");
    for p in [3u64, 5, 7, 13, 17, 19, 23] {
        let z = jacobian_order(&pair.c, p).unwrap();
        println!(
            "  {:3}  {:7}  {:9}  {:3}  {:3}  {:8}",
            z.p, z.n1, z.n2, z.a1, z.a2, z.jacobian_order
        );
    }

    let gcd = torsion_is_2group(&pair.c, &[3, 17]).unwrap();
    println!(
        "\ntorsion bound: gcd of orders at {:?} is a power of two: {}",
        gcd.witness.unwrap(),
        gcd.is_two_group
    );
}

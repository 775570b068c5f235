//! Construct family members and scan admissibility of the parameter.

use genus2_descent::family::{admissible, bad_primes, build_family, specialize, FamilyParams};
use genus2_descent::report::poly_display;

fn main() {
    println!("admissibility of n = 0..=15:");
    for n in 0..=15u32 {
        let a = admissible(n).unwrap();
        let verdict = if a.ok {
            "admissible".to_string()
        } else {
            a.diagnostics.join("; ")
        };
        println!("  n = {:2}: q = {:4}, r = {:6}  {}", n, a.q, a.r, verdict);
    }

    println!("\nthe smallest admissible member, n = 0:");
    let pair = specialize(0, false).unwrap();
    println!("  C : Y² = F₂·F₄ with F₂ = {}", poly_display(&pair.c.f2));
    println!("      F₄ = {}", poly_display(&pair.c.f4));
    println!("  C': F₂' = {}", poly_display(&pair.c_prime.f2));
    println!("      F₄' = {}", poly_display(&pair.c_prime.f4));
    println!("  bad primes: {:?}", bad_primes(&pair).unwrap());

    // the raw four-parameter construction underlying the family
    let raw = build_family(&FamilyParams::specialized(0)).unwrap();
    println!(
        "\nraw sextic degrees before normalisation: {:?}, {:?}",
        raw.0.degree(),
        raw.1.degree()
    );
}

//! The rank dichotomy over a real quadratic field: torsion bound plus a
//! witness point whose conjugate difference is non-torsion.

use genus2_descent::quadrank::{decide_rank_over_l, m_search, representatives_per_l};

fn main() {
    let candidates = representatives_per_l(&m_search(0, 10, 10).unwrap());
    for cand in &candidates {
        let (decision, torsion) = decide_rank_over_l(0, cand.l, cand).unwrap();
        println!(
            "n = 0, l = {}: rank {} over Q(√{}) — torsion {{0, P₀}} via primes {:?} with orders {:?}",
            cand.l, decision.rank, cand.l, torsion.witness, torsion.witness_orders
        );
        println!(
            "    witness point [({}, {}·√{}) - ∞⁺], found at m = {}",
            genus2_descent::report::fmt_rational(&cand.x),
            genus2_descent::report::fmt_rational(&cand.y_coeff),
            cand.l,
            genus2_descent::report::fmt_rational(&cand.m),
        );
        println!("    {}", decision.detail);
    }
}

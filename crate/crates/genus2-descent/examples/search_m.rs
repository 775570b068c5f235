//! Search the m grid for suitable primes l: -F₄(-4m/(2m²-2m+1)) must be a
//! square times a prime with 2 and r inert in ℚ(√l).

use genus2_descent::quadrank::{m_search, representatives_per_l};
use genus2_descent::report::fmt_rational;

fn main() {
    for n in [0u32, 6, 9] {
        let all = m_search(n, 10, 10).unwrap();
        let reps = representatives_per_l(&all);
        println!(
            "n = {n}: {} candidate points, {} distinct prime(s) up to six digits",
            all.len(),
            reps.iter().filter(|c| c.l <= 999_983).count()
        );
        for c in reps.iter().filter(|c| c.l <= 999_983) {
            println!(
                "    l = {:6}  m = {:5}  point x = {}",
                c.l,
                fmt_rational(&c.m),
                fmt_rational(&c.x)
            );
        }
    }
}

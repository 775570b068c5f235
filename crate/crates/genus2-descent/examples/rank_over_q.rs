//! Full two-isogeny descent over ℚ for the three smallest family members,
//! with the complete rule log for the first one.

use genus2_descent::descent::{generators_of, run_descent, DescentOptions};
use genus2_descent::family::specialize;

fn main() {
    for n in [0u32, 6, 9] {
        let pair = specialize(n, false).unwrap();
        let out = run_descent(&pair, &DescentOptions::default()).unwrap();
        let gi = generators_of(&out.state.bounds_i.lower);
        let gp = generators_of(&out.state.bounds_i_prime.lower);
        println!(
            "n = {n}: rank {} ({}), I = <{}>, I' = <{}>",
            out.rank.rank_lower,
            if out.rank.exact { "exact" } else { "interval" },
            gi.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            gp.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        );
        if n == 0 {
            for entry in &out.state.log {
                println!("    {entry}");
            }
        }
    }
}

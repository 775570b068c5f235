//! Mordell-Weil ranks for a family of genus-2 jacobians, computed by
//! descent via isogenies of degree 2, entirely in exact arithmetic.
//!
//! The library builds a one-parameter family of pairs of genus-2 curves
//! whose jacobians carry √2-multiplication, and decides the rank of their
//! Mordell-Weil groups over ℚ and over real quadratic fields ℚ(√l):
//!
//! - [`algebra`]: square classes of ℚ*/ℚ*², Legendre symbols, p-adic
//!   square tests, prime splitting in quadratic fields.
//! - [`field`]: the exact field tower — ℚ, ℚ(√d), F_p, F_{p²}.
//! - [`poly`]: dense polynomials, discriminants, square-free structure
//!   mod p, and conjugate quadratic splits of quartics.
//! - [`family`]: the curve-pair family, its specialisations, and
//!   admissibility of the integer parameter.
//! - [`jacobian`]: genus-2 jacobian arithmetic on degree-6 models in
//!   balanced Mumford representation, 2-torsion enumeration, Galois
//!   conjugation and the conjugation-shift membership test.
//! - [`counting`]: point counts over F_p and F_{p²}, jacobian orders via
//!   the zeta function, and the torsion gcd bound.
//! - [`descent`]: the fixpoint engine that certifies and excludes square
//!   classes to pin down the descent images and the rank over ℚ.
//! - [`quadrank`]: the rank dichotomy over ℚ(√l), the m-search for
//!   witness points, and the torsion computation over ℚ(√l).
//! - [`report`]: deterministic structured reports and reference-table
//!   reproduction for the command-line tool.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `g2descent` binary for the command-line interface.

pub mod algebra;
pub mod counting;
pub mod descent;
pub mod family;
pub mod field;
pub mod jacobian;
pub mod poly;
pub mod quadrank;
pub mod report;

pub use algebra::{legendre, prime_splitting, squarefree_part, SquareClass};
pub use family::{admissible, bad_primes, build_family, specialize, CurvePair};
pub use poly::{conjugate_quadratic_split, is_constant_times_square, Polynomial};

//! Numerics for the two-point correlation of Dirichlet L-function zeros.
//!
//! The library is organised in layers:
//!
//! - [`arith`] — prime sieving (segmented, odd-only) and the classical
//!   multiplicative functions μ, φ, Λ and the Ramanujan sums c_q(n).
//! - [`characters`] — Dirichlet characters mod k: enumeration via the
//!   structure of (Z/kZ)*, conductors, Gauss sums and the character
//!   autocorrelation g(r).
//! - [`hardy_littlewood`] — prime-pair density constants α(h), β(h,k), the
//!   singular-series form of the pair conjecture in arithmetic progressions,
//!   and sieve-based empirical verification.
//! - [`correlation`] — the closed-form components of the conjectured
//!   two-point correlation function R₂(ε) = d̄² + R₂^diag + R₂^off for the
//!   zeros of a primitive-character L-function, together with ζ and its
//!   derivatives on the 1-line.
//! - [`zeros`] — numerical zeros of L(s,χ) on the critical line (Hurwitz-ζ
//!   evaluation, completed-function rotation, sign-change scanning) and the
//!   empirical pair-gap statistics they produce.
//!
//! Everything is deterministic: all parallel reductions use fixed chunking
//! so results do not depend on the number of worker threads.

// `n % p == 0` is the lingua franca of sieve code, `!(x > 0.0)` rejects NaN
// and the bad sign in one comparison, and the Lanczos/Bernoulli tables keep
// their published digits.
#![allow(clippy::manual_is_multiple_of)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod arith;
pub mod characters;
pub mod correlation;
pub mod hardy_littlewood;
pub mod zeros;

mod bernoulli;

pub use arith::{FactoredInt, PrimeTable};
pub use characters::DirichletCharacter;

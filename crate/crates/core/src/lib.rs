//! Product-free sets of residues with certified high density.
//!
//! A set is product-free when `a * b = c` has no solution inside it. This
//! crate builds product-free subsets of Z/nZ from divisor windows: pick a
//! modulus shape `n`, keep the residues whose gcd with n is a divisor of
//! `n / rad(n)` with an admissible number of prime factors, and certify the
//! resulting density `phi(n)/n * sum 1/d` either as an exact rational or as
//! a float with a rigorous error bound. The flagship computation certifies
//! a residue class set of density above 0.5004 modulo the 14th power of the
//! product of the first ten million primes.
//!
//! Modules:
//! - [`primes`]: segmented sieve, prime tables, binary cache format
//! - [`arith`]: factor shapes, omega windows, multiplicative primitives
//! - [`series`]: power sums, symmetric-function recurrences, Euler products
//! - [`construct`]: divisor-window sets, residue lifts, the large example,
//!   quadratic-nonresidue sets, density lower bounds
//! - [`verify`]: product-freeness checkers and the exact D(n) search
//!
//! All symmetric-function machinery is generic over a [`Scalar`] lane;
//! concrete lanes are [`Rational`] (exact) and [`ApproxValue`] (float with
//! certified absolute error).

pub mod approx;
pub mod arith;
pub mod construct;
pub mod error;
pub mod kahan;
pub mod primes;
pub mod scalar;
pub mod series;
pub mod verify;

pub use approx::ApproxValue;
pub use error::{Error, Result};
pub use scalar::{JsonScalar, Scalar};

/// The exact scalar lane.
pub type Rational = num::BigRational;

/// Symmetric-function tables in the exact lane.
pub type ExactSums = series::SymSums<Rational>;

/// Symmetric-function tables in the certified float lane.
pub type ApproxSums = series::SymSums<ApproxValue>;

/// Exact-lane window construction instance.
pub type ExactInstance = construct::TheoremInstance<Rational>;

/// Certified-float window construction instance.
pub type ApproxInstance = construct::TheoremInstance<ApproxValue>;

//! Moments of additive arithmetic functions on arithmetic progressions.
//!
//! The crate is organised by stage of the computation:
//!
//! - [`sieve`]: segmented prime sieves, progression filtering, factorization.
//! - [`arith_fn`]: functions given by their values at primes and their
//!   extension to prime powers (ω, Ω, and friends).
//! - [`prime_sums`]: exact `Σ f(p)^u / p` over a residue class, integral and
//!   closed-form asymptotics, decay classification, convergence probes.
//! - [`moments`]: empirical mean and central moments over progression members,
//!   Chebyshev and law-of-large-numbers coverage.
//! - [`model`]: the independent Bernoulli model `S_n = Σ X_p`, exact
//!   cumulants, and seeded Monte Carlo.
//! - [`stats`]: normal CDF and Kolmogorov–Smirnov diagnostics.
//! - [`cli`]: the `apmoments` command line and its report formats.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod arith_fn;
pub mod cli;
pub mod error;
pub mod model;
pub mod moments;
pub mod prime_sums;
pub mod quadrature;
pub mod report;
pub mod sieve;
pub mod stats;
pub mod summation;

pub use arith_fn::{
    builtin, eval_additive, eval_at_prime, AdditiveExtension, ArithmeticFunction, ExtensionMode,
    FunctionPair, PairClass, PrimeFunction, PrimeKind,
};
pub use error::{Error, Result};
pub use sieve::{euler_phi, primes_in_progression, sieve_primes, PrimeRange, Progression};

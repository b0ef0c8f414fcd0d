//! Exact sparse arithmetic: Laurent polynomials, rational functions, and
//! fraction-free linear algebra.
//!
//! The central carrier is [`LaurentPoly`]: a sparse Laurent polynomial in the
//! three variables `x`, `y`, `q` with `BigInt` coefficients. The `q`-exponent
//! of every term is stored as an integer multiple of `1/denom`, so a single
//! polynomial can hold `q^(1/2)` or `q^(3/4)` terms exactly; `denom` is kept
//! minimal at all times, so structural equality is mathematical equality.
//!
//! * [`Monomial`] — a single-term value used for substitutions and product
//!   arguments.
//! * [`RationalFunction`] — quotients of Laurent polynomials, normalised so
//!   that numerator and denominator share no content and no common factor.
//! * [`kernel`] — right-nullspace of a polynomial or rational-function matrix
//!   by fraction-free elimination; the workhorse behind uncoupling.

mod gcd;
mod kernel;
mod poly;
mod ratfun;

pub use gcd::{exact_div, poly_gcd};
pub use kernel::{fraction_free_kernel, ratfun_kernel};
pub use poly::{LaurentPoly, Monomial, Var};
pub use ratfun::RationalFunction;

//! Exact computer algebra for q-series identities of affine Lie-theoretic origin.
//!
//! The crate is organised around a small set of exact carriers:
//!
//! * [`exactalg`] — sparse Laurent polynomials in `x`, `y`, `q` with
//!   arbitrary-precision integer coefficients and a global denominator for
//!   fractional `q`-exponents, rational functions, and fraction-free linear
//!   algebra over them.
//! * [`qseries`] — truncated q-series with Laurent-polynomial coefficients,
//!   Pochhammer and theta products, series inversion, congruence products,
//!   Bailey-pair checks, and the Jacobi triple product.
//! * [`folding`] — simply-laced Cartan matrices, diagram automorphisms,
//!   folded Cartan matrices `A[nu]`, scaled inverses, and sum-of-squares
//!   rewrites of the associated quadratic forms.
//! * [`multisum`] — exact evaluation of lattice multisums
//!   `sum q^(m^T B m / 2 + b.m) x^(w.m) / prod (q^c; q^c)_{m_i}` with
//!   positive-definite pruning, shift rules, and recursion checks.
//! * [`partitions`] — partition sets cut out by forbidden difference
//!   conditions, membership witnesses, generating functions, and congruence
//!   counting.
//! * [`shiftrec`] — linear q-difference systems `F(x) = M(x,q) F(x q^s)`,
//!   uncoupling to scalar recurrences, and unique-solution solvers.
//! * [`certify`] — formal combinations of multisum family symbols, the
//!   fundamental shift relations, and certificate parsing/expansion.
//! * [`report`] — deterministic textual reports and digests for series.
//!
//! Everything is exact: no floating point, no modular shortcuts. Truncation
//! orders are explicit and arithmetic never claims precision beyond what the
//! inputs support.

pub mod certify;
pub mod error;
pub mod exactalg;
pub mod folding;
pub mod multisum;
pub mod partitions;
pub mod qseries;
pub mod report;
pub mod shiftrec;

pub use error::{Error, Result};
pub use exactalg::{LaurentPoly, Monomial, RationalFunction};
pub use qseries::TruncatedSeries;

//! Crate-wide error type.
//!
//! Every operation that can reject its input returns [`Result`]; the variants
//! mirror the preconditions stated on the individual operations.

use thiserror::Error;

/// Errors raised by exact-arithmetic and verification operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A replacement or argument had to be a single monomial but was not.
    #[error("expected a monomial, got `{0}`")]
    NotMonomial(String),
    /// Division by the zero polynomial or a zero denominator.
    #[error("division by zero")]
    DivisionByZero,
    /// Exact polynomial division left a remainder.
    #[error("inexact polynomial division")]
    InexactDivision,
    /// An infinite product whose factors do not tend to zero q-adically.
    #[error("divergent infinite product: {0}")]
    DivergentProduct(String),
    /// Series inversion requires an invertible constant term.
    #[error("series not invertible: {0}")]
    NotInvertible(String),
    /// A q-exponent does not lie on the grid of the requested denominator.
    #[error("exponent {num}/{den} incompatible with denominator {denom}")]
    IncompatibleDenominator { num: i64, den: i64, denom: i64 },
    /// Valuation/order constraint violated (e.g. theta argument).
    #[error("valuation constraint violated: {0}")]
    ValuationOrder(String),
    /// Matrix dimensions do not match the operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A quadratic form that must be positive definite is not.
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    /// Scaled inverse does not have integer entries for the requested scale.
    #[error("scaled inverse is not integral at scale {given}; minimal valid scale is {minimal}")]
    NonIntegralInverse { given: i64, minimal: i64 },
    /// An automorphism that is not a diagram automorphism of the matrix.
    #[error("not a diagram automorphism: {0}")]
    NotDiagramAutomorphism(String),
    /// Unknown catalog/folding/relation label.
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    /// A shift rule inconsistent with the declared multisum family.
    #[error("inconsistent shift rule; residual linear form {0}")]
    InconsistentShift(String),
    /// No linear dependency found within the allowed recurrence order.
    #[error("no recurrence of order <= {0}; raise the order bound")]
    NoDependency(usize),
    /// A unique-solution solver met a non-invertible pivot.
    #[error("pivot not a unit at degree {0}")]
    PivotNotUnit(i64),
    /// Parse error in a certificate or catalog text.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    /// Partition parts must be positive and weakly decreasing.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    /// Anything else that violates a stated precondition.
    #[error("{0}")]
    Precondition(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

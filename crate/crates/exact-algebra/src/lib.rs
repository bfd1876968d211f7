//! Exact multivariate polynomial and rational-function arithmetic over
//! arbitrary-precision rationals, together with the exact linear algebra
//! used throughout the toolkit: fraction-free (Bareiss) determinants,
//! Pfaffians of skew matrices, generic rank by random exact evaluation,
//! and symbolic nullspaces over the fraction field.

pub mod error;
pub mod matrix;
pub mod poly;
pub mod ratfun;
pub mod vars;

pub use error::AlgebraError;
pub use matrix::PolyMatrix;
pub use poly::MultiPoly;
pub use ratfun::RationalFunction;
pub use vars::{Var, VarSet};

/// Arbitrary-precision rational scalar used for every coefficient.
pub type Q = num_rational::BigRational;

/// Shorthand for an exact integer rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Shorthand for the exact fraction `n/d`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

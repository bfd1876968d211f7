//! Expression trees for generalized invariants: parsing, canonical printing,
//! exact symbolic differentiation, exact rational-function extraction and
//! arbitrary-precision complex evaluation on principal branches.

pub mod diff;
pub mod eval;
pub mod expr;
pub mod parse;
pub mod print;
pub mod rational;

pub use eval::{Complex, DomainError, EvalPoint, Evaluator};
pub use expr::{Expr, ExprKind};
pub use parse::{parse_canonical, parse_expr, ParseError};
pub use rational::as_polynomial;

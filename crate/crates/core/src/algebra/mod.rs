//! Exact arithmetic: rationals, sparse parameter polynomials, and dense
//! univariate series/polynomials over them.

mod poly;
mod rational;
mod series;

pub use poly::{Monomial, ParamPoly, VarSet};
pub use rational::Rational;
pub use series::{SeriesVar, UniPoly, XSeries};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}")]
    Parse(String),
    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),
    #[error("variable {0:?} declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("exponent vector has {found} entries, variable list has {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("series in {0} combined with series in {1}")]
    SeriesVarMismatch(SeriesVar, SeriesVar),
    #[error("requested order {requested} but only {available} is available")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("{op} needs a series of order at least 1, got {order}")]
    OrderTooLow { op: &'static str, order: usize },
    #[error("{op} requires constant term {expected}, found {found}")]
    ConstantTerm { op: &'static str, expected: i64, found: String },
    #[error("coefficient {index} is nonzero, series is not divisible")]
    NotDivisible { index: usize },
    #[error("exponent above {} or total degree above {}", poly::MAX_EXPONENT, poly::MAX_DEGREE)]
    ExponentOverflow,
    #[error("at most {max} variables are supported, got {found}")]
    TooManyVariables { max: usize, found: usize },
}

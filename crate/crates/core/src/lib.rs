//! Necessary isochronicity conditions for Liénard-type systems
//! `x'' + f(x) x'^2 + g(x) = 0`, computed exactly over the rationals.
//!
//! The crate is organized bottom-up:
//!
//! * [`algebra`]: rationals, parameter polynomials, truncated series.
//! * [`lienard`]: system data model, planar-to-Liénard reduction and the
//!   auxiliary series `F`, `e^F`, `ξ`, `φ`.
//! * [`conditions`]: the six algorithm variants producing the condition
//!   polynomials `P_k(0) - Q_k(0)` and a cross-variant agreement check.
//! * [`urabe`]: elimination of Urabe coefficients and series-level checks of
//!   the isochronicity identities.

pub mod algebra;
pub mod conditions;
pub mod lienard;
pub mod urabe;

pub use algebra::{AlgebraError, ParamPoly, Rational, SeriesVar, UniPoly, VarSet, XSeries};

//! Working with the Urabe function `h`: successive elimination of its
//! coefficients from a condition set, substitution of known values, and
//! direct series checks of the two isochronicity identities
//!
//! ```text
//! ξ(x) / (1 + h(ξ(x))) = g(x) e^{F(x)}                 (CRI)
//! φ(x) = ξ(x) + ∫_0^{ξ(x)} h(t) dt                     (phi identity)
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, ParamPoly, Rational, SeriesVar, VarSet, XSeries};
use crate::conditions::{ConditionError, ConditionSet, UrabeSeries};
use crate::lienard::{LienardError, LienardSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrabeError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lienard(#[from] LienardError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error("no value given for Urabe coefficient {0}")]
    MissingBinding(String),
    #[error("{0} is not a Urabe coefficient of this condition set")]
    UnknownCoefficient(String),
    #[error("checking to order {order} needs {needed} odd coefficients of h, got {have}")]
    ShortSeries { order: usize, needed: usize, have: usize },
    #[error("fixture series variable must be \"xi\", got {0:?}")]
    FixtureVar(String),
}

/// Result of [`eliminate_urabe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationResult {
    /// Solved coefficients in the order they were solved, each a polynomial
    /// in the system parameters only.
    pub solved: Vec<(String, ParamPoly)>,
    /// Conditions not used for solving, with every solved value substituted.
    pub residual: Vec<(usize, ParamPoly)>,
    /// Coefficients that occur in the conditions but were never solved.
    pub unsolved: Vec<String>,
}

impl EliminationResult {
    pub fn residual_is_zero(&self) -> bool {
        self.residual.iter().all(|(_, p)| p.is_zero())
    }

    pub fn solved_value(&self, name: &str) -> Option<&ParamPoly> {
        self.solved.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }
}

/// Scans conditions `k = 2..=M` in order. A condition whose only unsolved
/// Urabe coefficient `c` occurs linearly with a parameter-free coefficient is
/// solved for `c`; every other condition goes to the residual.
pub fn eliminate_urabe(set: &ConditionSet) -> EliminationResult {
    let urabe: Vec<usize> = set.urabe.iter().filter_map(|n| set.vars.index_of(n)).collect();
    let mut solved: Vec<(usize, ParamPoly)> = Vec::new();
    let mut residual = Vec::new();

    let apply = |p: &ParamPoly, solved: &[(usize, ParamPoly)]| -> ParamPoly {
        solved.iter().fold(p.clone(), |acc, (var, value)| {
            if acc.uses_var(*var) {
                acc.substitute_var(*var, value).expect("same variable set")
            } else {
                acc
            }
        })
    };

    for k in 2..=set.order {
        let cond = apply(&set.conditions[k], &solved);
        let open: Vec<usize> = urabe.iter().copied().filter(|&c| cond.uses_var(c)).collect();
        if let [c] = open.as_slice() {
            if cond.degree_in(*c) == 1 {
                let parts = cond.split_by_var(*c);
                if let Some(lead) = parts[1].constant_value().filter(|l| !l.is_zero()) {
                    let inv = lead.recip().expect("nonzero");
                    solved.push((*c, (-&parts[0]).scale(&inv)));
                    continue;
                }
            }
        }
        residual.push((k, cond));
    }

    let residual = residual.into_iter().map(|(k, p)| (k, apply(&p, &solved))).collect::<Vec<_>>();
    let unsolved = urabe
        .iter()
        .filter(|c| !solved.iter().any(|(s, _)| s == *c))
        .filter(|&&c| set.conditions.iter().any(|p| p.uses_var(c)))
        .map(|&c| set.vars.names()[c].clone())
        .collect();
    let solved = solved.into_iter().map(|(c, p)| (set.vars.names()[c].clone(), p)).collect();
    EliminationResult { solved, residual, unsolved }
}

/// Substitutes rational values for every Urabe coefficient; the returned set
/// is over the system parameters only.
pub fn substitute_urabe(set: &ConditionSet, values: &BTreeMap<String, Rational>) -> Result<ConditionSet, UrabeError> {
    if let Some(extra) = values.keys().find(|k| !set.urabe.contains(k)) {
        return Err(UrabeError::UnknownCoefficient(extra.clone()));
    }
    if let Some(missing) = set.urabe.iter().find(|n| !values.contains_key(*n)) {
        return Err(UrabeError::MissingBinding(missing.clone()));
    }
    let params = VarSet::new(set.vars.names().iter().filter(|n| !set.urabe.contains(n)).cloned())?;
    let conditions =
        set.conditions.iter().map(|p| p.substitute(values)?.embed(&params)).collect::<Result<Vec<_>, _>>()?;
    Ok(ConditionSet { vars: params, urabe: Vec::new(), conditions, ..set.clone() })
}

/// Values of a numeric Urabe series keyed by coefficient name.
pub fn urabe_bindings(h: &UrabeSeries) -> BTreeMap<String, Rational> {
    h.coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            crate::conditions::UrabeCoeff::Value(v) => Some((UrabeSeries::name(i), v.clone())),
            crate::conditions::UrabeCoeff::Symbolic(_) => None,
        })
        .collect()
}

/// Outcome of a coefficient-by-coefficient series comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub order: usize,
    /// Lowest power of `x` at which the two sides differ.
    pub first_failure: Option<usize>,
    pub difference: Option<ParamPoly>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }

    fn compare(order: usize, lhs: &XSeries, rhs: &XSeries) -> Self {
        let first = (0..=order).find(|&i| lhs.coeff(i) != rhs.coeff(i));
        IdentityCheck { order, first_failure: first, difference: first.map(|i| lhs.coeff(i) - rhs.coeff(i)) }
    }
}

fn lift(sys: &LienardSystem, h: &UrabeSeries, order: usize) -> Result<(LienardSystem, XSeries), UrabeError> {
    let needed = order.div_ceil(2);
    if h.len() < needed {
        return Err(UrabeError::ShortSeries { order, needed, have: h.len() });
    }
    sys.ensure_valid()?;
    let names = h.symbolic_names();
    if let Some(clash) = sys.params().names().iter().find(|n| names.contains(n)) {
        return Err(ConditionError::NameClash(clash.clone()).into());
    }
    let vars: Arc<VarSet> = VarSet::new(names.into_iter().chain(sys.params().names().iter().cloned()))?;
    let sys = sys.embed(&vars)?;
    let h = h.series(&vars, order)?;
    Ok((sys, h))
}

/// Checks `ξ/(1 + h∘ξ) = g e^F` up to `x^order`.
pub fn verify_cri(sys: &LienardSystem, h: &UrabeSeries, order: usize) -> Result<IdentityCheck, UrabeError> {
    let (sys, h) = lift(sys, h, order)?;
    let vars = sys.params().clone();
    let xi = sys.xi_series(order.max(1))?.truncate(order)?;
    let h_of_xi = h.compose(&xi)?;
    let denom = XSeries::one(SeriesVar::X, &vars, order).try_add(&h_of_xi)?;
    let lhs = xi.mul_to(&denom.inverse_unit()?, order)?;
    let rhs = sys.g_series(order)?.mul_to(&sys.exp_f_series(1, order)?, order)?;
    Ok(IdentityCheck::compare(order, &lhs, &rhs))
}

/// Checks `φ = ξ + (∫h)∘ξ` up to `x^order`.
pub fn verify_phi_identity(sys: &LienardSystem, h: &UrabeSeries, order: usize) -> Result<IdentityCheck, UrabeError> {
    let (sys, h) = lift(sys, h, order)?;
    let n = order.max(1);
    let xi = sys.xi_series(n)?;
    let lhs = sys.phi_series(n)?;
    let rhs = xi.try_add(&h.integrate().compose(&xi)?)?;
    Ok(IdentityCheck::compare(order, &lhs, &rhs))
}

/// On-disk form of a Urabe series: `{"var": "xi", "odd_coeffs": ["3/4", ...]}`
/// listing `c1, c3, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrabeFixture {
    pub var: String,
    pub odd_coeffs: Vec<Rational>,
}

impl UrabeFixture {
    pub fn to_series(&self) -> Result<UrabeSeries, UrabeError> {
        if self.var != "xi" {
            return Err(UrabeError::FixtureVar(self.var.clone()));
        }
        Ok(UrabeSeries::numeric(self.odd_coeffs.clone()))
    }
}

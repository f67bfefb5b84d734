//! JSON system definitions.
//!
//! ```json
//! {
//!   "name": "quadratic g",
//!   "parameters": ["b20"],
//!   "lienard": {
//!     "f": {"num": [], "den": [{"coeff": "1", "x": 0, "params": {}}]},
//!     "g": {"num": [{"coeff": "1", "x": 1, "params": {}},
//!                   {"coeff": "1", "x": 2, "params": {"b20": 1}}],
//!           "den": [{"coeff": "1", "x": 0, "params": {}}]}
//!   }
//! }
//! ```
//!
//! A `"planar"` block with `p1`, `q0`, `q2` (and optionally `p0`, `q1`, which
//! must vanish) may replace `"lienard"`. A missing `den` means 1.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use isochron_core::algebra::Monomial;
use isochron_core::lienard::{LienardError, LienardSystem, PlanarSystem, RationalFunctionX};
use isochron_core::{AlgebraError, ParamPoly, Rational, SeriesVar, UniPoly, VarSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SystemFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed system file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("exactly one of \"lienard\" and \"planar\" must be given")]
    Form,
    #[error("term uses undeclared parameter {0:?}")]
    UnknownParameter(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lienard(#[from] LienardError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: Rational,
    pub x: u32,
    #[serde(default)]
    pub params: BTreeMap<String, u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalTerms {
    pub num: Vec<Term>,
    #[serde(default = "unit_terms")]
    pub den: Vec<Term>,
}

fn unit_terms() -> Vec<Term> {
    vec![Term { coeff: Rational::one(), x: 0, params: BTreeMap::new() }]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LienardTerms {
    pub f: RationalTerms,
    pub g: RationalTerms,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarTerms {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p0: Vec<Term>,
    pub p1: Vec<Term>,
    pub q0: Vec<Term>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q1: Vec<Term>,
    pub q2: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lienard: Option<LienardTerms>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planar: Option<PlanarTerms>,
}

pub enum Parsed {
    Lienard(LienardSystem),
    Planar(PlanarSystem),
}

impl SystemFile {
    pub fn read(path: &Path) -> Result<Self, SystemFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SystemFileError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, SystemFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    pub fn parse(&self) -> Result<Parsed, SystemFileError> {
        let vars = VarSet::new(self.parameters.iter().cloned())?;
        match (&self.lienard, &self.planar) {
            (Some(l), None) => {
                let f = RationalFunctionX::new(to_poly(&vars, &l.f.num)?, to_poly(&vars, &l.f.den)?)?;
                let g = RationalFunctionX::new(to_poly(&vars, &l.g.num)?, to_poly(&vars, &l.g.den)?)?;
                Ok(Parsed::Lienard(LienardSystem::new(&vars, f, g)?))
            }
            (None, Some(p)) => Ok(Parsed::Planar(PlanarSystem::new(
                &vars,
                to_poly(&vars, &p.p0)?,
                to_poly(&vars, &p.p1)?,
                to_poly(&vars, &p.q0)?,
                to_poly(&vars, &p.q1)?,
                to_poly(&vars, &p.q2)?,
            )?)),
            _ => Err(SystemFileError::Form),
        }
    }

    /// The Liénard system described by the file, reducing a planar form.
    pub fn lienard(&self) -> Result<LienardSystem, SystemFileError> {
        match self.parse()? {
            Parsed::Lienard(s) => Ok(s),
            Parsed::Planar(p) => Ok(p.reduce()?),
        }
    }

    pub fn from_lienard(name: Option<String>, sys: &LienardSystem) -> Self {
        let rt = |r: &RationalFunctionX| RationalTerms { num: to_terms(r.num()), den: to_terms(r.den()) };
        SystemFile {
            name,
            parameters: sys.params().names().to_vec(),
            lienard: Some(LienardTerms { f: rt(sys.f()), g: rt(sys.g()) }),
            planar: None,
        }
    }
}

fn to_poly(vars: &Arc<VarSet>, terms: &[Term]) -> Result<UniPoly, SystemFileError> {
    let deg = terms.iter().map(|t| t.x as usize + 1).max().unwrap_or(0);
    let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); deg];
    for t in terms {
        let mut exps = vec![0u16; vars.len()];
        for (name, &e) in &t.params {
            let i = vars.index_of(name).ok_or_else(|| SystemFileError::UnknownParameter(name.clone()))?;
            exps[i] = exps[i].saturating_add(e);
        }
        buckets[t.x as usize].push((Monomial::from_exponents(&exps)?, t.coeff.clone()));
    }
    let coeffs = buckets.into_iter().map(|b| ParamPoly::from_terms(vars, b)).collect::<Result<Vec<_>, _>>()?;
    Ok(UniPoly::new(SeriesVar::X, vars, coeffs))
}

/// Canonical term list: ascending power of `x`, then descending monomial order.
pub fn to_terms(p: &UniPoly) -> Vec<Term> {
    let names = p.vars().names();
    let mut out = Vec::new();
    for (x, c) in p.coeffs().iter().enumerate() {
        for (m, r) in c.terms() {
            let params =
                m.exponents().iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (names[i].clone(), e)).collect();
            out.push(Term { coeff: r.clone(), x: x as u32, params });
        }
    }
    out
}

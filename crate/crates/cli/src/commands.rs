use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use isochron_core::conditions::{
    run_variant, ConditionError, ConditionSet, RunOptions, UrabeCoeff, UrabeSeries, Variant,
};
use isochron_core::lienard::{LienardError, LienardSystem};
use isochron_core::urabe::{eliminate_urabe, verify_cri, verify_phi_identity, IdentityCheck, UrabeError, UrabeFixture};
use isochron_core::Rational;
use serde::Serialize;

use crate::system_file::{SystemFile, SystemFileError};

/// Process exit statuses other than success.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    Verification = 1,
    Input = 2,
    Resource = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Input, message: message.into() }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Verification, message: message.into() }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Resource, message: message.into() }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<SystemFileError> for CliError {
    fn from(e: SystemFileError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<LienardError> for CliError {
    fn from(e: LienardError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<ConditionError> for CliError {
    fn from(e: ConditionError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<UrabeError> for CliError {
    fn from(e: UrabeError) -> Self {
        CliError::input(e.to_string())
    }
}

/// Parses `name=p/q` bindings.
pub fn parse_bindings(raw: &[String]) -> Result<BTreeMap<String, Rational>, CliError> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("binding {item:?} is not of the form name=p/q")))?;
        let value: Rational = value.trim().parse().map_err(|e| CliError::input(format!("binding {item:?}: {e}")))?;
        if out.insert(name.trim().to_string(), value).is_some() {
            return Err(CliError::input(format!("parameter {name} bound twice")));
        }
    }
    Ok(out)
}

/// Loads a system file, reduces it if planar and applies the bindings.
pub fn load_system(
    path: &Path,
    bindings: &BTreeMap<String, Rational>,
) -> Result<(SystemFile, LienardSystem), CliError> {
    let file = SystemFile::read(path)?;
    let sys = file.lienard()?;
    let sys = if bindings.is_empty() { sys } else { sys.bind(bindings)? };
    Ok((file, sys))
}

pub fn load_urabe(path: &Path) -> Result<UrabeSeries, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let fixture: UrabeFixture =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("malformed Urabe fixture: {e}")))?;
    Ok(fixture.to_series()?)
}

pub fn reduce(file: &SystemFile) -> Result<SystemFile, CliError> {
    let sys = file.lienard()?;
    Ok(SystemFile::from_lienard(file.name.clone(), &sys))
}

/// Where the Urabe coefficients of a condition run come from.
pub enum UrabeSource {
    /// `c1, c3, ...` as unknowns; `None` picks enough for every condition.
    Symbolic(Option<usize>),
    /// Known values; only as many as the order can see are used.
    Numeric(UrabeSeries),
}

impl UrabeSource {
    pub fn series(&self, m: usize) -> UrabeSeries {
        match self {
            UrabeSource::Symbolic(None) => UrabeSeries::for_conditions(m),
            UrabeSource::Symbolic(Some(n)) => UrabeSeries::symbolic(*n),
            UrabeSource::Numeric(h) => {
                let keep = h.len().min(UrabeSeries::for_conditions(m).len());
                let values = h.coeffs()[..keep]
                    .iter()
                    .map(|c| match c {
                        UrabeCoeff::Value(v) => v.clone(),
                        UrabeCoeff::Symbolic(_) => unreachable!("fixtures are numeric"),
                    })
                    .collect();
                UrabeSeries::numeric(values)
            }
        }
    }
}

pub fn conditions(
    sys: &LienardSystem,
    m: usize,
    variant: Variant,
    urabe: &UrabeSource,
) -> Result<ConditionSet, CliError> {
    Ok(run_variant(sys, &urabe.series(m), m, variant, &RunOptions::default())?.set)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data") + "\n"
}

#[derive(Debug, Serialize)]
pub struct SolvedRecord {
    pub coeff: String,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct ResidualRecord {
    pub k: usize,
    pub condition: String,
}

#[derive(Debug, Serialize)]
pub struct EliminationRecord {
    pub variant: String,
    #[serde(rename = "M")]
    pub order: usize,
    pub system_hash: String,
    pub solved: Vec<SolvedRecord>,
    pub residual: Vec<ResidualRecord>,
    pub unsolved: Vec<String>,
    pub residual_zero: bool,
}

pub fn eliminate(set: &ConditionSet) -> EliminationRecord {
    let e = eliminate_urabe(set);
    EliminationRecord {
        variant: set.variant.id().to_string(),
        order: set.order,
        system_hash: set.system_hash.clone(),
        solved: e.solved.iter().map(|(c, v)| SolvedRecord { coeff: c.clone(), value: v.to_string() }).collect(),
        residual: e.residual.iter().map(|(k, p)| ResidualRecord { k: *k, condition: p.to_string() }).collect(),
        unsolved: e.unsolved.clone(),
        residual_zero: e.residual_is_zero(),
    }
}

#[derive(Debug)]
pub struct VerifyOutcome {
    pub cri: IdentityCheck,
    pub phi: IdentityCheck,
}

impl VerifyOutcome {
    pub fn holds(&self) -> bool {
        self.cri.holds() && self.phi.holds()
    }

    pub fn report(&self) -> String {
        let line = |label: &str, c: &IdentityCheck| match (c.first_failure, &c.difference) {
            (None, _) => format!("{label}: holds to order {}\n", c.order),
            (Some(i), Some(d)) => format!("{label}: fails at x^{i} (lhs - rhs = {d})\n"),
            (Some(i), None) => format!("{label}: fails at x^{i}\n"),
        };
        line("xi/(1+h(xi)) = g e^F", &self.cri) + &line("phi = xi + int_0^xi h", &self.phi)
    }
}

pub fn verify(sys: &LienardSystem, h: &UrabeSeries, order: usize) -> Result<VerifyOutcome, CliError> {
    if !sys.params().is_empty() {
        return Err(CliError::input(format!(
            "unbound parameters: {}; bind them with --bind name=p/q",
            sys.params().names().join(", ")
        )));
    }
    Ok(VerifyOutcome { cri: verify_cri(sys, h, order)?, phi: verify_phi_identity(sys, h, order)? })
}

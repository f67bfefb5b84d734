//! Liénard-type systems `x'' + f(x) x'^2 + g(x) = 0` with rational `f`, `g`,
//! the planar systems that reduce to them, and the auxiliary series
//! `F = ∫f`, `e^F`, `ξ` (`ξ²/2 = ∫ g e^{2F}`) and `φ = ∫ e^F`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::{AlgebraError, ParamPoly, Rational, SeriesVar, UniPoly, VarSet, XSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LienardError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0} has a zero denominator")]
    ZeroDenominator(&'static str),
    #[error("{which} denominator has constant term {found}, expected 1")]
    DenominatorNotUnit { which: &'static str, found: String },
    #[error("polynomials must be in x over the system's parameters")]
    Shape,
    #[error("not reducible by this method: {0}")]
    NotReducible(String),
    #[error("degenerate planar system: {0}")]
    Degenerate(String),
    #[error("invalid Liénard system: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("inconsistent xi expansion: x^2 coefficient of 2*int(g*e^(2F)) is {0}, expected 1")]
    XiNormalization(String),
    #[error("order must be at least {min}, got {order}")]
    Order { min: usize, order: usize },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// `num(x) / den(x)` with `ParamPoly` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionX {
    num: UniPoly,
    den: UniPoly,
}

impl RationalFunctionX {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self, LienardError> {
        if num.var() != SeriesVar::X || den.var() != SeriesVar::X {
            return Err(LienardError::Shape);
        }
        if num.vars() != den.vars() {
            return Err(LienardError::Shape);
        }
        if den.is_zero() {
            return Err(LienardError::ZeroDenominator("rational function"));
        }
        Ok(RationalFunctionX { num, den })
    }

    pub fn polynomial(num: UniPoly) -> Result<Self, LienardError> {
        let den = UniPoly::one(SeriesVar::X, num.vars());
        Self::new(num, den)
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0) && self.den.coeff(0).is_one()
    }

    fn den_is_unit(&self) -> bool {
        self.den.eval_at_zero().is_one()
    }

    /// Power series expansion at 0; requires `den(0) = 1`.
    pub fn series(&self, which: &'static str, order: usize) -> Result<XSeries, LienardError> {
        if !self.den_is_unit() {
            return Err(LienardError::DenominatorNotUnit { which, found: self.den.eval_at_zero().to_string() });
        }
        let num = self.num.to_series(order);
        if self.is_polynomial() {
            return Ok(num);
        }
        let inv = self.den.to_series(order).inverse_unit()?;
        Ok(num.mul_to(&inv, order)?)
    }

    fn map(&self, f: impl Fn(&UniPoly) -> Result<UniPoly, AlgebraError>) -> Result<Self, LienardError> {
        Self::new(f(&self.num)?, f(&self.den)?)
    }
}

impl fmt::Display for RationalFunctionX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

/// A hypothesis of the Liénard model that a system fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    GAtOrigin(String),
    GSlope(String),
    Denominator { which: &'static str, found: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GAtOrigin(v) => write!(f, "g(0) = {v} ≠ 0"),
            Violation::GSlope(v) => write!(f, "g'(0) = {v} ≠ 1"),
            Violation::Denominator { which, found } => write!(f, "{which} denominator at 0 = {found} ≠ 1"),
        }
    }
}

/// Outcome of [`LienardSystem::validate`]. The sign condition `x g(x) > 0`
/// cannot be decided symbolically and is always listed as unchecked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub violations: Vec<Violation>,
    pub unchecked: Vec<&'static str>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const SIGN_CONDITION: &str = "x*g(x) > 0 for small x != 0";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LienardSystem {
    params: Arc<VarSet>,
    f: RationalFunctionX,
    g: RationalFunctionX,
}

impl LienardSystem {
    pub fn new(params: &Arc<VarSet>, f: RationalFunctionX, g: RationalFunctionX) -> Result<Self, LienardError> {
        let f = f.map(|p| p.embed(params))?;
        let g = g.map(|p| p.embed(params))?;
        Ok(LienardSystem { params: params.clone(), f, g })
    }

    /// Convenience constructor for polynomial `f` and `g` given as dense
    /// coefficient lists.
    pub fn polynomial(params: &Arc<VarSet>, f: Vec<ParamPoly>, g: Vec<ParamPoly>) -> Result<Self, LienardError> {
        let f = RationalFunctionX::polynomial(UniPoly::new(SeriesVar::X, params, f))?;
        let g = RationalFunctionX::polynomial(UniPoly::new(SeriesVar::X, params, g))?;
        Self::new(params, f, g)
    }

    pub fn params(&self) -> &Arc<VarSet> {
        &self.params
    }

    pub fn f(&self) -> &RationalFunctionX {
        &self.f
    }

    pub fn g(&self) -> &RationalFunctionX {
        &self.g
    }

    /// Re-expresses the system over a larger variable set (for instance one
    /// that also holds Urabe coefficients).
    pub fn embed(&self, target: &Arc<VarSet>) -> Result<Self, LienardError> {
        Ok(LienardSystem {
            params: target.clone(),
            f: self.f.map(|p| p.embed(target))?,
            g: self.g.map(|p| p.embed(target))?,
        })
    }

    /// Binds parameters to rational values and drops them from the variable list.
    pub fn bind(&self, bindings: &BTreeMap<String, Rational>) -> Result<Self, LienardError> {
        let substituted = LienardSystem {
            params: self.params.clone(),
            f: self.f.map(|p| p.substitute(bindings))?,
            g: self.g.map(|p| p.substitute(bindings))?,
        };
        let remaining = VarSet::new(self.params.names().iter().filter(|n| !bindings.contains_key(*n)).cloned())?;
        substituted.embed(&remaining)
    }

    /// Stable short digest of the canonical rendering of the system.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.params.names().join(",").as_bytes());
        for part in [&self.f.num, &self.f.den, &self.g.num, &self.g.den] {
            h.update(b"|");
            h.update(part.to_string().as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Validation {
        let mut violations = Vec::new();
        for (which, rf) in [("f", &self.f), ("g", &self.g)] {
            if !rf.den_is_unit() {
                violations.push(Violation::Denominator { which, found: rf.den.eval_at_zero().to_string() });
            }
        }
        let (g0, g1) = match self.g.series("g", 1) {
            Ok(s) => (s.coeff(0).clone(), Some(s.coeff(1).clone())),
            Err(_) => (self.g.num.coeff(0), None),
        };
        if !g0.is_zero() {
            violations.push(Violation::GAtOrigin(g0.to_string()));
        }
        if let Some(g1) = g1 {
            if !g1.is_one() {
                violations.push(Violation::GSlope(g1.to_string()));
            }
        }
        Validation { violations, unchecked: vec![SIGN_CONDITION] }
    }

    pub fn ensure_valid(&self) -> Result<(), LienardError> {
        let v = self.validate();
        if v.is_valid() {
            Ok(())
        } else {
            Err(LienardError::Invalid(v.violations))
        }
    }

    pub fn f_series(&self, order: usize) -> Result<XSeries, LienardError> {
        self.f.series("f", order)
    }

    pub fn g_series(&self, order: usize) -> Result<XSeries, LienardError> {
        self.g.series("g", order)
    }

    /// `F(x) = ∫_0^x f`.
    pub fn f_integral_series(&self, order: usize) -> Result<XSeries, LienardError> {
        match order {
            0 => Ok(XSeries::zero(SeriesVar::X, &self.params, 0)),
            n => Ok(self.f_series(n - 1)?.integrate()),
        }
    }

    /// `e^{k F(x)}`.
    pub fn exp_f_series(&self, k: i64, order: usize) -> Result<XSeries, LienardError> {
        Ok(self.f_integral_series(order)?.scale_int(k).exp_zero_const()?)
    }

    /// `ξ(x)` from `ξ²/2 = ∫_0^x g e^{2F}`, `ξ'(0) = 1`.
    ///
    /// The integral starts at `x^2`, so `ξ = x · sqrt(2 ∫ g e^{2F} / x^2)` and
    /// the division by `x^2` is a coefficient shift.
    pub fn xi_series(&self, order: usize) -> Result<XSeries, LienardError> {
        if order < 1 {
            return Err(LienardError::Order { min: 1, order });
        }
        let integrand = self.g_series(order)?.mul_to(&self.exp_f_series(2, order)?, order)?;
        let twice = integrand.integrate().scale_int(2);
        let reduced = twice.shift_down(2).map_err(|_| LienardError::XiNormalization(twice.coeff(0).to_string()))?;
        if !reduced.coeff(0).is_one() {
            return Err(LienardError::XiNormalization(reduced.coeff(0).to_string()));
        }
        Ok(reduced.sqrt_unit()?.shift_up(1))
    }

    /// `φ(x) = ∫_0^x e^{F}`.
    pub fn phi_series(&self, order: usize) -> Result<XSeries, LienardError> {
        if order < 1 {
            return Err(LienardError::Order { min: 1, order });
        }
        Ok(self.exp_f_series(1, order - 1)?.integrate())
    }
}

/// `x' = p0(x) + p1(x) y`, `y' = q0(x) + q1(x) y + q2(x) y^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarSystem {
    params: Arc<VarSet>,
    pub p0: UniPoly,
    pub p1: UniPoly,
    pub q0: UniPoly,
    pub q1: UniPoly,
    pub q2: UniPoly,
}

impl PlanarSystem {
    pub fn new(
        params: &Arc<VarSet>,
        p0: UniPoly,
        p1: UniPoly,
        q0: UniPoly,
        q1: UniPoly,
        q2: UniPoly,
    ) -> Result<Self, LienardError> {
        let fix = |p: UniPoly| -> Result<UniPoly, LienardError> {
            if p.var() != SeriesVar::X {
                return Err(LienardError::Shape);
            }
            Ok(p.embed(params)?)
        };
        Ok(PlanarSystem {
            params: params.clone(),
            p0: fix(p0)?,
            p1: fix(p1)?,
            q0: fix(q0)?,
            q1: fix(q1)?,
            q2: fix(q2)?,
        })
    }

    pub fn params(&self) -> &Arc<VarSet> {
        &self.params
    }

    /// Reduction of `x' = p1(x) y`, `y' = q0(x) + q2(x) y^2` to Liénard form.
    ///
    /// With `Y = p1 y` one gets `x'' = p1 q0 + (p1' + q2)/p1 · x'^2`, hence
    /// `f = -(p1' + q2)/p1` and `g = -p1 q0`. Numerator and denominator of `f`
    /// are multiplied by `p1(0) = ±1` so the denominator is 1 at the origin.
    pub fn reduce(&self) -> Result<LienardSystem, LienardError> {
        if !self.q1.is_zero() {
            return Err(LienardError::NotReducible(format!("q1 = {} is not identically zero", self.q1)));
        }
        if !self.p0.is_zero() {
            return Err(LienardError::NotReducible(format!(
                "p0 = {} is not identically zero; only x' = p1(x) y is supported",
                self.p0
            )));
        }
        let p1_0 = self.p1.eval_at_zero();
        let sign = match p1_0.constant_value() {
            Some(c) if c.is_zero() => return Err(LienardError::Degenerate("p1(0) = 0".into())),
            Some(c) if c.is_one() => 1,
            Some(c) if (-&c).is_one() => -1,
            _ => return Err(LienardError::Degenerate(format!("p1(0) = {p1_0}, expected 1 or -1"))),
        };
        let f_num = self.p1.derivative().try_add(&self.q2)?.scale_int(-sign);
        let f_den = self.p1.scale_int(sign);
        let g_num = self.p1.try_mul(&self.q0)?.neg();
        let sys = LienardSystem::new(
            &self.params,
            RationalFunctionX::new(f_num, f_den)?,
            RationalFunctionX::polynomial(g_num)?,
        )?;
        sys.ensure_valid()?;
        Ok(sys)
    }
}

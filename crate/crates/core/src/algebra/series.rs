//! Dense univariate objects with `ParamPoly` coefficients: truncated power
//! series ([`XSeries`]) and exact polynomials ([`UniPoly`]).
//!
//! An `XSeries` of order `n` knows its coefficients of `t^0 ..= t^n` and
//! nothing beyond; every operation returns the largest order that is still
//! exact given its inputs. A `UniPoly` is exact at every degree.

use std::fmt;
use std::sync::Arc;

use super::poly::same_vars;
use super::{AlgebraError, ParamPoly, Rational, VarSet};

/// Name of the series variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesVar {
    X,
    Xi,
}

impl fmt::Display for SeriesVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesVar::X => "x",
            SeriesVar::Xi => "xi",
        })
    }
}

/// Truncated power series `Σ_{i ≤ order} coeffs[i] t^i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct XSeries {
    var: SeriesVar,
    vars: Arc<VarSet>,
    coeffs: Vec<ParamPoly>,
}

fn sum_products<'a, I>(vars: &Arc<VarSet>, pairs: I) -> ParamPoly
where
    I: Iterator<Item = (&'a ParamPoly, &'a ParamPoly)>,
{
    ParamPoly::sum_of_products(vars, pairs).expect("operands share the series variable set")
}

impl XSeries {
    pub fn zero(var: SeriesVar, vars: &Arc<VarSet>, order: usize) -> Self {
        XSeries { var, vars: vars.clone(), coeffs: vec![ParamPoly::zero(vars); order + 1] }
    }

    pub fn one(var: SeriesVar, vars: &Arc<VarSet>, order: usize) -> Self {
        let mut s = Self::zero(var, vars, order);
        s.coeffs[0] = ParamPoly::one(vars);
        s
    }

    /// The series `t` (the identity map) at the given order.
    pub fn identity(var: SeriesVar, vars: &Arc<VarSet>, order: usize) -> Self {
        let mut s = Self::zero(var, vars, order);
        if order >= 1 {
            s.coeffs[1] = ParamPoly::one(vars);
        }
        s
    }

    /// Takes `coeffs` as exact up to their length, zero-padding up to `order`.
    /// Coefficients beyond `order` are dropped.
    pub fn from_coeffs(
        var: SeriesVar,
        vars: &Arc<VarSet>,
        mut coeffs: Vec<ParamPoly>,
        order: usize,
    ) -> Result<Self, AlgebraError> {
        if let Some(c) = coeffs.iter().find(|c| !same_vars(c.vars(), vars)) {
            return Err(AlgebraError::VariableMismatch {
                left: vars.names().to_vec(),
                right: c.vars().names().to_vec(),
            });
        }
        coeffs.resize(order + 1, ParamPoly::zero(vars));
        Ok(XSeries { var, vars: vars.clone(), coeffs })
    }

    pub fn var(&self) -> SeriesVar {
        self.var
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ParamPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &ParamPoly {
        &self.coeffs[i]
    }

    pub fn into_coeffs(self) -> Vec<ParamPoly> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ParamPoly::is_zero)
    }

    /// Coefficient of `t^0`, i.e. the value at the origin.
    pub fn eval_at_zero(&self) -> ParamPoly {
        self.coeffs[0].clone()
    }

    pub fn truncate(&self, order: usize) -> Result<Self, AlgebraError> {
        if order > self.order() {
            return Err(AlgebraError::OrderTooHigh { requested: order, available: self.order() });
        }
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs: self.coeffs[..=order].to_vec() })
    }

    /// Keeps the order but zeroes every coefficient above `keep`.
    pub fn zero_above(mut self, keep: usize) -> Self {
        for c in self.coeffs.iter_mut().skip(keep + 1) {
            *c = ParamPoly::zero(&self.vars);
        }
        self
    }

    fn check(&self, other: &XSeries) -> Result<(), AlgebraError> {
        if self.var != other.var {
            return Err(AlgebraError::SeriesVarMismatch(self.var, other.var));
        }
        if !same_vars(&self.vars, &other.vars) {
            return Err(AlgebraError::VariableMismatch {
                left: self.vars.names().to_vec(),
                right: other.vars.names().to_vec(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &XSeries) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect();
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs })
    }

    pub fn try_sub(&self, other: &XSeries) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect();
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs })
    }

    /// Product truncated at `order`, which may not exceed either operand's order.
    pub fn mul_to(&self, other: &XSeries, order: usize) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let avail = self.order().min(other.order());
        if order > avail {
            return Err(AlgebraError::OrderTooHigh { requested: order, available: avail });
        }
        let coeffs = (0..=order)
            .map(|i| sum_products(&self.vars, (0..=i).map(|j| (&self.coeffs[j], &other.coeffs[i - j]))))
            .collect();
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs })
    }

    /// Product at the largest order both operands support.
    pub fn try_mul(&self, other: &XSeries) -> Result<Self, AlgebraError> {
        self.mul_to(other, self.order().min(other.order()))
    }

    pub fn neg(&self) -> Self {
        XSeries { var: self.var, vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &ParamPoly) -> Self {
        XSeries { var: self.var, vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        XSeries { var: self.var, vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        XSeries { var: self.var, vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|x| x.scale_int(k)).collect() }
    }

    /// Term-wise derivative; the order drops by one.
    pub fn derivative(&self) -> Result<Self, AlgebraError> {
        if self.order() == 0 {
            return Err(AlgebraError::OrderTooLow { op: "derivative", order: 0 });
        }
        let coeffs = (1..=self.order()).map(|i| self.coeffs[i].scale_int(i as i64)).collect();
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs })
    }

    /// Antiderivative vanishing at zero; the order rises by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ParamPoly::zero(&self.vars));
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&Rational::new(1, i as i64 + 1).expect("nonzero")));
        }
        XSeries { var: self.var, vars: self.vars.clone(), coeffs }
    }

    /// Multiplication by `t^k`; the order rises by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![ParamPoly::zero(&self.vars); k];
        coeffs.extend(self.coeffs.iter().cloned());
        XSeries { var: self.var, vars: self.vars.clone(), coeffs }
    }

    /// Exact division by `t^k`; the `k` lowest coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self, AlgebraError> {
        if k > self.order() {
            return Err(AlgebraError::OrderTooLow { op: "shift_down", order: self.order() });
        }
        if let Some(i) = (0..k).find(|&i| !self.coeffs[i].is_zero()) {
            return Err(AlgebraError::NotDivisible { index: i });
        }
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs: self.coeffs[k..].to_vec() })
    }

    fn require_constant(&self, expected: i64, op: &'static str) -> Result<(), AlgebraError> {
        if self.coeffs[0] == ParamPoly::int(&self.vars, expected) {
            Ok(())
        } else {
            Err(AlgebraError::ConstantTerm { op, expected, found: self.coeffs[0].to_string() })
        }
    }

    /// `1 / a` for a series with constant term exactly 1.
    pub fn inverse_unit(&self) -> Result<Self, AlgebraError> {
        self.require_constant(1, "inverse_unit")?;
        let n = self.order();
        let mut out: Vec<ParamPoly> = Vec::with_capacity(n + 1);
        out.push(ParamPoly::one(&self.vars));
        for i in 1..=n {
            let s = sum_products(&self.vars, (1..=i).map(|k| (&self.coeffs[k], &out[i - k])));
            out.push(-&s);
        }
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs: out })
    }

    /// Formal `exp(a)` for `a(0) = 0`, via `e_n = (1/n) Σ_{k=1}^{n} k a_k e_{n-k}`.
    pub fn exp_zero_const(&self) -> Result<Self, AlgebraError> {
        self.require_constant(0, "exp")?;
        let n = self.order();
        let weighted: Vec<ParamPoly> = self.coeffs.iter().enumerate().map(|(k, a)| a.scale_int(k as i64)).collect();
        let mut out: Vec<ParamPoly> = Vec::with_capacity(n + 1);
        out.push(ParamPoly::one(&self.vars));
        for i in 1..=n {
            let s = sum_products(&self.vars, (1..=i).map(|k| (&weighted[k], &out[i - k])));
            out.push(s.scale(&Rational::new(1, i as i64).expect("nonzero")));
        }
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs: out })
    }

    /// Square root with constant term 1 of a series with constant term 1.
    pub fn sqrt_unit(&self) -> Result<Self, AlgebraError> {
        self.require_constant(1, "sqrt_unit")?;
        let n = self.order();
        let half = Rational::new(1, 2).expect("nonzero");
        let mut out: Vec<ParamPoly> = Vec::with_capacity(n + 1);
        out.push(ParamPoly::one(&self.vars));
        for i in 1..=n {
            let s = sum_products(&self.vars, (1..i).map(|k| (&out[k], &out[i - k])));
            out.push((&self.coeffs[i] - &s).scale(&half));
        }
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs: out })
    }

    /// `outer(inner(t))` by Horner's rule at order `min(outer.order, inner.order)`.
    /// The result lives in `inner`'s variable.
    pub fn compose(&self, inner: &XSeries) -> Result<Self, AlgebraError> {
        if !same_vars(&self.vars, &inner.vars) {
            return Err(AlgebraError::VariableMismatch {
                left: self.vars.names().to_vec(),
                right: inner.vars.names().to_vec(),
            });
        }
        if !inner.coeffs[0].is_zero() {
            return Err(AlgebraError::ConstantTerm { op: "compose", expected: 0, found: inner.coeffs[0].to_string() });
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n)?;
        let mut acc = XSeries::zero(inner.var, &self.vars, n);
        for c in self.coeffs[..=n].iter().rev() {
            acc = acc.mul_to(&inner, n)?;
            acc.coeffs[0] = &acc.coeffs[0] + c;
        }
        Ok(acc)
    }

    pub fn to_poly(&self) -> UniPoly {
        UniPoly::new(self.var, &self.vars, self.coeffs.clone())
    }

    pub fn substitute(&self, bindings: &std::collections::BTreeMap<String, Rational>) -> Result<Self, AlgebraError> {
        let coeffs = self.coeffs.iter().map(|c| c.substitute(bindings)).collect::<Result<_, _>>()?;
        Ok(XSeries { var: self.var, vars: self.vars.clone(), coeffs })
    }

    pub fn embed(&self, target: &Arc<VarSet>) -> Result<Self, AlgebraError> {
        let coeffs = self.coeffs.iter().map(|c| c.embed(target)).collect::<Result<_, _>>()?;
        Ok(XSeries { var: self.var, vars: target.clone(), coeffs })
    }
}

impl fmt::Display for XSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_dense(f, self.var, &self.coeffs)?;
        write!(f, " + O({}^{})", self.var, self.order() + 1)
    }
}

fn fmt_dense(f: &mut fmt::Formatter<'_>, var: SeriesVar, coeffs: &[ParamPoly]) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        match i {
            0 => write!(f, "({c})")?,
            1 => write!(f, "({c})*{var}")?,
            _ => write!(f, "({c})*{var}^{i}")?,
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Exact univariate polynomial with `ParamPoly` coefficients; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    var: SeriesVar,
    vars: Arc<VarSet>,
    coeffs: Vec<ParamPoly>,
}

impl UniPoly {
    pub fn new(var: SeriesVar, vars: &Arc<VarSet>, mut coeffs: Vec<ParamPoly>) -> Self {
        while coeffs.last().is_some_and(ParamPoly::is_zero) {
            coeffs.pop();
        }
        UniPoly { var, vars: vars.clone(), coeffs }
    }

    pub fn zero(var: SeriesVar, vars: &Arc<VarSet>) -> Self {
        UniPoly { var, vars: vars.clone(), coeffs: Vec::new() }
    }

    pub fn one(var: SeriesVar, vars: &Arc<VarSet>) -> Self {
        UniPoly { var, vars: vars.clone(), coeffs: vec![ParamPoly::one(vars)] }
    }

    pub fn var(&self) -> SeriesVar {
        self.var
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn coeffs(&self) -> &[ParamPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ParamPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ParamPoly::zero(&self.vars))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval_at_zero(&self) -> ParamPoly {
        self.coeff(0)
    }

    pub fn to_series(&self, order: usize) -> XSeries {
        let mut coeffs: Vec<ParamPoly> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, ParamPoly::zero(&self.vars));
        XSeries { var: self.var, vars: self.vars.clone(), coeffs }
    }

    pub fn try_add(&self, other: &UniPoly) -> Result<Self, AlgebraError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &UniPoly) -> Result<Self, AlgebraError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &UniPoly, op: impl Fn(&ParamPoly, &ParamPoly) -> ParamPoly) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = ParamPoly::zero(&self.vars);
        let coeffs =
            (0..n).map(|i| op(self.coeffs.get(i).unwrap_or(&zero), other.coeffs.get(i).unwrap_or(&zero))).collect();
        Ok(UniPoly::new(self.var, &self.vars, coeffs))
    }

    fn check(&self, other: &UniPoly) -> Result<(), AlgebraError> {
        if self.var != other.var {
            return Err(AlgebraError::SeriesVarMismatch(self.var, other.var));
        }
        if !same_vars(&self.vars, &other.vars) {
            return Err(AlgebraError::VariableMismatch {
                left: self.vars.names().to_vec(),
                right: other.vars.names().to_vec(),
            });
        }
        Ok(())
    }

    /// Full (untruncated) product.
    pub fn try_mul(&self, other: &UniPoly) -> Result<Self, AlgebraError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(UniPoly::zero(self.var, &self.vars));
        }
        let (n, m) = (self.coeffs.len(), other.coeffs.len());
        let coeffs = (0..n + m - 1)
            .map(|i| {
                let lo = i.saturating_sub(m - 1);
                let hi = i.min(n - 1);
                sum_products(&self.vars, (lo..=hi).map(|j| (&self.coeffs[j], &other.coeffs[i - j])))
            })
            .collect();
        Ok(UniPoly::new(self.var, &self.vars, coeffs))
    }

    pub fn neg(&self) -> Self {
        UniPoly { var: self.var, vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        UniPoly::new(self.var, &self.vars, self.coeffs.iter().map(|c| c.scale_int(k)).collect())
    }

    pub fn scale(&self, c: &ParamPoly) -> Self {
        UniPoly::new(self.var, &self.vars, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale_int(i as i64)).collect();
        UniPoly::new(self.var, &self.vars, coeffs)
    }

    pub fn substitute(&self, bindings: &std::collections::BTreeMap<String, Rational>) -> Result<Self, AlgebraError> {
        let coeffs = self.coeffs.iter().map(|c| c.substitute(bindings)).collect::<Result<_, _>>()?;
        Ok(UniPoly::new(self.var, &self.vars, coeffs))
    }

    pub fn embed(&self, target: &Arc<VarSet>) -> Result<Self, AlgebraError> {
        let coeffs = self.coeffs.iter().map(|c| c.embed(target)).collect::<Result<_, _>>()?;
        Ok(UniPoly::new(self.var, target, coeffs))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_dense(f, self.var, &self.coeffs)
    }
}

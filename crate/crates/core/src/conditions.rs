//! The six algorithm variants producing the necessary isochronicity
//! conditions `P_k(0) - Q_k(0)`, `k = 0..=M`.
//!
//! | variant | recurrences                               | truncation        |
//! |---------|-------------------------------------------|-------------------|
//! | A0      | C-algorithm (division by `1+h`, `e^{-F}`) | none              |
//! | A1      | C-algorithm                               | order `M - k`     |
//! | A2      | reduced (ReCA), series `f`, `g`           | order `M - k`     |
//! | A3      | reduced (ReCA)                            | none              |
//! | A4      | rational (RCA), polynomial `N`, `D`       | degree `M - k`    |
//! | A5      | rational (RCA)                            | none              |
//!
//! Truncated variants carry [`XSeries`] whose order drops by one per step.
//! Untruncated variants carry exact values `N / ∏ B_i^{e_i} · e^{cF}` with
//! polynomial `N` and fixed bases `B_i(0) = 1` (`1+h`, the denominators of `f`
//! and `g`), so nothing is ever expanded or cut off. The value at zero of step
//! `k` only depends on input coefficients up to order `M`, so all six variants
//! produce the same polynomials.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, ParamPoly, Rational, SeriesVar, UniPoly, VarSet, XSeries};
use crate::lienard::{LienardError, LienardSystem};

mod exact;

use exact::{Exact, Frame};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lienard(#[from] LienardError),
    #[error("at least one condition must be requested (M >= 1)")]
    NoConditions,
    #[error("M = {order} needs at least {needed} Urabe coefficients, got {have}")]
    InsufficientUrabe { order: usize, needed: usize, have: usize },
    #[error("parameter name {0:?} clashes with a Urabe coefficient name")]
    NameClash(String),
    #[error("condition sets are not comparable: {0}")]
    MetadataMismatch(String),
    #[error("unknown variant {0:?}, expected one of a0..a5")]
    UnknownVariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Derivatives of `ξ/(1+h(ξ))` and `g e^F` with respect to `u`.
    CAlgorithm,
    /// Reduced recurrences with the `(1+h)^{2k+1}` and `e^{(1-k)F}` factors stripped.
    Reca,
    /// Reduced recurrences on numerators and denominators of rational `f`, `g`.
    Rca,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    A0,
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl Variant {
    pub const ALL: [Variant; 6] = [Variant::A0, Variant::A1, Variant::A2, Variant::A3, Variant::A4, Variant::A5];

    pub fn new(family: Family, truncated: bool) -> Self {
        match (family, truncated) {
            (Family::CAlgorithm, false) => Variant::A0,
            (Family::CAlgorithm, true) => Variant::A1,
            (Family::Reca, true) => Variant::A2,
            (Family::Reca, false) => Variant::A3,
            (Family::Rca, true) => Variant::A4,
            (Family::Rca, false) => Variant::A5,
        }
    }

    pub fn family(self) -> Family {
        match self {
            Variant::A0 | Variant::A1 => Family::CAlgorithm,
            Variant::A2 | Variant::A3 => Family::Reca,
            Variant::A4 | Variant::A5 => Family::Rca,
        }
    }

    pub fn truncated(self) -> bool {
        matches!(self, Variant::A1 | Variant::A2 | Variant::A4)
    }

    /// The variant with the same recurrences and the other truncation mode.
    pub fn counterpart(self) -> Variant {
        Variant::new(self.family(), !self.truncated())
    }

    pub fn id(self) -> &'static str {
        match self {
            Variant::A0 => "A0",
            Variant::A1 => "A1",
            Variant::A2 => "A2",
            Variant::A3 => "A3",
            Variant::A4 => "A4",
            Variant::A5 => "A5",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Variant {
    type Err = ConditionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConditionError::UnknownVariant(s.into()))
    }
}

/// One odd Taylor coefficient of the Urabe function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UrabeCoeff {
    Symbolic(String),
    Value(Rational),
}

/// An odd Urabe function `h(ξ) = c1 ξ + c3 ξ^3 + ...`, truncated after its
/// last listed coefficient. `h(0) = 0` and all even coefficients vanish by
/// construction.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UrabeSeries {
    coeffs: Vec<UrabeCoeff>,
}

impl UrabeSeries {
    /// Name of the coefficient of `ξ^(2i+1)`.
    pub fn name(i: usize) -> String {
        format!("c{}", 2 * i + 1)
    }

    pub fn zero() -> Self {
        UrabeSeries::default()
    }

    pub fn symbolic(count: usize) -> Self {
        UrabeSeries { coeffs: (0..count).map(|i| UrabeCoeff::Symbolic(Self::name(i))).collect() }
    }

    pub fn numeric(values: Vec<Rational>) -> Self {
        UrabeSeries { coeffs: values.into_iter().map(UrabeCoeff::Value).collect() }
    }

    /// Enough symbolic coefficients for conditions `0..=m`: condition `k`
    /// involves `h` up to `ξ^(k-1)`, so the last one needed is `c_{2⌊m/2⌋-1}`.
    pub fn for_conditions(m: usize) -> Self {
        Self::symbolic(m / 2)
    }

    /// Minimum coefficient count accepted for `m` conditions.
    pub fn min_count(m: usize) -> usize {
        m.saturating_sub(1) / 2
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[UrabeCoeff] {
        &self.coeffs
    }

    pub fn symbolic_names(&self) -> Vec<String> {
        self.coeffs
            .iter()
            .filter_map(|c| match c {
                UrabeCoeff::Symbolic(n) => Some(n.clone()),
                UrabeCoeff::Value(_) => None,
            })
            .collect()
    }

    /// Dense coefficient list of `h` (index = power of `ξ`) over `vars`.
    fn dense(&self, vars: &Arc<VarSet>) -> Result<Vec<ParamPoly>, AlgebraError> {
        let mut out = vec![ParamPoly::zero(vars); 2 * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[2 * i + 1] = match c {
                UrabeCoeff::Symbolic(n) => ParamPoly::var(vars, n)?,
                UrabeCoeff::Value(v) => ParamPoly::constant(vars, v.clone()),
            };
        }
        Ok(out)
    }

    /// `h` as a series in `ξ` at the given order; coefficients past the last
    /// listed one are zero.
    pub fn series(&self, vars: &Arc<VarSet>, order: usize) -> Result<XSeries, AlgebraError> {
        let mut dense = self.dense(vars)?;
        dense.truncate(order + 1);
        XSeries::from_coeffs(SeriesVar::Xi, vars, dense, order)
    }

    pub fn poly(&self, vars: &Arc<VarSet>) -> Result<UniPoly, AlgebraError> {
        Ok(UniPoly::new(SeriesVar::Xi, vars, self.dense(vars)?))
    }
}

/// How truncated variants cut their working series.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Keep step `k` up to order `M - k`, the least that still yields exact values.
    #[default]
    Minimal,
    /// Keep step `k` only up to order `M - k - s`. Loses information on
    /// purpose; exists to show that [`conditions_agree`] catches a wrong
    /// truncation.
    Shifted(usize),
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub keep_steps: bool,
    pub schedule: Schedule,
}

/// The condition polynomials `P_k(0) - Q_k(0)` for `k = 0..=M` and how they
/// were produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionSet {
    pub variant: Variant,
    pub order: usize,
    pub truncated: bool,
    pub system_hash: String,
    pub vars: Arc<VarSet>,
    pub urabe: Vec<String>,
    pub conditions: Vec<ParamPoly>,
}

impl ConditionSet {
    pub fn is_all_zero(&self) -> bool {
        self.conditions.iter().all(ParamPoly::is_zero)
    }

    pub fn to_record(&self) -> ConditionRecord {
        ConditionRecord {
            variant: self.variant.id().to_string(),
            order: self.order,
            truncated: self.truncated,
            system_hash: self.system_hash.clone(),
            variables: self.vars.names().to_vec(),
            conditions: self.conditions.iter().map(ToString::to_string).collect(),
        }
    }
}

/// JSON shape of a [`ConditionSet`]; polynomials use the canonical rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionRecord {
    pub variant: String,
    #[serde(rename = "M")]
    pub order: usize,
    pub truncated: bool,
    pub system_hash: String,
    pub variables: Vec<String>,
    pub conditions: Vec<String>,
}

/// Working values `P_k` and `Q_k` of one recurrence step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub p: XSeries,
    pub q: XSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionTrace {
    pub set: ConditionSet,
    pub steps: Option<Vec<Step>>,
}

trait Carrier: Clone {
    fn derivative(&self) -> Result<Self, AlgebraError>;
    fn times(&self, other: &Self) -> Result<Self, AlgebraError>;
    fn plus(&self, other: &Self) -> Result<Self, AlgebraError>;
    fn minus(&self, other: &Self) -> Result<Self, AlgebraError>;
    fn times_int(&self, k: i64) -> Self;
    fn at_zero(&self) -> ParamPoly;
    fn snapshot(&self) -> XSeries;
}

impl Carrier for XSeries {
    fn derivative(&self) -> Result<Self, AlgebraError> {
        XSeries::derivative(self)
    }
    fn times(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_mul(other)
    }
    fn plus(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_add(other)
    }
    fn minus(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_sub(other)
    }
    fn times_int(&self, k: i64) -> Self {
        self.scale_int(k)
    }
    fn at_zero(&self) -> ParamPoly {
        self.eval_at_zero()
    }
    fn snapshot(&self) -> XSeries {
        self.clone()
    }
}

type StepFn<'a, E> = Box<dyn Fn(&E, usize) -> Result<E, AlgebraError> + 'a>;

struct Recurrence<'a, E: Carrier> {
    p0: E,
    q0: E,
    p_step: StepFn<'a, E>,
    q_step: StepFn<'a, E>,
}

fn drive<E: Carrier>(
    rec: Recurrence<'_, E>,
    m: usize,
    cut: Option<&dyn Fn(E, usize) -> E>,
    keep_steps: bool,
) -> Result<(Vec<ParamPoly>, Option<Vec<Step>>), AlgebraError> {
    let Recurrence { p0, q0, p_step, q_step } = rec;
    let mut conditions = Vec::with_capacity(m + 1);
    let mut steps = keep_steps.then(Vec::new);
    let (mut p, mut q) = (p0, q0);
    for k in 0..=m {
        if k > 0 {
            p = p_step(&p, k)?;
            q = q_step(&q, k)?;
            if let Some(cut) = cut {
                p = cut(p, k);
                q = cut(q, k);
            }
        }
        conditions.push(&p.at_zero() - &q.at_zero());
        if let Some(steps) = steps.as_mut() {
            steps.push(Step { p: p.snapshot(), q: q.snapshot() });
        }
    }
    Ok((conditions, steps))
}

/// Variable set `[Urabe symbols..., system parameters...]` with the system
/// and `h` lifted into it.
fn prepare(sys: &LienardSystem, h: &UrabeSeries, m: usize) -> Result<(Arc<VarSet>, LienardSystem), ConditionError> {
    if m == 0 {
        return Err(ConditionError::NoConditions);
    }
    let needed = UrabeSeries::min_count(m);
    if h.len() < needed {
        return Err(ConditionError::InsufficientUrabe { order: m, needed, have: h.len() });
    }
    sys.ensure_valid()?;
    let urabe = h.symbolic_names();
    if let Some(clash) = sys.params().names().iter().find(|n| urabe.contains(n)) {
        return Err(ConditionError::NameClash(clash.clone()));
    }
    let vars = VarSet::new(urabe.into_iter().chain(sys.params().names().iter().cloned()))?;
    let lifted = sys.embed(&vars)?;
    Ok((vars, lifted))
}

fn p_hat_step<'a, E: Carrier + 'a>(one_plus_h: E, dh: E) -> StepFn<'a, E> {
    Box::new(move |prev: &E, k: usize| {
        let a = prev.derivative()?.times(&one_plus_h)?;
        let b = prev.times(&dh)?.times_int(2 * k as i64 - 1);
        a.minus(&b)
    })
}

fn divide_step<'a, E: Carrier + 'a>(factor: E) -> StepFn<'a, E> {
    Box::new(move |prev: &E, _k: usize| prev.derivative()?.times(&factor))
}

fn reca_q_step<'a, E: Carrier + 'a>(f: E) -> StepFn<'a, E> {
    Box::new(move |prev: &E, k: usize| {
        let d = prev.derivative()?;
        if k == 2 {
            return Ok(d);
        }
        d.minus(&f.times(prev)?.times_int(k as i64 - 2))
    })
}

/// `Q_k = Q_{k-1} (A_k - k B) + Q'_{k-1} C` with
/// `A_k = D_g ((1-k) D_f' + (2-k) N_f)`, `B = D_g' D_f`, `C = D_g D_f`.
fn rca_q_step<'a, E: Carrier + 'a>(dg_dfp: E, dg_nf: E, dgp_df: E, dg_df: E) -> StepFn<'a, E> {
    Box::new(move |prev: &E, k: usize| {
        let k = k as i64;
        let mult = dg_dfp.times_int(1 - k).plus(&dg_nf.times_int(2 - k))?.minus(&dgp_df.times_int(k))?;
        prev.times(&mult)?.plus(&prev.derivative()?.times(&dg_df)?)
    })
}

fn truncated_recurrence<'a>(
    family: Family,
    sys: &LienardSystem,
    h: &UrabeSeries,
    vars: &Arc<VarSet>,
    m: usize,
) -> Result<Recurrence<'a, XSeries>, ConditionError> {
    let xi = XSeries::identity(SeriesVar::Xi, vars, m);
    let h_ser = h.series(vars, m)?;
    let one_plus_h = XSeries::one(SeriesVar::Xi, vars, m).try_add(&h_ser)?;
    Ok(match family {
        Family::CAlgorithm => {
            let inv = one_plus_h.inverse_unit()?;
            let q0 = sys.g_series(m)?.mul_to(&sys.exp_f_series(1, m)?, m)?;
            Recurrence {
                p0: xi.mul_to(&inv, m)?,
                q0,
                p_step: divide_step(inv),
                q_step: divide_step(sys.exp_f_series(-1, m)?),
            }
        }
        Family::Reca => Recurrence {
            p0: xi,
            q0: sys.g_series(m)?,
            p_step: p_hat_step(one_plus_h, h_ser.derivative()?),
            q_step: reca_q_step(sys.f_series(m)?),
        },
        Family::Rca => {
            let (nf, df) = (sys.f().num().to_series(m), sys.f().den().to_series(m));
            let dg = sys.g().den().to_series(m);
            let dfp = sys.f().den().derivative().to_series(m);
            let dgp = sys.g().den().derivative().to_series(m);
            Recurrence {
                p0: xi,
                q0: sys.g().num().to_series(m),
                p_step: p_hat_step(one_plus_h, h_ser.derivative()?),
                q_step: rca_q_step(dg.try_mul(&dfp)?, dg.try_mul(&nf)?, dgp.try_mul(&df)?, dg.try_mul(&df)?),
            }
        }
    })
}

fn untruncated_recurrence<'a>(
    family: Family,
    sys: &LienardSystem,
    h: &UrabeSeries,
    vars: &Arc<VarSet>,
    m: usize,
) -> Result<Recurrence<'a, Exact>, ConditionError> {
    let xi = UniPoly::new(SeriesVar::Xi, vars, vec![ParamPoly::zero(vars), ParamPoly::one(vars)]);
    let h_poly = h.poly(vars)?;
    let one_plus_h = UniPoly::one(SeriesVar::Xi, vars).try_add(&h_poly)?;
    let (nf, df) = (sys.f().num(), sys.f().den());
    let (ng, dg) = (sys.g().num(), sys.g().den());
    let mut pf = Frame::new(SeriesVar::Xi, vars, m);
    let mut qf = Frame::new(SeriesVar::X, vars, m);
    Ok(match family {
        Family::CAlgorithm => {
            let h_base = pf.add_base(&one_plus_h);
            let (f_base, g_base) = (qf.add_base(df), qf.add_base(dg));
            qf.set_f(nf, f_base, sys.f_integral_series(m)?);
            let (pf, qf) = (Arc::new(pf), Arc::new(qf));
            let one = UniPoly::one(SeriesVar::X, vars);
            Recurrence {
                p0: Exact::new(&pf, xi, h_base, 0),
                q0: Exact::new(&qf, ng.clone(), g_base, 1),
                p_step: divide_step(Exact::new(&pf, UniPoly::one(SeriesVar::Xi, vars), h_base, 0)),
                q_step: divide_step(Exact::new(&qf, one, None, -1)),
            }
        }
        Family::Reca => {
            let (f_base, g_base) = (qf.add_base(df), qf.add_base(dg));
            let (pf, qf) = (Arc::new(pf), Arc::new(qf));
            Recurrence {
                p0: Exact::poly(&pf, xi),
                q0: Exact::new(&qf, ng.clone(), g_base, 0),
                p_step: p_hat_step(Exact::poly(&pf, one_plus_h), Exact::poly(&pf, h_poly.derivative())),
                q_step: reca_q_step(Exact::new(&qf, nf.clone(), f_base, 0)),
            }
        }
        Family::Rca => {
            let (pf, qf) = (Arc::new(pf), Arc::new(qf));
            let (dfp, dgp) = (df.derivative(), dg.derivative());
            let e = |p: UniPoly| Exact::poly(&qf, p);
            Recurrence {
                p0: Exact::poly(&pf, xi),
                q0: e(ng.clone()),
                p_step: p_hat_step(Exact::poly(&pf, one_plus_h), Exact::poly(&pf, h_poly.derivative())),
                q_step: rca_q_step(e(dg.try_mul(&dfp)?), e(dg.try_mul(nf)?), e(dgp.try_mul(df)?), e(dg.try_mul(df)?)),
            }
        }
    })
}

/// Runs one variant for conditions `0..=m`.
pub fn run_variant(
    sys: &LienardSystem,
    h: &UrabeSeries,
    m: usize,
    variant: Variant,
    options: &RunOptions,
) -> Result<ConditionTrace, ConditionError> {
    let (vars, lifted) = prepare(sys, h, m)?;
    let family = variant.family();
    let (conditions, steps) = if variant.truncated() {
        let rec = truncated_recurrence(family, &lifted, h, &vars, m)?;
        let shift = match options.schedule {
            Schedule::Minimal => 0,
            Schedule::Shifted(s) => s,
        };
        let cut = move |s: XSeries, k: usize| match (m - k).checked_sub(shift) {
            Some(keep) => s.zero_above(keep),
            None => XSeries::zero(s.var(), s.vars(), s.order()),
        };
        drive(rec, m, Some(&cut), options.keep_steps)?
    } else {
        let rec = untruncated_recurrence(family, &lifted, h, &vars, m)?;
        drive(rec, m, None, options.keep_steps)?
    };
    Ok(ConditionTrace {
        set: ConditionSet {
            variant,
            order: m,
            truncated: variant.truncated(),
            system_hash: sys.fingerprint(),
            urabe: h.symbolic_names(),
            vars,
            conditions,
        },
        steps,
    })
}

/// C-algorithm: variant A1 when `truncated`, A0 otherwise.
pub fn run_c_algorithm(
    sys: &LienardSystem,
    h: &UrabeSeries,
    m: usize,
    truncated: bool,
) -> Result<ConditionTrace, ConditionError> {
    run_variant(sys, h, m, Variant::new(Family::CAlgorithm, truncated), &RunOptions::default())
}

/// Reduced C-algorithm: A2 when `truncated`, A3 otherwise.
pub fn run_reca(
    sys: &LienardSystem,
    h: &UrabeSeries,
    m: usize,
    truncated: bool,
) -> Result<ConditionTrace, ConditionError> {
    run_variant(sys, h, m, Variant::new(Family::Reca, truncated), &RunOptions::default())
}

/// Rational C-algorithm: A4 when `truncated`, A5 otherwise.
pub fn run_rca(
    sys: &LienardSystem,
    h: &UrabeSeries,
    m: usize,
    truncated: bool,
) -> Result<ConditionTrace, ConditionError> {
    run_variant(sys, h, m, Variant::new(Family::Rca, truncated), &RunOptions::default())
}

/// First place where two condition sets differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub reference: Variant,
    pub variant: Variant,
    pub k: usize,
    /// `reference[k] - variant[k]`.
    pub difference: ParamPoly,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} and {} differ at k = {}: difference {}", self.reference, self.variant, self.k, self.difference)
    }
}

/// Checks that every set equals the first one term by term.
/// `Ok(None)` means full agreement.
pub fn conditions_agree(sets: &[&ConditionSet]) -> Result<Option<Divergence>, ConditionError> {
    let Some((first, rest)) = sets.split_first() else {
        return Ok(None);
    };
    for other in rest {
        let mismatch = if other.order != first.order {
            Some(format!("M = {} vs {}", first.order, other.order))
        } else if other.system_hash != first.system_hash {
            Some(format!("system {} vs {}", first.system_hash, other.system_hash))
        } else if other.vars != first.vars || other.urabe != first.urabe {
            Some("different variable lists".to_string())
        } else {
            None
        };
        if let Some(why) = mismatch {
            return Err(ConditionError::MetadataMismatch(why));
        }
    }
    for other in rest {
        if let Some(k) = (0..=first.order).find(|&k| first.conditions[k] != other.conditions[k]) {
            return Ok(Some(Divergence {
                reference: first.variant,
                variant: other.variant,
                k,
                difference: &first.conditions[k] - &other.conditions[k],
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(names: &[&str]) -> Arc<VarSet> {
        VarSet::new(names.iter().copied()).unwrap()
    }

    fn linear_center() -> LienardSystem {
        let v = VarSet::empty();
        LienardSystem::polynomial(&v, vec![], vec![ParamPoly::zero(&v), ParamPoly::one(&v)]).unwrap()
    }

    /// f = b02, g = x + b20 x^2.
    fn quadratic(with_f: bool) -> LienardSystem {
        let v = params(&["b20", "b02"]);
        let f = if with_f { vec![ParamPoly::var(&v, "b02").unwrap()] } else { vec![] };
        LienardSystem::polynomial(
            &v,
            f,
            vec![ParamPoly::zero(&v), ParamPoly::one(&v), ParamPoly::var(&v, "b20").unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn variant_metadata() {
        for v in Variant::ALL {
            assert_eq!(Variant::new(v.family(), v.truncated()), v);
            assert_eq!(v.counterpart().counterpart(), v);
            assert_eq!(v.id().to_lowercase().parse::<Variant>().unwrap(), v);
        }
        assert!("a9".parse::<Variant>().is_err());
        assert_eq!(Variant::A2.counterpart(), Variant::A3);
    }

    #[test]
    fn linear_center_all_zero_every_variant() {
        let sys = linear_center();
        for v in Variant::ALL {
            let t = run_variant(&sys, &UrabeSeries::zero(), 5, v, &RunOptions::default());
            // zero h has fewer coefficients than M = 5 needs
            assert!(matches!(t, Err(ConditionError::InsufficientUrabe { .. })));
            let h = UrabeSeries::numeric(vec![Rational::zero(); 2]);
            let t = run_variant(&sys, &h, 5, v, &RunOptions::default()).unwrap();
            assert_eq!(t.set.conditions.len(), 6);
            assert!(t.set.is_all_zero(), "{v}");
        }
    }

    #[test]
    fn second_condition_hand_value() {
        let sys = quadratic(true);
        let h = UrabeSeries::for_conditions(2);
        for v in Variant::ALL {
            let t = run_variant(&sys, &h, 2, v, &RunOptions::default()).unwrap();
            assert_eq!(t.set.conditions[1].to_string(), "0");
            assert_eq!(t.set.conditions[2].to_string(), "-3*c1 - 2*b20 - b02", "{v}");
        }
        let t = run_reca(&quadratic(false), &h, 2, true).unwrap();
        assert_eq!(t.set.conditions[2].to_string(), "-3*c1 - 2*b20");
    }

    #[test]
    fn first_step_of_reduced_recurrence() {
        let sys = quadratic(true);
        let opts = RunOptions { keep_steps: true, ..Default::default() };
        let t = run_variant(&sys, &UrabeSeries::for_conditions(4), 4, Variant::A3, &opts).unwrap();
        let steps = t.steps.unwrap();
        // P1 = 1 + h - ξ h' = 1 - 2 c3 ξ^3 for h = c1 ξ + c3 ξ^3.
        assert_eq!(steps[1].p.to_poly().to_string(), "(1) + (-2*c3)*xi^3");
        assert!(steps[1].q.eval_at_zero().is_one());
    }

    #[test]
    fn truncated_orders_shrink_by_one() {
        let sys = quadratic(true);
        let opts = RunOptions { keep_steps: true, ..Default::default() };
        for v in [Variant::A1, Variant::A2, Variant::A4] {
            let t = run_variant(&sys, &UrabeSeries::for_conditions(6), 6, v, &opts).unwrap();
            for (k, s) in t.steps.unwrap().iter().enumerate() {
                assert_eq!(s.p.order(), 6 - k, "{v} P_{k}");
                assert_eq!(s.q.order(), 6 - k, "{v} Q_{k}");
            }
        }
    }

    #[test]
    fn shifted_schedule_is_detected() {
        let sys = quadratic(true);
        let h = UrabeSeries::for_conditions(6);
        let good = run_reca(&sys, &h, 6, false).unwrap();
        let bad =
            run_variant(&sys, &h, 6, Variant::A2, &RunOptions { schedule: Schedule::Shifted(1), ..Default::default() })
                .unwrap();
        let div = conditions_agree(&[&good.set, &bad.set]).unwrap().expect("fault must be visible");
        assert_eq!(div.reference, Variant::A3);
        assert_eq!(div.variant, Variant::A2);
        assert!(!div.difference.is_zero());
    }

    #[test]
    fn agreement_metadata_checks() {
        let h = UrabeSeries::for_conditions(4);
        let a = run_rca(&quadratic(true), &h, 4, true).unwrap();
        let b = run_rca(&quadratic(false), &h, 4, true).unwrap();
        assert!(matches!(conditions_agree(&[&a.set, &b.set]), Err(ConditionError::MetadataMismatch(_))));
        let c = run_rca(&quadratic(true), &UrabeSeries::for_conditions(5), 5, true).unwrap();
        assert!(conditions_agree(&[&a.set, &c.set]).is_err());
        assert_eq!(conditions_agree(&[&a.set]).unwrap(), None);
    }

    #[test]
    fn invalid_inputs() {
        let v = VarSet::empty();
        let bad =
            LienardSystem::polynomial(&v, vec![], vec![ParamPoly::zero(&v), ParamPoly::zero(&v), ParamPoly::one(&v)])
                .unwrap();
        assert!(matches!(run_rca(&bad, &UrabeSeries::for_conditions(3), 3, true), Err(ConditionError::Lienard(_))));
        assert!(matches!(run_rca(&linear_center(), &UrabeSeries::zero(), 0, true), Err(ConditionError::NoConditions)));
        let v = params(&["c1"]);
        let clash = LienardSystem::polynomial(
            &v,
            vec![ParamPoly::var(&v, "c1").unwrap()],
            vec![ParamPoly::zero(&v), ParamPoly::one(&v)],
        )
        .unwrap();
        assert!(matches!(run_rca(&clash, &UrabeSeries::for_conditions(2), 2, true), Err(ConditionError::NameClash(_))));
    }

    #[test]
    fn record_shape() {
        let t = run_rca(&quadratic(false), &UrabeSeries::for_conditions(2), 2, true).unwrap();
        let r = t.set.to_record();
        assert_eq!(r.variant, "A4");
        assert_eq!(r.conditions, vec!["0", "0", "-3*c1 - 2*b20"]);
        assert_eq!(r.variables, vec!["c1", "b20", "b02"]);
    }
}

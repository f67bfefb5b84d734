//! Exact values `N / (B_1^{e_1} ⋯ B_r^{e_r}) · e^{cF}` for the untruncated
//! variants. The bases `B_i` are fixed polynomials with `B_i(0) = 1`, so the
//! value at zero is `N(0)`.

use std::sync::Arc;

use crate::algebra::{AlgebraError, ParamPoly, SeriesVar, UniPoly, VarSet, XSeries};

use super::Carrier;

pub(super) struct Frame {
    var: SeriesVar,
    vars: Arc<VarSet>,
    bases: Vec<UniPoly>,
    dbases: Vec<UniPoly>,
    /// `f = num / bases[den]`, needed to differentiate `e^{cF}`.
    f: Option<(UniPoly, Option<usize>)>,
    /// `F` as a series, only used to expand snapshots.
    f_integral: Option<XSeries>,
    order: usize,
}

impl Frame {
    pub(super) fn new(var: SeriesVar, vars: &Arc<VarSet>, order: usize) -> Self {
        Frame { var, vars: vars.clone(), bases: Vec::new(), dbases: Vec::new(), f: None, f_integral: None, order }
    }

    /// Registers a denominator; `None` for the constant 1.
    pub(super) fn add_base(&mut self, b: &UniPoly) -> Option<usize> {
        if b.degree() == Some(0) && b.coeff(0).is_one() {
            return None;
        }
        debug_assert!(b.eval_at_zero().is_one());
        self.bases.push(b.clone());
        self.dbases.push(b.derivative());
        Some(self.bases.len() - 1)
    }

    pub(super) fn set_f(&mut self, num: &UniPoly, den: Option<usize>, f_integral: XSeries) {
        self.f = Some((num.clone(), den));
        self.f_integral = Some(f_integral);
    }
}

#[derive(Clone)]
pub(super) struct Exact {
    frame: Arc<Frame>,
    num: UniPoly,
    exps: Vec<u32>,
    exp_f: i64,
}

impl Exact {
    pub(super) fn new(frame: &Arc<Frame>, num: UniPoly, den: Option<usize>, exp_f: i64) -> Self {
        let mut exps = vec![0; frame.bases.len()];
        if let Some(i) = den {
            exps[i] = 1;
        }
        Exact { frame: frame.clone(), num, exps, exp_f }
    }

    pub(super) fn poly(frame: &Arc<Frame>, num: UniPoly) -> Self {
        Self::new(frame, num, None, 0)
    }

    fn raise_to(&self, target: &[u32]) -> Result<UniPoly, AlgebraError> {
        let mut num = self.num.clone();
        for (i, (&have, &want)) in self.exps.iter().zip(target).enumerate() {
            for _ in have..want {
                num = num.try_mul(&self.frame.bases[i])?;
            }
        }
        Ok(num)
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self, AlgebraError> {
        assert_eq!(self.exp_f, other.exp_f, "exponential factors must match");
        let exps: Vec<u32> = self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect();
        let a = self.raise_to(&exps)?;
        let b = other.raise_to(&exps)?;
        let num = if negate { a.try_sub(&b)? } else { a.try_add(&b)? };
        Ok(Exact { frame: self.frame.clone(), num, exps, exp_f: self.exp_f })
    }
}

impl Carrier for Exact {
    fn derivative(&self) -> Result<Self, AlgebraError> {
        let frame = &self.frame;
        let active: Vec<usize> = (0..self.exps.len()).filter(|&i| self.exps[i] > 0).collect();
        // (N / ∏B^e)' = (N' ∏B - N Σ e_i B_i' ∏_{j≠i} B_j) / ∏B^{e+1}
        let mut num = self.num.derivative();
        for &i in &active {
            num = num.try_mul(&frame.bases[i])?;
        }
        for &i in &active {
            let mut term = self.num.try_mul(&frame.dbases[i])?.scale_int(self.exps[i] as i64);
            for &j in active.iter().filter(|&&j| j != i) {
                term = term.try_mul(&frame.bases[j])?;
            }
            num = num.try_sub(&term)?;
        }
        let mut exps = self.exps.clone();
        for &i in &active {
            exps[i] += 1;
        }
        let d = Exact { frame: frame.clone(), num, exps, exp_f: self.exp_f };
        if self.exp_f == 0 {
            return Ok(d);
        }
        // (e^{cF})' = c f e^{cF}
        let (f_num, f_den) = frame.f.as_ref().expect("frame with exponential factor knows f");
        let f = Exact::new(frame, f_num.clone(), *f_den, 0);
        d.plus(&self.times(&f)?.times_int(self.exp_f))
    }

    fn times(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(Exact {
            frame: self.frame.clone(),
            num: self.num.try_mul(&other.num)?,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
            exp_f: self.exp_f + other.exp_f,
        })
    }

    fn plus(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.combine(other, false)
    }

    fn minus(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.combine(other, true)
    }

    fn times_int(&self, k: i64) -> Self {
        Exact { num: self.num.scale_int(k), ..self.clone() }
    }

    fn at_zero(&self) -> ParamPoly {
        self.num.eval_at_zero()
    }

    fn snapshot(&self) -> XSeries {
        self.expand().unwrap_or_else(|_| XSeries::zero(self.frame.var, &self.frame.vars, self.frame.order))
    }
}

impl Exact {
    fn expand(&self) -> Result<XSeries, AlgebraError> {
        let frame = &self.frame;
        let n = frame.order;
        let mut s = self.num.to_series(n);
        for (i, &e) in self.exps.iter().enumerate() {
            let inv = frame.bases[i].to_series(n).inverse_unit()?;
            for _ in 0..e {
                s = s.mul_to(&inv, n)?;
            }
        }
        if self.exp_f != 0 {
            let big_f = frame.f_integral.as_ref().expect("frame with exponential factor knows F");
            s = s.mul_to(&big_f.truncate(n)?.scale_int(self.exp_f).exp_zero_const()?, n)?;
        }
        Ok(s)
    }
}

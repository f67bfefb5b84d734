//! Sparse multivariate polynomials over `Rational` in a declared, ordered set
//! of parameter variables.
//!
//! Terms are kept sorted in descending graded-lexicographic order, with the
//! variable declared first being the largest. That order is what the textual
//! rendering uses, so two equal polynomials always print identically.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{AlgebraError, Rational};

/// An ordered list of variable names shared by every polynomial of one computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, AlgebraError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_VARS {
            return Err(AlgebraError::TooManyVariables { max: MAX_VARS, found: names.len() });
        }
        for (i, n) in names.iter().enumerate() {
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(AlgebraError::InvalidVariable(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(AlgebraError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(VarSet { names }))
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(VarSet { names: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn same_vars(a: &Arc<VarSet>, b: &Arc<VarSet>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

/// Largest exponent of a single variable in a [`Monomial`].
pub const MAX_EXPONENT: u16 = 127;
/// Largest total degree of a [`Monomial`].
pub const MAX_DEGREE: u32 = 32767;

const GUARD: u64 = 0x8080_8080_8080_8080;
const GUARD_FIRST: u64 = 0x8000_8080_8080_8080;

/// Exponent vector ordered graded-lexicographically, the first variable
/// largest.
///
/// Stored as big-endian bytes `[degree (2 bytes), e_0, e_1, ...]` packed into
/// `u64` words, so comparing the words compares degree first and then the
/// exponents in variable order, and multiplying adds the words.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    words: [u64; WORDS],
    nvars: u16,
}

const WORDS: usize = 6;
/// Most variables a [`VarSet`] may hold.
pub const MAX_VARS: usize = WORDS * 8 - 2;

fn slot(var: usize) -> (usize, u32) {
    let byte = var + 2;
    (byte / 8, (7 - (byte % 8) as u32) * 8)
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Monomial { words: [0; WORDS], nvars: nvars as u16 }
    }

    pub fn from_exponents(exps: &[u16]) -> Result<Self, AlgebraError> {
        let mut m = Monomial::one(exps.len());
        let mut degree = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            if e > MAX_EXPONENT {
                return Err(AlgebraError::ExponentOverflow);
            }
            degree += e as u32;
            let (w, shift) = slot(i);
            m.words[w] |= (e as u64) << shift;
        }
        if degree > MAX_DEGREE {
            return Err(AlgebraError::ExponentOverflow);
        }
        m.words[0] |= (degree as u64) << 48;
        Ok(m)
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn degree(&self) -> u32 {
        (self.words[0] >> 48) as u32
    }

    pub fn exponent(&self, var: usize) -> u16 {
        let (w, shift) = slot(var);
        ((self.words[w] >> shift) & 0xff) as u16
    }

    pub fn exponents(&self) -> Vec<u16> {
        (0..self.nvars()).map(|i| self.exponent(i)).collect()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut words = self.words;
        let mut guard = 0;
        for (i, (w, o)) in words.iter_mut().zip(other.words).enumerate() {
            *w += o;
            guard |= *w & if i == 0 { GUARD_FIRST } else { GUARD };
        }
        let overflow = guard != 0;
        assert!(!overflow, "monomial exponent above {MAX_EXPONENT} or degree above {MAX_DEGREE}");
        Monomial { words, nvars: self.nvars }
    }

    fn with_exponent(&self, var: usize, e: u16) -> Monomial {
        let mut m = *self;
        let old = self.exponent(var) as u64;
        let (w, shift) = slot(var);
        m.words[w] = (m.words[w] & !(0xff << shift)) | ((e as u64) << shift);
        m.words[0] = m.words[0] - (old << 48) + ((e as u64) << 48);
        m
    }
}

#[derive(Default)]
struct Accumulator {
    map: FxHashMap<Monomial, Rational>,
}

impl Accumulator {
    fn add_terms(&mut self, terms: &[(Monomial, Rational)]) {
        for (m, c) in terms {
            *self.map.entry(*m).or_default() += c;
        }
    }

    fn add_product(&mut self, a: &ParamPoly, b: &ParamPoly) {
        self.map.reserve(a.len().max(b.len()));
        for (am, ac) in &a.terms {
            for (bm, bc) in &b.terms {
                let c = ac * bc;
                match self.map.entry(am.mul(bm)) {
                    Entry::Occupied(mut e) => *e.get_mut() += &c,
                    Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
    }

    fn finish(self, vars: &Arc<VarSet>) -> ParamPoly {
        let mut terms: Vec<(Monomial, Rational)> = self.map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        ParamPoly { vars: vars.clone(), terms }
    }
}

/// A polynomial in the parameter variables of a [`VarSet`].
#[derive(Clone)]
pub struct ParamPoly {
    vars: Arc<VarSet>,
    /// Strictly descending by monomial; no zero coefficients.
    terms: Vec<(Monomial, Rational)>,
}

impl PartialEq for ParamPoly {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for ParamPoly {}

impl ParamPoly {
    pub fn zero(vars: &Arc<VarSet>) -> Self {
        ParamPoly { vars: vars.clone(), terms: Vec::new() }
    }

    pub fn one(vars: &Arc<VarSet>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Arc<VarSet>, c: Rational) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(Monomial::one(vars.len()), c)] };
        ParamPoly { vars: vars.clone(), terms }
    }

    pub fn int(vars: &Arc<VarSet>, c: i64) -> Self {
        Self::constant(vars, Rational::from(c))
    }

    pub fn var(vars: &Arc<VarSet>, name: &str) -> Result<Self, AlgebraError> {
        let idx = vars.index_of(name).ok_or_else(|| AlgebraError::UnknownVariable(name.into()))?;
        Ok(Self::var_at(vars, idx))
    }

    pub(crate) fn var_at(vars: &Arc<VarSet>, idx: usize) -> Self {
        let m = Monomial::one(vars.len()).with_exponent(idx, 1);
        ParamPoly { vars: vars.clone(), terms: vec![(m, Rational::one())] }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms<I>(vars: &Arc<VarSet>, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            if m.nvars() != vars.len() {
                return Err(AlgebraError::ArityMismatch { expected: vars.len(), found: m.nvars() });
            }
            *map.entry(m).or_default() += &c;
        }
        let terms = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Ok(ParamPoly { vars: vars.clone(), terms })
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value of a parameter-free polynomial, `None` if any variable occurs.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.degree() == 0 => Some(c.clone()),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(var) > 0)
    }

    fn check_vars(&self, other: &Self) -> Result<(), AlgebraError> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(AlgebraError::VariableMismatch { left: self.vars.names.clone(), right: other.vars.names.clone() })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_vars(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_vars(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_vars(other)?;
        Ok(self.mul_terms(other))
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, c)| (*m, if negate { -c } else { c.clone() })));
        ParamPoly { vars: self.vars.clone(), terms: out }
    }

    fn mul_terms(&self, other: &Self) -> Self {
        let (a, b) = if self.terms.len() >= other.terms.len() {
            (&self.terms, &other.terms)
        } else {
            (&other.terms, &self.terms)
        };
        match b.len() {
            0 => ParamPoly::zero(&self.vars),
            1 => {
                let (m, c) = &b[0];
                let terms = a.iter().map(|(am, ac)| (am.mul(m), ac * c)).collect();
                ParamPoly { vars: self.vars.clone(), terms }
            }
            _ => {
                let mut acc = Accumulator::default();
                acc.add_product(self, other);
                acc.finish(&self.vars)
            }
        }
    }

    /// `Σ a_i b_i` with a single final sort instead of one merge per product.
    pub fn sum_of_products<'a, I>(vars: &Arc<VarSet>, pairs: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (&'a ParamPoly, &'a ParamPoly)>,
    {
        let mut acc = Accumulator::default();
        let mut single: Option<ParamPoly> = None;
        let mut count = 0;
        for (a, b) in pairs {
            a.check_vars(b)?;
            if !same_vars(vars, &a.vars) {
                return Err(AlgebraError::VariableMismatch { left: vars.names.clone(), right: a.vars.names.clone() });
            }
            if a.is_zero() || b.is_zero() {
                continue;
            }
            count += 1;
            if count == 1 && (a.len() == 1 || b.len() == 1) {
                single = Some(a.mul_terms(b));
                continue;
            }
            if let Some(p) = single.take() {
                acc.add_terms(&p.terms);
            }
            acc.add_product(a, b);
        }
        Ok(match single {
            Some(p) => p,
            None => acc.finish(vars),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return ParamPoly::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(m, x)| (*m, x * c)).collect();
        ParamPoly { vars: self.vars.clone(), terms }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        match k {
            0 => ParamPoly::zero(&self.vars),
            1 => self.clone(),
            _ => {
                let terms = self.terms.iter().map(|(m, x)| (*m, x.mul_int(k))).collect();
                ParamPoly { vars: self.vars.clone(), terms }
            }
        }
    }

    /// Exact substitution of rational values; unbound variables stay symbolic.
    pub fn substitute(&self, bindings: &BTreeMap<String, Rational>) -> Result<Self, AlgebraError> {
        let mut idx = Vec::with_capacity(bindings.len());
        for (name, value) in bindings {
            let i = self.vars.index_of(name).ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))?;
            idx.push((i, value));
        }
        if idx.is_empty() {
            return Ok(self.clone());
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m = *m;
            let mut c = c.clone();
            for &(i, v) in &idx {
                let e = m.exponent(i);
                if e > 0 {
                    c = &c * &v.pow(e as u32);
                    m = m.with_exponent(i, 0);
                }
            }
            (m, c)
        });
        ParamPoly::from_terms(&self.vars, terms.collect::<Vec<_>>())
    }

    /// Replaces variable `var` by the polynomial `value`.
    pub fn substitute_var(&self, var: usize, value: &ParamPoly) -> Result<Self, AlgebraError> {
        self.check_vars(value)?;
        let parts = self.split_by_var(var);
        // Horner in `value`.
        let mut acc = ParamPoly::zero(&self.vars);
        for part in parts.iter().rev() {
            acc = &(&acc * value) + part;
        }
        Ok(acc)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `var`:
    /// entry `e` is the coefficient of `var^e`, free of `var`.
    pub fn split_by_var(&self, var: usize) -> Vec<ParamPoly> {
        let deg = self.degree_in(var) as usize;
        let mut parts: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            // Lowering one fixed variable keeps relative order only within a fixed e.
            parts[e].push((m.with_exponent(var, 0), c.clone()));
        }
        parts.into_iter().map(|terms| ParamPoly { vars: self.vars.clone(), terms }).collect()
    }

    /// Re-expresses the polynomial over a different variable set by name.
    pub fn embed(&self, target: &Arc<VarSet>) -> Result<Self, AlgebraError> {
        if same_vars(&self.vars, target) {
            return Ok(ParamPoly { vars: target.clone(), terms: self.terms.clone() });
        }
        let map: Vec<Option<usize>> = self.vars.names.iter().map(|n| target.index_of(n)).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; target.len()];
            for (i, e) in m.exponents().into_iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| AlgebraError::UnknownVariable(self.vars.names[i].clone()))?;
                exps[j] = e;
            }
            terms.push((Monomial::from_exponents(&exps)?, c.clone()));
        }
        ParamPoly::from_terms(target, terms)
    }
}

impl<'a> Add<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &'a ParamPoly) -> ParamPoly {
        self.try_add(rhs).expect("polynomials over different variable sets")
    }
}

impl<'a> Sub<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &'a ParamPoly) -> ParamPoly {
        self.try_sub(rhs).expect("polynomials over different variable sets")
    }
}

impl<'a> Mul<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &'a ParamPoly) -> ParamPoly {
        self.try_mul(rhs).expect("polynomials over different variable sets")
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        let terms = self.terms.iter().map(|(m, c)| (*m, -c)).collect();
        ParamPoly { vars: self.vars.clone(), terms }
    }
}

impl fmt::Display for ParamPoly {
    /// Canonical rendering, e.g. `-3*c1 - 2*b20 + a11^2 - 1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mut first = true;
            if !abs.is_one() || m.degree() == 0 {
                write!(f, "{abs}")?;
                first = false;
            }
            for (v, e) in m.exponents().into_iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(&self.vars.names[v])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Arc<VarSet> {
        VarSet::new(["c1", "b20", "a11", "b02"]).unwrap()
    }

    fn v(vs: &Arc<VarSet>, n: &str) -> ParamPoly {
        ParamPoly::var(vs, n).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let vs = vars();
        let (a, b) = (v(&vs, "a11"), v(&vs, "b20"));
        let prod = &(&a + &b) * &(&a - &b);
        assert_eq!(prod, &(&a * &a) - &(&b * &b));
        assert_eq!(prod.to_string(), "-b20^2 + a11^2");
    }

    #[test]
    fn annihilator_and_identity() {
        let vs = vars();
        let p = &v(&vs, "a11") + &ParamPoly::int(&vs, 3);
        assert!((&p * &ParamPoly::zero(&vs)).is_zero());
        assert_eq!(&p * &ParamPoly::one(&vs), p);
    }

    #[test]
    fn product_matches_term_convolution() {
        let vs = vars();
        let p = &(&v(&vs, "a11") + &v(&vs, "b02")) + &ParamPoly::int(&vs, 2);
        let q = &(&v(&vs, "a11") - &ParamPoly::int(&vs, 1)) + &(&v(&vs, "c1") * &v(&vs, "b20"));
        let mut brute = Vec::new();
        for (m1, c1) in p.terms() {
            for (m2, c2) in q.terms() {
                brute.push((m1.mul(m2), c1 * c2));
            }
        }
        assert_eq!(&p * &q, ParamPoly::from_terms(&vs, brute).unwrap());
    }

    #[test]
    fn rendering_is_grlex_descending() {
        let vs = vars();
        let p = &(&(&v(&vs, "a11") - &v(&vs, "b02")) - &v(&vs, "c1").scale_int(3)) - &v(&vs, "b20").scale_int(2);
        assert_eq!(p.to_string(), "-3*c1 - 2*b20 + a11 - b02");
        let q = &v(&vs, "b20").scale(&Rational::new(-2, 3).unwrap())
            + &ParamPoly::constant(&vs, Rational::new(1, 2).unwrap());
        assert_eq!(q.to_string(), "-2/3*b20 + 1/2");
        assert_eq!(ParamPoly::int(&vs, -1).to_string(), "-1");
        let cube = &(&v(&vs, "a11") * &v(&vs, "a11")) * &v(&vs, "c1");
        assert_eq!(cube.to_string(), "c1*a11^2");
    }

    #[test]
    fn substitution_examples() {
        let vs = vars();
        let (a, b, c) = (v(&vs, "a11"), v(&vs, "b20"), v(&vs, "c1"));
        let p = &(&a * &a) - &b;
        let bind: BTreeMap<String, Rational> =
            [("a11".to_string(), Rational::from(2)), ("b20".to_string(), Rational::from(1))].into();
        assert_eq!(p.substitute(&bind).unwrap(), ParamPoly::int(&vs, 3));
        assert_eq!(p.substitute(&BTreeMap::new()).unwrap(), p);
        let r = &c + &b.scale(&Rational::new(1, 3).unwrap());
        let bind: BTreeMap<String, Rational> = [("b20".to_string(), Rational::new(-3, 2).unwrap())].into();
        assert_eq!(r.substitute(&bind).unwrap().to_string(), "c1 - 1/2");
        let bad: BTreeMap<String, Rational> = [("zz".to_string(), Rational::one())].into();
        assert!(matches!(p.substitute(&bad), Err(AlgebraError::UnknownVariable(_))));
    }

    #[test]
    fn substitute_var_by_polynomial() {
        let vs = vars();
        let (a, b, c) = (v(&vs, "a11"), v(&vs, "b20"), v(&vs, "c1"));
        let p = &(&c * &c) + &(&c * &a);
        let s = p.substitute_var(0, &(&b + &ParamPoly::int(&vs, 1))).unwrap();
        let bb = &b + &ParamPoly::int(&vs, 1);
        assert_eq!(s, &(&bb * &bb) + &(&bb * &a));
    }

    #[test]
    fn mismatched_variable_lists_are_structural_errors() {
        let a = ParamPoly::var(&vars(), "a11").unwrap();
        let other = VarSet::new(["a11"]).unwrap();
        let b = ParamPoly::var(&other, "a11").unwrap();
        assert!(matches!(a.try_add(&b), Err(AlgebraError::VariableMismatch { .. })));
        assert!(matches!(a.try_mul(&b), Err(AlgebraError::VariableMismatch { .. })));
        assert_eq!(b.embed(&vars()).unwrap(), a);
    }

    #[test]
    fn varset_rejects_bad_names() {
        assert!(VarSet::new(["a", "a"]).is_err());
        assert!(VarSet::new(["1a"]).is_err());
        assert!(VarSet::new(["a b"]).is_err());
    }
}

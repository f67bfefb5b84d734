//! Random small Liénard systems shared by the integration suites.

#![allow(dead_code)]

pub mod algebra;

use std::sync::Arc;

use isochron_core::conditions::{run_variant, ConditionSet, RunOptions, UrabeSeries, Variant};
use isochron_core::lienard::{LienardSystem, RationalFunctionX};
use isochron_core::{ParamPoly, Rational, SeriesVar, UniPoly, VarSet};
use proptest::prelude::*;

/// `value + slope * a`.
#[derive(Clone, Debug)]
pub struct Coeff {
    pub value: Rational,
    pub slope: Rational,
}

impl Coeff {
    pub fn fixed(v: i64) -> Self {
        Coeff { value: Rational::from(v), slope: Rational::zero() }
    }

    fn poly(&self, vars: &Arc<VarSet>) -> ParamPoly {
        let c = ParamPoly::constant(vars, self.value.clone());
        if self.slope.is_zero() {
            return c;
        }
        let a = ParamPoly::var(vars, "a").expect("symbolic systems declare a");
        c.try_add(&a.scale(&self.slope)).unwrap()
    }
}

/// Coefficient lists indexed by the power of `x`, normalized so that
/// `D_f(0) = D_g(0) = 1`, `N_g(0) = 0` and `N_g'(0) = 1`.
#[derive(Clone, Debug)]
pub struct RandomSystem {
    pub symbolic: bool,
    pub f_num: Vec<Coeff>,
    pub f_den: Vec<Coeff>,
    pub g_num: Vec<Coeff>,
    pub g_den: Vec<Coeff>,
}

/// Rationals `n/d` in `[-5, 5]` with `d ≤ 3`.
pub fn rational() -> impl Strategy<Value = Rational> {
    (1i64..=3).prop_flat_map(|d| (-5 * d..=5 * d).prop_map(move |n| Rational::new(n, d).unwrap()))
}

fn coeff(symbolic: bool) -> BoxedStrategy<Coeff> {
    let slope = if symbolic {
        prop_oneof![3 => Just(Rational::zero()), 1 => rational()].boxed()
    } else {
        Just(Rational::zero()).boxed()
    };
    (rational(), slope).prop_map(|(value, slope)| Coeff { value, slope }).boxed()
}

fn coeffs(symbolic: bool, len: std::ops::RangeInclusive<usize>) -> BoxedStrategy<Vec<Coeff>> {
    prop::collection::vec(coeff(symbolic), len).boxed()
}

/// Systems with numerators and denominators of degree at most 4; `symbolic`
/// lets some coefficients depend on a parameter `a`.
pub fn system(symbolic: bool) -> impl Strategy<Value = RandomSystem> {
    (coeffs(symbolic, 0..=5), coeffs(symbolic, 0..=4), coeffs(symbolic, 0..=3), coeffs(symbolic, 0..=4)).prop_map(
        move |(f_num, f_den_tail, g_num_tail, g_den_tail)| {
            let lead = |first: Vec<Coeff>, tail: Vec<Coeff>| first.into_iter().chain(tail).collect::<Vec<_>>();
            RandomSystem {
                symbolic,
                f_num,
                f_den: lead(vec![Coeff::fixed(1)], f_den_tail),
                g_num: lead(vec![Coeff::fixed(0), Coeff::fixed(1)], g_num_tail),
                g_den: lead(vec![Coeff::fixed(1)], g_den_tail),
            }
        },
    )
}

impl RandomSystem {
    pub fn vars(&self) -> Arc<VarSet> {
        if self.symbolic {
            VarSet::new(["a"]).unwrap()
        } else {
            VarSet::empty()
        }
    }

    fn uni(&self, vars: &Arc<VarSet>, cs: &[Coeff]) -> UniPoly {
        UniPoly::new(SeriesVar::X, vars, cs.iter().map(|c| c.poly(vars)).collect())
    }

    pub fn build(&self) -> LienardSystem {
        let vars = self.vars();
        let f = RationalFunctionX::new(self.uni(&vars, &self.f_num), self.uni(&vars, &self.f_den)).unwrap();
        let g = RationalFunctionX::new(self.uni(&vars, &self.g_num), self.uni(&vars, &self.g_den)).unwrap();
        LienardSystem::new(&vars, f, g).unwrap()
    }

    /// `g''(0) + f(0)` straight from the coefficient lists: with the
    /// normalization above, `[x^2] g = n_2 - d_1` and `f(0) = n_0`.
    pub fn second_condition_offset(&self) -> ParamPoly {
        let vars = self.vars();
        let at = |cs: &[Coeff], i: usize| cs.get(i).map_or_else(|| ParamPoly::zero(&vars), |c| c.poly(&vars));
        let g2 = at(&self.g_num, 2).try_sub(&at(&self.g_den, 1)).unwrap();
        g2.scale_int(2).try_add(&at(&self.f_num, 0)).unwrap()
    }
}

/// Conditions `0..=m` with enough symbolic Urabe coefficients for every index.
pub fn run(sys: &LienardSystem, m: usize, v: Variant) -> ConditionSet {
    run_variant(sys, &UrabeSeries::for_conditions(m), m, v, &RunOptions::default()).unwrap().set
}

/// Deterministic runner configuration without on-disk regression files.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}

//! Algebra property checks, each run for a given number of random cases.

use std::sync::Arc;

use isochron_core::algebra::Monomial;
use isochron_core::{ParamPoly, Rational, SeriesVar, VarSet, XSeries};
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRng, TestRunner};

use super::{config, rational};

fn vars() -> Arc<VarSet> {
    VarSet::new(["p", "q"]).unwrap()
}

fn poly(max_terms: usize) -> impl Strategy<Value = ParamPoly> {
    prop::collection::vec((rational(), 0u16..=2, 0u16..=2), 0..=max_terms).prop_map(|terms| {
        let terms = terms.into_iter().map(|(c, i, j)| (Monomial::from_exponents(&[i, j]).unwrap(), c));
        ParamPoly::from_terms(&vars(), terms).unwrap()
    })
}

/// A series of the given order; `zero_const` forces `a(0) = 0`.
fn series_at(order: usize, zero_const: bool) -> impl Strategy<Value = XSeries> {
    prop::collection::vec(poly(2), order + 1).prop_map(move |mut cs| {
        if zero_const {
            cs[0] = ParamPoly::zero(&vars());
        }
        XSeries::from_coeffs(SeriesVar::X, &vars(), cs, order).unwrap()
    })
}

fn series(zero_const: bool) -> impl Strategy<Value = XSeries> {
    (0usize..=5).prop_flat_map(move |n| series_at(n, zero_const))
}

fn same_order(zero_const: bool) -> impl Strategy<Value = (XSeries, XSeries, XSeries)> {
    (0usize..=5).prop_flat_map(move |n| (series_at(n, false), series_at(n, zero_const), series_at(n, zero_const)))
}

fn one_plus(a: &XSeries) -> XSeries {
    XSeries::one(SeriesVar::X, a.vars(), a.order()).try_add(a).unwrap()
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let cfg = config(cases);
    let mut runner = TestRunner::new_with_rng(cfg.clone(), TestRng::deterministic_rng(cfg.rng_algorithm));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn rational_normal_form(cases: u32) -> Result<(), String> {
    run(cases, (-1000i64..=1000, 1i64..=1000, 1i64..=50), |(n, d, k)| {
        let r = Rational::new(n, d).unwrap();
        prop_assert_eq!(&Rational::new(n * k, d * k).unwrap(), &r);
        prop_assert_eq!(&r.to_string().parse::<Rational>().unwrap(), &r);
        prop_assert_eq!(&(&r * &Rational::one()), &r);
        Ok(())
    })
}

pub fn truncation_homomorphism(cases: u32) -> Result<(), String> {
    let strategy = (series(false), series(false)).prop_flat_map(|(a, b)| {
        let top = a.order().min(b.order());
        (Just(a), Just(b), 0..=top)
    });
    run(cases, strategy, |(a, b, m)| {
        let full = a.try_mul(&b).unwrap().truncate(m).unwrap();
        let cut = a.truncate(m).unwrap().try_mul(&b.truncate(m).unwrap()).unwrap().truncate(m).unwrap();
        prop_assert_eq!(full, cut);
        Ok(())
    })
}

pub fn exp_inverse(cases: u32) -> Result<(), String> {
    run(cases, same_order(true), |(_, a, b)| {
        prop_assert_eq!(a.exp_zero_const().unwrap().inverse_unit().unwrap(), a.neg().exp_zero_const().unwrap());
        let u = one_plus(&a);
        prop_assert_eq!(u.try_mul(&u.inverse_unit().unwrap()).unwrap(), XSeries::one(SeriesVar::X, &vars(), a.order()));
        let sum = a.try_add(&b).unwrap().exp_zero_const().unwrap();
        let product = a.exp_zero_const().unwrap().try_mul(&b.exp_zero_const().unwrap()).unwrap();
        prop_assert_eq!(sum, product);
        Ok(())
    })
}

pub fn sqrt_squares_back(cases: u32) -> Result<(), String> {
    run(cases, series(true), |a| {
        let u = one_plus(&a);
        let r = u.sqrt_unit().unwrap();
        prop_assert_eq!(r.try_mul(&r).unwrap(), u);
        Ok(())
    })
}

pub fn compose_consistency(cases: u32) -> Result<(), String> {
    run(cases, same_order(true), |(a, b, c)| {
        let left = a.compose(&b.compose(&c).unwrap()).unwrap();
        let right = a.compose(&b).unwrap().compose(&c).unwrap();
        prop_assert_eq!(left, right);
        let id = XSeries::identity(SeriesVar::X, &vars(), a.order());
        prop_assert_eq!(&a.compose(&id).unwrap(), &a);
        if b.order() >= 1 {
            prop_assert_eq!(&id.compose(&b).unwrap(), &b);
        }
        Ok(())
    })
}

pub fn polynomial_ring_axioms(cases: u32) -> Result<(), String> {
    run(cases, (poly(4), poly(4), poly(4)), |(a, b, c)| {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&(&a + &b) - &b) == a);
        prop_assert_eq!(&a * &ParamPoly::one(&vars()), a.clone());
        let fused = ParamPoly::sum_of_products(&vars(), [(&a, &b), (&b, &c)]).unwrap();
        prop_assert_eq!(fused, &(&a * &b) + &(&b * &c));
        Ok(())
    })
}

pub fn series_ring_axioms(cases: u32) -> Result<(), String> {
    run(cases, same_order(false), |(a, b, c)| {
        let ab_c = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let a_bc = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let dist = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
        let split = a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(dist, split);
        prop_assert_eq!(&a.integrate().derivative().unwrap(), &a);
        Ok(())
    })
}

pub fn fused_products(cases: u32) -> Result<(), String> {
    run(cases, prop::collection::vec((poly(3), poly(3)), 0..=4), |pairs| {
        let vars = vars();
        let fused = ParamPoly::sum_of_products(&vars, pairs.iter().map(|(x, y)| (x, y))).unwrap();
        let slow = pairs.iter().fold(ParamPoly::zero(&vars), |acc, (x, y)| &acc + &(x * y));
        prop_assert_eq!(fused, slow);
        Ok(())
    })
}

pub type Property = (&'static str, fn(u32) -> Result<(), String>);

pub const PROPERTIES: [Property; 8] = [
    ("rational normal form", rational_normal_form),
    ("truncation homomorphism", truncation_homomorphism),
    ("exp/inverse consistency", exp_inverse),
    ("sqrt consistency", sqrt_squares_back),
    ("compose consistency", compose_consistency),
    ("polynomial ring axioms", polynomial_ring_axioms),
    ("series ring axioms", series_ring_axioms),
    ("fused products", fused_products),
];

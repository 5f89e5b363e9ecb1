//! Strategies and property bodies shared by the property suite and the
//! acceptance runner.
#![allow(dead_code)]

use gnes_core::bessel_expr::{
    apply_euler, apply_l, apply_p, reduce_k_index, BesselExpr, DoubleBessel, SingleBessel, YLaurent,
};
use gnes_core::numeric_verify::{eval_f64, k0_k1, wronskian_half};
use gnes_core::particular_solver::{default_window, solve_particular_double, BasisElement, LinearSystem, SolveOptions};
use gnes_core::scalar_ring::{log_normalize, Constant, RatPi, Rational, Symbol, SymbolMonomial};
use gnes_core::source_terms::{Normalization, Params};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Outcome = Result<(), TestCaseError>;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        Just(Symbol::EulerGamma),
        Just(Symbol::LnPi),
        Just(Symbol::LnPrime(2)),
        Just(Symbol::LnPrime(3)),
        Just(Symbol::Zeta(3)),
        Just(Symbol::Zeta(5)),
        Just(Symbol::ZetaPrime(2)),
    ]
}

pub fn monomial() -> impl Strategy<Value = SymbolMonomial> {
    (-3i32..=3, prop::collection::vec((symbol(), 1i32..=2), 0..=2)).prop_map(|(k, syms)| {
        let mut pairs = vec![(Symbol::Pi, k)];
        pairs.extend(syms);
        // repeated symbols add their exponents
        let mut merged: Vec<(Symbol, i32)> = Vec::new();
        for (s, e) in pairs {
            match merged.iter_mut().find(|(t, _)| *t == s) {
                Some((_, f)) => *f += e,
                None => merged.push((s, e)),
            }
        }
        SymbolMonomial::from_pairs(merged.into_iter().filter(|(_, e)| *e != 0)).expect("valid monomial")
    })
}

pub fn constant() -> impl Strategy<Value = Constant> {
    prop::collection::vec((rational(), monomial()), 0..=3).prop_map(|ts| {
        let mut c = Constant::zero();
        for (r, m) in ts {
            c.add_term(m, r);
        }
        c
    })
}

/// Constants without logarithm symbols, for log-free tables.
pub fn pi_constant() -> impl Strategy<Value = Constant> {
    prop::collection::vec((rational(), -3i32..=3), 1..=2)
        .prop_map(|ts| ts.into_iter().fold(Constant::zero(), |acc, (r, k)| acc + Constant::pi_term(r, k)))
}

pub fn laurent(lo: i32, hi: i32, max_log: u32) -> impl Strategy<Value = YLaurent> {
    prop::collection::vec((lo..=hi, 0..=max_log, pi_constant()), 0..=4).prop_map(|ts| {
        let mut p = YLaurent::zero();
        for (k, l, c) in ts {
            p.add_term(k, l, c);
        }
        p
    })
}

pub fn nonzero(lo: i64, hi: i64) -> impl Strategy<Value = i64> {
    (lo..=hi).prop_filter("nonzero", |n| *n != 0)
}

pub fn double_expr() -> impl Strategy<Value = BesselExpr> {
    (nonzero(-4, 4), nonzero(-4, 4), prop::collection::vec(laurent(-4, 4, 1), 4)).prop_map(|(n1, n2, qs)| {
        let mut d = DoubleBessel::zero(n1, n2);
        for (k, q) in qs.into_iter().enumerate() {
            d.q[k / 2][k % 2] = q;
        }
        BesselExpr::Double(d.fold())
    })
}

pub fn single_expr(n: i64) -> impl Strategy<Value = BesselExpr> {
    prop::collection::vec(laurent(-4, 4, 1), 2).prop_map(move |ps| {
        let mut s = SingleBessel::zero(n);
        s.p = [ps[0].clone(), ps[1].clone()];
        BesselExpr::Single(s)
    })
}

/// Two single-Bessel expressions at one frequency.
pub fn single_pair() -> impl Strategy<Value = (BesselExpr, BesselExpr)> {
    nonzero(-5, 5).prop_flat_map(|n| (single_expr(n), single_expr(n)))
}

/// The four index pairs with printed degree windows, and their admissible r.
pub fn tabulated_case() -> impl Strategy<Value = (u32, u32, u32)> {
    prop_oneof![Just((3u32, 3u32)), Just((3, 5)), Just((5, 5)), Just((3, 7))]
        .prop_flat_map(|(a2, b2)| {
            let parity = (a2 + b2) / 2 % 2;
            let lo = if a2 == b2 { 1 } else { 2 };
            (Just(a2), Just(b2), (lo..=7u32).prop_filter("parity", move |r| r % 2 == parity))
        })
}

pub fn generic_mode() -> impl Strategy<Value = (i64, i64)> {
    (nonzero(-4, 4), nonzero(-4, 4)).prop_filter("n1 + n2 != 0", |(a, b)| a + b != 0)
}

/// K_nu(x) from the integral of exp(-x cosh t) cosh(nu t) over t >= 0,
/// by the trapezoid rule, which converges geometrically for this integrand.
pub fn bessel_k_quadrature(nu: f64, x: f64) -> f64 {
    let h = 0.02;
    let mut sum = 0.5 * (-x).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let v = (-x * t.cosh() + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
        sum += v;
        if v < 1e-19 * sum && x * t.cosh() > nu * t + 50.0 {
            break;
        }
        k += 1;
    }
    sum * h
}

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

pub fn ring_axioms(a: &Constant, b: &Constant, c: &Constant) -> Outcome {
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + &Constant::zero(), a.clone());
    prop_assert_eq!(a * &Constant::one(), a.clone());
    prop_assert!((a - a).is_zero());
    Ok(())
}

pub fn numeric_faithfulness(a: &Constant, b: &Constant) -> Outcome {
    let (x, y) = (eval_f64(a), eval_f64(b));
    prop_assert!(close(eval_f64(&(a + b)), x + y, x.abs() + y.abs(), 1e-12));
    prop_assert!(close(eval_f64(&(a * b)), x * y, (x * y).abs(), 1e-12), "{} * {}", a, b);
    Ok(())
}

pub fn log_additive(a: u64, b: u64) -> Outcome {
    let l = |n: u64| log_normalize(&Rational::from_integer(BigInt::from(n))).expect("positive");
    prop_assert_eq!(l(a * b), &l(a) + &l(b));
    Ok(())
}

pub fn ratpi_field(num: &[Rational], k: i32) -> Outcome {
    let mut a = RatPi::zero();
    for (i, r) in num.iter().enumerate() {
        a = a.add(&RatPi::pi_monomial(r.clone(), i as i32 + k));
    }
    if a.is_zero() {
        return Ok(());
    }
    prop_assert_eq!(a.mul(&a.inv()), RatPi::one());
    prop_assert_eq!(a.div(&a), RatPi::one());
    Ok(())
}

/// K_m(2 pi |n| y) = c0(y) K_0 + c1(y) K_1 against the quadrature oracle.
pub fn bessel_reduction(m: u32, n: i64, y: f64) -> Outcome {
    let [c0, c1] = reduce_k_index(m).in_y(n);
    let z = 2.0 * std::f64::consts::PI * n.abs() as f64 * y;
    let (k0, k1) = k0_k1(z);
    let lhs = bessel_k_quadrature(m as f64, z);
    let rhs = c0.eval(y, &eval_f64) * k0 + c1.eval(y, &eval_f64) * k1;
    prop_assert!(close(lhs, rhs, lhs.abs(), 1e-13), "K_{}({}) = {} vs {}", m, z, lhs, rhs);
    Ok(())
}

pub fn wronskian(r: u32, x: f64) -> Outcome {
    let w = wronskian_half(r, x);
    prop_assert!((w + 1.0).abs() <= 1e-11, "r={} x={} x*W={}", r, x, w);
    Ok(())
}

pub fn p_linear(lambda: i64, x: &BesselExpr, y: &BesselExpr, a: &Constant, b: &Constant) -> Outcome {
    let BesselExpr::Double(d) = x else { return Ok(()) };
    let BesselExpr::Double(e) = y else { return Ok(()) };
    // both operands at the frequencies of x
    let mut e2 = DoubleBessel::zero(d.n1, d.n2);
    e2.q = e.q.clone();
    let y = BesselExpr::Double(e2.fold());
    let s = (d.n1 * d.n2).signum();
    let lhs = apply_p(lambda, s, &x.scale(a).add(&y.scale(b)).unwrap()).unwrap();
    let rhs = apply_p(lambda, s, x).unwrap().scale(a).add(&apply_p(lambda, s, &y).unwrap().scale(b)).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn l_linear(lambda: i64, x: &BesselExpr, y: &BesselExpr, a: &Constant, b: &Constant) -> Outcome {
    let lhs = apply_l(lambda, &x.scale(a).add(&y.scale(b)).unwrap()).unwrap();
    let rhs = apply_l(lambda, x).unwrap().scale(a).add(&apply_l(lambda, y).unwrap().scale(b)).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn euler_linear(lambda: i64, f: &YLaurent, g: &YLaurent, a: &Constant, b: &Constant) -> Outcome {
    let (x, y) = (BesselExpr::pure(f.clone()), BesselExpr::pure(g.clone()));
    let lhs = apply_euler(lambda, &x.scale(a).add(&y.scale(b)).unwrap()).unwrap();
    let rhs = apply_euler(lambda, &x).unwrap().scale(a).add(&apply_euler(lambda, &y).unwrap().scale(b)).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

fn window_of(e: &BesselExpr) -> Option<(i32, i32)> {
    let cs = e.components();
    let lo = cs.iter().filter_map(|p| p.min_exp()).min()?;
    let hi = cs.iter().filter_map(|p| p.max_exp()).max()?;
    Some((lo, hi))
}

/// Output degrees of P lie in [m, M+2], those of L in [m, M+1].
pub fn degree_contract(lambda: i64, x: &BesselExpr) -> Outcome {
    let (img, rise) = match x {
        BesselExpr::Double(d) => (apply_p(lambda, (d.n1 * d.n2).signum(), x).unwrap(), 2),
        BesselExpr::Single(_) => (apply_l(lambda, x).unwrap(), 1),
        BesselExpr::Pure { .. } => (apply_euler(lambda, x).unwrap(), 0),
    };
    if let (Some((m, big_m)), Some((lo, hi))) = (window_of(x), window_of(&img)) {
        prop_assert!(lo >= m && hi <= big_m + rise, "[{}, {}] -> [{}, {}]", m, big_m, lo, hi);
    }
    Ok(())
}

/// Every matrix entry links an unknown of degree d to a row of degree d..d+2
/// (d..d+1 for single modes).
pub fn band_profile(a2: u32, b2: u32, r: u32, n1: i64, n2: i64) -> Outcome {
    let lambda = r as i64 * (r as i64 + 1);
    let sys = LinearSystem::for_mode(lambda, n1, n2, &default_window(a2, b2, r as i32)).unwrap();
    let top = if n1 == 0 || n2 == 0 { 1 } else { 2 };
    for (ri, row) in sys.entries.iter().enumerate() {
        for ci in row.keys() {
            let shift = sys.rows[ri].degree - sys.unknowns[*ci].degree;
            prop_assert!((0..=top).contains(&shift), "row {} col {}", sys.rows[ri], sys.unknowns[*ci]);
        }
    }
    prop_assert!(sys.bandwidth <= top);
    Ok(())
}

/// Generic solutions of the tabulated pairs live inside the published windows
/// without widening and with a trivial kernel.
pub fn window_conformance(a2: u32, b2: u32, r: u32, n1: i64, n2: i64) -> Outcome {
    let p = Params::new(a2, b2, r, Normalization::PaperC).unwrap();
    let s = solve_particular_double(&p, n1, n2, &SolveOptions::default()).unwrap();
    prop_assert_eq!((s.retries, s.kernel_dim), (0, 0));
    let w = default_window(a2, b2, r as i32);
    let BesselExpr::Double(d) = &s.solution else { return Err(TestCaseError::fail("not a double expression")) };
    for i in 0..2 {
        for j in 0..2 {
            let win = w.get(BasisElement::KK(i as u8, j as u8)).unwrap();
            for (e, _, _) in d.q[i][j].terms() {
                prop_assert!(win.contains(e), "q{}{} has y^{} outside [{}, {}]", i, j, e, win.m, win.big_m);
            }
        }
    }
    Ok(())
}

use proptest::prelude::*;

use super::*;
use crate::expr::parse;
use crate::number::{q, BigC};

fn vs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn qis(xs: &[(i64, i64)]) -> Vec<QI> {
    xs.iter().map(|&(a, b)| QI::frac(a, b)).collect()
}

fn factorial(n: u8) -> i64 {
    (1..=n as i64).product()
}

/// Taylor coefficients by repeated symbolic differentiation.
fn oracle_coeff(e: &Expr, vars: &[String], base: &[QI], exps: &[u8]) -> QI {
    let mut d = e.clone();
    let mut fact = 1i64;
    for (v, &k) in exps.iter().enumerate() {
        for _ in 0..k {
            d = d.diff(&vars[v]);
        }
        fact *= factorial(k);
    }
    d.eval_exact(vars, base).unwrap() * QI::frac(1, fact)
}

fn all_exps(n: usize, order: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for d in 0..=order {
        monos_of_degree(n, d, &mut out);
    }
    out
}

fn check_against_oracle(text: &str, names: &[&str], base: &[QI], order: usize) {
    let vars = vs(names);
    let e = parse(text, &vars).unwrap();
    let j = Jet::lift(&e, &vars, base, order).unwrap();
    assert_eq!(j.order(), order);
    for ex in all_exps(names.len(), order) {
        assert_eq!(j.coeff(&ex), oracle_coeff(&e, &vars, base, &ex), "{text} at {ex:?}");
    }
}

#[test]
fn lift_matches_derivatives() {
    let b = qis(&[(1, 2), (1, 1)]);
    check_against_oracle("1/(1-x*(1+y))^2", &["x", "y"], &qis(&[(1, 3), (1, 1)]), 5);
    check_against_oracle("(x^2-3*x*y+y^3)/(2+x+y)", &["x", "y"], &b, 6);
    check_against_oracle("exp(x-1/2)*y", &["x", "y"], &b, 5);
    check_against_oracle("log(2*x)+sqrt(y*4)", &["x", "y"], &b, 5);
    check_against_oracle("(1+x+y)^(-1/2)", &["x", "y"], &qis(&[(1, 1), (2, 1)]), 4);
}

#[test]
fn inexact_constants_are_reported() {
    let vars = vs(&["x"]);
    let e = parse("exp(x)", &vars).unwrap();
    assert_eq!(Jet::<QI>::lift(&e, &vars, &qis(&[(1, 1)]), 3).unwrap_err(), JetError::NotExact);
    let j = crate::number::with_precision(128, || Jet::<BigC>::lift(&e, &vars, &[BigC::one()], 3).unwrap());
    let c = j.coeff(&[3]).to_c64().re;
    assert!((c - std::f64::consts::E / 6.0).abs() < 1e-14);
    let e = parse("1/x", &vars).unwrap();
    assert_eq!(Jet::<QI>::lift(&e, &vars, &qis(&[(0, 1)]), 3).unwrap_err(), JetError::Singular);
}

#[test]
fn valuation_extends_order() {
    let base = qis(&[(0, 1), (0, 1)]);
    let x = Jet::<QI>::var(base.clone(), 4, 0);
    let y = Jet::<QI>::var(base, 6, 1);
    let p = x.powi(3).mul(&y.powi(2));
    assert_eq!(p.valuation(), 5);
    assert_eq!(p.coeff(&[3, 2]), QI::one());
    // errors: x^3 ~ t^7, y^2 ~ t^8, so the product is good through t^8
    assert_eq!(p.order(), 8);
}

#[test]
fn implicit_solve_and_weierstrass() {
    // 1 - z*x^2*(1+2y) vanishes at (1/2, 1, 4/3); solve for z.
    let vars = vs(&["x", "y", "z"]);
    let e = parse("1-z*x^2*(1+2*y)", &vars).unwrap();
    let base = qis(&[(1, 2), (1, 1), (4, 3)]);
    let order = 7;
    let h = Jet::lift(&e, &vars, &base, order).unwrap();
    let y0 = h.implicit_solve().unwrap();
    let closed = parse("1/(x^2*(1+2*y))", &vars[..2]).unwrap();
    let cj = Jet::lift(&closed, &vars[..2], &base[..2], order).unwrap();
    assert!(y0.sub(&cj).is_zero());

    let (u, root) = h.weierstrass_divide().unwrap();
    assert_eq!(u.order(), order - 1);
    let w0 = Jet::var(base.clone(), order, 0);
    let w1 = Jet::var(base.clone(), order, 1);
    let zvar = Jet::var(base.clone(), order, 2);
    let r3 = root.compose(&[w0, w1]);
    let prod = u.mul(&zvar.sub(&r3));
    assert!(prod.sub(&h).truncate(order - 1).is_zero());
}

#[test]
fn compose_matches_direct_lift() {
    let vars = vs(&["x", "y"]);
    let base = qis(&[(1, 3), (1, 2)]);
    let f = parse("1/(1-u-v^2)", &vs(&["u", "v"])).unwrap();
    let g1 = parse("x*y", &vars).unwrap();
    let g2 = parse("x+y^2-1/4", &vars).unwrap();
    let ub = g1.eval_exact(&vars, &base).unwrap();
    let vb = g2.eval_exact(&vars, &base).unwrap();
    let fj = Jet::lift(&f, &vs(&["u", "v"]), &[ub, vb], 6).unwrap();
    let composed = fj.compose(&[Jet::lift(&g1, &vars, &base, 6).unwrap(), Jet::lift(&g2, &vars, &base, 6).unwrap()]);
    let mut m = std::collections::HashMap::new();
    m.insert("u".to_string(), g1);
    m.insert("v".to_string(), g2);
    let direct = Jet::lift(&f.substitute(&m), &vars, &base, 6).unwrap();
    assert!(composed.sub(&direct).is_zero());
}

#[test]
fn permute_and_split_roundtrip() {
    let vars = vs(&["x", "y", "z"]);
    let e = parse("(1+x+2*y)^3*(3-z)", &vars).unwrap();
    let base = qis(&[(0, 1), (1, 1), (2, 1)]);
    let j = Jet::lift(&e, &vars, &base, 5).unwrap();
    let back = Jet::join_last(&j.split_last(), base[2].clone(), 5);
    assert!(back.sub(&j).is_zero());
    let p = j.permute(&[2, 0, 1]);
    assert_eq!(p.coeff(&[1, 0, 2]), j.coeff(&[0, 2, 1]));
    assert_eq!(p.base()[0], base[2]);
}

fn small_poly() -> impl Strategy<Value = Vec<(u8, u8, i64)>> {
    prop::collection::vec((0u8..4, 0u8..4, -5i64..6), 1..6)
}

fn poly_jet(terms: &[(u8, u8, i64)], c0: i64, order: usize) -> Jet<QI> {
    let mut j = Jet::constant(qis(&[(0, 1), (0, 1)]), order, QI::int(c0));
    for &(a, b, c) in terms {
        if (a + b) as usize <= order && a + b > 0 {
            let cur = j.coeff(&[a, b]);
            j.set(&[a, b], cur + QI::int(c));
        }
    }
    j
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reciprocal_inverts(t in small_poly(), c0 in 1i64..5) {
        let a = poly_jet(&t, c0, 6);
        let one = a.mul(&a.recip().unwrap());
        prop_assert!(one.add_constant(&-QI::one()).is_zero());
    }

    #[test]
    fn exp_log_inverse(t in small_poly()) {
        let a = poly_jet(&t, 0, 5);
        let e = a.exp().unwrap();
        let back = e.ln().unwrap();
        prop_assert!(back.sub(&a).is_zero());
    }

    #[test]
    fn rational_power_laws(t in small_poly(), p in -3i64..4, r in 1i64..4) {
        let a = poly_jet(&t, 1, 5);
        let x = a.pow_rational(&q(p, r)).unwrap();
        let lhs = x.powi(r as u64);
        let rhs = if p >= 0 { a.powi(p as u64) } else { a.powi((-p) as u64).recip().unwrap() };
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn product_rule(t1 in small_poly(), t2 in small_poly()) {
        let a = poly_jet(&t1, 2, 6);
        let b = poly_jet(&t2, -1, 6);
        let lhs = a.mul(&b).diff(0);
        let rhs = a.diff(0).mul(&b).add(&a.mul(&b.diff(0)));
        prop_assert!(lhs.sub(&rhs).truncate(5).is_zero());
    }
}

use std::collections::HashMap;

use proptest::prelude::*;

use super::*;
use crate::number::{q, BigC, Number};

fn vs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn p(text: &str, names: &[&str]) -> Expr {
    parse(text, &vs(names)).unwrap()
}

fn at(pairs: &[(&str, QI)]) -> HashMap<String, Number> {
    pairs.iter().map(|(k, v)| (k.to_string(), Number::Exact(v.clone()))).collect()
}

#[test]
fn parse_factor_of_first_example() {
    let e = p("1-x*(1+y)", &["x", "y"]);
    let one_plus_y = Expr::one().add(&Expr::var("y"));
    let expected = Expr::sum(vec![Expr::one(), Expr::var("x").mul(&one_plus_y).neg()]);
    assert_eq!(e, expected);
    assert!(matches!(e.node(), Node::Sum(ts) if ts.len() == 2));
}

#[test]
fn parse_zero_and_rational_function() {
    assert_eq!(p("0", &[]), Expr::zero());
    let e = p("16/((4-2*x-y-z)^2*(4-x-2*y-z))", &["x", "y", "z"]);
    let v = eval(&e, &at(&[("x", QI::int(0)), ("y", QI::int(0)), ("z", QI::int(0))])).unwrap();
    assert_eq!(v, Number::Exact(QI::frac(1, 4)));
}

#[test]
fn parse_errors() {
    let names = vs(&["x"]);
    assert!(matches!(parse("2x", &names), Err(ParseError::Syntax { pos: 1, .. })));
    assert!(matches!(parse("x*w", &names), Err(ParseError::UnknownIdentifier { pos: 2, .. })));
    assert!(matches!(parse("(x+1", &names), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse("x^y", &names), Err(ParseError::Syntax { .. })));
    assert!(parse("", &names).is_err());
}

#[test]
fn exponents_and_constants() {
    let e = p("x^-1/2", &["x"]);
    assert_eq!(e, Expr::pow(Expr::var("x"), q(-1, 2)));
    let e = p("x^2/y", &["x", "y"]);
    assert_eq!(e, Expr::var("x").powi(2).div(&Expr::var("y")));
    assert_eq!(p("sqrt(9/4)", &[]), Expr::rational(q(3, 2)));
    assert_eq!(p("i^2", &[]), Expr::int(-1));
    assert_eq!(p("exp(x)*exp(-x)", &["x"]), Expr::one());
    assert_eq!(p("log(exp(1)) - log(e)", &[]), Expr::zero());
}

#[test]
fn diff_examples() {
    let names = ["x", "y", "z"];
    assert_eq!(p("x*(1+y)", &names).diff("x"), p("1+y", &names));
    let h2 = p("1-z*x^2*(1+2*y)", &names);
    assert_eq!(h2.diff("x"), p("-2*z*x*(1+2*y)", &names));
    assert_eq!(p("exp(x+y)", &names).diff("y"), p("exp(x+y)", &names));
}

#[test]
fn eval_examples() {
    let names = ["x", "y", "z"];
    let h1 = p("1-x*(1+y)", &names);
    assert_eq!(eval(&h1, &at(&[("x", QI::frac(1, 2)), ("y", QI::int(1))])).unwrap(), Number::int(0));
    let h2 = p("1-z*x^2*(1+2*y)", &names);
    let pt = at(&[("x", QI::frac(1, 2)), ("y", QI::int(1)), ("z", QI::frac(4, 3))]);
    assert_eq!(eval(&h2, &pt).unwrap(), Number::int(0));
    let e = p("exp(x+y)", &names);
    let v = crate::number::with_precision(400, || eval(&e, &at(&[("x", QI::int(1)), ("y", QI::int(1))])).unwrap());
    let oracle = crate::number::with_precision(400, || BigC::from_qi(&QI::int(2)).exp());
    let diff = (v.to_bigc().to_c64() - oracle.to_c64()).norm();
    assert!(diff < 1e-15);
    assert!((v.to_c64().re - 7.389_056_098_930_65).abs() < 1e-14);
    assert!(matches!(eval(&p("1/x", &names), &at(&[("x", QI::int(0))])), Err(EvalError::DivisionByZero)));
    assert!(matches!(eval(&p("log(x)", &names), &at(&[("x", QI::int(0))])), Err(EvalError::LogOfZero)));
}

#[test]
fn substitute_example() {
    let names = ["x", "y"];
    let e = p("x+y", &names);
    let mut m = HashMap::new();
    m.insert("x".to_string(), p("1/(1+y)", &names));
    assert_eq!(e.substitute(&m), p("1/(1+y)+y", &names));
}

#[test]
fn normalize_cancels_and_records() {
    let names = ["x"];
    let n = normalize(&p("(x^2-1)/(x-1)", &names));
    assert_eq!(n.expr, p("x+1", &names));
    assert_eq!(n.removable, vec![p("x-1", &names)]);
}

#[test]
fn normalize_expands_denominator_product() {
    let names = ["x", "y", "z"];
    let prod = p("(4-2*x-y-z)*(4-x-2*y-z)", &names);
    let expanded = p("16 - 12*x - 12*y - 8*z + 2*x^2 + 5*x*y + 3*x*z + 2*y^2 + 3*y*z + z^2", &names);
    assert_eq!(normalize(&prod).expr, normalize(&expanded).expr);
    // independent check: both sides agree at many rational points
    for a in -3..4 {
        for b in -2..3 {
            let pt = at(&[("x", QI::int(a)), ("y", QI::int(b)), ("z", QI::frac(a + b, 3))]);
            assert_eq!(eval(&prod, &pt).unwrap(), eval(&expanded, &pt).unwrap());
        }
    }
}

#[test]
fn printing_is_readable() {
    let names = ["x", "y", "z"];
    assert_eq!(p("1-x*(1+y)", &names).to_string(), "1 - x*(1 + y)");
    assert_eq!(p("16/((4-2*x-y-z)^2*(4-x-2*y-z))", &names).to_string().matches('/').count(), 1);
    assert_eq!(p("3*exp(2)", &names).to_string(), "3*exp(2)");
    assert_eq!(p("x^(-1/2)", &names).to_string(), "1/sqrt(x)");
}

#[test]
fn exp_rational_decomposition() {
    let names = vs(&["x", "y"]);
    let e = p("9*exp(x+y) + x*exp(x+y)/y + 2", &["x", "y"]);
    let form = exp_rational_form(&e, &names).unwrap();
    assert_eq!(form.len(), 2);
    assert!(exp_rational_form(&p("log(1+x)", &["x"]), &vs(&["x"])).is_none());
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        (-5i64..6, 1i64..5).prop_map(|(a, b)| Expr::rational(q(a, b))),
    ]
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(&Expr::int(2).add(&b.powi(2)))),
            (inner.clone(), 0i64..4).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| Expr::exp(a.mul(&Expr::rational(q(1, 3))))),
            inner.clone().prop_map(|a| Expr::log(Expr::int(3).add(&a.powi(2)))),
            inner.prop_map(|a| Expr::int(1).add(&a.powi(2)).sqrt()),
        ]
    })
}

fn rational_expr_strategy() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(&Expr::int(2).add(&b.powi(2)))),
            (inner, 0i64..3).prop_map(|(a, k)| a.powi(k)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_roundtrip(e in expr_strategy()) {
        let text = e.to_string();
        let back = parse(&text, &vs(&["x", "y"])).unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn diff_matches_central_difference(e in expr_strategy(), a in -20i64..20, b in -20i64..20) {
        let x0 = q(a, 7);
        let y0 = q(b, 5);
        let d = e.diff("x");
        let res = crate::number::with_precision(256, || {
            let pt = |xv: Q| -> HashMap<String, Number> {
                let mut m = HashMap::new();
                m.insert("x".into(), Number::Float(BigC::from_qi(&QI::real(xv))));
                m.insert("y".into(), Number::Float(BigC::from_qi(&QI::real(y0.clone()))));
                m
            };
            let h = Q::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 15));
            let fp = eval(&e, &pt(&x0 + &h)).ok()?;
            let fm = eval(&e, &pt(&x0 - &h)).ok()?;
            let dv = eval(&d, &pt(x0.clone())).ok()?;
            let fd = (fp.to_bigc() - fm.to_bigc()) * BigC::from_qi(&QI::real(Q::new(1.into(), 2.into()) / h));
            let err = (fd - dv.to_bigc()).to_c64().norm();
            Some((err, dv.to_c64().norm()))
        });
        if let Some((err, mag)) = res {
            prop_assert!(err <= 1e-20 * mag.max(1.0), "err {} for {}", err, e);
        }
    }

    #[test]
    fn normalize_preserves_value(e in rational_expr_strategy(), a in -9i64..9, b in -9i64..9) {
        let n = normalize(&e);
        let n2 = normalize(&n.expr);
        prop_assert_eq!(&n2.expr, &n.expr);
        let pt = at(&[("x", QI::frac(a, 3)), ("y", QI::frac(b, 2))]);
        if let (Ok(u), Ok(v)) = (eval(&e, &pt), eval(&n.expr, &pt)) {
            prop_assert_eq!(u, v);
        }
    }
}

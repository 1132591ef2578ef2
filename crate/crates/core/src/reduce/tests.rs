use super::*;
use crate::expr::parse;

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn ex(text: &str, v: &[String]) -> Expr {
    parse(text, v).unwrap()
}

fn ones(d: usize) -> Vec<QI> {
    vec![QI::one(); d]
}

fn denominator(factors: &[(Expr, u32)]) -> Expr {
    Expr::product(factors.iter().map(|(f, a)| f.powi(*a as i64)).collect())
}

#[test]
fn monomial_enumeration() {
    assert_eq!(monomials(2, 2).len(), 6);
    assert_eq!(monomials(3, 0), vec![vec![0, 0, 0]]);
}

#[test]
fn three_lines_through_one_point() {
    let v = vars(&["x", "y"]);
    let factors = vec![(ex("1-x", &v), 1), (ex("1-y", &v), 1), (ex("2-x-y", &v), 1)];
    let terms = reduce_factors(&v, &Expr::one(), &factors, &ones(2), 2).unwrap();
    assert!(!terms.is_empty());
    assert!(terms.iter().all(|t| t.subset.len() <= 2));

    let original = ContourForm::simple(Expr::one(), denominator(&factors));
    let split = ContourForm {
        slices: vec![Slice {
            n_power: 0,
            numerator: Expr::sum(terms.iter().map(|t| t.numerator.div(&denominator(&t.factors))).collect()),
        }],
        denominator: Expr::one(),
    };
    for n in 1..=3 {
        let diff = contour_check(&v, &original, &split, &[1, 2], n, &ones(2), &ContourOptions::default()).unwrap();
        assert!(diff < 1e-9, "n = {n}: {diff}");
    }
}

#[test]
fn repeated_factor_in_three_lines() {
    let v = vars(&["x", "y"]);
    let factors = vec![(ex("1-x", &v), 2), (ex("1-y", &v), 1), (ex("3-x-2*y", &v), 1)];
    let terms = reduce_factors(&v, &ex("1+x", &v), &factors, &ones(2), 2).unwrap();
    assert!(terms.iter().all(|t| t.subset.len() <= 2));
}

fn ex3() -> (Vec<String>, Vec<(Expr, u32)>) {
    let v = vars(&["x", "y", "z"]);
    let f = vec![(ex("4-2*x-y-z", &v), 2), (ex("4-x-2*y-z", &v), 1)];
    (v, f)
}

#[test]
fn repeated_factor_reduction_matches_contour() {
    let (v, factors) = ex3();
    let reduced = reduce_powers(&v, &Expr::int(16), &factors, 3).unwrap();
    assert_eq!(reduced.n_degree(), 1);
    assert_eq!(reduced.steps, 1);
    let alpha = [3, 3, 2];
    let original = ContourForm::simple(Expr::int(16), denominator(&factors));
    let new = ContourForm { slices: reduced.specialize(&alpha), denominator: Expr::product(reduced.factors.clone()) };
    for n in 1..=3 {
        let diff = contour_check(&v, &original, &new, &alpha, n, &ones(3), &ContourOptions::default()).unwrap();
        assert!(diff < 1e-8, "n = {n}: {diff}");
    }
    // dropping the n-slice breaks the identity
    let broken = ContourForm { slices: reduced.specialize(&alpha).into_iter().filter(|s| s.n_power == 0).collect(), denominator: new.denominator };
    let diff = contour_check(&v, &original, &broken, &alpha, 2, &ones(3), &ContourOptions::default()).unwrap();
    assert!(diff > 1e-3);
}

#[test]
fn printed_reduced_form_is_cohomologous_to_ours() {
    let (v, factors) = ex3();
    let alpha = [3, 3, 2];
    let reduced = reduce_powers(&v, &Expr::int(16), &factors, 3).unwrap();
    let ours = ContourForm { slices: reduced.specialize(&alpha), denominator: Expr::product(reduced.factors.clone()) };
    let printed = ContourForm {
        slices: vec![
            Slice { n_power: 1, numerator: ex("16*(2*2*y-3*z)/(y*z)", &v) },
            Slice { n_power: 0, numerator: ex("16*(2*y-z)/(y*z)", &v) },
        ],
        denominator: ex("(4-2*x-y-z)*(4-x-2*y-z)", &v),
    };
    for n in 1..=2 {
        let diff = contour_check(&v, &ours, &printed, &alpha, n, &ones(3), &ContourOptions::default()).unwrap();
        assert!(diff < 1e-8, "n = {n}: {diff}");
    }
}

#[test]
fn exponential_numerator_squared_factors() {
    let v = vars(&["x", "y"]);
    let factors = vec![(ex("3-2*x-y", &v), 2), (ex("3-x-2*y", &v), 2)];
    let g = ex("9*exp(x+y)", &v);
    let reduced = reduce_powers(&v, &g, &factors, 3).unwrap();
    assert!(reduced.n_degree() <= 2);
    let alpha = [1, 1];
    let original = ContourForm::simple(g, denominator(&factors));
    let new = ContourForm { slices: reduced.specialize(&alpha), denominator: Expr::product(reduced.factors.clone()) };
    for n in 1..=3 {
        let diff = contour_check(&v, &original, &new, &alpha, n, &ones(2), &ContourOptions::default()).unwrap();
        assert!(diff < 1e-8, "n = {n}: {diff}");
    }
}

#[test]
fn high_precision_quadrature_agrees_with_f64() {
    let v = vars(&["x", "y"]);
    let form = ContourForm::simple(Expr::one(), ex("1-x-y", &v));
    let radii = [0.25, 0.25];
    let lo = contour_integral(&v, &form, &[1, 1], 3, &radii, &ContourOptions::default()).unwrap();
    let hi = contour_integral(&v, &form, &[1, 1], 3, &radii, &ContourOptions { grid: 48, bits: Some(128), ..Default::default() }).unwrap();
    // binom(6, 3)
    assert!((lo.to_c64().re - 20.0).abs() < 1e-9);
    assert!((hi.to_c64().re - 20.0).abs() < 1e-9);
}

#[test]
fn alpha_symbols_avoid_user_names() {
    let v = vars(&["alpha1", "y"]);
    assert_eq!(alpha_names(&v), vec!["_alpha1".to_string(), "_alpha2".to_string()]);
}

use proptest::prelude::*;

use super::*;

fn pt(xs: &[(i64, i64)]) -> Vec<QI> {
    xs.iter().map(|&(a, b)| QI::frac(a, b)).collect()
}

fn qv(xs: &[(i64, i64)]) -> Vec<QI> {
    pt(xs)
}

fn ex1(alpha: &[i64]) -> Problem {
    Problem::parse(&["x", "y", "z"], "1", &[("1-x*(1+y)", 1), ("1-z*x^2*(1+2*y)", 1)], alpha, vec![pt(&[(1, 2), (1, 1), (4, 3)])], 2)
        .unwrap()
}

fn ex2() -> Problem {
    Problem::parse(&["x", "y", "z"], "16", &[("4-2*x-y-z", 1), ("4-x-2*y-z", 1)], &[3, 3, 2], vec![pt(&[(1, 1), (1, 1), (1, 1)])], 2)
        .unwrap()
}

fn smooth() -> Problem {
    Problem::parse(&["x", "y"], "1", &[("1-x-y", 1)], &[1, 1], vec![pt(&[(1, 2), (1, 2)])], 2).unwrap()
}

#[test]
fn first_example_classification() {
    let p = ex1(&[8, 3, 3]);
    let pc = classify_point(&p, &p.points[0]).unwrap();
    assert_eq!(pc.r, 2);
    assert_eq!(pc.k, 0);
    assert_eq!(gamma(&pc, 0), qv(&[(1, 1), (1, 2), (0, 1)]));
    assert_eq!(gamma(&pc, 1), qv(&[(1, 1), (1, 3), (1, 2)]));
    let cd = solve_critical_weights(&pc, &p.alpha).unwrap();
    assert_eq!(cd.s_star, qv(&[(1, 4), (3, 4)]));
    assert_eq!(cd.theta_star, qv(&[(0, 1), (0, 1), (1, 4)]));
}

#[test]
fn weights_satisfy_cone_equation() {
    for p in [ex1(&[8, 3, 3]), ex2()] {
        let pc = classify_point(&p, &p.points[0]).unwrap();
        let cd = solve_critical_weights(&pc, &p.alpha).unwrap();
        let sum = cd.s_star.iter().fold(QI::zero(), |a, b| a + b.clone());
        assert!(sum.is_one());
        for m in 0..p.dim() {
            let mut lhs = QI::zero();
            for j in 0..pc.r {
                lhs = lhs + cd.s_star[j].clone() * gamma(&pc, j)[m].clone();
            }
            assert_eq!(lhs, QI::frac(p.alpha[m], p.alpha[pc.k]));
        }
    }
}

#[test]
fn second_and_fourth_example_gammas() {
    let p = ex2();
    let pc = classify_point(&p, &p.points[0]).unwrap();
    assert_eq!(pc.k, 2);
    assert_eq!(gamma(&pc, 0), qv(&[(2, 1), (1, 1), (1, 1)]));
    assert_eq!(gamma(&pc, 1), qv(&[(1, 1), (2, 1), (1, 1)]));
    assert_eq!(solve_critical_weights(&pc, &p.alpha).unwrap().s_star, qv(&[(1, 2), (1, 2)]));

    let p4 = Problem::parse(&["x", "y"], "9*exp(x+y)", &[("3-2*x-y", 1), ("3-x-2*y", 1)], &[1, 1], vec![pt(&[(1, 1), (1, 1)])], 1)
        .unwrap();
    let pc = classify_point(&p4, &p4.points[0]).unwrap();
    assert_eq!(gamma(&pc, 0), qv(&[(2, 1), (1, 1)]));
    assert_eq!(gamma(&pc, 1), qv(&[(1, 2), (1, 1)]));
}

#[test]
fn direction_outside_cone() {
    let p = ex1(&[1, 5, 1]);
    let pc = classify_point(&p, &p.points[0]).unwrap();
    assert_eq!(solve_critical_weights(&pc, &p.alpha), Err(GeometryError::NotInCone));
}

#[test]
fn smooth_point_and_errors() {
    let p = smooth();
    let pc = classify_point(&p, &p.points[0]).unwrap();
    assert_eq!(pc.r, 1);
    assert_eq!(gamma(&pc, 0), qv(&[(1, 1), (1, 1)]));
    assert_eq!(classify_point(&p, &pt(&[(1, 3), (1, 3)])), Err(GeometryError::NotOnVariety));
    assert_eq!(classify_point(&p, &pt(&[(1, 1), (0, 1)])), Err(GeometryError::ZeroCoordinate));
    let tangent =
        Problem::parse(&["x", "y"], "1", &[("1-x-y", 1), ("2-2*x-2*y", 1)], &[1, 1], vec![pt(&[(1, 2), (1, 2)])], 1).unwrap();
    assert_eq!(classify_point(&tangent, &tangent.points[0]), Err(GeometryError::NotTransversal));
}

#[test]
fn validation_rejects_bad_shapes() {
    let bad_alpha = Problem::parse(&["x", "y"], "1", &[("1-x-y", 1)], &[1, 1, 1], vec![], 1);
    assert!(matches!(bad_alpha, Err(ProblemError::Invalid(_))));
    let bad_mult = Problem::parse(&["x", "y"], "1", &[("1-x-y", 0)], &[1, 1], vec![], 1);
    assert!(matches!(bad_mult, Err(ProblemError::Invalid(_))));
    let bad_expr = Problem::parse(&["x", "y"], "1", &[("1-x-w", 1)], &[1, 1], vec![], 1);
    assert!(matches!(bad_expr, Err(ProblemError::Parse { .. })));
}

#[test]
fn jlog_agrees_with_polynomial_derivatives() {
    let p = ex1(&[8, 3, 3]);
    let c = &p.points[0];
    let pc = classify_point(&p, c).unwrap();
    for (row, &j) in pc.active.iter().enumerate() {
        let poly = to_ratfunc(&p.factors[j].expr, &p.variables).unwrap().num;
        for m in 0..3 {
            let v = poly.diff(m).eval_qi(c).unwrap() * c[m].clone();
            assert_eq!(pc.jlog[(row, m)], v);
        }
    }
}

#[test]
fn certification_examples() {
    let p = ex2();
    let pc = classify_point(&p, &p.points[0]).unwrap();
    let opts = CertifyOptions { samples: 10_000, ..Default::default() };
    assert_eq!(certify_strictly_minimal(&p, &pc, &opts), Certification::CertifiedHeuristically { samples: 10_000 });

    let s = smooth();
    let pc = classify_point(&s, &s.points[0]).unwrap();
    assert!(matches!(certify_strictly_minimal(&s, &pc, &CertifyOptions::default()), Certification::CertifiedHeuristically { .. }));

    let p1 = ex1(&[8, 3, 3]);
    let pc = classify_point(&p1, &p1.points[0]).unwrap();
    assert!(matches!(certify_strictly_minimal(&p1, &pc, &CertifyOptions::default()), Certification::CertifiedHeuristically { .. }));
    let too_big = CertifyOptions { radius_scale: 1.5, ..Default::default() };
    assert!(matches!(certify_strictly_minimal(&p1, &pc, &too_big), Certification::Counterexample { .. }));
}

#[test]
fn aberth_finds_known_roots() {
    let c = |re: f64| Complex64::new(re, 0.0);
    // (y-1)(y-2)(y+3) = y^3 - 7y + 6
    let mut roots = polynomial_roots(&[c(6.0), c(-7.0), c(0.0), c(1.0)]).unwrap();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    for (r, want) in roots.iter().zip([-3.0, 1.0, 2.0]) {
        assert!((r - c(want)).norm() < 1e-12);
    }
}

#[test]
fn point_search_recovers_known_points() {
    let s = smooth();
    assert_eq!(find_points(&s, 1, 16, 1), vec![pt(&[(1, 2), (1, 2)])]);
    let p = ex2();
    assert!(find_points(&p, 2, 16, 1).contains(&pt(&[(1, 1), (1, 1), (1, 1)])));
    assert_eq!(rationalize(0.333333333333, 1000), crate::number::q(1, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classification_ignores_factor_order(swap in any::<bool>(), which in 0usize..2) {
        let mut p = if which == 0 { ex1(&[8, 3, 3]) } else { ex2() };
        let before = classify_point(&p, &p.points[0]).unwrap();
        if swap {
            p.factors.reverse();
        }
        let after = classify_point(&p, &p.points[0]).unwrap();
        prop_assert_eq!(before.r, after.r);
        prop_assert_eq!(before.transversal, after.transversal);
        let mut g1: Vec<Vec<QI>> = (0..before.r).map(|j| gamma(&before, j)).collect();
        let mut g2: Vec<Vec<QI>> = (0..after.r).map(|j| gamma(&after, j)).collect();
        g1.sort();
        g2.sort();
        prop_assert_eq!(g1, g2);
    }
}

//! Randomized invariants of the expansion engine and the oracle.

use acsv::expansion::phase::PhaseData;
use acsv::expansion::{expand, l_k, phi_underline, required_order, ExpandOptions};
use acsv::expr::{parse, to_ratfunc, Expr};
use acsv::geometry::{classify_point, solve_critical_weights, Problem};
use acsv::jet::Jet;
use acsv::linalg::Matrix;
use acsv::number::{q, Q, QI};
use acsv::oracle::{problem_table, ray_coefficient, recurrence_residual, taylor_table};
use acsv::reduce::reduce_factors;
use proptest::prelude::*;

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `1 / (1 - a x - b y)` on the diagonal, at its minimal critical point.
fn scaled_binomial(a: i64, b: i64) -> Problem {
    let c = vec![QI::frac(1, 2 * a), QI::frac(1, 2 * b)];
    Problem::parse(&["x", "y"], "1", &[(&format!("1-{a}*x-{b}*y"), 1)], &[1, 1], vec![c], 2).unwrap()
}

fn jet_from(base: &[QI], order: usize, min_degree: usize, coeffs: &[(i64, i64)]) -> Jet<QI> {
    let m = base.len();
    let mut j = Jet::zero(base.to_vec(), order);
    let mut exps: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..m {
        exps = exps.into_iter().flat_map(|e| (0..=order as u8).map(move |k| [e.clone(), vec![k]].concat())).collect();
    }
    let mut it = coeffs.iter().cycle();
    for e in exps {
        let deg: usize = e.iter().map(|&k| k as usize).sum();
        if deg >= min_degree && deg <= order {
            let &(p, s) = it.next().unwrap();
            j.set(&e, QI::frac(p, s));
        }
    }
    j
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn taylor_table_matches_binomials(i in 0usize..20, j in 0usize..20) {
        let v = vars(&["x", "y"]);
        let t = taylor_table(&Expr::one(), &parse("1-x-y", &v).unwrap(), &v, &[20, 20]).unwrap();
        prop_assert_eq!(t.get(&[i, j]).unwrap(), &QI::int(binomial((i + j) as u128, i as u128) as i64));
    }

    #[test]
    fn positive_denominators_give_nonnegative_tables(a in 1i64..4, b in 1i64..4, c in 0i64..4) {
        let p = Problem::parse(&["x", "y"], "1", &[(&format!("1-{a}*x-{b}*y-{c}*x*y"), 1)], &[1, 1], vec![], 1).unwrap();
        let t = problem_table(&p, &[10, 10]).unwrap();
        prop_assert!(t.data.iter().all(|x| x.re() >= Q::from_integer(0.into())));
        prop_assert!(recurrence_residual(&t, &p.numerator, &p.denominator(), &p.variables).unwrap().is_zero());
        prop_assert_eq!(t, problem_table(&p, &[10, 10]).unwrap());
    }

    #[test]
    fn scaled_binomial_expansion(a in 1i64..6, b in 1i64..6) {
        let p = scaled_binomial(a, b);
        let opts = ExpandOptions { assume_minimal: true, ..Default::default() };
        let e = &expand(&p, &opts).unwrap()[0];
        let g = e.growth.to_c64();
        prop_assert!((g.re - (4 * a * b) as f64).abs() < 1e-9 && g.im.abs() < 1e-9);
        prop_assert_eq!(e.coefficient_ratio(1), Some(Expr::rational(q(-1, 8))));
        let table = problem_table(&p, &[13, 13]).unwrap();
        let truth = ray_coefficient(&table, &p.alpha, 12).unwrap().to_c64().re;
        let approx = e.partial_sum(12, 2).to_c64().re * g.re.powi(12);
        prop_assert!(((truth - approx) / truth).abs() < 2e-3);
    }

    #[test]
    fn phase_gradient_vanishes(a in 1i64..6, b in 1i64..6) {
        let p = scaled_binomial(a, b);
        let c = &p.points[0];
        let pc = classify_point(&p, c).unwrap();
        let cd = solve_critical_weights(&pc, &p.alpha).unwrap();
        let mut perm: Vec<usize> = (0..2).filter(|&m| m != pc.k).collect();
        perm.push(pc.k);
        let vs: Vec<String> = perm.iter().map(|&m| p.variables[m].clone()).collect();
        let cp: Vec<QI> = perm.iter().map(|&m| c[m].clone()).collect();
        let ap: Vec<i64> = perm.iter().map(|&m| p.alpha[m]).collect();
        let factors: Vec<Expr> = pc.active.iter().map(|&j| p.factors[j].expr.clone()).collect();
        let phase = PhaseData::build(&factors, &vs, &cp, &ap, &cd.s_star, required_order(2, pc.r)).unwrap();
        prop_assert!(phase.phi.constant_term().is_zero());
        prop_assert!(phase.phi.homogeneous(1).all(|(_, g)| g.is_zero()));
    }

    #[test]
    fn l0_is_amplitude_at_origin(
        m in 1usize..=3,
        base in prop::collection::vec((-4i64..=4, 1i64..=3), 3),
        a in prop::collection::vec((-9i64..=9, 1i64..=5), 1..12),
        phi in prop::collection::vec((-9i64..=9, 1i64..=5), 1..12),
        diag in prop::collection::vec(1i64..=5, 3),
    ) {
        let base: Vec<QI> = base[..m].iter().map(|&(p, s)| QI::frac(p, s)).collect();
        let amp = jet_from(&base, 4, 0, &a);
        let ph = jet_from(&base, 4, 3, &phi);
        let minv = Matrix::from_rows((0..m).map(|i| (0..m).map(|k| if i == k { QI::int(diag[i]) } else { QI::zero() }).collect()).collect());
        prop_assert_eq!(&l_k(0, &amp, &phi_underline(&ph), &minv).unwrap(), amp.constant_term());
    }

    #[test]
    fn factor_split_is_exact(p1 in 1i64..5, q1 in 1i64..5, g in prop::collection::vec(-3i64..=3, 3)) {
        let v = vars(&["x", "y"]);
        let line = format!("{}-{p1}*x-{q1}*y", p1 + q1);
        let factors: Vec<(Expr, u32)> = ["1-x", "1-y", line.as_str()].iter().map(|f| (parse(f, &v).unwrap(), 1)).collect();
        let num = parse(&format!("{}+({})*x+({})*y", g[0], g[1], g[2]), &v).unwrap();
        let terms = reduce_factors(&v, &num, &factors, &[QI::one(), QI::one()], 3).unwrap();
        let prod = |fs: &[(Expr, u32)]| Expr::product(fs.iter().map(|(f, a)| f.powi(*a as i64)).collect());
        let total = Expr::sum(terms.iter().map(|t| t.numerator.div(&prod(&t.factors))).collect());
        let diff = to_ratfunc(&total.sub(&num.div(&prod(&factors))), &v).unwrap();
        prop_assert!(diff.num.is_zero());
        prop_assert!(terms.iter().all(|t| t.factors.len() <= 2));
    }
}

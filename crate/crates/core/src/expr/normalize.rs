use num_traits::{One, ToPrimitive};

use super::{Expr, Node};
use crate::number::QI;
use crate::poly::{Poly, RatFunc};

/// Rational-function normal form together with the common factors that were
/// cancelled (their zero sets are removable singularities).
#[derive(Debug, Clone)]
pub struct Normalized {
    pub expr: Expr,
    pub removable: Vec<Expr>,
}

/// A term `coef * exp(exponent)` of a numerator.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub coef: RatFunc,
    pub exponent: Poly,
}

fn var_index(vars: &[String], n: &str) -> Option<usize> {
    vars.iter().position(|v| v == n)
}

/// Converts a rational expression in `vars` into a reduced rational function.
pub fn to_ratfunc(e: &Expr, vars: &[String]) -> Option<RatFunc> {
    let n = vars.len();
    match e.node() {
        Node::Const(c) => Some(RatFunc::from_poly(Poly::constant(n, c.clone()))),
        Node::Var(name) => Some(RatFunc::from_poly(Poly::var(n, var_index(vars, name)?))),
        Node::Sum(ts) => {
            let mut acc = RatFunc::from_poly(Poly::zero(n));
            for t in ts {
                acc = acc.add(&to_ratfunc(t, vars)?);
            }
            Some(acc)
        }
        Node::Product(fs) => {
            let mut acc = RatFunc::from_poly(Poly::one(n));
            for f in fs {
                acc = acc.mul(&to_ratfunc(f, vars)?);
            }
            Some(acc)
        }
        Node::Pow(b, ex) => {
            if !ex.denom().is_one() {
                return None;
            }
            to_ratfunc(b, vars)?.powi(ex.numer().to_i64()?)
        }
        _ => None,
    }
}

/// Rebuilds an expression from a polynomial whose variables stand for `atoms`.
pub fn poly_to_expr(p: &Poly, atoms: &[Expr]) -> Expr {
    let mut terms = Vec::new();
    for (e, c) in p.terms() {
        let mut fs = vec![Expr::num(c.clone())];
        for (v, &k) in e.iter().enumerate() {
            if k != 0 {
                fs.push(atoms[v].powi(k as i64));
            }
        }
        terms.push(Expr::product(fs));
    }
    Expr::sum(terms)
}

pub fn from_ratfunc(r: &RatFunc, atoms: &[Expr]) -> Expr {
    let n = poly_to_expr(&r.num, atoms);
    if r.den.is_constant() {
        let c = r.den.constant_value().unwrap();
        return n.mul(&Expr::num(c.inv().unwrap()));
    }
    n.div(&poly_to_expr(&r.den, atoms))
}

fn collect_atoms(e: &Expr, atoms: &mut Vec<Expr>) {
    let add = |a: Expr, atoms: &mut Vec<Expr>| {
        if !atoms.contains(&a) {
            atoms.push(a);
        }
    };
    match e.node() {
        Node::Const(_) => {}
        Node::Var(_) | Node::Pi => add(e.clone(), atoms),
        Node::Sum(ts) | Node::Product(ts) => ts.iter().for_each(|t| collect_atoms(t, atoms)),
        Node::Pow(b, ex) => {
            if ex.denom().is_one() {
                collect_atoms(b, atoms)
            } else {
                add(Expr::pow(normalize(b).expr, ex.clone()), atoms)
            }
        }
        Node::Exp(a) => add(Expr::exp(normalize(a).expr), atoms),
        Node::Log(a) => add(Expr::log(normalize(a).expr), atoms),
    }
}

/// Unreduced numerator/denominator pair, so cancellations can be reported.
fn to_pair(e: &Expr, atoms: &[Expr]) -> (Poly, Poly) {
    let n = atoms.len();
    let atom = |a: &Expr| -> (Poly, Poly) {
        let i = atoms.iter().position(|x| x == a).expect("atom collected");
        (Poly::var(n, i), Poly::one(n))
    };
    match e.node() {
        Node::Const(c) => (Poly::constant(n, c.clone()), Poly::one(n)),
        Node::Var(_) | Node::Pi => atom(e),
        Node::Sum(ts) => {
            let mut acc = (Poly::zero(n), Poly::one(n));
            for t in ts {
                let (a, b) = to_pair(t, atoms);
                acc = if acc.1 == b { (acc.0.add(&a), b) } else { (acc.0.mul(&b).add(&a.mul(&acc.1)), acc.1.mul(&b)) };
            }
            acc
        }
        Node::Product(fs) => {
            let mut acc = (Poly::one(n), Poly::one(n));
            for f in fs {
                let (a, b) = to_pair(f, atoms);
                acc = (acc.0.mul(&a), acc.1.mul(&b));
            }
            acc
        }
        Node::Pow(b, ex) => {
            if ex.denom().is_one() {
                let (a, d) = to_pair(b, atoms);
                let k = ex.numer().to_i64().unwrap_or(0);
                if k >= 0 {
                    (a.pow(k as u32), d.pow(k as u32))
                } else {
                    (d.pow((-k) as u32), a.pow((-k) as u32))
                }
            } else {
                atom(&Expr::pow(normalize(b).expr, ex.clone()))
            }
        }
        Node::Exp(a) => atom(&Expr::exp(normalize(a).expr)),
        Node::Log(a) => atom(&Expr::log(normalize(a).expr)),
    }
}

/// Rational-function normal form: subtrees without exp/log/fractional powers
/// are combined into one expanded numerator over one expanded monic
/// denominator, with common factors cancelled.
pub fn normalize(e: &Expr) -> Normalized {
    let mut atoms = Vec::new();
    collect_atoms(e, &mut atoms);
    atoms.sort();
    let (num, den) = to_pair(e, &atoms);
    if num.is_zero() {
        return Normalized { expr: Expr::zero(), removable: vec![] };
    }
    if den.is_zero() {
        return Normalized { expr: e.clone(), removable: vec![] };
    }
    let mn = num.monomial_content();
    let md = den.monomial_content();
    let shift: Vec<i32> = mn.iter().zip(&md).map(|(a, b)| -(*a.min(b))).collect();
    let num = num.mul_monomial(&shift, &QI::one());
    let den = den.mul_monomial(&shift, &QI::one());
    let g = num.gcd(&den);
    let mut removable = Vec::new();
    let common: Vec<i32> = mn.iter().zip(&md).map(|(a, b)| (*a.min(b)).max(0)).collect();
    if common.iter().any(|&k| k > 0) {
        removable.push(poly_to_expr(&Poly::monomial(atoms.len(), common, QI::one()), &atoms));
    }
    if !g.is_constant() {
        removable.push(poly_to_expr(&g, &atoms));
    }
    let r = RatFunc::new(num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap());
    Normalized { expr: from_ratfunc(&r, &atoms), removable }
}

fn merge(terms: &mut Vec<ExpTerm>, t: ExpTerm) {
    if t.coef.is_zero() {
        return;
    }
    if let Some(x) = terms.iter_mut().find(|x| x.exponent == t.exponent) {
        x.coef = x.coef.add(&t.coef);
    } else {
        terms.push(t);
    }
    terms.retain(|x| !x.coef.is_zero());
}

fn mul_forms(a: &[ExpTerm], b: &[ExpTerm]) -> Vec<ExpTerm> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            merge(&mut out, ExpTerm { coef: x.coef.mul(&y.coef), exponent: x.exponent.add(&y.exponent) });
        }
    }
    out
}

/// Writes `e` as a finite sum of rational functions times exponentials of
/// polynomials, if it has that shape.
pub fn exp_rational_form(e: &Expr, vars: &[String]) -> Option<Vec<ExpTerm>> {
    let n = vars.len();
    let plain = |r: RatFunc| vec![ExpTerm { coef: r, exponent: Poly::zero(n) }];
    match e.node() {
        Node::Const(_) | Node::Var(_) => Some(plain(to_ratfunc(e, vars)?)),
        Node::Sum(ts) => {
            let mut out = Vec::new();
            for t in ts {
                for x in exp_rational_form(t, vars)? {
                    merge(&mut out, x);
                }
            }
            Some(out)
        }
        Node::Product(fs) => {
            let mut acc = plain(RatFunc::from_poly(Poly::one(n)));
            for f in fs {
                acc = mul_forms(&acc, &exp_rational_form(f, vars)?);
            }
            Some(acc)
        }
        Node::Pow(b, ex) => {
            if !ex.denom().is_one() {
                return None;
            }
            let k = ex.numer().to_i64()?;
            let base = exp_rational_form(b, vars)?;
            if base.len() == 1 {
                let t = &base[0];
                return Some(vec![ExpTerm { coef: t.coef.powi(k)?, exponent: t.exponent.scale(&QI::int(k)) }]);
            }
            if k.is_negative() {
                return None;
            }
            let mut acc = plain(RatFunc::from_poly(Poly::one(n)));
            for _ in 0..k {
                acc = mul_forms(&acc, &base);
            }
            Some(acc)
        }
        Node::Exp(a) => {
            let r = to_ratfunc(a, vars)?;
            if !r.den.is_constant() || !r.num.is_polynomial() {
                return None;
            }
            let p = r.num.scale(&r.den.constant_value()?.inv()?);
            Some(vec![ExpTerm { coef: RatFunc::from_poly(Poly::one(n)), exponent: p }])
        }
        Node::Pi | Node::Log(_) => None,
    }
}

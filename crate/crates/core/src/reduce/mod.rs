//! Rewriting a rational integrand into one whose vanishing factors are
//! at most `d` in number and all simple, without changing its Cauchy integrals.

pub mod contour;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::expansion::Slice;
use crate::expr::{exp_rational_form, poly_to_expr, to_ratfunc, Expr};
use crate::geometry::index_subsets;
use crate::linalg::Matrix;
use crate::number::QI;
use crate::poly::{Exps, Poly, RatFunc};

pub use contour::{contour_check, contour_integral, ContourError, ContourForm, ContourOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("{0} is not a polynomial in the variables")]
    NotPolynomial(String),
    #[error("numerator is not a sum of Laurent polynomials times exponentials of polynomials")]
    UnsupportedNumerator,
    #[error("no polynomial certificate of degree at most {0} was found")]
    NoCertificate(usize),
    #[error("reduced form failed the identity check")]
    IdentityCheck,
}

/// Monomials of total degree at most `deg` in `n` variables.
fn monomials(n: usize, deg: usize) -> Vec<Exps> {
    fn rec(v: usize, n: usize, left: usize, cur: &mut Exps, out: &mut Vec<Exps>) {
        if v == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[v] = k as i32;
            rec(v + 1, n, left - k, cur, out);
        }
        cur[v] = 0;
    }
    let mut out = Vec::new();
    rec(0, n, deg, &mut vec![0; n], &mut out);
    out
}

/// One polynomial identity `sum_k U_k P_k = rhs` in unknown polynomials `U_k`.
struct Identity {
    multipliers: Vec<Option<Poly>>,
    rhs: Poly,
}

/// Solves a system of polynomial identities for unknowns of total degree at
/// most `deg`, with extra linear constraints on the unknown coefficients
/// given as closures mapping each `(unknown, monomial)` to a coefficient.
fn solve_identities(
    nvars: usize,
    n_unknowns: usize,
    deg: usize,
    ids: &[Identity],
    extra: &[(Vec<(usize, Exps, QI)>, QI)],
) -> Option<Vec<Poly>> {
    let monos = monomials(nvars, deg);
    let nm = monos.len();
    let col = |u: usize, m: usize| u * nm + m;
    let mut rows: Vec<BTreeMap<usize, QI>> = Vec::new();
    let mut rhs: Vec<QI> = Vec::new();
    for id in ids {
        let mut index: HashMap<Exps, usize> = HashMap::new();
        let base = rows.len();
        let mut row_of = |e: &Exps, rows: &mut Vec<BTreeMap<usize, QI>>, rhs: &mut Vec<QI>| -> usize {
            *index.entry(e.clone()).or_insert_with(|| {
                rows.push(BTreeMap::new());
                rhs.push(QI::zero());
                rows.len() - 1
            })
        };
        for (u, p) in id.multipliers.iter().enumerate() {
            let Some(p) = p else { continue };
            for (m, mono) in monos.iter().enumerate() {
                for (e, c) in p.terms() {
                    let ee: Exps = e.iter().zip(mono).map(|(a, b)| a + b).collect();
                    let r = row_of(&ee, &mut rows, &mut rhs);
                    let slot = rows[r].entry(col(u, m)).or_insert_with(QI::zero);
                    *slot = slot.clone() + c.clone();
                }
            }
        }
        for (e, c) in id.rhs.terms() {
            let r = row_of(e, &mut rows, &mut rhs);
            rhs[r] = rhs[r].clone() + c.clone();
        }
        debug_assert!(rows.len() >= base);
    }
    for (coefs, value) in extra {
        let mut row = BTreeMap::new();
        for (u, e, c) in coefs {
            if let Some(m) = monos.iter().position(|x| x == e) {
                row.insert(col(*u, m), c.clone());
            }
        }
        rows.push(row);
        rhs.push(value.clone());
    }
    let mut a = Matrix::zeros(rows.len(), n_unknowns * nm);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row {
            a[(i, *j)] = v.clone();
        }
    }
    let x = a.solve(&rhs)?;
    Some(
        (0..n_unknowns)
            .map(|u| Poly::from_terms(nvars, monos.iter().enumerate().map(|(m, e)| (e.clone(), x[col(u, m)].clone()))))
            .collect(),
    )
}

fn to_poly(e: &Expr, vars: &[String]) -> Result<Poly, ReduceError> {
    let r = to_ratfunc(e, vars).ok_or_else(|| ReduceError::NotPolynomial(e.to_string()))?;
    if !r.den.is_constant() || !r.num.is_polynomial() {
        return Err(ReduceError::NotPolynomial(e.to_string()));
    }
    Ok(r.num.scale(&r.den.constant_value().and_then(|c| c.inv()).expect("nonzero constant")))
}

fn values_at(mono: &Exps, c: &[QI]) -> QI {
    mono.iter().zip(c).fold(QI::one(), |acc, (&k, x)| acc * x.powi(k as i64).expect("nonzero coordinate"))
}

/// A term `G * coef / prod_j H_j^{exponents_j}` of a partial-fraction split.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTerm {
    pub coef: RatFunc,
    pub exponents: Vec<u32>,
}

impl FactorTerm {
    pub fn support(&self) -> Vec<usize> {
        (0..self.exponents.len()).filter(|&j| self.exponents[j] > 0).collect()
    }
}

/// A term of the public partial-fraction split.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetTerm {
    /// Indices into the input factor list.
    pub subset: Vec<usize>,
    pub numerator: Expr,
    pub factors: Vec<(Expr, u32)>,
}

/// `u H_p = sum_{i in S} Q_i H_i` with `u(c) = 1`.
#[derive(Debug, Clone)]
struct Relation {
    p: usize,
    s: Vec<usize>,
    u: Poly,
    q: Vec<Poly>,
}

fn find_relation(h: &[Poly], p: usize, s: &[usize], c: &[QI], max_degree: usize) -> Option<Relation> {
    let n = c.len();
    for deg in 0..=max_degree {
        let mut mult = vec![Some(h[p].clone())];
        mult.extend(s.iter().map(|&i| Some(h[i].neg())));
        let id = Identity { multipliers: mult, rhs: Poly::zero(n) };
        let norm: Vec<(usize, Exps, QI)> = monomials(n, deg).into_iter().map(|e| { let v = values_at(&e, c); (0, e, v) }).collect();
        if let Some(sol) = solve_identities(n, 1 + s.len(), deg, &[id], &[(norm, QI::one())]) {
            return Some(Relation { p, s: s.to_vec(), u: sol[0].clone(), q: sol[1..].to_vec() });
        }
    }
    None
}

fn merge_term(terms: &mut Vec<FactorTerm>, t: FactorTerm) {
    if t.coef.is_zero() {
        return;
    }
    if let Some(x) = terms.iter_mut().find(|x| x.exponents == t.exponents) {
        x.coef = x.coef.add(&t.coef);
    } else {
        terms.push(t);
    }
    terms.retain(|x| !x.coef.is_zero());
}

/// Splits `1 / prod H_j^{a_j}` (all `H_j` vanishing at `c`, any `d` of them
/// transverse) into terms each involving at most `d` factors.
pub fn split_factors(h: &[Poly], mult: &[u32], c: &[QI], max_degree: usize) -> Result<Vec<FactorTerm>, ReduceError> {
    let d = c.len();
    let n = d;
    let mut cache: HashMap<(usize, Vec<usize>), Relation> = HashMap::new();
    let mut done: Vec<FactorTerm> = Vec::new();
    let mut work = vec![FactorTerm { coef: RatFunc::from_poly(Poly::one(n)), exponents: mult.to_vec() }];
    while let Some(t) = work.pop() {
        let supp = t.support();
        if supp.len() <= d {
            merge_term(&mut done, t);
            continue;
        }
        let p = *supp.last().unwrap();
        let rest: Vec<usize> = supp[..supp.len() - 1].to_vec();
        let mut rel = None;
        for s in index_subsets(rest.len(), d) {
            let s: Vec<usize> = s.iter().map(|&i| rest[i]).collect();
            if let Some(r) = cache.get(&(p, s.clone())) {
                rel = Some(r.clone());
                break;
            }
            if let Some(r) = find_relation(h, p, &s, c, max_degree) {
                cache.insert((p, s), r.clone());
                rel = Some(r);
                break;
            }
        }
        let rel = rel.ok_or(ReduceError::NoCertificate(max_degree))?;
        let u_inv = RatFunc::new(Poly::one(n), rel.u.clone());
        let mut next = Vec::new();
        for (i, qi) in rel.s.iter().zip(&rel.q) {
            let mut e = t.exponents.clone();
            e[*i] -= 1;
            e[rel.p] += 1;
            merge_term(&mut next, FactorTerm { coef: t.coef.mul(&RatFunc::from_poly(qi.clone())).mul(&u_inv), exponents: e });
        }
        work.extend(next);
    }
    let one = RatFunc::from_poly(Poly::one(n));
    let total = done.iter().fold(RatFunc::from_poly(Poly::zero(n)), |acc, t| {
        let mut num = Poly::one(n);
        let mut den = Poly::one(n);
        for (j, hj) in h.iter().enumerate() {
            let diff = mult[j] as i64 - t.exponents[j] as i64;
            if diff > 0 {
                num = num.mul(&hj.pow(diff as u32));
            } else if diff < 0 {
                den = den.mul(&hj.pow((-diff) as u32));
            }
        }
        acc.add(&t.coef.mul(&RatFunc::new(num, den)))
    });
    if total != one {
        return Err(ReduceError::IdentityCheck);
    }
    Ok(done)
}

/// Partial-fraction split of `G / prod H_j^{a_j}` into terms whose factor
/// sets have at most `d` elements.
pub fn reduce_factors(
    vars: &[String],
    numerator: &Expr,
    factors: &[(Expr, u32)],
    c: &[QI],
    max_degree: usize,
) -> Result<Vec<SubsetTerm>, ReduceError> {
    let h: Vec<Poly> = factors.iter().map(|(f, _)| to_poly(f, vars)).collect::<Result<_, _>>()?;
    let mult: Vec<u32> = factors.iter().map(|(_, a)| *a).collect();
    let atoms: Vec<Expr> = vars.iter().map(|v| Expr::var(v)).collect();
    let terms = split_factors(&h, &mult, c, max_degree)?;
    Ok(terms
        .into_iter()
        .map(|t| {
            let subset = t.support();
            let coef = crate::expr::from_ratfunc(&t.coef, &atoms);
            SubsetTerm {
                numerator: if coef.is_one() { numerator.clone() } else { numerator.mul(&coef) },
                factors: subset.iter().map(|&j| (factors[j].0.clone(), t.exponents[j])).collect(),
                subset,
            }
        })
        .collect())
}

/// `1 = Q0 H_j + V . grad H_j` and `V . grad H_i = W_i H_i` for `i != j`.
#[derive(Debug, Clone)]
struct PowerCertificate {
    q0: Poly,
    v: Vec<Poly>,
    /// Indexed like the factor list; the entry for `j` is zero.
    w: Vec<Poly>,
}

fn power_certificate(h: &[Poly], j: usize, max_degree: usize) -> Option<PowerCertificate> {
    let d = h[j].nvars();
    let r = h.len();
    // unknowns: Q0, V_1..V_d, then W_i for i != j
    let others: Vec<usize> = (0..r).filter(|&i| i != j).collect();
    let nu = 1 + d + others.len();
    for deg in 0..=max_degree {
        let mut ids = Vec::new();
        let mut m = vec![None; nu];
        m[0] = Some(h[j].clone());
        for v in 0..d {
            m[1 + v] = Some(h[j].diff(v));
        }
        ids.push(Identity { multipliers: m, rhs: Poly::one(d) });
        for (oi, &i) in others.iter().enumerate() {
            let mut m = vec![None; nu];
            for v in 0..d {
                m[1 + v] = Some(h[i].diff(v));
            }
            m[1 + d + oi] = Some(h[i].neg());
            ids.push(Identity { multipliers: m, rhs: Poly::zero(d) });
        }
        if let Some(sol) = solve_identities(d, nu, deg, &ids, &[]) {
            let mut w = vec![Poly::zero(d); r];
            for (oi, &i) in others.iter().enumerate() {
                w[i] = sol[1 + d + oi].clone();
            }
            return Some(PowerCertificate { q0: sol[0].clone(), v: sol[1..1 + d].to_vec(), w });
        }
    }
    None
}

/// `coef * exp(exponent)`; `coef` lives in `x_1..x_d, alpha_1..alpha_d`.
#[derive(Debug, Clone, PartialEq)]
struct Group {
    coef: Poly,
    exponent: Poly,
}

type NForm = BTreeMap<u32, Vec<Group>>;

fn add_group(form: &mut NForm, m: u32, g: Group) {
    if g.coef.is_zero() {
        return;
    }
    let list = form.entry(m).or_default();
    if let Some(x) = list.iter_mut().find(|x| x.exponent == g.exponent) {
        x.coef = x.coef.add(&g.coef);
    } else {
        list.push(g);
    }
    list.retain(|x| !x.coef.is_zero());
    if list.is_empty() {
        form.remove(&m);
    }
}

/// Numerator polynomial in `n` after removing repeated factors.
#[derive(Debug, Clone, PartialEq)]
pub struct NPolyNumerator {
    pub vars: Vec<String>,
    /// Symbols standing for the direction entries `alpha_1..alpha_d`.
    pub alpha_vars: Vec<String>,
    pub slices: Vec<Slice>,
    /// The (now simple) factors.
    pub factors: Vec<Expr>,
    /// Factors kept at their original powers.
    pub passive: Vec<(Expr, u32)>,
    pub steps: usize,
}

impl NPolyNumerator {
    /// Slices with the direction symbols replaced by numbers.
    pub fn specialize(&self, alpha: &[i64]) -> Vec<Slice> {
        let map: HashMap<String, Expr> = self.alpha_vars.iter().cloned().zip(alpha.iter().map(|&a| Expr::int(a))).collect();
        let mut out: Vec<Slice> = Vec::new();
        for s in &self.slices {
            let e = s.numerator.substitute(&map);
            if !e.is_zero() {
                out.push(Slice { n_power: s.n_power, numerator: e });
            }
        }
        out
    }

    /// Product of the passive factors.
    pub fn passive_product(&self) -> Expr {
        Expr::product(self.passive.iter().map(|(f, a)| f.powi(*a as i64)).collect())
    }

    pub fn n_degree(&self) -> u32 {
        self.slices.iter().map(|s| s.n_power).max().unwrap_or(0)
    }
}

/// Names `alpha1..alphad`, adjusted to avoid clashing with `vars`.
pub fn alpha_names(vars: &[String]) -> Vec<String> {
    let mut prefix = "alpha".to_string();
    loop {
        let names: Vec<String> = (1..=vars.len()).map(|i| format!("{prefix}{i}")).collect();
        if names.iter().all(|n| !vars.contains(n)) {
            return names;
        }
        prefix.insert(0, '_');
    }
}

fn initial_form(numerator: &Expr, vars: &[String]) -> Result<NForm, ReduceError> {
    let d = vars.len();
    let groups = exp_rational_form(numerator, vars).ok_or(ReduceError::UnsupportedNumerator)?;
    let mut form = NForm::new();
    for g in groups {
        let coef = if g.coef.den.num_terms() == 1 {
            let (e, c) = g.coef.den.leading().unwrap();
            let neg: Exps = e.iter().map(|k| -k).collect();
            g.coef.num.mul_monomial(&neg, &c.inv().expect("nonzero"))
        } else {
            return Err(ReduceError::UnsupportedNumerator);
        };
        add_group(&mut form, 0, Group { coef: coef.extend_vars(d), exponent: g.exponent });
    }
    Ok(form)
}

/// One integration-by-parts step lowering the power `b_j` of factor `j` by one.
fn power_step(form: &NForm, cert: &PowerCertificate, b: &[u32], j: usize) -> NForm {
    let d = cert.v.len();
    let ext = |p: &Poly| p.extend_vars(d);
    let q0 = ext(&cert.q0);
    let v: Vec<Poly> = cert.v.iter().map(ext).collect();
    let inv = QI::frac(1, b[j] as i64 - 1);
    let mut w_sum = Poly::zero(2 * d);
    for (i, wi) in cert.w.iter().enumerate() {
        if i != j && b[i] > 0 {
            w_sum = w_sum.add(&ext(wi).scale(&QI::int(b[i] as i64)));
        }
    }
    let mut out = NForm::new();
    for (&m, groups) in form {
        for g in groups {
            let p = ext(&g.exponent);
            let r = &g.coef;
            let mut same = r.mul(&q0);
            let mut acc = Poly::zero(2 * d);
            let mut up = Poly::zero(2 * d);
            for mm in 0..d {
                let rv = r.mul(&v[mm]);
                acc = acc.add(&rv.diff(mm)).add(&rv.mul(&p.diff(mm)));
                let mut e = vec![0; 2 * d];
                e[mm] = -1;
                let over_x = rv.mul_monomial(&e, &QI::one());
                acc = acc.sub(&over_x);
                up = up.sub(&over_x.mul(&Poly::var(2 * d, d + mm)));
            }
            acc = acc.sub(&r.mul(&w_sum));
            same = same.add(&acc.scale(&inv));
            add_group(&mut out, m, Group { coef: same, exponent: g.exponent.clone() });
            add_group(&mut out, m + 1, Group { coef: up.scale(&inv), exponent: g.exponent.clone() });
        }
    }
    out
}

/// Rewrites `G / prod H_j^{b_j}` so every factor is simple; the new numerator
/// is a polynomial in `n` whose coefficients are Laurent in the variables and
/// polynomial in the direction symbols.
pub fn reduce_powers(vars: &[String], numerator: &Expr, factors: &[(Expr, u32)], max_degree: usize) -> Result<NPolyNumerator, ReduceError> {
    reduce_powers_with(vars, numerator, factors, &[], max_degree)
}

/// As [`reduce_powers`], with extra `passive` factors whose powers are left
/// alone (typically those not vanishing at the point).
pub fn reduce_powers_with(
    vars: &[String],
    numerator: &Expr,
    factors: &[(Expr, u32)],
    passive: &[(Expr, u32)],
    max_degree: usize,
) -> Result<NPolyNumerator, ReduceError> {
    let d = vars.len();
    let all: Vec<&(Expr, u32)> = factors.iter().chain(passive).collect();
    let h: Vec<Poly> = all.iter().map(|(f, _)| to_poly(f, vars)).collect::<Result<_, _>>()?;
    let mut b: Vec<u32> = all.iter().map(|(_, a)| *a).collect();
    let mut form = initial_form(numerator, vars)?;
    let mut certs: HashMap<usize, PowerCertificate> = HashMap::new();
    let mut steps = 0;
    while let Some(j) = (0..factors.len()).filter(|&j| b[j] > 1).max_by_key(|&j| (b[j], std::cmp::Reverse(j))) {
        if let std::collections::hash_map::Entry::Vacant(e) = certs.entry(j) {
            let c = power_certificate(&h, j, max_degree).ok_or(ReduceError::NoCertificate(max_degree))?;
            e.insert(c);
        }
        form = power_step(&form, &certs[&j], &b, j);
        b[j] -= 1;
        steps += 1;
    }
    let alpha_vars = alpha_names(vars);
    let atoms: Vec<Expr> = vars.iter().chain(&alpha_vars).map(|v| Expr::var(v)).collect();
    let slices = form
        .iter()
        .map(|(&m, groups)| {
            let terms = groups
                .iter()
                .map(|g| {
                    let c = poly_to_expr(&g.coef, &atoms);
                    if g.exponent.is_zero() {
                        c
                    } else {
                        c.mul(&Expr::exp(poly_to_expr(&g.exponent, &atoms[..d])))
                    }
                })
                .collect();
            Slice { n_power: m, numerator: Expr::sum(terms) }
        })
        .collect();
    Ok(NPolyNumerator {
        vars: vars.to_vec(),
        alpha_vars,
        slices,
        factors: factors.iter().map(|(f, _)| f.clone()).collect(),
        passive: passive.to_vec(),
        steps,
    })
}

/// Default ansatz degree cap: the largest factor degree plus two.
pub fn default_max_degree(vars: &[String], factors: &[(Expr, u32)]) -> usize {
    let deg = factors.iter().filter_map(|(f, _)| to_poly(f, vars).ok()).map(|p| p.total_degree().max(0) as usize).max().unwrap_or(1);
    deg + 2
}

#[cfg(test)]
mod tests;

//! Problem data, classification of candidate points, critical-cone weights and
//! heuristic minimality checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{parse, to_ratfunc, EvalError, Expr, ParseError};
use crate::linalg::Matrix;
use crate::number::{Q, QI};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("parse error in {what}: {err}")]
    Parse { what: String, err: ParseError },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point has a zero coordinate")]
    ZeroCoordinate,
    #[error("no denominator factor vanishes at the point")]
    NotOnVariety,
    #[error("could not evaluate exactly at the point: {0}")]
    Eval(String),
    #[error("no coordinate k with c_k dH_j/dx_k(c) nonzero for every vanishing factor")]
    NoDistinguishedCoordinate,
    #[error("vanishing factors are not transverse at the point")]
    NotTransversal,
    #[error("direction is not in the critical cone of the point")]
    NotInCone,
    #[error("point is not strictly minimal: {0}")]
    NotMinimal(String),
}

impl From<EvalError> for GeometryError {
    fn from(e: EvalError) -> Self {
        GeometryError::Eval(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub expr: Expr,
    pub multiplicity: u32,
}

/// A factored generating function `G / prod H_j^{a_j}` with a ray direction.
#[derive(Debug, Clone)]
pub struct Problem {
    pub variables: Vec<String>,
    pub numerator: Expr,
    pub factors: Vec<Factor>,
    pub alpha: Vec<i64>,
    pub points: Vec<Vec<QI>>,
    pub order: usize,
}

impl Problem {
    pub fn new(
        variables: Vec<String>,
        numerator: Expr,
        factors: Vec<Factor>,
        alpha: Vec<i64>,
        points: Vec<Vec<QI>>,
        order: usize,
    ) -> Result<Problem, ProblemError> {
        let p = Problem { variables, numerator, factors, alpha, points, order };
        p.validate()?;
        Ok(p)
    }

    /// Builds a problem from expression strings.
    pub fn parse(
        variables: &[&str],
        numerator: &str,
        factors: &[(&str, u32)],
        alpha: &[i64],
        points: Vec<Vec<QI>>,
        order: usize,
    ) -> Result<Problem, ProblemError> {
        let vars: Vec<String> = variables.iter().map(|s| s.to_string()).collect();
        let g = parse(numerator, &vars).map_err(|err| ProblemError::Parse { what: "numerator".into(), err })?;
        let mut fs = Vec::new();
        for (i, (text, a)) in factors.iter().enumerate() {
            let e = parse(text, &vars).map_err(|err| ProblemError::Parse { what: format!("factor {}", i + 1), err })?;
            fs.push(Factor { expr: e, multiplicity: *a });
        }
        Problem::new(vars, g, fs, alpha.to_vec(), points, order)
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let d = self.dim();
        if d < 2 {
            return Err(ProblemError::Invalid("at least two variables are required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &self.variables {
            if !seen.insert(v) {
                return Err(ProblemError::Invalid(format!("duplicate variable '{v}'")));
            }
        }
        if self.alpha.len() != d {
            return Err(ProblemError::Invalid(format!("alpha has length {} but there are {d} variables", self.alpha.len())));
        }
        if self.alpha.iter().any(|&a| a <= 0) {
            return Err(ProblemError::Invalid("alpha entries must be positive integers".into()));
        }
        if self.factors.is_empty() {
            return Err(ProblemError::Invalid("at least one denominator factor is required".into()));
        }
        if self.factors.iter().any(|f| f.multiplicity == 0) {
            return Err(ProblemError::Invalid("multiplicities must be positive".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != d {
                return Err(ProblemError::Invalid(format!("point {} has length {} but there are {d} variables", i + 1, p.len())));
            }
        }
        if self.order == 0 {
            return Err(ProblemError::Invalid("order must be at least 1".into()));
        }
        Ok(())
    }

    /// The full denominator `prod H_j^{a_j}` as an expression.
    pub fn denominator(&self) -> Expr {
        Expr::product(self.factors.iter().map(|f| f.expr.powi(f.multiplicity as i64)).collect())
    }

    /// The generating function `G/H` as an expression.
    pub fn function(&self) -> Expr {
        self.numerator.div(&self.denominator())
    }
}

/// Local data of a candidate point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointClass {
    pub point: Vec<QI>,
    /// Indices (into the problem's factor list) of the factors vanishing at the point.
    pub active: Vec<usize>,
    pub r: usize,
    pub k: usize,
    /// Row j: `(c_1 dH_j/dx_1(c), ..., c_d dH_j/dx_d(c))` for the j-th active factor.
    pub jlog: Matrix<QI>,
    pub is_multiple: bool,
    pub transversal: bool,
    pub all_coords_nonzero: bool,
    /// Whether column `k` of `jlog` has no zero entry. Only required when `r < d`;
    /// otherwise cone weights are normalized by row sums.
    pub distinguished: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData {
    pub s_star: Vec<QI>,
    pub theta_star: Vec<QI>,
    pub k: usize,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All size-`k` subsets of `0..n` in lexicographic order.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(n, k)
}

/// Logarithmic gradient row of `h` at `c`.
pub fn log_gradient(h: &Expr, vars: &[String], c: &[QI]) -> Result<Vec<QI>, GeometryError> {
    vars.iter()
        .zip(c)
        .map(|(v, cm)| Ok(h.diff(v).eval_exact(vars, c)? * cm.clone()))
        .collect()
}

pub fn classify_point(problem: &Problem, c: &[QI]) -> Result<PointClass, GeometryError> {
    let d = problem.dim();
    let vars = &problem.variables;
    let all_coords_nonzero = c.iter().all(|x| !x.is_zero());
    if !all_coords_nonzero {
        return Err(GeometryError::ZeroCoordinate);
    }
    let mut active = Vec::new();
    for (j, f) in problem.factors.iter().enumerate() {
        if f.expr.eval_exact(vars, c)?.is_zero() {
            active.push(j);
        }
    }
    if active.is_empty() {
        return Err(GeometryError::NotOnVariety);
    }
    let r = active.len();
    let rows: Vec<Vec<QI>> =
        active.iter().map(|&j| log_gradient(&problem.factors[j].expr, vars, c)).collect::<Result<_, _>>()?;
    let jlog = Matrix::from_rows(rows);

    let mut best: Option<(usize, Q)> = None;
    for kk in 0..d {
        let col_min = (0..r).map(|j| jlog[(j, kk)].norm_sqr()).min().unwrap();
        if col_min == Q::from_integer(0.into()) {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| &col_min >= b) {
            best = Some((kk, col_min));
        }
    }
    let (k, distinguished) = match best {
        Some((k, _)) => (k, true),
        None if r >= d => {
            let nonzero = |kk: usize| (0..r).filter(|&j| !jlog[(j, kk)].is_zero()).count();
            ((0..d).rev().max_by_key(|&kk| nonzero(kk)).unwrap(), false)
        }
        None => return Err(GeometryError::NoDistinguishedCoordinate),
    };

    let transversal = if r <= d {
        jlog.rank() == r
    } else {
        subsets(r, d).iter().all(|s| Matrix::from_rows(s.iter().map(|&j| jlog.row(j).to_vec()).collect()).rank() == d)
    };
    if !transversal {
        return Err(GeometryError::NotTransversal);
    }
    Ok(PointClass { point: c.to_vec(), active, r, k, jlog, is_multiple: true, transversal, all_coords_nonzero, distinguished })
}

fn gamma_pivot(pc: &PointClass, j: usize) -> QI {
    if pc.distinguished {
        pc.jlog[(j, pc.k)].clone()
    } else {
        pc.jlog.row(j).iter().fold(QI::zero(), |a, b| a + b.clone())
    }
}

/// Normalized logarithmic gradient `gamma_j = Jlog_j / Jlog_{j,k}` (or divided
/// by the row sum when there is no distinguished coordinate).
pub fn gamma(pc: &PointClass, j: usize) -> Vec<QI> {
    let piv = gamma_pivot(pc, j).inv().expect("nonzero normalization");
    pc.jlog.row(j).iter().map(|x| x.clone() * &piv).collect()
}

/// Solves `alpha / alpha_k = sum_j s_j gamma_j` for simplex weights.
pub fn solve_critical_weights(pc: &PointClass, alpha: &[i64]) -> Result<CriticalData, GeometryError> {
    let d = pc.point.len();
    let r = pc.r;
    let ak: i64 = if pc.distinguished { alpha[pc.k] } else { alpha.iter().sum() };
    if (0..r).any(|j| gamma_pivot(pc, j).is_zero()) {
        return Err(GeometryError::NoDistinguishedCoordinate);
    }
    let gammas: Vec<Vec<QI>> = (0..r).map(|j| gamma(pc, j)).collect();
    let a = Matrix::from_rows((0..d).map(|m| (0..r).map(|j| gammas[j][m].clone()).collect()).collect());
    let rhs: Vec<QI> = alpha.iter().map(|&x| QI::frac(x, ak)).collect();
    if r > d || a.rank() < r {
        return Err(GeometryError::NotTransversal);
    }
    let s = a.solve(&rhs).ok_or(GeometryError::NotInCone)?;
    if s.iter().any(|x| !x.is_real() || x.re() < Q::from_integer(0.into())) {
        return Err(GeometryError::NotInCone);
    }
    let mut theta = vec![QI::zero(); d - 1];
    theta.extend(s[..r - 1].iter().cloned());
    Ok(CriticalData { s_star: s, theta_star: theta, k: pc.k })
}

/// Outcome of the sampling test for strict minimality.
#[derive(Debug, Clone, PartialEq)]
pub enum Certification {
    CertifiedHeuristically { samples: usize },
    Counterexample { factor: usize, w: Vec<Complex64>, y: Complex64 },
    Inconclusive(String),
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// Multiplies the polydisc radii; values above 1 test a larger polydisc.
    pub radius_scale: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { samples: 2000, seed: 0x5eed, radius_scale: 1.0 }
    }
}

fn eval_poly_c64(p: &Poly, x: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (e, c) in p.terms() {
        let mut t = c.to_c64();
        for (v, &k) in e.iter().enumerate() {
            if k != 0 {
                t *= x[v].powi(k);
            }
        }
        acc += t;
    }
    acc
}

/// Coefficients in the variable `k` of the numerator polynomial of `h`.
fn coefficients_in(h: &Expr, vars: &[String], k: usize) -> Option<Vec<Poly>> {
    let rf = to_ratfunc(h, vars)?;
    let num = rf.num;
    if !num.is_polynomial() {
        return None;
    }
    let deg = num.degree_in(k).max(0) as usize;
    let n = vars.len();
    let mut out = vec![Poly::zero(n); deg + 1];
    for (e, c) in num.terms() {
        let mut e2 = e.clone();
        let p = e2[k] as usize;
        e2[k] = 0;
        out[p].add_term(e2, c.clone());
    }
    Some(out)
}

/// All complex roots of a polynomial given by coefficients (low to high),
/// by the Aberth-Ehrlich iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let mut cs = coeffs.to_vec();
    while cs.len() > 1 && cs.last().unwrap().norm() == 0.0 {
        cs.pop();
    }
    let n = cs.len() - 1;
    if n == 0 {
        return Some(vec![]);
    }
    let lead = cs[n];
    let a: Vec<Complex64> = cs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + a[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|i| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / n as f64)).collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in a.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.is_finite() {
                return None;
            }
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-14 {
            return Some(z);
        }
    }
    None
}

/// Samples points on the torus through `c` (and shrunken copies) and looks for
/// zeros of the denominator inside the closed polydisc.
pub fn certify_strictly_minimal(problem: &Problem, pc: &PointClass, opts: &CertifyOptions) -> Certification {
    let vars = &problem.variables;
    let d = problem.dim();
    let k = pc.k;
    let mut polys = Vec::new();
    for f in &problem.factors {
        match coefficients_in(&f.expr, vars, k) {
            Some(p) => polys.push(p),
            None => return Certification::Inconclusive("denominator factor is not polynomial".into()),
        }
    }
    let c64: Vec<Complex64> = pc.point.iter().map(|x| x.to_c64()).collect();
    let mods: Vec<f64> = c64.iter().map(|x| x.norm() * opts.radius_scale).collect();
    let ck = mods[k];
    let eps = 1e-9;
    let results: Vec<Result<Option<Certification>, String>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let rho: f64 = if i % 2 == 0 { 1.0 } else { rng.gen_range(0.05..1.0) };
            let mut w = vec![Complex64::new(0.0, 0.0); d];
            let mut far = rho < 1.0 - 1e-12;
            for m in 0..d {
                if m == k {
                    continue;
                }
                let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                let base_arg = c64[m].arg();
                w[m] = Complex64::from_polar(rho * mods[m], base_arg + theta);
                if theta.abs() > 1e-3 {
                    far = true;
                }
            }
            for (fi, coeffs) in polys.iter().enumerate() {
                let cy: Vec<Complex64> = coeffs.iter().map(|p| eval_poly_c64(p, &w)).collect();
                let roots = polynomial_roots(&cy).ok_or_else(|| "root finding did not converge".to_string())?;
                for y in roots {
                    let m = y.norm();
                    if m < ck * (1.0 - eps) || (far && m <= ck * (1.0 + eps)) {
                        let mut wfull = w.clone();
                        wfull[k] = y;
                        return Ok(Some(Certification::Counterexample { factor: fi, w: wfull, y }));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    let mut inconclusive = None;
    for r in results {
        match r {
            Ok(Some(cx)) => return cx,
            Ok(None) => {}
            Err(e) => inconclusive = Some(e),
        }
    }
    match inconclusive {
        Some(e) => Certification::Inconclusive(e),
        None => Certification::CertifiedHeuristically { samples: opts.samples },
    }
}

/// Best rational approximation with bounded denominator (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Q {
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    for _ in 0..40 {
        let a = v.floor();
        let ai = a as i64;
        let h2 = ai.saturating_mul(h1).saturating_add(h0);
        let k2 = ai.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Q::new(h1.into(), k1.max(1).into());
    if neg {
        -r
    } else {
        r
    }
}

/// Heuristic search for critical points in the positive orthant: Newton's
/// method on `H_j = 0` together with `sum_j lambda_j Jlog_j = alpha`, from
/// seeded random starts. Solutions are rationalized and kept only if they lie
/// exactly on the variety and pass classification.
pub fn find_points(problem: &Problem, max_active: usize, starts: usize, seed: u64) -> Vec<Vec<QI>> {
    let vars = &problem.variables;
    let d = problem.dim();
    let polys: Vec<Poly> = match problem.factors.iter().map(|f| to_ratfunc(&f.expr, vars).map(|r| r.num)).collect() {
        Some(p) => p,
        None => return vec![],
    };
    let grads: Vec<Vec<Poly>> = polys.iter().map(|p| (0..d).map(|m| p.diff(m)).collect()).collect();
    let alpha: Vec<f64> = problem.alpha.iter().map(|&a| a as f64).collect();
    let mut found: Vec<Vec<QI>> = Vec::new();
    for r in 1..=max_active.min(d).min(polys.len()) {
        for subset in subsets(polys.len(), r) {
            let sols: Vec<Vec<f64>> = (0..starts)
                .into_par_iter()
                .filter_map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64 * 7919));
                    let mut z: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..2.0)).collect();
                    z.extend((0..r).map(|_| rng.gen_range(-2.0..2.0)));
                    newton_critical(&polys, &grads, &subset, &alpha, z)
                })
                .collect();
            for s in sols {
                if s[..d].iter().any(|&x| x <= 0.0) {
                    continue;
                }
                let cand: Vec<QI> = s[..d].iter().map(|&x| QI::real(rationalize(x, 1_000_000))).collect();
                if found.contains(&cand) {
                    continue;
                }
                let on = subset.iter().all(|&j| polys[j].eval_qi(&cand).is_some_and(|v| v.is_zero()));
                if !on {
                    continue;
                }
                if let Ok(pc) = classify_point(problem, &cand) {
                    if pc.r <= d && solve_critical_weights(&pc, &problem.alpha).is_ok() {
                        found.push(cand);
                    }
                }
            }
        }
    }
    found
}

fn newton_critical(polys: &[Poly], grads: &[Vec<Poly>], subset: &[usize], alpha: &[f64], mut z: Vec<f64>) -> Option<Vec<f64>> {
    let d = alpha.len();
    let r = subset.len();
    let n = d + r;
    let residual = |z: &[f64]| -> Vec<f64> {
        let x: Vec<Complex64> = z[..d].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut out = Vec::with_capacity(n);
        for &j in subset {
            out.push(eval_poly_c64(&polys[j], &x).re);
        }
        for m in 0..d {
            let mut s = -alpha[m];
            for (jj, &j) in subset.iter().enumerate() {
                s += z[d + jj] * z[m] * eval_poly_c64(&grads[j][m], &x).re;
            }
            out.push(s);
        }
        out
    };
    for _ in 0..100 {
        let f = residual(&z);
        let norm: f64 = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return None;
        }
        if norm < 1e-13 {
            return Some(z);
        }
        let mut jac = vec![vec![0.0; n]; n];
        for c in 0..n {
            let h = 1e-7 * z[c].abs().max(1.0);
            let mut zp = z.clone();
            zp[c] += h;
            let fp = residual(&zp);
            for rr in 0..n {
                jac[rr][c] = (fp[rr] - f[rr]) / h;
            }
        }
        let step = solve_dense(jac, f)?;
        for (zi, si) in z.iter_mut().zip(step) {
            *zi -= si;
        }
    }
    None
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            let (top, rest) = a.split_at_mut(i);
            for (x, y) in rest[0][c..n].iter_mut().zip(&top[c][c..n]) {
                *x -= f * y;
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests;

//! Exact Maclaurin coefficients from the recurrence `H F = G`, and tables
//! comparing them with truncated expansions.

use thiserror::Error;

use crate::expansion::AsymptoticExpansion;
use crate::expr::{exp_rational_form, to_ratfunc, Expr};
use crate::geometry::Problem;
use crate::number::{bf_to_q, render_significant, BigC, QI};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("denominator vanishes at the origin")]
    ZeroConstantTerm,
    #[error("cannot expand {0} as a power series")]
    NotExpandable(String),
    #[error("index {index:?} lies outside the table box {dims:?}")]
    BoxTooSmall { index: Vec<usize>, dims: Vec<usize> },
}

/// Dense array over the box `0 <= nu_m <= dims_m`, last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub dims: Vec<usize>,
    pub data: Vec<QI>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for m in (0..dims.len().saturating_sub(1)).rev() {
        s[m] = s[m + 1] * (dims[m + 1] + 1);
    }
    s
}

fn unflatten(mut i: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for m in (0..dims.len()).rev() {
        out[m] = i % (dims[m] + 1);
        i /= dims[m] + 1;
    }
    out
}

impl CoefficientTable {
    fn zeros(dims: &[usize]) -> Self {
        let n = dims.iter().map(|d| d + 1).product();
        CoefficientTable { dims: dims.to_vec(), data: vec![QI::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn index(&self, nu: &[usize]) -> Option<usize> {
        if nu.len() != self.dims.len() || nu.iter().zip(&self.dims).any(|(a, b)| a > b) {
            return None;
        }
        Some(nu.iter().zip(strides(&self.dims)).map(|(a, s)| a * s).sum())
    }

    pub fn get(&self, nu: &[usize]) -> Option<&QI> {
        self.index(nu).map(|i| &self.data[i])
    }

    /// `self * p`, truncated to the box.
    fn mul_poly(&self, p: &Poly) -> CoefficientTable {
        let mut out = CoefficientTable::zeros(&self.dims);
        let st = strides(&self.dims);
        for (e, c) in p.terms() {
            let shift: Vec<usize> = e.iter().map(|&k| k as usize).collect();
            if shift.iter().zip(&self.dims).any(|(a, b)| a > b) {
                continue;
            }
            let off: usize = shift.iter().zip(&st).map(|(a, s)| a * s).sum();
            for (i, v) in self.data.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let nu = unflatten(i, &self.dims);
                if nu.iter().zip(&shift).zip(&self.dims).all(|((a, b), d)| a + b <= *d) {
                    let j = i + off;
                    out.data[j] = out.data[j].clone() + v.clone() * c.clone();
                }
            }
        }
        out
    }

    fn add(&mut self, o: &CoefficientTable) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a = a.clone() + b.clone();
        }
    }
}

fn polynomial(e: &Expr, vars: &[String]) -> Result<Poly, OracleError> {
    let r = to_ratfunc(e, vars).ok_or_else(|| OracleError::NotExpandable(e.to_string()))?;
    if !r.den.is_constant() || !r.num.is_polynomial() {
        return Err(OracleError::NotExpandable(e.to_string()));
    }
    Ok(r.num.scale(&r.den.constant_value().and_then(|c| c.inv()).expect("nonzero constant")))
}

/// Truncated series of `exp(p)` with `p(0) = 0`, from `deg(nu) E_nu = sum_mu deg(mu) p_mu E_{nu-mu}`.
fn exp_series(p: &Poly, dims: &[usize]) -> CoefficientTable {
    let mut out = CoefficientTable::zeros(dims);
    let st = strides(dims);
    out.data[0] = QI::one();
    let terms: Vec<(Vec<usize>, usize, QI)> = p
        .terms()
        .map(|(e, c)| {
            let mu: Vec<usize> = e.iter().map(|&k| k as usize).collect();
            let deg = mu.iter().sum::<usize>();
            (mu, deg, c.clone())
        })
        .filter(|(_, deg, _)| *deg > 0)
        .collect();
    for i in 1..out.data.len() {
        let nu = unflatten(i, dims);
        let total: usize = nu.iter().sum();
        let mut acc = QI::zero();
        for (mu, deg, c) in &terms {
            if mu.iter().zip(&nu).all(|(a, b)| a <= b) {
                let off: usize = mu.iter().zip(&st).map(|(a, s)| a * s).sum();
                acc = acc + out.data[i - off].clone() * c.clone() * QI::int(*deg as i64);
            }
        }
        out.data[i] = acc * QI::frac(1, total as i64);
    }
    out
}

/// Series of a numerator `sum_i R_i exp(P_i)` with polynomial `R_i` and `P_i(0) = 0`.
fn numerator_series(g: &Expr, vars: &[String], dims: &[usize]) -> Result<CoefficientTable, OracleError> {
    let groups = exp_rational_form(g, vars).ok_or_else(|| OracleError::NotExpandable(g.to_string()))?;
    let mut out = CoefficientTable::zeros(dims);
    let origin = vec![QI::zero(); vars.len()];
    for grp in groups {
        if !grp.coef.den.is_constant() || !grp.coef.num.is_polynomial() {
            return Err(OracleError::NotExpandable(g.to_string()));
        }
        let r = grp.coef.num.scale(&grp.coef.den.constant_value().and_then(|c| c.inv()).expect("nonzero constant"));
        if !grp.exponent.eval_qi(&origin).is_some_and(|v| v.is_zero()) {
            return Err(OracleError::NotExpandable(format!("exp of a polynomial with nonzero constant term in {g}")));
        }
        out.add(&exp_series(&grp.exponent, dims).mul_poly(&r));
    }
    Ok(out)
}

/// Exact coefficients of `G/H` on the box `0 <= nu <= dims`.
pub fn taylor_table(numerator: &Expr, denominator: &Expr, vars: &[String], dims: &[usize]) -> Result<CoefficientTable, OracleError> {
    let h = polynomial(denominator, vars)?;
    let h0 = h.coeff(&vec![0; vars.len()]);
    let h0_inv = h0.inv().ok_or(OracleError::ZeroConstantTerm)?;
    let g = numerator_series(numerator, vars, dims)?;
    let st = strides(dims);
    let terms: Vec<(Vec<usize>, usize, QI)> = h
        .terms()
        .filter(|(e, _)| e.iter().any(|&k| k != 0))
        .map(|(e, c)| {
            let mu: Vec<usize> = e.iter().map(|&k| k as usize).collect();
            let off = mu.iter().zip(&st).map(|(a, s)| a * s).sum();
            (mu, off, c.clone())
        })
        .collect();
    let mut f = CoefficientTable::zeros(dims);
    for i in 0..f.data.len() {
        let nu = unflatten(i, dims);
        let mut acc = g.data[i].clone();
        for (mu, off, c) in &terms {
            if mu.iter().zip(&nu).all(|(a, b)| a <= b) {
                acc = acc - f.data[i - off].clone() * c.clone();
            }
        }
        f.data[i] = acc * h0_inv.clone();
    }
    Ok(f)
}

/// Table for a problem's `G / prod H_j^{a_j}`.
pub fn problem_table(problem: &Problem, dims: &[usize]) -> Result<CoefficientTable, OracleError> {
    taylor_table(&problem.numerator, &problem.denominator(), &problem.variables, dims)
}

/// Box large enough for `n alpha` with `n <= n_max`.
pub fn ray_box(alpha: &[i64], n_max: u64) -> Vec<usize> {
    alpha.iter().map(|&a| a as usize * n_max as usize).collect()
}

/// Largest `|sum_mu H_mu F_{nu-mu} - G_nu|` over the box, as an exact number.
pub fn recurrence_residual(table: &CoefficientTable, numerator: &Expr, denominator: &Expr, vars: &[String]) -> Result<QI, OracleError> {
    let h = polynomial(denominator, vars)?;
    let g = numerator_series(numerator, vars, &table.dims)?;
    let hf = table.mul_poly(&h);
    let mut worst = QI::zero();
    for (a, b) in hf.data.iter().zip(&g.data) {
        let r = a.clone() - b.clone();
        if r.norm_sqr() > worst.norm_sqr() {
            worst = r;
        }
    }
    Ok(worst)
}

pub fn ray_coefficient(table: &CoefficientTable, alpha: &[i64], n: u64) -> Result<QI, OracleError> {
    let nu: Vec<usize> = alpha.iter().map(|&a| a as usize * n as usize).collect();
    table.get(&nu).cloned().ok_or(OracleError::BoxTooSmall { index: nu, dims: table.dims.clone() })
}

/// One row of a comparison table. Values are scaled by `growth^{-n}` of the
/// first expansion, as in the usual presentation.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n: u64,
    pub truth: QI,
    pub truth_scaled: BigC,
    /// `approx[k-1]`: sum of the first `k` terms.
    pub approx: Vec<BigC>,
    /// `(truth - approx) / truth`.
    pub rel_err: Vec<BigC>,
}

/// Sum of the expansions' first `terms` terms at `n`, divided by `base^n`.
pub fn scaled_approximation(expansions: &[AsymptoticExpansion], base: &QI, n: u64, terms: usize) -> BigC {
    let mut acc = BigC::zero();
    for e in expansions {
        let ratio = e.growth.div(base).expect("nonzero growth").powi(n as i64).expect("nonzero ratio");
        acc = acc + BigC::from_qi(&ratio) * &e.partial_sum(n, terms);
    }
    acc
}

pub fn error_table(
    expansions: &[AsymptoticExpansion],
    table: &CoefficientTable,
    alpha: &[i64],
    ns: &[u64],
    terms: usize,
) -> Result<Vec<TableRow>, OracleError> {
    let base = expansions.first().map(|e| e.growth.clone()).unwrap_or_else(QI::one);
    ns.iter()
        .map(|&n| {
            let truth = ray_coefficient(table, alpha, n)?;
            let scale = base.powi(-(n as i64)).expect("nonzero growth");
            let truth_scaled = BigC::from_qi(&(truth.clone() * scale));
            let approx: Vec<BigC> = (1..=terms).map(|k| scaled_approximation(expansions, &base, n, k)).collect();
            let rel_err = approx
                .iter()
                .map(|a| (truth_scaled.clone() - a) * &truth_scaled.inv().unwrap_or_else(BigC::zero))
                .collect();
            Ok(TableRow { n, truth, truth_scaled, approx, rel_err })
        })
        .collect()
}

/// Real part rendered with `digits` significant digits, half to even.
pub fn render(x: &BigC, digits: usize) -> String {
    match bf_to_q(&x.re) {
        Some(q) => render_significant(&q, digits),
        None => "nan".to_string(),
    }
}

/// CSV with columns `n, truth, approx_1.., rel_err_1..`.
pub fn table_csv(rows: &[TableRow], digits: usize) -> String {
    let terms = rows.first().map(|r| r.approx.len()).unwrap_or(0);
    let mut header = vec!["n".to_string(), "truth".to_string()];
    header.extend((1..=terms).map(|k| format!("approx_{k}")));
    header.extend((1..=terms).map(|k| format!("rel_err_{k}")));
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let mut cells = vec![r.n.to_string(), render(&r.truth_scaled, digits)];
        cells.extend(r.approx.iter().map(|a| render(a, digits)));
        cells.extend(r.rel_err.iter().map(|a| render(a, digits)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

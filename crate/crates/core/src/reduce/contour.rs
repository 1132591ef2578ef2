//! Numerical Cauchy integrals over a torus, used to confirm that two forms
//! have the same coefficients.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::expansion::Slice;
use crate::expr::{eval_scalar, Expr, Node};
use crate::number::{with_precision, BigC, Scalar, QI};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("cannot evaluate the integrand on the torus: {0}")]
    Eval(String),
    #[error("quadrature did not settle: grids {coarse} and {fine} differ by {diff:e}")]
    NotConverged { coarse: usize, fine: usize, diff: f64 },
}

/// `sum_m n^m numerator_m / denominator`.
#[derive(Debug, Clone)]
pub struct ContourForm {
    pub slices: Vec<Slice>,
    pub denominator: Expr,
}

impl ContourForm {
    pub fn simple(numerator: Expr, denominator: Expr) -> ContourForm {
        ContourForm { slices: vec![Slice { n_power: 0, numerator }], denominator }
    }
}

#[derive(Debug, Clone)]
pub struct ContourOptions {
    /// Points per circle.
    pub grid: usize,
    /// Torus radii as a fraction of `|c_m|`.
    pub radius_fraction: f64,
    /// Use arbitrary precision with this many bits instead of `f64`.
    pub bits: Option<usize>,
    pub tolerance: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions { grid: 96, radius_fraction: 0.6, bits: None, tolerance: 1e-9 }
    }
}

enum Op {
    Const(Complex64),
    Var(usize),
    Sum(Vec<Op>),
    Product(Vec<Op>),
    Powi(Box<Op>, i32),
    Powf(Box<Op>, f64),
    Exp(Box<Op>),
    Log(Box<Op>),
}

fn compile(e: &Expr, vars: &[String]) -> Result<Op, ContourError> {
    Ok(match e.node() {
        Node::Const(c) => Op::Const(c.to_c64()),
        Node::Pi => Op::Const(Complex64::new(std::f64::consts::PI, 0.0)),
        Node::Var(n) => Op::Var(vars.iter().position(|v| v == n).ok_or_else(|| ContourError::Eval(format!("unbound {n}")))?),
        Node::Sum(ts) => Op::Sum(ts.iter().map(|t| compile(t, vars)).collect::<Result<_, _>>()?),
        Node::Product(fs) => Op::Product(fs.iter().map(|t| compile(t, vars)).collect::<Result<_, _>>()?),
        Node::Pow(b, ex) => {
            let b = Box::new(compile(b, vars)?);
            if ex.denom() == &1.into() {
                Op::Powi(b, num_traits::ToPrimitive::to_i32(ex.numer()).ok_or_else(|| ContourError::Eval("exponent".into()))?)
            } else {
                Op::Powf(b, crate::number::q_to_f64(ex))
            }
        }
        Node::Exp(a) => Op::Exp(Box::new(compile(a, vars)?)),
        Node::Log(a) => Op::Log(Box::new(compile(a, vars)?)),
    })
}

fn run(op: &Op, x: &[Complex64]) -> Complex64 {
    match op {
        Op::Const(c) => *c,
        Op::Var(i) => x[*i],
        Op::Sum(ts) => ts.iter().map(|t| run(t, x)).sum(),
        Op::Product(fs) => fs.iter().map(|t| run(t, x)).product(),
        Op::Powi(b, k) => run(b, x).powi(*k),
        Op::Powf(b, e) => run(b, x).powf(*e),
        Op::Exp(a) => run(a, x).exp(),
        Op::Log(a) => run(a, x).ln(),
    }
}

fn torus_point(idx: usize, grid: usize, radii: &[f64]) -> Vec<f64> {
    let mut rest = idx;
    radii
        .iter()
        .map(|_| {
            let t = rest % grid;
            rest /= grid;
            2.0 * std::f64::consts::PI * t as f64 / grid as f64
        })
        .collect()
}

fn integrand_parts(form: &ContourForm, n: u64) -> Expr {
    let nn = Expr::int(n as i64);
    let terms = form.slices.iter().map(|s| nn.powi(s.n_power as i64).mul(&s.numerator)).collect();
    Expr::sum(terms).div(&form.denominator)
}

/// Coefficient of `x^{n alpha}` of the form, by the product trapezoid rule on
/// the torus `|x_m| = radii_m`.
pub fn contour_integral(vars: &[String], form: &ContourForm, alpha: &[i64], n: u64, radii: &[f64], opts: &ContourOptions) -> Result<BigC, ContourError> {
    let d = vars.len();
    let grid = opts.grid;
    let total = grid.pow(d as u32);
    let f = integrand_parts(form, n);
    let exps: Vec<i64> = alpha.iter().map(|&a| a * n as i64).collect();
    match opts.bits {
        None => {
            let op = compile(&f, vars)?;
            let sum: Complex64 = (0..total)
                .into_par_iter()
                .map(|idx| {
                    let th = torus_point(idx, grid, radii);
                    let x: Vec<Complex64> = th.iter().zip(radii).map(|(t, r)| Complex64::from_polar(*r, *t)).collect();
                    let mut v = run(&op, &x);
                    for (xm, &e) in x.iter().zip(&exps) {
                        v /= xm.powi(e as i32);
                    }
                    v
                })
                .sum();
            let v = sum / total as f64;
            if !v.is_finite() {
                return Err(ContourError::Eval("non-finite value on the torus".into()));
            }
            Ok(BigC::from_f64(v.re, v.im))
        }
        Some(bits) => {
            let rq: Vec<QI> = radii.iter().map(|r| QI::real(crate::geometry::rationalize(*r, 1 << 20))).collect();
            let chunks: Vec<Result<BigC, ContourError>> = (0..total)
                .into_par_iter()
                .chunks(256)
                .map(|idxs| {
                    with_precision(bits, || {
                        let mut acc = BigC::zero();
                        for idx in idxs {
                            let x: Vec<BigC> = rq
                                .iter()
                                .enumerate()
                                .map(|(m, r)| {
                                    let k = (idx / grid.pow(m as u32)) % grid;
                                    let angle = BigC::from_qi(&QI::new(crate::number::qi(0), crate::number::q(2 * k as i64, grid as i64))) * &BigC::pi();
                                    BigC::from_qi(r) * &angle.exp()
                                })
                                .collect();
                            let lookup = |nm: &str| vars.iter().position(|v| v == nm).map(|i| x[i].clone());
                            let mut v = eval_scalar::<BigC>(&f, &lookup).map_err(|e| ContourError::Eval(e.to_string()))?;
                            for (xm, &e) in x.iter().zip(&exps) {
                                v = v * &Scalar::pow_rational(xm, &crate::number::qi(-e)).ok_or_else(|| ContourError::Eval("power".into()))?;
                            }
                            acc = acc + v;
                        }
                        Ok(acc)
                    })
                })
                .collect();
            with_precision(bits, || {
                let mut acc = BigC::zero();
                for c in chunks {
                    acc = acc + c?;
                }
                Ok(acc * &BigC::from_qi(&QI::frac(1, total as i64)))
            })
        }
    }
}

/// Integral at `opts.grid`, checked against half that grid.
fn settled_integral(vars: &[String], form: &ContourForm, alpha: &[i64], n: u64, radii: &[f64], opts: &ContourOptions) -> Result<BigC, ContourError> {
    let fine = contour_integral(vars, form, alpha, n, radii, opts)?;
    let coarse_opts = ContourOptions { grid: opts.grid / 2, ..opts.clone() };
    let coarse = contour_integral(vars, form, alpha, n, radii, &coarse_opts)?;
    let diff = (fine.to_c64() - coarse.to_c64()).norm();
    let scale = fine.to_c64().norm().max(1.0);
    if diff > opts.tolerance * scale {
        return Err(ContourError::NotConverged { coarse: coarse_opts.grid, fine: opts.grid, diff });
    }
    Ok(fine)
}

/// Absolute difference between the `x^{n alpha}` coefficients of two forms.
pub fn contour_check(vars: &[String], a: &ContourForm, b: &ContourForm, alpha: &[i64], n: u64, point: &[QI], opts: &ContourOptions) -> Result<f64, ContourError> {
    let radii: Vec<f64> = point.iter().map(|c| c.to_c64().norm() * opts.radius_fraction).collect();
    let ia = settled_integral(vars, a, alpha, n, &radii, opts)?;
    let ib = settled_integral(vars, b, alpha, n, &radii, opts)?;
    Ok((ia.to_c64() - ib.to_c64()).norm())
}

//! Asymptotic expansions of ray coefficients at transverse multiple points.

pub mod combinat;
pub mod driver;
pub mod hormander;
pub mod phase;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::{exp_rational_form, from_ratfunc, poly_to_expr, Expr};
use crate::geometry::{CriticalData, GeometryError, PointClass};
use crate::jet::JetError;
use crate::number::{bf_to_f64, BigC, Number, Scalar, Q, QI};

pub use combinat::{binomial, falling, p_poly, stirling1};
pub use driver::{expand, expand_point, residue_polynomial, ExpandOptions};
pub use hormander::{l_k, phi_underline};
pub use phase::{required_order, PhaseData};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("degenerate point: the Hessian of the phase is singular")]
    Degenerate,
    #[error("phase is not stationary at the critical point")]
    NotStationary,
    #[error("jet order {available} is below the required {needed}")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("jet: {0}")]
    Jet(#[from] JetError),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("reduction: {0}")]
    Reduction(String),
}

/// A numerator multiplying `n^{n_power}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub n_power: u32,
    pub numerator: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionKind {
    /// Stationary-phase expansion in descending powers of `n`.
    Saddle,
    /// Polynomial in `n` with exponentially small error.
    Residue,
}

/// `pi^{pi_power} * sqrt(radicand)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prefactor {
    pub pi_power: Q,
    pub radicand: Option<QI>,
    pub radicand_float: BigC,
    pub hessian_det: Option<QI>,
    pub hessian_det_float: BigC,
    /// Argument of the Hessian determinant (radians).
    pub branch_arg: f64,
    pub value: BigC,
}

impl Prefactor {
    pub fn one() -> Prefactor {
        Prefactor {
            pi_power: Q::zero(),
            radicand: Some(QI::one()),
            radicand_float: BigC::one(),
            hessian_det: None,
            hessian_det_float: BigC::one(),
            branch_arg: 0.0,
            value: BigC::one(),
        }
    }

    /// Symbolic form, when the radicand is exact.
    pub fn expr(&self) -> Option<Expr> {
        let r = self.radicand.clone()?;
        Some(Expr::pow(Expr::pi(), self.pi_power.clone()).mul(&Expr::pow(Expr::num(r), Q::new(1.into(), 2.into()))))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub q: usize,
    pub n_power: Q,
    pub coefficient: Option<Expr>,
    pub value: BigC,
}

/// `F_{n alpha} ~ growth^n * prefactor * sum_q coefficient_q * n^{n_power_q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion {
    pub point: Vec<QI>,
    pub alpha: Vec<i64>,
    pub r: usize,
    pub d: usize,
    pub k: usize,
    pub growth: QI,
    pub kind: ExpansionKind,
    pub prefactor: Prefactor,
    pub terms: Vec<Term>,
    /// Power of `n` in the error term; `None` when the error is exponentially small.
    pub error_exponent: Option<Q>,
    pub exact: bool,
    pub reductions: Vec<String>,
    pub warnings: Vec<String>,
}

fn bigc_pow_q(x: &BigC, e: &Q) -> BigC {
    x.pow_rational(e).unwrap_or_else(BigC::zero)
}

impl AsymptoticExpansion {
    /// Sum of the first `terms` terms (prefactor included, growth excluded).
    pub fn partial_sum(&self, n: u64, terms: usize) -> BigC {
        let nb = BigC::from_qi(&QI::int(n as i64));
        let mut acc = BigC::zero();
        for t in self.terms.iter().take(terms) {
            acc = acc + t.value.clone() * &bigc_pow_q(&nb, &t.n_power);
        }
        acc * &self.prefactor.value
    }

    /// Ratio of coefficients `b_q / b_0` when both are exact.
    pub fn coefficient_ratio(&self, q: usize) -> Option<Expr> {
        let a = self.terms.first()?.coefficient.clone()?;
        let b = self.terms.get(q)?.coefficient.clone()?;
        Some(b.div(&a))
    }
}

pub(crate) fn expr_value(e: &Expr) -> BigC {
    match crate::expr::eval(e, &Default::default()) {
        Ok(Number::Exact(q)) => BigC::from_qi(&q),
        Ok(Number::Float(f)) => f,
        Err(_) => BigC::zero(),
    }
}

/// Variables reordered so the distinguished coordinate comes last.
pub(crate) fn permutation(d: usize, k: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..d).filter(|&m| m != k).collect();
    perm.push(k);
    perm
}

fn beta_coefficients<S: Scalar>(phase: &PhaseData<S>, numerator: &Expr, alpha_k: i64, n_terms: usize) -> Result<Vec<S>, ExpansionError> {
    let r = phase.r;
    let amps = phase.amplitudes(numerator)?;
    let phi_u = phi_underline(&phase.phi);
    let mut lvals: Vec<Vec<S>> = vec![Vec::new(); r];
    for (j, a) in amps.iter().enumerate() {
        for k in 0..n_terms.saturating_sub(j) {
            lvals[j].push(l_k(k, a, &phi_u, &phase.hessian_inv)?);
        }
    }
    let mut out = Vec::with_capacity(n_terms);
    for q in 0..n_terms {
        let mut b = S::zero();
        for (j, lj) in lvals.iter().enumerate().take(q.min(r - 1) + 1) {
            for (k, lv) in lj.iter().enumerate().take(q - j + 1).skip(q.saturating_sub(r)) {
                let s = stirling1(r - j, r + k - q);
                if s.is_zero() {
                    continue;
                }
                let sign = if (q - j - k) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                let w = binomial(r - 1, j) * s * sign;
                b = b + lv.clone() * &S::from_q(&Q::from_integer(w));
            }
        }
        let scale = Q::new(BigInt::one(), BigInt::from(alpha_k).pow(q as u32));
        out.push(b * &S::from_q(&scale));
    }
    Ok(out)
}

/// Inputs to a stationary-phase expansion at one point whose vanishing
/// factors all have multiplicity one.
#[derive(Debug, Clone)]
pub struct SaddleInput<'a> {
    pub vars: &'a [String],
    pub active: Vec<Expr>,
    /// Product of the non-vanishing factors (to be divided out of numerators).
    pub other: Expr,
    pub pc: &'a PointClass,
    pub cd: &'a CriticalData,
    pub alpha: &'a [i64],
    pub slices: Vec<Slice>,
    pub n_terms: usize,
}

struct Permuted {
    vars: Vec<String>,
    c: Vec<QI>,
    alpha: Vec<i64>,
}

fn permuted(inp: &SaddleInput) -> Permuted {
    let perm = permutation(inp.vars.len(), inp.pc.k);
    Permuted {
        vars: perm.iter().map(|&m| inp.vars[m].clone()).collect(),
        c: perm.iter().map(|&m| inp.pc.point[m].clone()).collect(),
        alpha: perm.iter().map(|&m| inp.alpha[m]).collect(),
    }
}

/// Growth rate `c^{-alpha}`.
pub fn growth_rate(c: &[QI], alpha: &[i64]) -> QI {
    c.iter().zip(alpha).fold(QI::one(), |acc, (x, &a)| acc * x.powi(-a).expect("nonzero coordinate"))
}

struct SliceResult {
    n_power: u32,
    betas: Vec<(Option<Expr>, BigC)>,
}

fn exact_slices(inp: &SaddleInput, p: &Permuted, phase: &PhaseData<QI>, n_terms_for: &dyn Fn(u32) -> usize) -> Result<Vec<SliceResult>, ExpansionError> {
    let atoms: Vec<Expr> = inp.vars.iter().map(|v| Expr::var(v)).collect();
    let mut out = Vec::new();
    for s in &inp.slices {
        let nt = n_terms_for(s.n_power);
        if nt == 0 {
            continue;
        }
        let groups = exp_rational_form(&s.numerator, inp.vars).ok_or(ExpansionError::Jet(JetError::NotExact))?;
        let mut acc: Vec<Expr> = vec![Expr::zero(); nt];
        for g in groups {
            let pc_val = g.exponent.eval_qi(&inp.pc.point).ok_or(ExpansionError::Jet(JetError::NotExact))?;
            let shifted = g.exponent.sub(&crate::poly::Poly::constant(inp.vars.len(), pc_val.clone()));
            let num = from_ratfunc(&g.coef, &atoms).mul(&Expr::exp(poly_to_expr(&shifted, &atoms))).div(&inp.other);
            let betas = beta_coefficients(phase, &num, p.alpha[p.alpha.len() - 1], nt)?;
            let factor = Expr::exp(Expr::num(pc_val));
            for (q, b) in betas.into_iter().enumerate() {
                acc[q] = acc[q].add(&Expr::num(b).mul(&factor));
            }
        }
        out.push(SliceResult { n_power: s.n_power, betas: acc.into_iter().map(|e| (Some(e.clone()), expr_value(&e))).collect() });
    }
    Ok(out)
}

fn float_slices(inp: &SaddleInput, p: &Permuted, phase: &PhaseData<BigC>, n_terms_for: &dyn Fn(u32) -> usize) -> Result<Vec<SliceResult>, ExpansionError> {
    let mut out = Vec::new();
    for s in &inp.slices {
        let nt = n_terms_for(s.n_power);
        if nt == 0 {
            continue;
        }
        let num = s.numerator.div(&inp.other);
        let betas = beta_coefficients(phase, &num, p.alpha[p.alpha.len() - 1], nt)?;
        out.push(SliceResult { n_power: s.n_power, betas: betas.into_iter().map(|b| (None, b)).collect() });
    }
    Ok(out)
}

fn prefactor_from_det(det_exact: Option<QI>, det: BigC, r: usize, d: usize, alpha_k: i64) -> Prefactor {
    let h2 = r as i64 - d as i64;
    let pi_power = Q::new(h2.into(), 2.into());
    let two_ak = QI::int(2 * alpha_k);
    let num = two_ak.powi(h2).expect("nonzero");
    let radicand = det_exact.as_ref().map(|dt| num.clone() * dt.inv().expect("nonzero determinant"));
    let radicand_float = BigC::from_qi(&num) * &det.inv().unwrap_or_else(BigC::zero);
    let branch_arg = bf_to_f64(&det.arg());
    let value = bigc_pow_q(&BigC::pi(), &pi_power) * &radicand_float.sqrt();
    Prefactor { pi_power, radicand, radicand_float, hessian_det: det_exact, hessian_det_float: det, branch_arg, value }
}

/// Stationary-phase expansion (`r < d` after reductions) at one point.
pub fn expand_saddle(inp: &SaddleInput) -> Result<AsymptoticExpansion, ExpansionError> {
    let d = inp.vars.len();
    let r = inp.pc.r;
    let p = permuted(inp);
    let alpha_k = p.alpha[d - 1];
    let max_m = inp.slices.iter().map(|s| s.n_power).max().unwrap_or(0);
    let h = Q::new((r as i64 - d as i64).into(), 2.into());

    let mut extra = 0usize;
    loop {
        let n_total = inp.n_terms + extra;
        let n_terms_for = |m: u32| (n_total + m as usize).saturating_sub(max_m as usize);
        let order = required_order(n_total, r);
        let exact_attempt: Result<(Vec<SliceResult>, Prefactor), ExpansionError> = (|| {
            let s_star: Vec<QI> = inp.cd.s_star.clone();
            let phase = PhaseData::<QI>::build(&inp.active, &p.vars, &p.c, &p.alpha, &s_star, order)?;
            let pre = prefactor_from_det(Some(phase.det.clone()), BigC::from_qi(&phase.det), r, d, alpha_k);
            Ok((exact_slices(inp, &p, &phase, &n_terms_for)?, pre))
        })();
        let (slices, pre, exact) = match exact_attempt {
            Ok((s, pre)) => (s, pre, true),
            Err(ExpansionError::Jet(JetError::NotExact)) => {
                let c: Vec<BigC> = p.c.iter().map(BigC::from_qi).collect();
                let s_star: Vec<BigC> = inp.cd.s_star.iter().map(BigC::from_qi).collect();
                let phase = PhaseData::<BigC>::build(&inp.active, &p.vars, &c, &p.alpha, &s_star, order)?;
                let pre = prefactor_from_det(None, phase.det.clone(), r, d, alpha_k);
                (float_slices(inp, &p, &phase, &n_terms_for)?, pre, false)
            }
            Err(e) => return Err(e),
        };

        let mut combined: Vec<(Option<Expr>, BigC)> = vec![(Some(Expr::zero()), BigC::zero()); n_total];
        for s in &slices {
            let shift = (max_m - s.n_power) as usize;
            for (q, (ex, val)) in s.betas.iter().enumerate() {
                let qq = q + shift;
                if qq >= n_total {
                    continue;
                }
                let slot = &mut combined[qq];
                slot.0 = match (&slot.0, ex) {
                    (Some(a), Some(b)) => Some(a.add(b)),
                    _ => None,
                };
                slot.1 = slot.1.clone() + val;
            }
        }
        let lead_zeros = if exact { combined.iter().take_while(|(e, _)| e.as_ref().is_some_and(|x| x.is_zero())).count() } else { 0 };
        if lead_zeros > extra && lead_zeros < n_total && extra < 4 {
            extra = lead_zeros;
            continue;
        }
        let top = h.clone() + Q::from_integer(BigInt::from(max_m));
        let kept: Vec<Term> = combined
            .into_iter()
            .enumerate()
            .skip(lead_zeros)
            .take(inp.n_terms)
            .map(|(q, (e, v))| Term { q: q - lead_zeros, n_power: top.clone() - Q::from_integer(q.into()), coefficient: e, value: v })
            .collect();
        let error_exponent = top - Q::from_integer(BigInt::from(lead_zeros + kept.len()));
        let mut warnings = Vec::new();
        if let Some(t0) = kept.first() {
            let re = bf_to_f64(&t0.value.re) * bf_to_f64(&pre.value.re) - bf_to_f64(&t0.value.im) * bf_to_f64(&pre.value.im);
            let v = t0.value.to_c64() * pre.value.to_c64();
            if !(re > 0.0 && v.im.abs() <= 1e-12 * v.norm()) {
                warnings.push("leading coefficient is not real and positive".to_string());
            }
        }
        if !exact {
            warnings.push("exact arithmetic unavailable; coefficients are floating point".to_string());
        }
        return Ok(AsymptoticExpansion {
            point: inp.pc.point.clone(),
            alpha: inp.alpha.to_vec(),
            r,
            d,
            k: inp.pc.k,
            growth: growth_rate(&inp.pc.point, inp.alpha),
            kind: ExpansionKind::Saddle,
            prefactor: pre,
            terms: kept,
            error_exponent: Some(error_exponent),
            exact,
            reductions: vec![],
            warnings,
        });
    }
}

/// Determinant of the logarithmic Jacobian together with its modulus.
pub fn jlog_det(pc: &PointClass) -> (QI, Option<QI>) {
    let det = pc.jlog.det();
    let modulus = if det.is_real() { Some(QI::real(det.re().abs())) } else { None };
    (det, modulus)
}

/// Residue formula for `r = d`: coefficients (ascending powers of `n`) of
/// `sum_m n^m G_m(c) / |det Jlog(c)|`, plus warnings.
pub fn residue_coefficients(vars: &[String], pc: &PointClass, slices: &[Slice], other: &Expr) -> (Vec<Expr>, Vec<String>) {
    let (det, modulus) = jlog_det(pc);
    let mut warnings = Vec::new();
    let modulus_expr = match modulus {
        Some(m) => Expr::num(m),
        None => {
            warnings.push("logarithmic Jacobian determinant is complex; its modulus is used".into());
            Expr::num(QI::real(det.norm_sqr())).sqrt()
        }
    };
    let max_m = slices.iter().map(|s| s.n_power).max().unwrap_or(0);
    let mut coeffs: Vec<Expr> = vec![Expr::zero(); max_m as usize + 1];
    let point: std::collections::HashMap<String, Expr> =
        vars.iter().cloned().zip(pc.point.iter().map(|x| Expr::num(x.clone()))).collect();
    for s in slices {
        let v = crate::expr::normalize(&s.numerator.div(other).substitute(&point)).expr;
        let slot = &mut coeffs[s.n_power as usize];
        *slot = crate::expr::normalize(&slot.add(&v.div(&modulus_expr))).expr;
    }
    (coeffs, warnings)
}

/// Packages residue coefficients (ascending powers of `n`) as an expansion.
pub fn residue_expansion(
    pc: &PointClass,
    alpha: &[i64],
    mut coeffs: Vec<Expr>,
    warnings: Vec<String>,
) -> Result<AsymptoticExpansion, ExpansionError> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(ExpansionError::Unsupported("numerator vanishes at the point".into()));
    }
    while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
        coeffs.pop();
    }
    let top = coeffs.len() - 1;
    let terms = (0..=top)
        .map(|q| {
            let e = coeffs[top - q].clone();
            let v = expr_value(&e);
            Term { q, n_power: Q::from_integer(BigInt::from(top - q)), coefficient: Some(e), value: v }
        })
        .collect();
    Ok(AsymptoticExpansion {
        point: pc.point.clone(),
        alpha: alpha.to_vec(),
        r: pc.r,
        d: pc.point.len(),
        k: pc.k,
        growth: growth_rate(&pc.point, alpha),
        kind: ExpansionKind::Residue,
        prefactor: Prefactor::one(),
        terms,
        error_exponent: None,
        exact: true,
        reductions: vec![],
        warnings,
    })
}

/// Residue formula for `r = d`: `sum_m n^m G_m(c) / |det Jlog(c)|`.
pub fn expand_residue(
    vars: &[String],
    pc: &PointClass,
    alpha: &[i64],
    slices: &[Slice],
    other: &Expr,
) -> Result<AsymptoticExpansion, ExpansionError> {
    let (coeffs, warnings) = residue_coefficients(vars, pc, slices, other);
    residue_expansion(pc, alpha, coeffs, warnings)
}

//! Phase and amplitude jets at the stationary point.

use crate::expr::Expr;
use crate::jet::Jet;
use crate::linalg::Matrix;
use crate::number::{Scalar, QI};

use super::ExpansionError;

/// Jet order needed for `n_terms` expansion terms with `r` active factors:
/// the phase must be known through `2N+1` and the amplitudes through `2N-2`;
/// the `j`-th amplitude loses `j` orders to differentiation.
pub fn required_order(n_terms: usize, r: usize) -> usize {
    (2 * n_terms + 1).max((2 * n_terms + r).saturating_sub(3))
}

/// Everything about a point that does not depend on the numerator.
#[derive(Debug, Clone)]
pub struct PhaseData<S> {
    /// Variable names, distinguished coordinate last.
    pub vars: Vec<String>,
    pub c: Vec<S>,
    pub r: usize,
    pub order: usize,
    /// Product of the Weierstrass units, a jet in the permuted coordinates.
    pub unit: Jet<S>,
    /// `h_j = 1/y0_j(w)`, jets in the first `d-1` coordinates.
    pub h: Vec<Jet<S>>,
    /// Stationary point `(0,...,0,s*_1,...,s*_{r-1})`.
    pub theta_star: Vec<S>,
    /// `e(t)` components as jets in theta.
    pub e: Vec<Jet<S>>,
    pub h_tilde: Jet<S>,
    pub phi: Jet<S>,
    pub hessian: Matrix<S>,
    pub hessian_inv: Matrix<S>,
    pub det: S,
}

fn unit_vec(m: usize, a: usize, b: usize) -> Vec<u8> {
    let mut e = vec![0u8; m];
    e[a] += 1;
    e[b] += 1;
    e
}

impl<S: Scalar> PhaseData<S> {
    /// `factors` are the active factors, `vars`/`c`/`alpha` already permuted
    /// so the distinguished coordinate is last.
    pub fn build(factors: &[Expr], vars: &[String], c: &[S], alpha: &[i64], s_star: &[S], order: usize) -> Result<Self, ExpansionError> {
        let d = vars.len();
        let r = factors.len();
        let m = d - 1 + r - 1;
        let mut unit: Option<Jet<S>> = None;
        let mut h = Vec::with_capacity(r);
        for f in factors {
            let hj = Jet::lift(f, vars, c, order + 1)?;
            let (u, y0) = hj.weierstrass_divide()?;
            let y0 = y0.truncate(order);
            h.push(y0.recip()?);
            unit = Some(match unit {
                None => u,
                Some(acc) => acc.mul(&u),
            });
        }
        let unit = unit.expect("at least one factor");

        let mut theta_star = vec![S::zero(); d - 1];
        theta_star.extend(s_star[..r - 1].iter().cloned());
        let i = S::from_qi(&QI::i());
        let e: Vec<Jet<S>> = (0..d - 1)
            .map(|mm| Ok(Jet::var(theta_star.clone(), order, mm).scale(&i).exp()?.scale(&c[mm])))
            .collect::<Result<_, ExpansionError>>()?;
        let he: Vec<Jet<S>> = h.iter().map(|hj| hj.compose(&e)).collect();
        let mut h_tilde = he[r - 1].clone();
        for j in 0..r - 1 {
            let s = Jet::var(theta_star.clone(), order, d - 1 + j);
            h_tilde = h_tilde.add(&s.mul(&he[j].sub(&he[r - 1])));
        }
        let ck = c[d - 1].clone();
        let mut phi = h_tilde.scale(&ck).ln()?.neg();
        for mm in 0..d - 1 {
            let coef = S::from_qi(&QI::frac(alpha[mm], alpha[d - 1])) * &i;
            phi = phi.add(&Jet::var(theta_star.clone(), order, mm).add_constant(&-theta_star[mm].clone()).scale(&coef));
        }

        let scale = 1.0;
        if !phi.constant_term().is_negligible(scale) {
            return Err(ExpansionError::NotStationary);
        }
        if phi.homogeneous(1).any(|(_, g)| !g.is_negligible(scale)) {
            return Err(ExpansionError::NotStationary);
        }
        let mut hess = Matrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                let coef = phi.coeff(&unit_vec(m, a, b));
                hess[(a, b)] = if a == b { coef.scale_int(2) } else { coef };
            }
        }
        let det = hess.det();
        if det.is_negligible(1.0) {
            return Err(ExpansionError::Degenerate);
        }
        let hessian_inv = hess.inverse().ok_or(ExpansionError::Degenerate)?;
        Ok(PhaseData { vars: vars.to_vec(), c: c.to_vec(), r, order, unit, h, theta_star, e, h_tilde, phi, hessian: hess, hessian_inv, det })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Amplitude jets `A~_0, ..., A~_{r-1}` for a numerator (already divided
    /// by the factors that do not vanish at the point).
    pub fn amplitudes(&self, numerator: &Expr) -> Result<Vec<Jet<S>>, ExpansionError> {
        let d = self.dim();
        let r = self.r;
        let k_order = self.order;
        let g = Jet::lift(numerator, &self.vars, &self.c, k_order)?;
        let q = g.mul(&self.unit.recip()?).truncate(k_order);
        let ck = self.c[d - 1].clone();
        let mut wy_base: Vec<S> = self.c[..d - 1].to_vec();
        wy_base.push(ck.inv().ok_or(ExpansionError::Degenerate)?);
        let y = Jet::var(wy_base.clone(), k_order, d - 1);
        let y_inv = y.recip()?;
        let mut inner: Vec<Jet<S>> = (0..d - 1).map(|mm| Jet::var(wy_base.clone(), k_order, mm)).collect();
        inner.push(y_inv.clone());
        let mut kj = q.compose(&inner);
        for hj in &self.h {
            let lifted = Jet::join_last(std::slice::from_ref(hj), wy_base[d - 1].clone(), k_order);
            kj = kj.mul(&lifted.mul(&y).neg()).truncate(k_order);
        }
        let mut out = Vec::with_capacity(r);
        let mut deriv = kj;
        for j in 0..r {
            let a = y_inv.powi((r - j) as u64).mul(&deriv);
            let mut inner: Vec<Jet<S>> = self.e.clone();
            inner.push(self.h_tilde.clone());
            out.push(a.compose(&inner));
            deriv = deriv.diff(d - 1);
        }
        Ok(out)
    }
}

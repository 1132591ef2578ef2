//! The operators `L_k` of stationary-phase expansions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::jet::Jet;
use crate::linalg::Matrix;
use crate::number::{Scalar, Q};

use super::ExpansionError;

type Hom<S> = BTreeMap<Vec<u8>, S>;

fn add_into<S: Scalar>(p: &mut Hom<S>, e: Vec<u8>, c: S) {
    match p.get_mut(&e) {
        Some(v) => {
            let t = std::mem::replace(v, S::zero());
            *v = t + &c;
        }
        None => {
            p.insert(e, c);
        }
    }
}

/// `-sum_{a,b} M_{ab} d_a d_b` applied to a homogeneous polynomial.
fn apply_h<S: Scalar>(p: &Hom<S>, minv: &Matrix<S>) -> Hom<S> {
    let m = minv.rows;
    let mut out = Hom::new();
    for (e, c) in p {
        if c.is_zero() {
            continue;
        }
        for a in 0..m {
            if e[a] == 0 {
                continue;
            }
            let mut ea = e.clone();
            let fa = ea[a] as i64;
            ea[a] -= 1;
            for b in 0..m {
                if ea[b] == 0 || minv[(a, b)].is_zero() {
                    continue;
                }
                let mut eb = ea.clone();
                let fb = eb[b] as i64;
                eb[b] -= 1;
                let v = -(c.clone() * &minv[(a, b)]).scale_int(fa * fb);
                add_into(&mut out, eb, v);
            }
        }
    }
    out
}

/// `Phi` with its value, gradient and quadratic part removed.
pub fn phi_underline<S: Scalar>(phi: &Jet<S>) -> Jet<S> {
    let mut out = Jet::zero(phi.base().to_vec(), phi.order());
    for (e, c) in phi.terms() {
        if e.iter().map(|&k| k as usize).sum::<usize>() >= 3 {
            out.set(e, c.clone());
        }
    }
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// `L_k(A, Phi) = sum_{l=0}^{2k} H^{k+l}(A Phi_^l)(theta*) / ((-1)^k 2^{k+l} l! (k+l)!)`.
pub fn l_k<S: Scalar>(k: usize, a: &Jet<S>, phi_under: &Jet<S>, minv: &Matrix<S>) -> Result<S, ExpansionError> {
    let mut total = S::zero();
    let mut pow = Jet::constant(a.base().to_vec(), a.order().max(phi_under.order()), S::one());
    for l in 0..=2 * k {
        let p = k + l;
        let deg = 2 * p;
        let valid = (a.order() + pow.valuation()).min(pow.order() + a.valuation());
        if valid < deg {
            return Err(ExpansionError::InsufficientOrder { needed: deg, available: valid });
        }
        let prod = a.mul_to(&pow, deg);
        let mut hom: Hom<S> = prod.homogeneous(deg).map(|(e, c)| (e.to_vec(), c.clone())).collect();
        for _ in 0..p {
            hom = apply_h(&hom, minv);
        }
        let value = hom.into_values().fold(S::zero(), |acc, v| acc + &v);
        let sign = if k.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        let den = sign * (BigInt::one() << p) * factorial(l) * factorial(p);
        total = total + value * &S::from_q(&Q::new(BigInt::one(), den));
        if l < 2 * k {
            pow = pow.mul(phi_under).truncate(6 * k);
        }
    }
    Ok(total)
}

use std::collections::HashMap;

use thiserror::Error;

use super::{Expr, Node};
use crate::number::{Number, Scalar, QI};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of zero")]
    LogOfZero,
    #[error("unbound variable '{0}'")]
    Unbound(String),
    #[error("value is not exactly representable")]
    NotExact,
}

/// Evaluates with exact arithmetic where possible, floats otherwise.
pub fn eval(e: &Expr, point: &HashMap<String, Number>) -> Result<Number, EvalError> {
    match e.node() {
        Node::Const(c) => Ok(Number::Exact(c.clone())),
        Node::Pi => Ok(Number::Float(crate::number::BigC::pi())),
        Node::Var(n) => point.get(n).cloned().ok_or_else(|| EvalError::Unbound(n.clone())),
        Node::Sum(ts) => {
            let mut acc = Number::int(0);
            for t in ts {
                acc = acc.add(&eval(t, point)?);
            }
            Ok(acc)
        }
        Node::Product(fs) => {
            let mut acc = Number::int(1);
            for f in fs {
                acc = acc.mul(&eval(f, point)?);
            }
            Ok(acc)
        }
        Node::Pow(b, ex) => {
            let v = eval(b, point)?;
            if v.is_zero() && !num_traits::Signed::is_positive(ex) {
                return Err(EvalError::DivisionByZero);
            }
            v.pow_rational(ex).ok_or(EvalError::DivisionByZero)
        }
        Node::Exp(a) => Ok(eval(a, point)?.exp()),
        Node::Log(a) => {
            let v = eval(a, point)?;
            v.ln().ok_or(EvalError::LogOfZero)
        }
    }
}

/// Evaluates in a fixed scalar type. Exact scalars fail with `NotExact`
/// when a transcendental value is required.
pub fn eval_scalar<S: Scalar>(e: &Expr, lookup: &dyn Fn(&str) -> Option<S>) -> Result<S, EvalError> {
    match e.node() {
        Node::Const(c) => Ok(S::from_qi(c)),
        Node::Pi => S::pi().ok_or(EvalError::NotExact),
        Node::Var(n) => lookup(n).ok_or_else(|| EvalError::Unbound(n.clone())),
        Node::Sum(ts) => {
            let mut acc = S::zero();
            for t in ts {
                acc = acc + eval_scalar(t, lookup)?;
            }
            Ok(acc)
        }
        Node::Product(fs) => {
            let mut acc = S::one();
            for f in fs {
                acc = acc * eval_scalar(f, lookup)?;
            }
            Ok(acc)
        }
        Node::Pow(b, ex) => {
            let v = eval_scalar(b, lookup)?;
            if v.is_zero() {
                return if num_traits::Signed::is_positive(ex) { Ok(S::zero()) } else { Err(EvalError::DivisionByZero) };
            }
            v.pow_rational(ex).ok_or(EvalError::NotExact)
        }
        Node::Exp(a) => eval_scalar(a, lookup)?.exp().ok_or(EvalError::NotExact),
        Node::Log(a) => {
            let v = eval_scalar(a, lookup)?;
            if v.is_zero() {
                return Err(EvalError::LogOfZero);
            }
            v.ln().ok_or(EvalError::NotExact)
        }
    }
}

impl Expr {
    /// Exact evaluation at a Gaussian rational point given in variable order.
    pub fn eval_exact(&self, vars: &[String], point: &[QI]) -> Result<QI, EvalError> {
        let lookup = |n: &str| vars.iter().position(|v| v == n).map(|i| point[i].clone());
        eval_scalar::<QI>(self, &lookup)
    }
}

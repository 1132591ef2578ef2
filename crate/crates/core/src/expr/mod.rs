//! Immutable symbolic expressions with canonicalizing constructors.

mod eval;
mod normalize;
mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::number::{format_rational, Q, QI};

pub use eval::{eval, eval_scalar, EvalError};
pub use normalize::{exp_rational_form, from_ratfunc, normalize, poly_to_expr, to_ratfunc, ExpTerm, Normalized};
pub use parse::{parse, ParseError};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Node>);

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(QI),
    Pi,
    Var(String),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, Q),
    Exp(Expr),
    Log(Expr),
}

impl Node {
    fn rank(&self) -> u8 {
        match self {
            Node::Const(_) => 0,
            Node::Var(_) => 1,
            Node::Pi => 2,
            Node::Pow(..) => 3,
            Node::Product(_) => 4,
            Node::Sum(_) => 5,
            Node::Exp(_) => 6,
            Node::Log(_) => 7,
        }
    }
}

impl Ord for Expr {
    fn cmp(&self, o: &Self) -> Ordering {
        let (a, b) = (self.node(), o.node());
        a.rank().cmp(&b.rank()).then_with(|| match (a, b) {
            (Node::Const(x), Node::Const(y)) => x.cmp(y),
            (Node::Var(x), Node::Var(y)) => x.cmp(y),
            (Node::Pi, Node::Pi) => Ordering::Equal,
            (Node::Pow(b1, e1), Node::Pow(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
            (Node::Product(x), Node::Product(y)) | (Node::Sum(x), Node::Sum(y)) => x.cmp(y),
            (Node::Exp(x), Node::Exp(y)) | (Node::Log(x), Node::Log(y)) => x.cmp(y),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Expr {
    fn make(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(c: QI) -> Expr {
        Expr::make(Node::Const(c))
    }

    pub fn rational(c: Q) -> Expr {
        Expr::num(QI::real(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(QI::int(n))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn i() -> Expr {
        Expr::num(QI::i())
    }

    pub fn pi() -> Expr {
        Expr::make(Node::Pi)
    }

    /// Euler's number as `exp(1)`.
    pub fn e() -> Expr {
        Expr::make(Node::Exp(Expr::one()))
    }

    pub fn var(name: &str) -> Expr {
        Expr::make(Node::Var(name.to_string()))
    }

    pub fn as_const(&self) -> Option<&QI> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    /// Splits a numeric coefficient off a term.
    pub fn split_coef(&self) -> (QI, Expr) {
        match self.node() {
            Node::Const(c) => (c.clone(), Expr::one()),
            Node::Product(fs) => match fs[0].node() {
                Node::Const(c) => (c.clone(), Expr::product(fs[1..].to_vec())),
                _ => (QI::one(), self.clone()),
            },
            _ => (QI::one(), self.clone()),
        }
    }

    fn with_coef(c: QI, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        if c.is_zero() {
            return Expr::zero();
        }
        match rest.node() {
            Node::Const(k) => Expr::num(&c * k),
            Node::Product(fs) => {
                if let Node::Const(k) = fs[0].node() {
                    return Expr::with_coef(&c * k, Expr::product(fs[1..].to_vec()));
                }
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::num(c));
                v.extend(fs.iter().cloned());
                Expr::make(Node::Product(v))
            }
            _ => Expr::make(Node::Product(vec![Expr::num(c), rest])),
        }
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut constant = QI::zero();
        let mut collected: BTreeMap<Expr, QI> = BTreeMap::new();
        let mut stack = terms;
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Sum(ts) => {
                    for s in ts.iter().rev() {
                        stack.push(s.clone());
                    }
                }
                Node::Const(c) => constant = &constant + c,
                _ => {
                    let (c, rest) = t.split_coef();
                    let e = collected.entry(rest).or_insert_with(QI::zero);
                    *e = &*e + &c;
                }
            }
        }
        let mut out = Vec::new();
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (rest, c) in collected {
            if !c.is_zero() {
                out.push(Expr::with_coef(c, rest));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::make(Node::Sum(out)),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut coef = QI::one();
        let mut powers: BTreeMap<Expr, Q> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        let mut stack = factors;
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Product(fs) => stack.extend(fs.iter().cloned()),
                Node::Const(c) => coef = &coef * c,
                Node::Pow(b, e) => {
                    let s = powers.entry(b.clone()).or_insert_with(Q::zero);
                    *s += e;
                }
                Node::Exp(a) => exp_args.push(a.clone()),
                _ => {
                    let s = powers.entry(f.clone()).or_insert_with(Q::zero);
                    *s += Q::one();
                }
            }
        }
        if coef.is_zero() {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = Vec::new();
        let push = |f: Expr, coef: &mut QI, out: &mut Vec<Expr>| match f.node() {
            Node::Const(c) => *coef = &*coef * c,
            Node::Product(fs) => {
                for g in fs {
                    match g.node() {
                        Node::Const(c) => *coef = &*coef * c,
                        _ => out.push(g.clone()),
                    }
                }
            }
            _ => out.push(f),
        };
        if !exp_args.is_empty() {
            push(Expr::exp(Expr::sum(exp_args)), &mut coef, &mut out);
        }
        for (b, e) in powers {
            if !e.is_zero() {
                push(Expr::pow(b, e), &mut coef, &mut out);
            }
        }
        if coef.is_zero() {
            return Expr::zero();
        }
        out.sort();
        if out.is_empty() {
            return Expr::num(coef);
        }
        if out.len() == 1 && coef.is_one() {
            return out.pop().unwrap();
        }
        let mut v = Vec::with_capacity(out.len() + 1);
        if !coef.is_one() {
            v.push(Expr::num(coef));
        }
        v.extend(out);
        if v.len() == 1 {
            return v.pop().unwrap();
        }
        Expr::make(Node::Product(v))
    }

    pub fn add(&self, o: &Expr) -> Expr {
        Expr::sum(vec![self.clone(), o.clone()])
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        Expr::sum(vec![self.clone(), o.neg()])
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        Expr::product(vec![self.clone(), o.clone()])
    }

    pub fn div(&self, o: &Expr) -> Expr {
        Expr::product(vec![self.clone(), Expr::pow(o.clone(), -Q::one())])
    }

    pub fn neg(&self) -> Expr {
        Expr::product(vec![Expr::int(-1), self.clone()])
    }

    pub fn powi(&self, k: i64) -> Expr {
        Expr::pow(self.clone(), Q::from_integer(k.into()))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self.clone(), Q::new(1.into(), 2.into()))
    }

    pub fn pow(base: Expr, e: Q) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base;
        }
        let integer = e.denom().is_one();
        match base.node() {
            Node::Const(c) => {
                if integer {
                    if let Some(k) = num_traits::ToPrimitive::to_i64(e.numer()) {
                        if let Some(v) = c.powi(k) {
                            return Expr::num(v);
                        }
                    }
                } else if let Some(v) = c.pow_rational(&e) {
                    return Expr::num(v);
                }
                if c.is_real() && c.re().is_positive() && !integer {
                    // c^(n+f) = c^n * c^f with 0 < f < 1
                    let n = e.floor();
                    let f = &e - &n;
                    if !n.is_zero() {
                        let k: i64 = num_traits::ToPrimitive::to_i64(n.numer()).unwrap_or(0);
                        if let Some(cn) = c.powi(k) {
                            return Expr::with_coef(cn, Expr::make(Node::Pow(base.clone(), f)));
                        }
                    }
                }
                Expr::make(Node::Pow(base.clone(), e))
            }
            Node::Pow(b2, e2) if integer => Expr::pow(b2.clone(), e2 * &e),
            Node::Product(fs) if integer => Expr::product(fs.iter().map(|f| Expr::pow(f.clone(), e.clone())).collect()),
            Node::Exp(a) if integer => Expr::exp(Expr::with_coef(QI::real(e), a.clone())),
            _ => Expr::make(Node::Pow(base, e)),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        if a.is_zero() {
            return Expr::one();
        }
        if let Node::Log(x) = a.node() {
            return x.clone();
        }
        Expr::make(Node::Exp(a))
    }

    pub fn log(a: Expr) -> Expr {
        if a.is_one() {
            return Expr::zero();
        }
        Expr::make(Node::Log(a))
    }

    pub fn diff(&self, v: &str) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Pi => Expr::zero(),
            Node::Var(n) => {
                if n == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(ts) => Expr::sum(ts.iter().map(|t| t.diff(v)).collect()),
            Node::Product(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let d = fs[i].diff(v);
                    if d.is_zero() {
                        continue;
                    }
                    let mut parts: Vec<Expr> = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
                    parts.push(d);
                    terms.push(Expr::product(parts));
                }
                Expr::sum(terms)
            }
            Node::Pow(b, e) => {
                let db = b.diff(v);
                if db.is_zero() {
                    return Expr::zero();
                }
                Expr::product(vec![Expr::rational(e.clone()), Expr::pow(b.clone(), e - Q::one()), db])
            }
            Node::Exp(a) => {
                let da = a.diff(v);
                Expr::product(vec![self.clone(), da])
            }
            Node::Log(a) => a.diff(v).div(a),
        }
    }

    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Pi => self.clone(),
            Node::Var(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Node::Sum(ts) => Expr::sum(ts.iter().map(|t| t.substitute(map)).collect()),
            Node::Product(fs) => Expr::product(fs.iter().map(|t| t.substitute(map)).collect()),
            Node::Pow(b, e) => Expr::pow(b.substitute(map), e.clone()),
            Node::Exp(a) => Expr::exp(a.substitute(map)),
            Node::Log(a) => Expr::log(a.substitute(map)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) | Node::Pi => {}
            Node::Var(n) => {
                out.insert(n.clone());
            }
            Node::Sum(ts) | Node::Product(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Node::Pow(b, _) => b.collect_vars(out),
            Node::Exp(a) | Node::Log(a) => a.collect_vars(out),
        }
    }

    /// True if the tree contains no exp, log, pi or fractional power.
    pub fn is_rational(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Var(_) => true,
            Node::Pi | Node::Exp(_) | Node::Log(_) => false,
            Node::Sum(ts) | Node::Product(ts) => ts.iter().all(|t| t.is_rational()),
            Node::Pow(b, e) => e.denom().is_one() && b.is_rational(),
        }
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Sum(_) => 1,
            Node::Product(_) => 2,
            Node::Const(c) => {
                if !c.is_real() || c.re().is_negative() {
                    1
                } else if !c.is_integer() {
                    2
                } else {
                    4
                }
            }
            Node::Pow(_, _) => 3,
            _ => 4,
        }
    }

    fn write_paren(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }

    fn write_product(f: &mut fmt::Formatter<'_>, coef: &QI, fs: &[Expr]) -> fmt::Result {
        let mut num: Vec<Expr> = Vec::new();
        let mut den: Vec<Expr> = Vec::new();
        for x in fs {
            match x.node() {
                Node::Pow(b, e) if e.is_negative() => den.push(Expr::pow(b.clone(), -e.clone())),
                _ => num.push(x.clone()),
            }
        }
        let mut first = true;
        if coef.is_real() {
            let c = coef.re();
            let mag = c.abs();
            if c.is_negative() {
                write!(f, "-")?;
            }
            if !mag.is_one() || num.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
                first = false;
            }
        } else {
            write!(f, "({coef})")?;
            first = false;
        }
        for x in &num {
            if !first {
                write!(f, "*")?;
            }
            x.write_paren(f, 3)?;
            first = false;
        }
        if !den.is_empty() {
            write!(f, "/")?;
            if den.len() == 1 {
                den[0].write_paren(f, 3)?;
            } else {
                write!(f, "(")?;
                for (i, x) in den.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    x.write_paren(f, 3)?;
                }
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Pi => write!(f, "pi"),
            Node::Var(n) => write!(f, "{n}"),
            Node::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let (c, rest) = t.split_coef();
                    let negative = c.is_real() && c.re().is_negative();
                    if i == 0 {
                        t.write_paren(f, 1)?;
                    } else if negative {
                        write!(f, " - ")?;
                        Expr::with_coef(-&c, rest).write_paren(f, 2)?;
                    } else {
                        write!(f, " + ")?;
                        t.write_paren(f, 2)?;
                    }
                }
                Ok(())
            }
            Node::Product(fs) => {
                let (c, rest) = self.split_coef();
                let rest_factors: Vec<Expr> = match rest.node() {
                    Node::Product(g) => g.clone(),
                    _ if rest.is_one() => vec![],
                    _ => vec![rest.clone()],
                };
                let _ = fs;
                Expr::write_product(f, &c, &rest_factors)
            }
            Node::Pow(b, e) => {
                if e.is_negative() {
                    return Expr::write_product(f, &QI::one(), std::slice::from_ref(self));
                }
                if *e == Q::new(1.into(), 2.into()) {
                    return write!(f, "sqrt({b})");
                }
                b.write_paren(f, 4)?;
                if e.denom().is_one() {
                    write!(f, "^{}", e.numer())
                } else {
                    write!(f, "^({})", format_rational(e))
                }
            }
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Log(a) => write!(f, "log({a})"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests;

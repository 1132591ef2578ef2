//! Truncated multivariate Taylor series ("jets") at a base point.
//!
//! Coefficients are stored densely in a graded layout: all monomials of
//! degree 0, then degree 1, and so on. The position of a monomial does not
//! depend on the truncation order, so jets of different orders over the same
//! number of variables share indices.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::expr::{Expr, Node};
use crate::number::{Scalar, Q, QI};

const CODE_BITS: u32 = 6;
const MAX_VARS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("expression is singular at the base point")]
    Singular,
    #[error("value at the base point is not exactly representable")]
    NotExact,
    #[error("unbound variable '{0}'")]
    Unbound(String),
    #[error("derivative with respect to the distinguished variable vanishes at the base point")]
    NotRegular,
    #[error("implicit solve did not converge")]
    NoConvergence,
}

struct Layout {
    monos: Vec<Vec<u8>>,
    codes: Vec<u64>,
    degree_start: Vec<usize>,
    index: FxHashMap<u64, u32>,
}

fn code_of(e: &[u8]) -> u64 {
    e.iter().enumerate().fold(0u64, |acc, (v, &k)| acc | ((k as u64) << (CODE_BITS * v as u32)))
}

fn monos_of_degree(n: usize, d: usize, out: &mut Vec<Vec<u8>>) {
    fn rec(n: usize, d: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n - 1 {
            cur.push(d as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=d).rev() {
            cur.push(k as u8);
            rec(n, d - k, cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return;
    }
    rec(n, d, &mut Vec::with_capacity(n), out);
}

impl Layout {
    fn build(n: usize, order: usize) -> Layout {
        assert!(n <= MAX_VARS, "too many jet variables");
        assert!(order < (1 << CODE_BITS), "jet order too large");
        let mut monos = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(monos.len());
            monos_of_degree(n, d, &mut monos);
        }
        degree_start.push(monos.len());
        let codes: Vec<u64> = monos.iter().map(|m| code_of(m)).collect();
        let index = codes.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        Layout { monos, codes, degree_start, index }
    }

    fn len(&self, order: usize) -> usize {
        self.degree_start[order + 1]
    }

    fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.degree_start[d]..self.degree_start[d + 1]
    }
}

fn layout(n: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = cache.lock().unwrap();
    if let Some(l) = g.get(&n) {
        if l.degree_start.len() >= order + 2 {
            return l.clone();
        }
    }
    let want = order.max(g.get(&n).map(|l| l.degree_start.len() - 2).unwrap_or(0));
    let l = Arc::new(Layout::build(n, want));
    g.insert(n, l.clone());
    l
}

/// Truncated Taylor series in `nvars` local variables around `base`, valid
/// through total degree `order`.
#[derive(Clone, Debug)]
pub struct Jet<S> {
    base: Vec<S>,
    order: usize,
    coeffs: Vec<S>,
    layout: Arc<Layout>,
}

impl std::fmt::Debug for Layout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Layout({} monomials)", self.monos.len())
    }
}

impl<S: Scalar> Jet<S> {
    pub fn zero(base: Vec<S>, order: usize) -> Jet<S> {
        let l = layout(base.len(), order);
        let len = l.len(order);
        Jet { base, order, coeffs: vec![S::zero(); len], layout: l }
    }

    pub fn constant(base: Vec<S>, order: usize, c: S) -> Jet<S> {
        let mut j = Jet::zero(base, order);
        j.coeffs[0] = c;
        j
    }

    /// The coordinate function `x_i`, i.e. `base_i + delta_i`.
    pub fn var(base: Vec<S>, order: usize, i: usize) -> Jet<S> {
        let c = base[i].clone();
        let mut j = Jet::constant(base, order, c);
        if order >= 1 {
            let mut e = vec![0u8; j.nvars()];
            e[i] = 1;
            j.set(&e, S::one());
        }
        j
    }

    pub fn nvars(&self) -> usize {
        self.base.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base(&self) -> &[S] {
        &self.base
    }

    pub fn with_base(mut self, base: Vec<S>) -> Jet<S> {
        assert_eq!(base.len(), self.base.len());
        self.base = base;
        self
    }

    fn like(&self, order: usize) -> Jet<S> {
        Jet::zero(self.base.clone(), order)
    }

    pub fn constant_term(&self) -> &S {
        &self.coeffs[0]
    }

    fn idx(&self, e: &[u8]) -> Option<usize> {
        let d: usize = e.iter().map(|&k| k as usize).sum();
        if d > self.order {
            return None;
        }
        self.layout.index.get(&code_of(e)).map(|&i| i as usize)
    }

    /// Coefficient of `delta^e` (zero beyond the truncation order).
    pub fn coeff(&self, e: &[u8]) -> S {
        self.idx(e).map(|i| self.coeffs[i].clone()).unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, e: &[u8], c: S) {
        let i = self.idx(e).expect("monomial within order");
        self.coeffs[i] = c;
    }

    /// Nonzero terms as (exponents, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &S)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (self.layout.monos[i].as_slice(), c))
    }

    /// Terms of exactly total degree `d`.
    pub fn homogeneous(&self, d: usize) -> impl Iterator<Item = (&[u8], &S)> {
        let r = if d <= self.order { self.layout.degree_range(d) } else { 0..0 };
        r.filter(|&i| !self.coeffs[i].is_zero()).map(|i| (self.layout.monos[i].as_slice(), &self.coeffs[i]))
    }

    /// Lowest degree carrying a nonzero coefficient (`order + 1` if none).
    pub fn valuation(&self) -> usize {
        for d in 0..=self.order {
            if self.layout.degree_range(d).any(|i| !self.coeffs[i].is_zero()) {
                return d;
            }
        }
        self.order + 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Jet<S> {
        if order >= self.order {
            return self.clone();
        }
        let mut j = self.clone();
        j.order = order;
        j.coeffs.truncate(self.layout.len(order));
        j
    }

    fn degree_of(&self, i: usize) -> usize {
        self.layout.monos[i].iter().map(|&k| k as usize).sum()
    }

    pub fn add(&self, o: &Jet<S>) -> Jet<S> {
        let order = self.order.min(o.order);
        let mut r = self.truncate(order);
        for (i, c) in o.coeffs.iter().take(r.coeffs.len()).enumerate() {
            if !c.is_zero() {
                let t = std::mem::replace(&mut r.coeffs[i], S::zero());
                r.coeffs[i] = t + c;
            }
        }
        r
    }

    pub fn sub(&self, o: &Jet<S>) -> Jet<S> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Jet<S> {
        let mut r = self.clone();
        for c in r.coeffs.iter_mut() {
            if !c.is_zero() {
                *c = -c.clone();
            }
        }
        r
    }

    pub fn scale(&self, k: &S) -> Jet<S> {
        let mut r = self.clone();
        for c in r.coeffs.iter_mut() {
            if !c.is_zero() {
                *c = c.clone() * k;
            }
        }
        r
    }

    pub fn add_constant(&self, k: &S) -> Jet<S> {
        let mut r = self.clone();
        r.coeffs[0] = r.coeffs[0].clone() + k;
        r
    }

    /// Product; the order accounts for valuations, so multiplying by a jet
    /// that vanishes to high order keeps more valid terms.
    pub fn mul(&self, o: &Jet<S>) -> Jet<S> {
        let va = self.valuation();
        let vb = o.valuation();
        let order = (self.order + vb).min(o.order + va).min(self.order + o.order);
        self.mul_to(o, order)
    }

    /// Product computed through `order`; callers guarantee validity.
    pub fn mul_to(&self, o: &Jet<S>, order: usize) -> Jet<S> {
        let l = layout(self.nvars(), order);
        let mut out = vec![S::zero(); l.len(order)];
        let bnz: Vec<usize> = (0..o.coeffs.len()).filter(|&j| !o.coeffs[j].is_zero()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let da = self.degree_of(i);
            if da > order {
                break;
            }
            let ca = self.layout.codes[i];
            for &j in &bnz {
                let db = o.degree_of(j);
                if da + db > order {
                    break;
                }
                let k = l.index[&(ca + o.layout.codes[j])] as usize;
                let t = std::mem::replace(&mut out[k], S::zero());
                out[k] = t + a.clone() * &o.coeffs[j];
            }
        }
        Jet { base: self.base.clone(), order, coeffs: out, layout: l }
    }

    /// Degree-`n` homogeneous part of the product of homogeneous parts
    /// `self_ka * other_kb` added into `acc` with weight `w`.
    fn hom_acc(&self, ka: usize, o: &Jet<S>, kb: usize, w: &S, acc: &mut [S], l: &Layout) {
        for i in self.layout.degree_range(ka) {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            let aw = a.clone() * w;
            for j in o.layout.degree_range(kb) {
                let b = &o.coeffs[j];
                if b.is_zero() {
                    continue;
                }
                let k = l.index[&(self.layout.codes[i] + o.layout.codes[j])] as usize;
                let t = std::mem::replace(&mut acc[k], S::zero());
                acc[k] = t + aw.clone() * b;
            }
        }
    }

    /// Builds `f` degree by degree from `rule(n, f_so_far) -> degree n part`.
    fn recurrence(&self, f0: S, rule: impl Fn(usize, &Jet<S>, &mut [S])) -> Jet<S> {
        let mut f = Jet::constant(self.base.clone(), self.order, f0);
        let l = f.layout.clone();
        for n in 1..=self.order {
            let mut acc = vec![S::zero(); l.len(n)];
            rule(n, &f, &mut acc);
            for i in l.degree_range(n) {
                f.coeffs[i] = std::mem::replace(&mut acc[i], S::zero());
            }
        }
        f
    }

    pub fn recip(&self) -> Result<Jet<S>, JetError> {
        let a0inv = self.coeffs[0].inv().ok_or(JetError::Singular)?;
        let l = self.layout.clone();
        let neg = -a0inv.clone();
        Ok(self.recurrence(a0inv, |n, f, acc| {
            for k in 1..=n {
                self.hom_acc(k, f, n - k, &neg, acc, &l);
            }
        }))
    }

    pub fn div(&self, o: &Jet<S>) -> Result<Jet<S>, JetError> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn exp(&self) -> Result<Jet<S>, JetError> {
        let f0 = self.coeffs[0].exp().ok_or(JetError::NotExact)?;
        let l = self.layout.clone();
        Ok(self.recurrence(f0, |n, f, acc| {
            let inv_n = S::from_q(&Q::new(1.into(), (n as i64).into()));
            for k in 1..=n {
                let w = S::from_int(k as i64) * &inv_n;
                self.hom_acc(k, f, n - k, &w, acc, &l);
            }
        }))
    }

    pub fn ln(&self) -> Result<Jet<S>, JetError> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(JetError::Singular);
        }
        let f0 = a0.ln().ok_or(JetError::NotExact)?;
        let a0inv = a0.inv().unwrap();
        let l = self.layout.clone();
        Ok(self.recurrence(f0, |n, f, acc| {
            // a0 n F_n = n A_n - sum_{k=1}^{n-1} (n-k) A_k F_{n-k}
            for i in l.degree_range(n) {
                let t = std::mem::replace(&mut acc[i], S::zero());
                acc[i] = t + self.coeffs[i].clone() * &a0inv;
            }
            let inv_n = S::from_q(&Q::new(1.into(), (n as i64).into()));
            for k in 1..n {
                let w = -(S::from_int((n - k) as i64) * &inv_n * &a0inv);
                self.hom_acc(k, f, n - k, &w, acc, &l);
            }
        }))
    }

    /// Principal power `self^p` for a rational exponent.
    pub fn pow_rational(&self, p: &Q) -> Result<Jet<S>, JetError> {
        if p.denom() == &1.into() && p >= &Q::from_integer(0.into()) {
            let k: u64 = num_traits::ToPrimitive::to_u64(p.numer()).ok_or(JetError::NotExact)?;
            return Ok(self.powi(k));
        }
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(JetError::Singular);
        }
        let f0 = a0.pow_rational(p).ok_or(JetError::NotExact)?;
        let a0inv = a0.inv().unwrap();
        let ps = S::from_q(p);
        let l = self.layout.clone();
        Ok(self.recurrence(f0, |n, f, acc| {
            // a0 n F_n = sum_{k=1}^n (p k - (n - k)) A_k F_{n-k}
            let inv_n = S::from_q(&Q::new(1.into(), (n as i64).into()));
            for k in 1..=n {
                let w = (ps.clone() * &S::from_int(k as i64) - S::from_int((n - k) as i64)) * &inv_n * &a0inv;
                self.hom_acc(k, f, n - k, &w, acc, &l);
            }
        }))
    }

    pub fn powi(&self, mut k: u64) -> Jet<S> {
        let mut acc = Jet::constant(self.base.clone(), self.order, S::one());
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// Partial derivative in local variable `v`; the order drops by one.
    pub fn diff(&self, v: usize) -> Jet<S> {
        let order = self.order.saturating_sub(1);
        let mut r = self.like(order);
        if self.order == 0 {
            return r;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = &self.layout.monos[i];
            if e[v] == 0 || c.is_zero() {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] -= 1;
            let k = r.idx(&e2).expect("within order");
            r.coeffs[k] = c.clone() * &S::from_int(e[v] as i64);
        }
        r
    }

    /// `self(inner_1, ..., inner_n)`: each inner jet must take the value
    /// `self.base[i]` at its own base point.
    pub fn compose(&self, inner: &[Jet<S>]) -> Jet<S> {
        assert_eq!(inner.len(), self.nvars());
        let out_base = inner[0].base.clone();
        let mut order = self.order;
        for g in inner {
            order = order.min(g.order);
        }
        let deltas: Vec<Jet<S>> = inner
            .iter()
            .zip(&self.base)
            .map(|(g, b)| {
                let d = g.add_constant(&-b.clone());
                assert!(d.constant_term().is_negligible(b.magnitude()), "inner jet does not start at the base point");
                let mut d = d.truncate(order);
                d.coeffs[0] = S::zero();
                d
            })
            .collect();
        let mut pows: Vec<Vec<Jet<S>>> = deltas.iter().map(|d| vec![Jet::constant(out_base.clone(), order, S::one()), d.clone()]).collect();
        let mut prefix: FxHashMap<Vec<u8>, Jet<S>> = FxHashMap::default();
        let mut result = Jet::zero(out_base.clone(), order);
        let n = self.nvars();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.layout.monos[i].clone();
            let mut last = n;
            while last > 0 && e[last - 1] == 0 {
                last -= 1;
            }
            let term = self.prefix_product(&e, last, &deltas, &mut pows, &mut prefix, order);
            if let Some(t) = term {
                for (k, tc) in t.coeffs.iter().enumerate().take(result.coeffs.len()) {
                    if !tc.is_zero() {
                        let s = std::mem::replace(&mut result.coeffs[k], S::zero());
                        result.coeffs[k] = s + c.clone() * tc;
                    }
                }
            }
        }
        result
    }

    fn prefix_product(
        &self,
        e: &[u8],
        len: usize,
        deltas: &[Jet<S>],
        pows: &mut [Vec<Jet<S>>],
        memo: &mut FxHashMap<Vec<u8>, Jet<S>>,
        order: usize,
    ) -> Option<Jet<S>> {
        if len == 0 {
            return Some(Jet::constant(deltas[0].base.clone(), order, S::one()));
        }
        let key = e[..len].to_vec();
        if let Some(j) = memo.get(&key) {
            return Some(j.clone());
        }
        let v = len - 1;
        let k = e[v] as usize;
        while pows[v].len() <= k {
            let next = pows[v].last().unwrap().mul(&deltas[v]).truncate(order);
            pows[v].push(next);
        }
        let mut head = len - 1;
        while head > 0 && e[head - 1] == 0 {
            head -= 1;
        }
        let p = pows[v][k].clone();
        if p.valuation() > order {
            return None;
        }
        let r = if head == 0 {
            p.clone()
        } else {
            let h = self.prefix_product(e, head, deltas, pows, memo, order)?;
            h.mul(&p).truncate(order)
        };
        if r.valuation() > order {
            return None;
        }
        memo.insert(key, r.clone());
        Some(r)
    }

    /// Splits into coefficients of powers of the last variable: the `i`-th
    /// part is a jet in the first `n-1` variables of order `order - i`.
    pub fn split_last(&self) -> Vec<Jet<S>> {
        let n = self.nvars();
        let base: Vec<S> = self.base[..n - 1].to_vec();
        let mut parts: Vec<Jet<S>> = (0..=self.order).map(|i| Jet::zero(base.clone(), self.order - i)).collect();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = &self.layout.monos[i];
            let k = e[n - 1] as usize;
            parts[k].set(&e[..n - 1], c.clone());
        }
        parts
    }

    /// Inverse of `split_last`: `sum_i parts[i] * delta_y^i`.
    pub fn join_last(parts: &[Jet<S>], y_base: S, order: usize) -> Jet<S> {
        let mut base = parts[0].base.clone();
        base.push(y_base);
        let mut j = Jet::zero(base, order);
        let n = j.nvars();
        for (k, p) in parts.iter().enumerate() {
            if k > order {
                break;
            }
            for (e, c) in p.terms() {
                let d: usize = e.iter().map(|&x| x as usize).sum::<usize>() + k;
                if d > order {
                    continue;
                }
                let mut ee = e.to_vec();
                ee.push(k as u8);
                debug_assert_eq!(ee.len(), n);
                j.set(&ee, c.clone());
            }
        }
        j
    }

    /// Local root `y0(w)` of `self(w, y) = 0` near the base point, where `y`
    /// is the last variable; returned as a jet in the remaining variables.
    pub fn implicit_solve(&self) -> Result<Jet<S>, JetError> {
        if !self.coeffs[0].is_negligible(1.0) {
            return Err(JetError::Singular);
        }
        let n = self.nvars();
        let parts = self.split_last();
        let a1 = parts.get(1).map(|p| p.constant_term().clone()).unwrap_or_else(S::zero);
        if a1.is_negligible(1.0) {
            return Err(JetError::NotRegular);
        }
        let order = self.order;
        let wbase: Vec<S> = self.base[..n - 1].to_vec();
        let mut delta = Jet::zero(wbase.clone(), order);
        let mut attained = 0usize;
        let mut iterations = 0;
        loop {
            // Horner evaluation of h(w, delta) and dh/dy(w, delta)
            let mut hv = Jet::zero(wbase.clone(), order);
            let mut dv = Jet::zero(wbase.clone(), order);
            for (i, p) in parts.iter().enumerate().rev() {
                dv = dv.mul_to(&delta, order).add(&hv.truncate(order));
                hv = hv.mul_to(&delta, order).add(&pad(p, order));
                let _ = i;
            }
            let residual_val = hv.valuation();
            if residual_val > order {
                break;
            }
            iterations += 1;
            if iterations > 2 * (usize::BITS - order.leading_zeros()) as usize + 6 {
                if S::EXACT {
                    return Err(JetError::NoConvergence);
                }
                break;
            }
            let step = hv.mul_to(&dv.recip()?, order);
            delta = delta.sub(&step);
            delta.coeffs[0] = S::zero();
            attained = (2 * attained + 1).min(order + 1);
            if !S::EXACT && attained > order && iterations > 2 * (usize::BITS - order.leading_zeros()) as usize {
                break;
            }
        }
        let y0 = self.base[n - 1].clone();
        Ok(delta.add_constant(&y0))
    }

    /// Weierstrass-type factorization `self = U * (y - y0(w))` with `U` a unit.
    /// `U` has order one less than `self`.
    pub fn weierstrass_divide(&self) -> Result<(Jet<S>, Jet<S>), JetError> {
        let y0 = self.implicit_solve()?;
        let n = self.nvars();
        let delta = y0.add_constant(&-self.base[n - 1].clone());
        let parts = self.split_last();
        let order = self.order.saturating_sub(1);
        let kmax = parts.len() - 1;
        let mut q: Vec<Jet<S>> = vec![Jet::zero(y0.base.clone(), 0); kmax];
        let mut cur = Jet::zero(y0.base.clone(), 0);
        for i in (1..=kmax).rev() {
            let qi_order = order.saturating_sub(i - 1);
            cur = pad(&parts[i], qi_order).add(&cur.mul_to(&delta, qi_order));
            q[i - 1] = cur.truncate(qi_order);
            cur = q[i - 1].clone();
        }
        let u = Jet::join_last(&q, self.base[n - 1].clone(), order);
        Ok((u, y0))
    }

    /// Lifts an expression to its jet at `base` through `order`.
    pub fn lift(e: &Expr, vars: &[String], base: &[S], order: usize) -> Result<Jet<S>, JetError> {
        let b = base.to_vec();
        match e.node() {
            Node::Const(c) => Ok(Jet::constant(b, order, S::from_qi(c))),
            Node::Pi => Ok(Jet::constant(b, order, S::pi().ok_or(JetError::NotExact)?)),
            Node::Var(name) => {
                let i = vars.iter().position(|v| v == name).ok_or_else(|| JetError::Unbound(name.clone()))?;
                Ok(Jet::var(b, order, i))
            }
            Node::Sum(ts) => {
                let mut acc = Jet::zero(b, order);
                for t in ts {
                    acc = acc.add(&Jet::lift(t, vars, base, order)?);
                }
                Ok(acc)
            }
            Node::Product(fs) => {
                let mut acc = Jet::constant(b, order, S::one());
                for f in fs {
                    acc = acc.mul(&Jet::lift(f, vars, base, order)?).truncate(order);
                }
                Ok(acc)
            }
            Node::Pow(x, p) => {
                let j = Jet::lift(x, vars, base, order)?;
                if p.denom() == &1.into() && p < &Q::from_integer(0.into()) {
                    let k = num_traits::ToPrimitive::to_u64(&-p.numer()).ok_or(JetError::NotExact)?;
                    return j.powi(k).truncate(order).recip();
                }
                Ok(j.pow_rational(p)?.truncate(order))
            }
            Node::Exp(a) => Jet::lift(a, vars, base, order)?.exp(),
            Node::Log(a) => Jet::lift(a, vars, base, order)?.ln(),
        }
    }

    /// Exact conversion for jets over Gaussian rationals.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet {
            base: self.base.iter().map(&f).collect(),
            order: self.order,
            coeffs: self.coeffs.iter().map(&f).collect(),
            layout: self.layout.clone(),
        }
    }

    /// Reorders the local variables: new variable `i` is old variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Jet<S> {
        let base: Vec<S> = perm.iter().map(|&p| self.base[p].clone()).collect();
        let mut j = Jet::zero(base, self.order);
        for (e, c) in self.terms() {
            let ee: Vec<u8> = perm.iter().map(|&p| e[p]).collect();
            j.set(&ee, c.clone());
        }
        j
    }
}

fn pad<S: Scalar>(p: &Jet<S>, order: usize) -> Jet<S> {
    if p.order >= order {
        return p.truncate(order);
    }
    let mut j = Jet::zero(p.base.clone(), order);
    for (i, c) in p.coeffs.iter().enumerate() {
        j.coeffs[i] = c.clone();
    }
    j
}

impl Jet<QI> {
    pub fn to_float(&self) -> Jet<crate::number::BigC> {
        self.map(crate::number::BigC::from_qi)
    }
}

#[cfg(test)]
mod tests;

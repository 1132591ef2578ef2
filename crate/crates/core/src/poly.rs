//! Sparse multivariate Laurent polynomials over the Gaussian rationals and
//! rational functions built from them.

use std::collections::BTreeMap;
use std::fmt;

use crate::number::{Scalar, QI};

pub type Exps = Vec<i32>;

/// Sparse polynomial; exponents may be negative (Laurent). Keys are ordered
/// lexicographically with variable 0 most significant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exps, QI>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: QI) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, QI::one())
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        Poly::monomial(nvars, unit_exps(nvars, i, 1), QI::one())
    }

    pub fn monomial(nvars: usize, e: Exps, c: QI) -> Poly {
        debug_assert_eq!(e.len(), nvars);
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exps, QI)>) -> Poly {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &QI)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[i32]) -> QI {
        self.terms.get(e).cloned().unwrap_or_else(QI::zero)
    }

    pub fn add_term(&mut self, e: Exps, c: QI) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn constant_value(&self) -> Option<QI> {
        if self.is_constant() {
            Some(self.coeff(&vec![0; self.nvars]))
        } else {
            None
        }
    }

    /// True when no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k >= 0))
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.keys().map(|e| e.iter().sum::<i32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> i32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: usize) -> i32 {
        self.terms.keys().map(|e| e[v]).min().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Exps, &QI)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &QI) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), -v)).collect() }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), -c);
        }
        r
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn mul_monomial(&self, e: &[i32], c: &QI) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let ee: Exps = e1.iter().zip(e).map(|(a, b)| a + b).collect();
            r.add_term(ee, c1 * c);
        }
        r
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
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

    pub fn diff(&self, v: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] != 0 {
                let mut ee = e.clone();
                ee[v] -= 1;
                r.add_term(ee, c * &QI::int(e[v] as i64));
            }
        }
        r
    }

    /// Evaluates at a point; `None` when a negative power hits a zero coordinate.
    pub fn eval<S: Scalar>(&self, x: &[S]) -> Option<S> {
        let mut pows: Vec<BTreeMap<i32, S>> = vec![BTreeMap::new(); self.nvars];
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = S::from_qi(c);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !pows[v].contains_key(&k) {
                    let p = scalar_powi(&x[v], k)?;
                    pows[v].insert(k, p);
                }
                t = t * &pows[v][&k];
            }
            acc = acc + t;
        }
        Some(acc)
    }

    pub fn eval_qi(&self, x: &[QI]) -> Option<QI> {
        self.eval::<QI>(x)
    }

    /// Substitutes a polynomial for each variable (only valid when the
    /// substituted negative powers are monomials or the input is polynomial).
    pub fn compose(&self, subs: &[Poly]) -> Option<Poly> {
        let n = subs.first().map(|p| p.nvars).unwrap_or(self.nvars);
        let mut acc = Poly::zero(n);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(n, c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&subs[v].pow(k as u32));
                } else if k < 0 {
                    let s = &subs[v];
                    if s.num_terms() != 1 {
                        return None;
                    }
                    let (se, sc) = s.leading().unwrap();
                    let inv_e: Exps = se.iter().map(|a| -a * (-k)).collect();
                    t = t.mul_monomial(&inv_e, &sc.powi(k as i64)?);
                }
            }
            acc = acc.add(&t);
        }
        Some(acc)
    }

    /// Extends the variable list with `extra` new trailing variables.
    pub fn extend_vars(&self, extra: usize) -> Poly {
        let n = self.nvars + extra;
        Poly {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut ee = e.clone();
                    ee.resize(n, 0);
                    (ee, c.clone())
                })
                .collect(),
        }
    }

    /// Keeps only the first `n` variables; all dropped exponents must be zero.
    pub fn truncate_vars(&self, n: usize) -> Option<Poly> {
        let mut r = Poly::zero(n);
        for (e, c) in &self.terms {
            if e[n..].iter().any(|&k| k != 0) {
                return None;
            }
            r.add_term(e[..n].to_vec(), c.clone());
        }
        Some(r)
    }

    /// Splits off the monomial `x^m` with `m` the componentwise minimum exponent.
    pub fn monomial_content(&self) -> Exps {
        let mut m = vec![i32::MAX; self.nvars];
        for e in self.terms.keys() {
            for (a, &b) in m.iter_mut().zip(e) {
                *a = (*a).min(b);
            }
        }
        if self.terms.is_empty() {
            vec![0; self.nvars]
        } else {
            m
        }
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv().unwrap()),
            None => self.clone(),
        }
    }

    /// Coefficients with respect to variable `v`: `self = sum_k coef[k] v^k`.
    fn coeffs_in(&self, v: usize) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ee = e.clone();
            let k = ee[v];
            ee[v] = 0;
            out.entry(k).or_insert_with(|| Poly::zero(self.nvars)).add_term(ee, c.clone());
        }
        out
    }

    fn lc_in(&self, v: usize) -> Poly {
        self.coeffs_in(v).into_iter().next_back().map(|(_, p)| p).unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let dinv = dc.inv()?;
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            let qe: Exps = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            if qe.iter().any(|&k| k < 0) && self.is_polynomial() && d.is_polynomial() {
                return None;
            }
            let qc = &rc * &dinv;
            quo.add_term(qe.clone(), qc.clone());
            rem = rem.sub(&d.mul_monomial(&qe, &qc));
            if rem.num_terms() > 10_000 + 50 * self.num_terms() {
                return None;
            }
        }
        Some(quo)
    }

    fn pseudo_rem(&self, b: &Poly, v: usize) -> Poly {
        let db = b.degree_in(v);
        let lb = b.lc_in(v);
        let mut a = self.clone();
        while !a.is_zero() && a.degree_in(v) >= db {
            let da = a.degree_in(v);
            let la = a.lc_in(v);
            let mut shift = vec![0; self.nvars];
            shift[v] = da - db;
            a = a.mul(&lb).sub(&b.mul(&la).mul_monomial(&shift, &QI::one()));
        }
        a
    }

    /// Content with respect to `v`: gcd of the coefficients in `v`.
    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for (_, c) in self.coeffs_in(v) {
            g = g.gcd(&c);
            if g.is_constant() && !g.is_zero() {
                return Poly::one(self.nvars);
            }
        }
        g
    }

    /// Monic greatest common divisor of two polynomials (nonnegative exponents).
    pub fn gcd(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.monic();
        }
        if o.is_zero() {
            return self.monic();
        }
        let n = self.nvars;
        let v = (0..n).find(|&v| self.degree_in(v) > 0 || o.degree_in(v) > 0);
        let Some(v) = v else {
            return Poly::one(n);
        };
        if self.degree_in(v) == 0 {
            return self.gcd(&o.content_in(v));
        }
        if o.degree_in(v) == 0 {
            return o.gcd(&self.content_in(v));
        }
        let ca = self.content_in(v);
        let cb = o.content_in(v);
        let c = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = o.div_exact(&cb).expect("content divides");
        if a.degree_in(v) < b.degree_in(v) {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() && b.degree_in(v) > 0 {
            let r = a.pseudo_rem(&b, v);
            a = b;
            b = if r.is_zero() { r } else { r.div_exact(&r.content_in(v)).expect("content divides") };
        }
        let g = if b.is_zero() { a } else { Poly::one(n) };
        let g = g.div_exact(&g.content_in(v)).expect("content divides");
        c.mul(&g).monic()
    }
}

fn unit_exps(n: usize, i: usize, k: i32) -> Exps {
    let mut e = vec![0; n];
    e[i] = k;
    e
}

pub fn scalar_powi<S: Scalar>(x: &S, k: i32) -> Option<S> {
    let base = if k < 0 { x.inv()? } else { x.clone() };
    let mut k = k.unsigned_abs();
    let mut acc = S::one();
    let mut b = base;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * &b;
        }
        k >>= 1;
        if k > 0 {
            b = b.clone() * &b;
        }
    }
    Some(acc)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display(&names))
    }
}

impl Poly {
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(v, &k)| if k == 1 { names[v].clone() } else { format!("{}^({k})", names[v]) })
                .collect();
            let cs = format!("{c}");
            let term = if mono.is_empty() {
                format!("({cs})")
            } else if c.is_one() {
                mono.join("*")
            } else {
                format!("({cs})*{}", mono.join("*"))
            };
            if idx > 0 {
                out.push_str(" + ");
            }
            out.push_str(&term);
        }
        out
    }
}

/// Quotient of polynomials kept with gcd cancelled and monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        let n = num.nvars();
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(n) };
        }
        // clear Laurent monomials into the other side
        let mn = num.monomial_content();
        let md = den.monomial_content();
        let shift: Exps = mn.iter().zip(&md).map(|(a, b)| -(*a.min(b))).collect();
        let num = num.mul_monomial(&shift, &QI::one());
        let den = den.mul_monomial(&shift, &QI::one());
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let lc = den.leading().unwrap().1.inv().unwrap();
        RatFunc { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let n = p.nvars();
        RatFunc::new(p, Poly::one(n))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone());
        }
        RatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFunc::new(self.den.clone(), self.num.clone()))
        }
    }

    pub fn div(&self, o: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(&o.inv()?))
    }

    pub fn powi(&self, k: i64) -> Option<RatFunc> {
        let b = if k < 0 { self.inv()? } else { self.clone() };
        let k = k.unsigned_abs() as u32;
        Some(RatFunc::new(b.num.pow(k), b.den.pow(k)))
    }

    pub fn diff(&self, v: usize) -> RatFunc {
        let n = self.num.diff(v).mul(&self.den).sub(&self.num.mul(&self.den.diff(v)));
        RatFunc::new(n, self.den.mul(&self.den))
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Option<S> {
        let n = self.num.eval(x)?;
        let d = self.den.eval(x)?;
        n.div(&d)
    }
}

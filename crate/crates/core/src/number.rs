//! Exact Gaussian rationals, arbitrary precision complex floats and the
//! `Scalar` abstraction shared by jets, matrices and the expansion engine.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint, Sign as BSign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub const DEFAULT_PRECISION: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static PRECISION: Cell<usize> = const { Cell::new(DEFAULT_PRECISION) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

/// Working precision (bits) for float arithmetic on this thread.
pub fn precision() -> usize {
    PRECISION.with(|p| p.get())
}

pub fn set_precision(bits: usize) {
    PRECISION.with(|p| p.set(bits.max(64)));
}

/// Runs `f` with a temporary working precision.
pub fn with_precision<T>(bits: usize, f: impl FnOnce() -> T) -> T {
    let old = precision();
    set_precision(bits);
    let out = f();
    set_precision(old);
    out
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn sqrt_rational(x: &Q) -> Option<Q> {
    root_rational(x, 2)
}

/// Exact principal `k`-th root of a nonnegative rational.
pub fn root_rational(x: &Q, k: u32) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().to_biguint()?;
    let d = x.denom().to_biguint()?;
    let rn = n.nth_root(k);
    let rd = d.nth_root(k);
    if num_traits::pow(rn.clone(), k as usize) == n && num_traits::pow(rd.clone(), k as usize) == d {
        Some(Q::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

pub fn q_pow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // to_f64 fails only on extreme magnitudes; fall back on logarithms
        let n = x.numer().bits() as i64;
        let d = x.denom().bits() as i64;
        let s = if x.is_negative() { -1.0 } else { 1.0 };
        if n - d > 1000 {
            s * f64::INFINITY
        } else {
            0.0
        }
    })
}

/// Parses "p", "p/q", or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((a, b)) = s.split_once('.') {
        let neg = a.starts_with('-');
        let ip: BigInt = if a.is_empty() || a == "-" || a == "+" { BigInt::zero() } else { a.parse().ok()? };
        if !b.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let fp: BigInt = if b.is_empty() { BigInt::zero() } else { b.parse().ok()? };
        let scale = num_traits::pow(BigInt::from(10), b.len());
        let frac = Q::new(fp, scale);
        let ipq = Q::from_integer(ip);
        return Some(if neg { ipq - frac } else { ipq + frac });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Q::from_integer(n))
}

pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Gaussian rational `(re + im*i) / den` kept in lowest terms with `den > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QI {
    re: BigInt,
    im: BigInt,
    den: BigInt,
}

impl QI {
    fn raw(re: BigInt, im: BigInt, den: BigInt) -> QI {
        let mut z = QI { re, im, den };
        z.reduce();
        z
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            self.re = -&self.re;
            self.im = -&self.im;
            self.den = -&self.den;
        }
        if self.re.is_zero() && self.im.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let g = self.re.gcd(&self.im).gcd(&self.den);
        if !g.is_one() {
            self.re /= &g;
            self.im /= &g;
            self.den /= &g;
        }
    }

    pub fn new(re: Q, im: Q) -> QI {
        let den = re.denom().lcm(im.denom());
        let a = re.numer() * (&den / re.denom());
        let b = im.numer() * (&den / im.denom());
        QI::raw(a, b, den)
    }

    pub fn real(re: Q) -> QI {
        let (n, d) = re.into();
        QI { re: n, im: BigInt::zero(), den: d }
    }

    pub fn int(n: i64) -> QI {
        QI { re: BigInt::from(n), im: BigInt::zero(), den: BigInt::one() }
    }

    pub fn frac(n: i64, d: i64) -> QI {
        QI::raw(BigInt::from(n), BigInt::zero(), BigInt::from(d))
    }

    pub fn zero() -> QI {
        QI::int(0)
    }

    pub fn one() -> QI {
        QI::int(1)
    }

    pub fn i() -> QI {
        QI { re: BigInt::zero(), im: BigInt::one(), den: BigInt::one() }
    }

    pub fn re(&self) -> Q {
        Q::new(self.re.clone(), self.den.clone())
    }

    pub fn im(&self) -> Q {
        Q::new(self.im.clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.den.is_one() && self.re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.den.is_one()
    }

    /// The value as a rational when it is real.
    pub fn as_rational(&self) -> Option<Q> {
        if self.is_real() {
            Some(self.re())
        } else {
            None
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.re.to_i64()
        } else {
            None
        }
    }

    pub fn conj(&self) -> QI {
        QI { re: self.re.clone(), im: -&self.im, den: self.den.clone() }
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sqr(&self) -> Q {
        Q::new(&self.re * &self.re + &self.im * &self.im, &self.den * &self.den)
    }

    pub fn inv(&self) -> Option<QI> {
        if self.is_zero() {
            return None;
        }
        let n2 = &self.re * &self.re + &self.im * &self.im;
        Some(QI::raw(&self.re * &self.den, -(&self.im * &self.den), n2))
    }

    pub fn div(&self, o: &QI) -> Option<QI> {
        Some(self * &o.inv()?)
    }

    pub fn scale(&self, k: &Q) -> QI {
        QI::raw(&self.re * k.numer(), &self.im * k.numer(), &self.den * k.denom())
    }

    pub fn powi(&self, e: i64) -> Option<QI> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QI::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Some(acc)
    }

    /// Principal square root when it is again a Gaussian rational.
    pub fn sqrt(&self) -> Option<QI> {
        if self.is_real() {
            let r = self.re();
            return if r.is_negative() {
                Some(QI::new(Q::zero(), sqrt_rational(&-r)?))
            } else {
                Some(QI::real(sqrt_rational(&r)?))
            };
        }
        let a = self.re();
        let b = self.im();
        let m = sqrt_rational(&self.norm_sqr())?;
        let two = qi(2);
        let x = sqrt_rational(&((&m + &a) / &two))?;
        let y = &b / (&two * &x);
        Some(QI::new(x, y))
    }

    /// Principal power `z^(p/q)` when exactly representable.
    pub fn pow_rational(&self, e: &Q) -> Option<QI> {
        if e.denom().is_one() {
            return self.powi(e.numer().to_i64()?);
        }
        if self.is_zero() {
            return if e.is_positive() { Some(QI::zero()) } else { None };
        }
        let k = e.denom().to_u32()?;
        let p = e.numer().to_i64()?;
        let root = if self.is_real() && !self.re.is_negative() {
            QI::real(root_rational(&self.re(), k)?)
        } else if k == 2 {
            self.sqrt()?
        } else if k.is_power_of_two() {
            let mut z = self.clone();
            let mut kk = k;
            while kk > 1 {
                z = z.sqrt()?;
                kk /= 2;
            }
            z
        } else {
            return None;
        };
        root.powi(p)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re()), q_to_f64(&self.im()))
    }

    pub fn to_bigc(&self) -> BigC {
        BigC::from_qi(self)
    }
}

impl Default for QI {
    fn default() -> Self {
        QI::zero()
    }
}

impl Ord for QI {
    fn cmp(&self, o: &Self) -> Ordering {
        self.re().cmp(&o.re()).then_with(|| self.im().cmp(&o.im()))
    }
}

impl PartialOrd for QI {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl From<Q> for QI {
    fn from(x: Q) -> QI {
        QI::real(x)
    }
}

impl From<i64> for QI {
    fn from(x: i64) -> QI {
        QI::int(x)
    }
}

impl fmt::Display for QI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = self.re();
        let im = self.im();
        if im.is_zero() {
            return write!(f, "{}", format_rational(&re));
        }
        let imag = if im.is_one() {
            "i".to_string()
        } else if (-im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", format_rational(&im))
        };
        if re.is_zero() {
            write!(f, "{imag}")
        } else if imag.starts_with('-') {
            write!(f, "{}{}", format_rational(&re), imag)
        } else {
            write!(f, "{}+{}", format_rational(&re), imag)
        }
    }
}

impl fmt::Debug for QI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a QI> for &'a QI {
    type Output = QI;
    fn add(self, o: &QI) -> QI {
        if self.den == o.den {
            return QI::raw(&self.re + &o.re, &self.im + &o.im, self.den.clone());
        }
        QI::raw(
            &self.re * &o.den + &o.re * &self.den,
            &self.im * &o.den + &o.im * &self.den,
            &self.den * &o.den,
        )
    }
}

impl<'a> Sub<&'a QI> for &'a QI {
    type Output = QI;
    fn sub(self, o: &QI) -> QI {
        if self.den == o.den {
            return QI::raw(&self.re - &o.re, &self.im - &o.im, self.den.clone());
        }
        QI::raw(
            &self.re * &o.den - &o.re * &self.den,
            &self.im * &o.den - &o.im * &self.den,
            &self.den * &o.den,
        )
    }
}

impl<'a> Mul<&'a QI> for &'a QI {
    type Output = QI;
    fn mul(self, o: &QI) -> QI {
        if self.im.is_zero() && o.im.is_zero() {
            return QI::raw(&self.re * &o.re, BigInt::zero(), &self.den * &o.den);
        }
        QI::raw(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
            &self.den * &o.den,
        )
    }
}

impl Neg for &QI {
    type Output = QI;
    fn neg(self) -> QI {
        QI { re: -&self.re, im: -&self.im, den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl<'a> Add<&'a $t> for $t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                &self + o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl<'a> Sub<&'a $t> for $t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                &self - o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl<'a> Mul<&'a $t> for $t {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                &self * o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(QI);
owned_ops!(BigC);

/// Complex number with `BigFloat` parts.
#[derive(Clone)]
pub struct BigC {
    pub re: BigFloat,
    pub im: BigFloat,
}

fn bf_zero() -> BigFloat {
    BigFloat::from_word(0, precision())
}

pub fn bf_from_int(n: &BigInt) -> BigFloat {
    let p = precision().max(n.bits() as usize + 64);
    let (sign, digits) = n.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_word(0, p);
    }
    let base = BigFloat::from_word(0, p).add(&BigFloat::from_u64(u64::MAX, p), p, RM);
    let base = base.add(&BigFloat::from_word(1, p), p, RM);
    let mut acc = BigFloat::from_word(0, p);
    for d in digits.iter().rev() {
        acc = acc.mul(&base, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
    }
    if sign == BSign::Minus {
        acc.inv_sign();
    }
    acc
}

pub fn bf_from_q(x: &Q) -> BigFloat {
    let p = precision();
    let n = bf_from_int(x.numer());
    if x.denom().is_one() {
        let mut n = n;
        let _ = n.set_precision(p, RM);
        return n;
    }
    n.div(&bf_from_int(x.denom()), p, RM)
}

/// Exact rational value of a finite `BigFloat`.
pub fn bf_to_q(x: &BigFloat) -> Option<Q> {
    if x.is_zero() {
        return Some(Q::zero());
    }
    let (words, _n, sign, e, _) = x.as_raw_parts()?;
    let mut m = BigUint::zero();
    for w in words.iter().rev() {
        m = (m << (std::mem::size_of::<Word>() * 8)) + BigUint::from(*w);
    }
    let shift = e as i64 - (std::mem::size_of_val(words) * 8) as i64;
    let mut v = Q::from_integer(BigInt::from(m));
    if shift >= 0 {
        v *= Q::from_integer(BigInt::one() << shift as usize);
    } else {
        v /= Q::from_integer(BigInt::one() << (-shift) as usize);
    }
    if sign == Sign::Neg {
        v = -v;
    }
    Some(v)
}

pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite");
    let top = *words.last().unwrap() as f64;
    let next = if words.len() > 1 { words[words.len() - 2] as f64 / 18446744073709551616.0 } else { 0.0 };
    let v = (top + next) * 2f64.powi(e - 64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

pub fn bf_pi() -> BigFloat {
    let p = precision();
    with_consts(|cc| cc.pi(p, RM))
}

impl BigC {
    pub fn new(re: BigFloat, im: BigFloat) -> BigC {
        BigC { re, im }
    }

    pub fn zero() -> BigC {
        BigC { re: bf_zero(), im: bf_zero() }
    }

    pub fn one() -> BigC {
        BigC { re: BigFloat::from_word(1, precision()), im: bf_zero() }
    }

    pub fn from_qi(z: &QI) -> BigC {
        BigC { re: bf_from_q(&z.re()), im: bf_from_q(&z.im()) }
    }

    pub fn from_f64(re: f64, im: f64) -> BigC {
        let p = precision();
        BigC { re: BigFloat::from_f64(re, p), im: BigFloat::from_f64(im, p) }
    }

    pub fn pi() -> BigC {
        BigC { re: bf_pi(), im: bf_zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    pub fn abs(&self) -> BigFloat {
        let p = precision();
        let s = self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM);
        s.sqrt(p, RM)
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> BigFloat {
        let p = precision();
        let pi = bf_pi();
        if self.re.is_zero() {
            if self.im.is_zero() {
                return bf_zero();
            }
            let half = pi.div(&BigFloat::from_word(2, p), p, RM);
            return if self.im.is_negative() { BigFloat::neg(&half) } else { half };
        }
        let t = with_consts(|cc| self.im.div(&self.re, p, RM).atan(p, RM, cc));
        if self.re.is_positive() {
            t
        } else if self.im.is_negative() {
            t.sub(&pi, p, RM)
        } else {
            t.add(&pi, p, RM)
        }
    }

    pub fn inv(&self) -> Option<BigC> {
        if self.is_zero() {
            return None;
        }
        let p = precision();
        let n = self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM);
        Some(BigC { re: self.re.div(&n, p, RM), im: BigFloat::neg(&self.im).div(&n, p, RM) })
    }

    pub fn exp(&self) -> BigC {
        let p = precision();
        with_consts(|cc| {
            let m = self.re.exp(p, RM, cc);
            let c = self.im.cos(p, RM, cc);
            let s = self.im.sin(p, RM, cc);
            BigC { re: m.mul(&c, p, RM), im: m.mul(&s, p, RM) }
        })
    }

    pub fn ln(&self) -> Option<BigC> {
        if self.is_zero() {
            return None;
        }
        let p = precision();
        let r = self.abs();
        let l = with_consts(|cc| r.ln(p, RM, cc));
        Some(BigC { re: l, im: self.arg() })
    }

    pub fn sqrt(&self) -> BigC {
        if self.is_zero() {
            return BigC::zero();
        }
        let p = precision();
        let two = BigFloat::from_word(2, p);
        let r = self.abs();
        let x = r.add(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
        if x.is_zero() {
            let y = r.sub(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
            return BigC { re: x, im: if self.im.is_negative() { BigFloat::neg(&y) } else { y } };
        }
        let y = self.im.div(&x.mul(&two, p, RM), p, RM);
        BigC { re: x, im: y }
    }

    pub fn pow_rational(&self, e: &Q) -> Option<BigC> {
        if e.denom().is_one() {
            let n = e.numer().to_i64()?;
            let base = if n < 0 { self.inv()? } else { self.clone() };
            let mut k = n.unsigned_abs();
            let mut acc = BigC::one();
            let mut b = base;
            while k > 0 {
                if k & 1 == 1 {
                    acc = &acc * &b;
                }
                k >>= 1;
                if k > 0 {
                    b = &b * &b;
                }
            }
            return Some(acc);
        }
        if self.is_zero() {
            return if e.is_positive() { Some(BigC::zero()) } else { None };
        }
        if *e == q(1, 2) {
            return Some(self.sqrt());
        }
        let l = self.ln()?;
        Some((&l * &BigC::from_qi(&QI::real(e.clone()))).exp())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(bf_to_f64(&self.re), bf_to_f64(&self.im))
    }

    pub fn re_q(&self) -> Option<Q> {
        bf_to_q(&self.re)
    }

    pub fn im_q(&self) -> Option<Q> {
        bf_to_q(&self.im)
    }
}

impl fmt::Debug for BigC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.to_c64();
        write!(f, "({}{:+}i)", c.re, c.im)
    }
}

impl PartialEq for BigC {
    fn eq(&self, o: &Self) -> bool {
        self.re.cmp(&o.re) == Some(0) && self.im.cmp(&o.im) == Some(0)
    }
}

impl<'a> Add<&'a BigC> for &'a BigC {
    type Output = BigC;
    fn add(self, o: &BigC) -> BigC {
        let p = precision();
        BigC { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM) }
    }
}

impl<'a> Sub<&'a BigC> for &'a BigC {
    type Output = BigC;
    fn sub(self, o: &BigC) -> BigC {
        let p = precision();
        BigC { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM) }
    }
}

impl<'a> Mul<&'a BigC> for &'a BigC {
    type Output = BigC;
    fn mul(self, o: &BigC) -> BigC {
        let p = precision();
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        BigC { re, im }
    }
}

impl Neg for &BigC {
    type Output = BigC;
    fn neg(self) -> BigC {
        BigC { re: BigFloat::neg(&self.re), im: BigFloat::neg(&self.im) }
    }
}

/// Field operations needed by jets, matrices and the expansion engine.
///
/// `QI` is exact; transcendental operations on it return `None` unless the
/// result is again a Gaussian rational. `BigC` always succeeds away from
/// singularities.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_qi(z: &QI) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    fn exp(&self) -> Option<Self>;
    fn ln(&self) -> Option<Self>;
    fn pow_rational(&self, e: &Q) -> Option<Self>;
    fn pi() -> Option<Self>;
    fn to_c64(&self) -> Complex64;
    fn to_number(&self) -> Number;

    fn from_int(n: i64) -> Self {
        Self::from_qi(&QI::int(n))
    }

    fn from_q(x: &Q) -> Self {
        Self::from_qi(&QI::real(x.clone()))
    }

    fn div(&self, o: &Self) -> Option<Self> {
        Some(self.clone() * &o.inv()?)
    }

    fn scale_int(&self, k: i64) -> Self {
        self.clone() * &Self::from_int(k)
    }

    /// Magnitude used for pivoting and coordinate selection.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Numerical smallness for float scalars; exact zero test for exact ones.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            let tol = 2f64.powi(-(precision() as i32) + 16).max(1e-290);
            self.magnitude() <= tol * scale.max(1.0)
        }
    }
}

impl Scalar for QI {
    const EXACT: bool = true;
    fn zero() -> Self {
        QI::zero()
    }
    fn one() -> Self {
        QI::one()
    }
    fn from_qi(z: &QI) -> Self {
        z.clone()
    }
    fn is_zero(&self) -> bool {
        QI::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        QI::inv(self)
    }
    fn exp(&self) -> Option<Self> {
        if self.is_zero() {
            Some(QI::one())
        } else {
            None
        }
    }
    fn ln(&self) -> Option<Self> {
        if self.is_one() {
            Some(QI::zero())
        } else {
            None
        }
    }
    fn pow_rational(&self, e: &Q) -> Option<Self> {
        QI::pow_rational(self, e)
    }
    fn pi() -> Option<Self> {
        None
    }
    fn to_c64(&self) -> Complex64 {
        QI::to_c64(self)
    }
    fn to_number(&self) -> Number {
        Number::Exact(self.clone())
    }
}

impl Scalar for BigC {
    const EXACT: bool = false;
    fn zero() -> Self {
        BigC::zero()
    }
    fn one() -> Self {
        BigC::one()
    }
    fn from_qi(z: &QI) -> Self {
        BigC::from_qi(z)
    }
    fn is_zero(&self) -> bool {
        BigC::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        BigC::inv(self)
    }
    fn exp(&self) -> Option<Self> {
        Some(BigC::exp(self))
    }
    fn ln(&self) -> Option<Self> {
        BigC::ln(self)
    }
    fn pow_rational(&self, e: &Q) -> Option<Self> {
        BigC::pow_rational(self, e)
    }
    fn pi() -> Option<Self> {
        Some(BigC::pi())
    }
    fn to_c64(&self) -> Complex64 {
        BigC::to_c64(self)
    }
    fn to_number(&self) -> Number {
        Number::Float(self.clone())
    }
}

/// A value that is exact whenever possible.
#[derive(Clone, Debug)]
pub enum Number {
    Exact(QI),
    Float(BigC),
}

impl Number {
    pub fn int(n: i64) -> Number {
        Number::Exact(QI::int(n))
    }

    pub fn exact(&self) -> Option<&QI> {
        match self {
            Number::Exact(z) => Some(z),
            Number::Float(_) => None,
        }
    }

    pub fn to_bigc(&self) -> BigC {
        match self {
            Number::Exact(z) => BigC::from_qi(z),
            Number::Float(z) => z.clone(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Number::Exact(z) => z.to_c64(),
            Number::Float(z) => z.to_c64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Exact(z) => z.is_zero(),
            Number::Float(z) => z.is_zero(),
        }
    }

    fn lift2(&self, o: &Number, fe: impl Fn(&QI, &QI) -> QI, ff: impl Fn(&BigC, &BigC) -> BigC) -> Number {
        match (self, o) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(fe(a, b)),
            _ => Number::Float(ff(&self.to_bigc(), &o.to_bigc())),
        }
    }

    pub fn add(&self, o: &Number) -> Number {
        self.lift2(o, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, o: &Number) -> Number {
        self.lift2(o, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, o: &Number) -> Number {
        self.lift2(o, |a, b| a * b, |a, b| a * b)
    }

    pub fn neg(&self) -> Number {
        match self {
            Number::Exact(a) => Number::Exact(-a),
            Number::Float(a) => Number::Float(-a),
        }
    }

    pub fn inv(&self) -> Option<Number> {
        match self {
            Number::Exact(a) => a.inv().map(Number::Exact),
            Number::Float(a) => a.inv().map(Number::Float),
        }
    }

    pub fn pow_rational(&self, e: &Q) -> Option<Number> {
        match self {
            Number::Exact(a) => match a.pow_rational(e) {
                Some(z) => Some(Number::Exact(z)),
                None => BigC::from_qi(a).pow_rational(e).map(Number::Float),
            },
            Number::Float(a) => a.pow_rational(e).map(Number::Float),
        }
    }

    pub fn exp(&self) -> Number {
        match self {
            Number::Exact(a) if a.is_zero() => Number::int(1),
            _ => Number::Float(self.to_bigc().exp()),
        }
    }

    pub fn ln(&self) -> Option<Number> {
        match self {
            Number::Exact(a) if a.is_one() => Some(Number::int(0)),
            _ => self.to_bigc().ln().map(Number::Float),
        }
    }
}

impl PartialEq for Number {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Number::Exact(a), Number::Exact(b)) => a == b,
            _ => self.to_bigc() == o.to_bigc(),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(z) => write!(f, "{z}"),
            Number::Float(z) => {
                let re = bf_to_q(&z.re).map(|x| render_significant(&x, 20)).unwrap_or_else(|| "nan".into());
                if z.im.is_zero() {
                    write!(f, "{re}")
                } else {
                    let im = bf_to_q(&z.im).map(|x| render_significant(&x, 20)).unwrap_or_else(|| "nan".into());
                    write!(f, "{re}{}{im}*i", if im.starts_with('-') { "" } else { "+" })
                }
            }
        }
    }
}

fn round_half_even(n: &BigInt, d: &BigInt) -> BigInt {
    let (qt, r) = n.div_mod_floor(d);
    let twice: BigInt = &r * 2;
    match twice.cmp(d) {
        Ordering::Less => qt,
        Ordering::Greater => qt + 1,
        Ordering::Equal => {
            if qt.is_even() {
                qt
            } else {
                qt + 1
            }
        }
    }
}

/// Renders `x` with `digits` significant decimal digits, rounding half to even.
pub fn render_significant(x: &Q, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // exponent estimate: 10^e <= a < 10^(e+1)
    let mut e = (a.numer().to_string().len() as i64) - (a.denom().to_string().len() as i64);
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> Q {
        if k >= 0 {
            Q::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Q::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while a >= pow10(e + 1) {
        e += 1;
    }
    while a < pow10(e) {
        e -= 1;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    let mut m = round_half_even(scaled.numer(), scaled.denom());
    let mut shift = shift;
    if m.to_string().len() > digits {
        m /= 10;
        shift -= 1;
    }
    let s = m.to_string();
    let body = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{s}{zeros}")
    } else if (shift as usize) < s.len() {
        let (ip, fp) = s.split_at(s.len() - shift as usize);
        format!("{ip}.{fp}")
    } else {
        format!("0.{}{}", "0".repeat(shift as usize - s.len()), s)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Renders `x` with exactly `places` digits after the point, rounding half to even.
pub fn render_fixed(x: &Q, places: usize) -> String {
    let neg = x.is_negative();
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = x.abs() * Q::from_integer(scale);
    let m = round_half_even(scaled.numer(), scaled.denom()).to_string();
    let m = if m.len() <= places { format!("{}{}", "0".repeat(places + 1 - m.len()), m) } else { m };
    let (ip, fp) = m.split_at(m.len() - places);
    let body = if places == 0 { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg && body.chars().any(|c| c.is_ascii_digit() && c != '0') {
        format!("-{body}")
    } else {
        body
    }
}

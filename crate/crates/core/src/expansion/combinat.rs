use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::number::Q;

/// Unsigned Stirling number of the first kind `[m, l]`.
pub fn stirling1(m: usize, l: usize) -> BigInt {
    if l > m {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::one()];
    for n in 0..m {
        let mut next = vec![BigInt::zero(); n + 2];
        for (k, v) in row.iter().enumerate() {
            next[k] += v * BigInt::from(n);
            next[k + 1] += v;
        }
        row = next;
    }
    row[l].clone()
}

/// Falling factorial `a (a-1) ... (a-k+1)`.
pub fn falling(a: &Q, k: usize) -> Q {
    let mut acc = Q::one();
    for i in 0..k {
        acc *= a - Q::from_integer(BigInt::from(i));
    }
    acc
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficients (constant term first) in `n` of `binom(r-1, j) (alpha_k n - 1)^{falling r-1-j}`.
pub fn p_poly(j: usize, r: usize, alpha_k: i64) -> Vec<Q> {
    let mut poly = vec![Q::from_integer(binomial(r - 1, j))];
    for i in 0..(r - 1 - j) {
        let shift = Q::from_integer(BigInt::from(-1 - i as i64));
        let mut next = vec![Q::zero(); poly.len() + 1];
        for (e, c) in poly.iter().enumerate() {
            next[e] += c * &shift;
            next[e + 1] += c * Q::from_integer(alpha_k.into());
        }
        poly = next;
    }
    poly
}

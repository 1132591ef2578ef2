//! Dense linear algebra over a `Scalar` field.

use crate::number::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = r[(i, j)].clone() + a.clone() * &o[(k, j)];
                    r[(i, j)] = v;
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc = acc + a.clone() * b;
                }
                acc
            })
            .collect()
    }

    fn scale_hint(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    /// Row echelon form in place; returns pivot columns.
    fn echelon(&mut self, aug_cols: usize) -> Vec<usize> {
        let scale = self.scale_hint();
        let mut pivots = Vec::new();
        let mut r = 0;
        let ncols = self.cols - aug_cols;
        for c in 0..ncols {
            if r == self.rows {
                break;
            }
            let mut best: Option<usize> = None;
            let mut best_mag = 0.0;
            for i in r..self.rows {
                let v = &self[(i, c)];
                if v.is_negligible(scale) {
                    continue;
                }
                if S::EXACT {
                    best = Some(i);
                    break;
                }
                let m = v.magnitude();
                if m > best_mag {
                    best_mag = m;
                    best = Some(i);
                }
            }
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self[(r, j)].clone() * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let v = self[(i, j)].clone() - f.clone() * &self[(r, j)];
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon(0).len()
    }

    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let scale = self.scale_hint();
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let mut piv = None;
            let mut best = 0.0;
            for i in c..n {
                if m[(i, c)].is_negligible(scale) {
                    continue;
                }
                if S::EXACT {
                    piv = Some(i);
                    break;
                }
                let mg = m[(i, c)].magnitude();
                if mg > best {
                    best = mg;
                    piv = Some(i);
                }
            }
            let Some(p) = piv else { return S::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pv = m[(c, c)].clone();
            det = det * &pv;
            let inv = pv.inv().unwrap();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() * &inv;
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * &m[(c, j)];
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let piv = aug.echelon(n);
        if piv.len() < n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Some solution of `self * x = b` (free variables set to zero), or `None`
    /// if the system is inconsistent.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let scale = aug.scale_hint();
        let piv = aug.echelon(1);
        for i in piv.len()..self.rows {
            if !aug[(i, self.cols)].is_negligible(scale) {
                return None;
            }
        }
        let mut x = vec![S::zero(); self.cols];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let piv = m.echelon(0);
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (r, &c) in piv.iter().enumerate() {
                    v[c] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{BigC, QI};

    fn m(rows: &[&[i64]]) -> Matrix<QI> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| QI::int(x)).collect()).collect())
    }

    #[test]
    fn det_inverse_solve() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.det(), QI::int(18));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
        let x = a.solve(&[QI::int(3), QI::int(5), QI::int(5)]).unwrap();
        assert_eq!(x, vec![QI::int(1), QI::int(1), QI::int(1)]);
    }

    #[test]
    fn rank_and_consistency() {
        let a = m(&[&[1, 2], &[2, 4], &[0, 1]]);
        assert_eq!(a.rank(), 2);
        assert!(a.solve(&[QI::int(1), QI::int(3), QI::int(0)]).is_none());
        assert_eq!(a.solve(&[QI::int(3), QI::int(6), QI::int(1)]).unwrap(), vec![QI::int(1), QI::int(1)]);
        let s = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(s.rank(), 1);
        let ns = s.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(s.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn float_matches_exact() {
        let a = m(&[&[4, -2], &[1, 1]]);
        let af: Matrix<BigC> = Matrix::from_rows((0..2).map(|i| a.row(i).iter().map(BigC::from_qi).collect()).collect());
        assert!((af.det().to_c64().re - 6.0).abs() < 1e-30);
        let inv = af.inverse().unwrap();
        assert!((inv[(0, 0)].to_c64().re - 1.0 / 6.0).abs() < 1e-30);
    }
}

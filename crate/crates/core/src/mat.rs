//! Dense row-major matrices and Gauss-Jordan elimination.

use core::ops::{Add, Mul, Neg, Sub};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<F> {
    pub reduced: Mat<F>,
    pub pivots: Vec<usize>,
}

impl<F: Scalar> Mat<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds from nested rows; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Shape(format!("row of length {} where {cols} expected", row.len())));
            }
            data.extend(row);
        }
        Ok(Mat { rows: r, cols, data })
    }

    /// Integer convenience constructor, mostly for fixtures and tests.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| F::from_i64(rows[i][j]))
    }

    /// Column matrix from a vector.
    pub fn column(v: &[F]) -> Self {
        Mat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn diag(entries: &[F]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Equality up to the backend's zero test.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.data.iter().zip(&other.data).all(|(a, b)| a.sub(b).is_zero())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &F) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mul(s)).collect() }
    }

    pub fn trace(&self) -> F {
        let mut t = F::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t.add(self.get(i, i));
        }
        t
    }

    pub fn mat_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "mat_vec shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.add(b))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.sub(b))
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&F, &F) -> F) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        assert_eq!(self.shape(), rhs.shape(), "add_assign shape");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a = a.add(b);
            }
        }
    }

    /// Horizontal concatenation; `rows` fixes the height when `parts` is empty.
    pub fn hstack(rows: usize, parts: &[&Mat<F>]) -> Self {
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack height");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    /// Vertical concatenation; `cols` fixes the width when `parts` is empty.
    pub fn vstack(cols: usize, parts: &[&Mat<F>]) -> Self {
        let rows: usize = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack width");
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat<F>) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "set_block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = b.get(i, j).clone();
            }
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    /// Gauss-Jordan elimination. Exact backends take the first nonzero entry
    /// of each column as pivot; the float backend takes the largest entry
    /// above `tol * max|entry|`.
    pub fn rref(&self) -> Rref<F> {
        let mut a = self.clone();
        let scale = self.max_magnitude();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let mut best: Option<usize> = None;
            for i in r..a.rows {
                let x = a.get(i, c);
                if !F::eligible(x, scale) {
                    continue;
                }
                if F::EXACT {
                    best = Some(i);
                    break;
                }
                match best {
                    Some(b) if a.get(b, c).magnitude() >= x.magnitude() => {}
                    _ => best = Some(i),
                }
            }
            let Some(p) = best else {
                if !F::EXACT {
                    for i in r..a.rows {
                        a.data[i * a.cols + c] = F::zero();
                    }
                }
                continue;
            };
            a.swap_rows(r, p);
            let inv = a.get(r, c).recip();
            for j in c..a.cols {
                let v = a.get(r, j).mul(&inv);
                a.set(r, j, v);
            }
            for i in 0..a.rows {
                if i == r {
                    continue;
                }
                let f = a.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..a.cols {
                    let rv = a.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = a.get(i, j).sub(&f.mul(rv));
                    a.set(i, j, v);
                }
                a.set(i, c, F::zero());
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: a, pivots }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Null-space basis: one column per free variable in index order.
    pub fn kernel_basis(&self) -> Mat<F> {
        let Rref { reduced, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, F::one());
            for (row, &p) in pivots.iter().enumerate() {
                out.set(p, k, reduced.get(row, f).neg());
            }
        }
        out
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::hstack(n, &[self, &Self::identity(n)]);
        let Rref { reduced, pivots } = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        Some(reduced.block(0, n, n, n))
    }

    /// Some `x` with `self * x = rhs`, if one exists.
    pub fn solve(&self, rhs: &Mat<F>) -> Option<Mat<F>> {
        assert_eq!(self.rows, rhs.rows, "solve shape");
        let n = self.cols;
        let aug = Self::hstack(self.rows, &[self, rhs]);
        let Rref { reduced, pivots } = aug.rref();
        if pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut x = Self::zeros(n, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, reduced.get(row, n + j).clone());
            }
        }
        Some(x)
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Mat<G> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<F: Scalar> Mul for &Mat<F> {
    type Output = Mat<F>;
    fn mul(self, rhs: &Mat<F>) -> Mat<F> {
        self.checked_mul(rhs).expect("matrix product shape")
    }
}

impl<F: Scalar> Add for &Mat<F> {
    type Output = Mat<F>;
    fn add(self, rhs: &Mat<F>) -> Mat<F> {
        self.checked_add(rhs).expect("matrix sum shape")
    }
}

impl<F: Scalar> Sub for &Mat<F> {
    type Output = Mat<F>;
    fn sub(self, rhs: &Mat<F>) -> Mat<F> {
        self.checked_sub(rhs).expect("matrix difference shape")
    }
}

impl<F: Scalar> Neg for &Mat<F> {
    type Output = Mat<F>;
    fn neg(self) -> Mat<F> {
        self.map(|x| x.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type M = Mat<Rational>;

    #[test]
    fn kernel_of_nilpotent() {
        let m = M::from_i64(&[&[0, -1], &[0, 0]]);
        assert_eq!(m.kernel_basis(), M::from_i64(&[&[1], &[0]]));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn inverse_and_solve() {
        let m = M::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, M::identity(2));
        let b = M::from_i64(&[&[3], &[2]]);
        assert_eq!(&m * &m.solve(&b).unwrap(), b);
        assert!(M::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_detects_inconsistency() {
        let m = M::from_i64(&[&[1, 0], &[0, 0]]);
        assert!(m.solve(&M::from_i64(&[&[0], &[1]])).is_none());
    }

    #[test]
    fn empty_shapes() {
        let z = M::zeros(0, 3);
        assert_eq!(z.kernel_basis().shape(), (3, 3));
        assert_eq!(M::zeros(2, 0).kernel_basis().shape(), (0, 0));
        assert_eq!(M::identity(0).inverse().unwrap().shape(), (0, 0));
    }
}

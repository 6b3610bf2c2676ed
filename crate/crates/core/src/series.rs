//! Matrix-valued power series: polynomial-exact or truncated jets.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// Coefficients above the stored degree are exactly zero.
    Polynomial,
    /// Coefficients `0..=order` are known, nothing beyond.
    Jet { order: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatSeries<F> {
    rows: usize,
    cols: usize,
    kind: SeriesKind,
    coeffs: Vec<Mat<F>>,
}

impl<F: Scalar> MatSeries<F> {
    fn check_shapes(rows: usize, cols: usize, coeffs: &[Mat<F>]) -> Result<()> {
        for (i, c) in coeffs.iter().enumerate() {
            if c.shape() != (rows, cols) {
                return Err(Error::Shape(format!(
                    "coefficient {i} is {}x{}, expected {rows}x{cols}",
                    c.rows(),
                    c.cols()
                )));
            }
        }
        Ok(())
    }

    pub fn polynomial(rows: usize, cols: usize, coeffs: Vec<Mat<F>>) -> Result<Self> {
        Self::check_shapes(rows, cols, &coeffs)?;
        let mut s = MatSeries { rows, cols, kind: SeriesKind::Polynomial, coeffs };
        s.trim();
        Ok(s)
    }

    /// Jet of order `coeffs.len() - 1`; needs at least one coefficient.
    pub fn jet(rows: usize, cols: usize, coeffs: Vec<Mat<F>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Shape("a jet needs at least one coefficient".into()));
        }
        Self::check_shapes(rows, cols, &coeffs)?;
        let order = coeffs.len() - 1;
        Ok(MatSeries { rows, cols, kind: SeriesKind::Jet { order }, coeffs })
    }

    pub fn constant(m: Mat<F>) -> Self {
        let (rows, cols) = m.shape();
        let mut s = MatSeries { rows, cols, kind: SeriesKind::Polynomial, coeffs: alloc::vec![m] };
        s.trim();
        s
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(Mat::identity(n))
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        MatSeries { rows, cols, kind: SeriesKind::Polynomial, coeffs: Vec::new() }
    }

    fn trim(&mut self) {
        if self.kind == SeriesKind::Polynomial {
            while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                self.coeffs.pop();
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn is_polynomial(&self) -> bool {
        self.kind == SeriesKind::Polynomial
    }

    /// Highest coefficient index that is known; `None` means all of them.
    pub fn valid_order(&self) -> Option<usize> {
        match self.kind {
            SeriesKind::Polynomial => None,
            SeriesKind::Jet { order } => Some(order),
        }
    }

    /// Highest stored index (the degree for polynomials, -1 as `None` for 0).
    pub fn stored_order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Polynomial degree; `None` for the zero polynomial or for jets.
    pub fn degree(&self) -> Option<usize> {
        match self.kind {
            SeriesKind::Polynomial => self.stored_order(),
            SeriesKind::Jet { .. } => None,
        }
    }

    pub fn stored(&self) -> &[Mat<F>] {
        &self.coeffs
    }

    pub fn is_known(&self, i: usize) -> bool {
        self.valid_order().is_none_or(|t| i <= t)
    }

    /// Coefficient `i`, or `None` past a jet's order.
    pub fn coeff(&self, i: usize) -> Option<Mat<F>> {
        if !self.is_known(i) {
            return None;
        }
        Some(self.coeffs.get(i).cloned().unwrap_or_else(|| Mat::zeros(self.rows, self.cols)))
    }

    /// Coefficient `i`, erroring past a jet's order.
    pub fn coeff_req(&self, i: usize) -> Result<Mat<F>> {
        self.coeff(i).ok_or(Error::MissingCoefficient {
            needed: i,
            available: self.valid_order().unwrap_or(0),
        })
    }

    /// Borrowed coefficient; `None` if it is zero beyond a polynomial degree
    /// or unknown.
    pub fn coeff_ref(&self, i: usize) -> Option<&Mat<F>> {
        self.coeffs.get(i)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Drops everything above `order`, producing a jet.
    pub fn truncate(&self, order: usize) -> Self {
        let order = self.valid_order().map_or(order, |t| t.min(order));
        let coeffs = (0..=order).map(|i| self.coeff(i).expect("known coefficient")).collect();
        MatSeries { rows: self.rows, cols: self.cols, kind: SeriesKind::Jet { order }, coeffs }
    }

    /// Treats the stored coefficients as exact (used when a jet is known to be
    /// a polynomial, e.g. after a terminating construction).
    pub fn into_polynomial(mut self) -> Self {
        self.kind = SeriesKind::Polynomial;
        self.trim();
        self
    }

    /// `Σ_i ε^i c_{s+i}`: the section starting at index `s`.
    pub fn tail(&self, s: usize) -> Result<Self> {
        let coeffs: Vec<Mat<F>> = self.coeffs.iter().skip(s).cloned().collect();
        let kind = match self.kind {
            SeriesKind::Polynomial => SeriesKind::Polynomial,
            SeriesKind::Jet { order } if s <= order => SeriesKind::Jet { order: order - s },
            SeriesKind::Jet { order } => return Err(Error::MissingCoefficient { needed: s, available: order }),
        };
        Ok(MatSeries { rows: self.rows, cols: self.cols, kind, coeffs })
    }

    /// Multiplies by `ε^s`.
    pub fn shift_up(&self, s: usize) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + s);
        if !self.coeffs.is_empty() || self.valid_order().is_some() {
            for _ in 0..s {
                coeffs.push(Mat::zeros(self.rows, self.cols));
            }
        }
        coeffs.extend(self.coeffs.iter().cloned());
        let kind = match self.kind {
            SeriesKind::Polynomial => SeriesKind::Polynomial,
            SeriesKind::Jet { order } => SeriesKind::Jet { order: order + s },
        };
        MatSeries { rows: self.rows, cols: self.cols, kind, coeffs }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Mat<F>) -> Mat<F>) -> Self {
        let coeffs: Vec<Mat<F>> = self.coeffs.iter().map(&f).collect();
        let (rows, cols) = coeffs.first().map_or_else(
            || {
                let z = f(&Mat::zeros(self.rows, self.cols));
                z.shape()
            },
            |c| c.shape(),
        );
        let mut s = MatSeries { rows, cols, kind: self.kind, coeffs };
        s.trim();
        s
    }

    pub fn left_mul(&self, a: &Mat<F>) -> Self {
        self.map_coeffs(|c| a * c)
    }

    pub fn right_mul(&self, b: &Mat<F>) -> Self {
        self.map_coeffs(|c| c * b)
    }

    fn combine_kind(a: SeriesKind, b: SeriesKind) -> SeriesKind {
        match (a, b) {
            (SeriesKind::Polynomial, SeriesKind::Polynomial) => SeriesKind::Polynomial,
            (SeriesKind::Jet { order }, SeriesKind::Polynomial) | (SeriesKind::Polynomial, SeriesKind::Jet { order }) => {
                SeriesKind::Jet { order }
            }
            (SeriesKind::Jet { order: x }, SeriesKind::Jet { order: y }) => SeriesKind::Jet { order: x.min(y) },
        }
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&Mat<F>, &Mat<F>) -> Mat<F>) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape(format!(
                "{}x{} series against {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let kind = Self::combine_kind(self.kind, rhs.kind);
        let len = match kind {
            SeriesKind::Polynomial => self.coeffs.len().max(rhs.coeffs.len()),
            SeriesKind::Jet { order } => order + 1,
        };
        let z = Mat::zeros(self.rows, self.cols);
        let coeffs = (0..len)
            .map(|i| f(self.coeffs.get(i).unwrap_or(&z), rhs.coeffs.get(i).unwrap_or(&z)))
            .collect();
        let mut s = MatSeries { rows: self.rows, cols: self.cols, kind, coeffs };
        s.trim();
        Ok(s)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    /// Cauchy product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        series_mul(self, rhs)
    }

    /// Evaluates a polynomial-exact series at a point.
    pub fn eval(&self, at: &F) -> Result<Mat<F>> {
        if !self.is_polynomial() {
            return Err(Error::NotPolynomial);
        }
        let mut acc = Mat::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(at) + c;
        }
        Ok(acc)
    }

    /// All known coefficients up to `order` vanish (clamped to validity).
    pub fn zero_through(&self, order: usize) -> bool {
        let top = self.valid_order().map_or(order, |t| t.min(order));
        (0..=top).all(|i| self.coeffs.get(i).is_none_or(|c| c.is_zero()))
    }

    /// First index whose coefficient is nonzero, searched through `limit`.
    pub fn first_nonzero(&self, limit: usize) -> Option<usize> {
        let top = self.valid_order().map_or(limit, |t| t.min(limit));
        (0..=top).find(|&i| self.coeffs.get(i).is_some_and(|c| !c.is_zero()))
    }
}

/// Cauchy product `a · b`.
pub fn series_mul<F: Scalar>(a: &MatSeries<F>, b: &MatSeries<F>) -> Result<MatSeries<F>> {
    if a.cols != b.rows {
        return Err(Error::Shape(format!(
            "{}x{} series times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let kind = MatSeries::<F>::combine_kind(a.kind, b.kind);
    let len = match kind {
        SeriesKind::Polynomial => {
            if a.coeffs.is_empty() || b.coeffs.is_empty() {
                0
            } else {
                a.coeffs.len() + b.coeffs.len() - 1
            }
        }
        SeriesKind::Jet { order } => order + 1,
    };
    let za: Vec<bool> = a.coeffs.iter().map(|c| c.is_zero()).collect();
    let zb: Vec<bool> = b.coeffs.iter().map(|c| c.is_zero()).collect();
    let mut coeffs = Vec::with_capacity(len);
    for l in 0..len {
        let mut acc = Mat::zeros(a.rows, b.cols);
        for i in 0..=l.min(a.coeffs.len().saturating_sub(1)) {
            if a.coeffs.is_empty() || za[i] {
                continue;
            }
            let j = l - i;
            if j >= b.coeffs.len() || zb[j] {
                continue;
            }
            acc.add_assign(&(&a.coeffs[i] * &b.coeffs[j]));
        }
        coeffs.push(acc);
    }
    let mut s = MatSeries { rows: a.rows, cols: b.cols, kind, coeffs };
    s.trim();
    Ok(s)
}

/// Inverse of a series with invertible constant term, through `order`
/// (clamped to the input's validity).
pub fn series_inverse_near_identity<F: Scalar>(u: &MatSeries<F>, order: usize) -> Result<MatSeries<F>> {
    if u.rows != u.cols {
        return Err(Error::Shape(format!("{}x{} series is not square", u.rows, u.cols)));
    }
    let n = u.rows;
    let u0 = u.coeff(0).expect("constant coefficient always known");
    let u0_inv = u0.inverse().ok_or(Error::SingularConstant)?;
    let order = u.valid_order().map_or(order, |t| t.min(order));
    let mut r: Vec<Mat<F>> = Vec::with_capacity(order + 1);
    r.push(u0_inv.clone());
    for l in 1..=order {
        let mut acc = Mat::zeros(n, n);
        for j in 1..=l {
            if let Some(uj) = u.coeff_ref(j) {
                if !uj.is_zero() {
                    acc.add_assign(&(uj * &r[l - j]));
                }
            }
        }
        r.push(-&(&u0_inv * &acc));
    }
    MatSeries::jet(n, n, r)
}

fn binomial<F: Scalar>(n: usize, k: usize) -> F {
    let mut acc = F::one();
    for i in 0..k {
        acc = acc.mul(&F::from_i64((n - i) as i64)).div(&F::from_i64((i + 1) as i64));
    }
    acc
}

/// Taylor shift `L(shift + ε)`.
pub fn recenter<F: Scalar>(l: &MatSeries<F>, shift: &F) -> Result<MatSeries<F>> {
    if shift.is_zero() {
        return Ok(l.clone());
    }
    if !l.is_polynomial() {
        return Err(Error::JetShift);
    }
    let d = l.coeffs.len();
    let mut pows = Vec::with_capacity(d);
    let mut p = F::one();
    for _ in 0..d {
        pows.push(p.clone());
        p = p.mul(shift);
    }
    let coeffs = (0..d)
        .map(|i| {
            let mut acc = Mat::zeros(l.rows, l.cols);
            for j in i..d {
                let w = binomial::<F>(j, i).mul(&pows[j - i]);
                acc.add_assign(&l.coeffs[j].scale(&w));
            }
            acc
        })
        .collect();
    MatSeries::polynomial(l.rows, l.cols, coeffs)
}

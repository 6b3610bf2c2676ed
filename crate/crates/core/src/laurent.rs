//! Matrix Laurent series with a finite principal part.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::series::MatSeries;

/// `Σ_{t=-p}^{order} ε^t X_t`; `coeffs[0]` is the coefficient of `ε^{-p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<F> {
    rows: usize,
    cols: usize,
    pole_order: usize,
    coeffs: Vec<Mat<F>>,
}

impl<F: Scalar> LaurentSeries<F> {
    /// Builds from coefficients starting at `ε^{-pole}`, stripping vanishing
    /// leading terms so the stored pole order is exact.
    pub fn new(rows: usize, cols: usize, pole: usize, mut coeffs: Vec<Mat<F>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Shape("a Laurent series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| c.shape() != (rows, cols)) {
            return Err(Error::Shape("Laurent coefficient shape".into()));
        }
        let mut pole = pole;
        while pole > 0 && coeffs[0].is_zero() && coeffs.len() > 1 {
            coeffs.remove(0);
            pole -= 1;
        }
        if pole > 0 && coeffs[0].is_zero() {
            // single zero coefficient left at a negative exponent
            pole = 0;
            coeffs[0] = Mat::zeros(rows, cols);
        }
        Ok(LaurentSeries { rows, cols, pole_order: pole, coeffs })
    }

    /// `ε^{-shift} · s`, truncated to the jet window of `s`.
    pub fn from_shifted_series(s: &MatSeries<F>, shift: usize, top: usize) -> Result<Self> {
        let top = s.valid_order().map_or(top, |t| t.min(top));
        let coeffs = (0..=top).map(|i| s.coeff(i).expect("within validity")).collect();
        Self::new(s.rows(), s.cols(), shift, coeffs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pole_order(&self) -> usize {
        self.pole_order
    }

    /// Highest stored exponent.
    pub fn order(&self) -> i64 {
        self.coeffs.len() as i64 - 1 - self.pole_order as i64
    }

    pub fn coeffs(&self) -> &[Mat<F>] {
        &self.coeffs
    }

    /// Coefficient of `ε^e`: zero below the pole, `None` above the window.
    pub fn coeff(&self, e: i64) -> Option<Mat<F>> {
        let idx = e + self.pole_order as i64;
        if idx < 0 {
            return Some(Mat::zeros(self.rows, self.cols));
        }
        self.coeffs.get(idx as usize).cloned()
    }

    pub fn leading(&self) -> &Mat<F> {
        &self.coeffs[0]
    }

    /// Product of two windows; the result window ends where either factor's
    /// information runs out.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape("Laurent product shape".into()));
        }
        let pole = self.pole_order + rhs.pole_order;
        let len = (self.coeffs.len()).min(rhs.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for t in 0..len {
            let mut acc = Mat::zeros(self.rows, rhs.cols);
            for i in 0..=t {
                let (a, b) = (&self.coeffs[i], &rhs.coeffs[t - i]);
                if !a.is_zero() && !b.is_zero() {
                    acc.add_assign(&(a * b));
                }
            }
            out.push(acc);
        }
        Self::new(self.rows, rhs.cols, pole, out)
    }

    pub fn mul_series_right(&self, s: &MatSeries<F>, top: usize) -> Result<Self> {
        self.mul(&Self::from_shifted_series(s, 0, top)?)
    }

    pub fn mul_series_left(&self, s: &MatSeries<F>, top: usize) -> Result<Self> {
        Self::from_shifted_series(s, 0, top)?.mul(self)
    }

    /// Difference on the common window.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape("Laurent difference shape".into()));
        }
        let pole = self.pole_order.max(rhs.pole_order);
        let top = self.order().min(rhs.order());
        let coeffs = (-(pole as i64)..=top)
            .map(|e| &self.coeff(e).expect("window") - &rhs.coeff(e).expect("window"))
            .collect();
        Self::new(self.rows, self.cols, pole, coeffs)
    }

    /// Extends the window with zero coefficients up to exponent `top`; only
    /// meaningful for series known to be finite.
    pub fn padded_to(&self, top: i64) -> Self {
        let mut out = self.clone();
        while out.order() < top {
            out.coeffs.push(Mat::zeros(self.rows, self.cols));
        }
        out
    }

    /// Every stored coefficient vanishes.
    pub fn is_zero_window(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Sum of the stored window at `at`; exact only for finite expansions.
    pub fn eval_window(&self, at: &F) -> Mat<F> {
        let inv = at.recip();
        let mut acc = Mat::zeros(self.rows, self.cols);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let e = idx as i64 - self.pole_order as i64;
            let w = if e < 0 { inv.pow((-e) as u32) } else { at.pow(e as u32) };
            acc.add_assign(&c.scale(&w));
        }
        acc
    }
}

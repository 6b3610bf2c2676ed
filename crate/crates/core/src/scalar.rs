//! Scalar backends: exact rationals, exact Gaussian rationals, and `f64`
//! with a process-wide tolerance.

use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use alloc::string::String;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field element used by every matrix and series routine.
///
/// Arithmetic goes through named methods instead of the operator traits so
/// that generic code never needs higher-ranked reference bounds.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// True for backends without rounding.
    const EXACT: bool;
    /// Backend label used in reports.
    const BACKEND: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).div(&Self::from_i64(den))
    }
    /// Exact zero test, or `|x| <= tol` on the float backend.
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Panics on an exact zero divisor.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Approximate absolute value, used for float pivoting and scaling.
    fn magnitude(&self) -> f64;

    fn recip(&self) -> Self {
        Self::one().div(self)
    }
    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }
    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    /// Entry `a` counts as a pivot candidate relative to `scale` (the largest
    /// magnitude in the matrix being eliminated).
    fn eligible(a: &Self, scale: f64) -> bool {
        if Self::EXACT {
            !a.is_zero()
        } else {
            a.magnitude() > tolerance() * scale
        }
    }
}

static TOL_BITS: AtomicU64 = AtomicU64::new(0x3DDB_7CDF_D9D7_BDBB); // 1e-10

/// Tolerance used by the float backend for every rank decision.
pub fn tolerance() -> f64 {
    f64::from_bits(TOL_BITS.load(Ordering::Relaxed))
}

/// Sets the float tolerance. Non-positive or non-finite values are ignored.
pub fn set_tolerance(tol: f64) {
    if tol.is_finite() && tol > 0.0 {
        TOL_BITS.store(tol.to_bits(), Ordering::Relaxed);
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Arbitrary-precision rational in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "rational";

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_i64(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.0.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
    fn neg(&self) -> Self {
        Rational(-&self.0)
    }
    fn magnitude(&self) -> f64 {
        ratio_to_f64(&self.0).abs()
    }
    fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

/// Exact complex number `re + im·i` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }
    pub fn i() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::one())
    }
    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }
}

impl From<Rational> for GaussianRational {
    fn from(v: Rational) -> Self {
        GaussianRational::new(v.0, BigRational::zero())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    use alloc::format;
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_abs = self.im.abs();
        let im_txt = if im_abs.is_one() { String::new() } else { fmt_ratio(&im_abs) };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_ratio(&self.re)),
            (true, false) => {
                let sign = if self.im.is_negative() { "-" } else { "" };
                write!(f, "{sign}{im_txt}i")
            }
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{sign}{im_txt}i", fmt_ratio(&self.re))
            }
        }
    }
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "gaussian-rational";

    fn zero() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        GaussianRational::new(BigRational::one(), BigRational::zero())
    }
    fn from_i64(v: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
    fn sub(&self, rhs: &Self) -> Self {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
    fn mul(&self, rhs: &Self) -> Self {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
    fn div(&self, rhs: &Self) -> Self {
        let norm = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        assert!(!norm.is_zero(), "division by zero");
        let num = self.mul(&rhs.conj());
        GaussianRational::new(num.re / &norm, num.im / &norm)
    }
    fn neg(&self) -> Self {
        GaussianRational::new(-&self.re, -&self.im)
    }
    fn magnitude(&self) -> f64 {
        ratio_to_f64(&self.re).abs() + ratio_to_f64(&self.im).abs()
    }
}

/// `f64` whose zero test uses [`tolerance`].
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Float64(pub f64);

impl fmt::Debug for Float64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Float64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Scalar for Float64 {
    const EXACT: bool = false;
    const BACKEND: &'static str = "float";

    fn zero() -> Self {
        Float64(0.0)
    }
    fn one() -> Self {
        Float64(1.0)
    }
    fn from_i64(v: i64) -> Self {
        Float64(v as f64)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Float64(num as f64 / den as f64)
    }
    fn is_zero(&self) -> bool {
        self.0.abs() <= tolerance()
    }
    fn add(&self, rhs: &Self) -> Self {
        Float64(self.0 + rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Float64(self.0 - rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Float64(self.0 * rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        Float64(self.0 / rhs.0)
    }
    fn neg(&self) -> Self {
        Float64(-self.0)
    }
    fn magnitude(&self) -> f64 {
        self.0.abs()
    }
}

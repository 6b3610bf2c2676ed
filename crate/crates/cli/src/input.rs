//! Input documents and entry parsing for each field.

use std::str::FromStr;

use locsmith_core::{Float64, GaussianRational, Mat, MatSeries, Rational, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub field: String,
    pub kind: String,
    pub rows: usize,
    pub cols: usize,
    pub coefficients: Vec<Vec<Vec<Value>>>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub sample_points: Option<Vec<Value>>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub shift: Option<Value>,
    /// Solution-curve coefficients `b_0, b_1, …` for `solve` and `artin`.
    #[serde(default)]
    pub curve: Option<Vec<Vec<Value>>>,
    /// Agreement level `l` for `artin`.
    #[serde(default)]
    pub level: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rational,
    Gaussian,
    Float,
}

impl Field {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "rational" => Ok(Field::Rational),
            "gaussian-rational" => Ok(Field::Gaussian),
            "float" => Ok(Field::Float),
            other => Err(format!("unknown field {other:?} (expected rational, gaussian-rational or float)")),
        }
    }
}

impl InputDocument {
    pub fn from_str(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed input document: {e}"))
    }

    pub fn field(&self) -> Result<Field, String> {
        Field::parse(&self.field)
    }

    pub fn family<F: Entry>(&self) -> Result<MatSeries<F>, String> {
        let mut mats = Vec::with_capacity(self.coefficients.len());
        for (t, m) in self.coefficients.iter().enumerate() {
            if m.len() != self.rows || m.iter().any(|r| r.len() != self.cols) {
                return Err(format!("coefficient {t} is not {}×{}", self.rows, self.cols));
            }
            let mut data = Vec::with_capacity(self.rows * self.cols);
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    data.push(F::from_json(v).map_err(|e| format!("coefficient {t} entry ({i}, {j}): {e}"))?);
                }
            }
            mats.push(Mat::new(self.rows, self.cols, data).map_err(|e| e.to_string())?);
        }
        match self.kind.as_str() {
            "polynomial" => MatSeries::polynomial(self.rows, self.cols, mats).map_err(|e| e.to_string()),
            "jet" => {
                if mats.is_empty() {
                    return Err("a jet needs at least one coefficient".into());
                }
                MatSeries::jet(self.rows, self.cols, mats).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown kind {other:?} (expected polynomial or jet)")),
        }
    }

    pub fn curve<F: Entry>(&self) -> Result<Option<Vec<Vec<F>>>, String> {
        let Some(c) = &self.curve else { return Ok(None) };
        c.iter()
            .enumerate()
            .map(|(t, v)| {
                if v.len() != self.cols {
                    return Err(format!("curve coefficient {t} must have {} entries", self.cols));
                }
                v.iter().map(|x| F::from_json(x).map_err(|e| format!("curve coefficient {t}: {e}"))).collect()
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

/// Scalars that can be read from document entries and command-line flags.
pub trait Entry: Scalar {
    fn parse_entry(s: &str) -> Result<Self, String>;

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::String(s) => Self::parse_entry(s),
            Value::Number(n) => Self::parse_entry(&n.to_string()),
            other => Err(format!("entry must be a string or number, got {other}")),
        }
    }
}

/// `[+-]digits[.digits][e[+-]digits]`, exactly.
fn parse_decimal(s: &str) -> Result<BigRational, String> {
    let bad = || format!("cannot parse {s:?} as a number");
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], i64::from_str(&s[p + 1..]).map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let scale = exp - frac.len() as i64;
    if scale.unsigned_abs() > 4096 {
        return Err(format!("exponent out of range in {s:?}"));
    }
    let ten = BigInt::from(10u32);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let mut r = if scale >= 0 { BigRational::from_integer(num * pow) } else { BigRational::new(num, pow) };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// `p/q`, an integer, or a decimal.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_decimal(p.trim())?;
            let q = parse_decimal(q.trim())?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(p / q)
        }
        None => parse_decimal(s),
    }
}

impl Entry for Rational {
    fn parse_entry(s: &str) -> Result<Self, String> {
        parse_rational(s).map(Rational)
    }
}

impl Entry for GaussianRational {
    fn parse_entry(s: &str) -> Result<Self, String> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussianRational::new(parse_rational(&t)?, BigRational::zero()));
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E' | b'/'));
        let (re, im) = match split {
            Some(p) => (parse_rational(&body[..p])?, &body[p..]),
            None => (BigRational::zero(), body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            x => parse_rational(x)?,
        };
        Ok(GaussianRational::new(re, im))
    }
}

impl Entry for Float64 {
    fn parse_entry(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Ok(v) = f64::from_str(s) {
            return Ok(Float64(v));
        }
        let r = parse_rational(s)?;
        r.to_f64().map(Float64).ok_or_else(|| format!("{s:?} is out of float range"))
    }
}

pub fn parse_list<F: Entry>(s: &str) -> Result<Vec<F>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| F::parse_entry(x)).collect()
}

//! Univariate polynomials over a field and an independent Smith normal form.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::series::MatSeries;

/// Coefficients from the constant term up; never has a trailing zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![F::one()] }
    }

    pub fn monomial(c: F, deg: usize) -> Self {
        let mut coeffs = vec![F::zero(); deg];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Multiplicity of the root `0`; `None` for the zero polynomial.
    pub fn ord0(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = F::zero();
        Poly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z).add(o.coeffs.get(i).unwrap_or(&z))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = F::zero();
        Poly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z).sub(o.coeffs.get(i).unwrap_or(&z))).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn divrem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let lead_inv = d.lead()?.recip();
        let mut r = self.coeffs.clone();
        let mut q = vec![F::zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let c = r[top].mul(&lead_inv);
            let shift = top - dd;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[shift + i] = r[shift + i].sub(&c.mul(dc));
            }
            q[shift] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        Some((Poly::new(q), Poly::new(r)))
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&l.recip()),
            None => Poly::zero(),
        }
    }

    pub fn divides(&self, o: &Self) -> bool {
        match o.divrem(self) {
            Some((_, r)) => r.is_zero(),
            None => o.is_zero(),
        }
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Human-readable form in the variable `var`, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut cs = alloc::format!("{c}");
            if !out.is_empty() {
                if let Some(rest) = cs.strip_prefix('-') {
                    out.push_str(" - ");
                    cs = rest.into();
                } else {
                    out.push_str(" + ");
                }
            }
            let needs_paren = cs.contains(['+', 'i']) || cs[1..].contains('-');
            let coef = if needs_paren { alloc::format!("({cs})") } else { cs };
            match (i, coef.as_str()) {
                (0, _) => out.push_str(&coef),
                (_, "1") => {}
                (_, "-1") => out.push('-'),
                _ => out.push_str(&coef),
            }
            match i {
                0 => {}
                1 => out.push_str(var),
                _ => {
                    let _ = write!(out, "{var}^{i}");
                }
            }
        }
        out
    }
}

fn entry_poly<F: Scalar>(l: &MatSeries<F>, i: usize, j: usize) -> Poly<F> {
    Poly::new(l.stored().iter().map(|c| c.get(i, j).clone()).collect())
}

/// Matrix of polynomial entries of a polynomial family.
pub fn poly_matrix<F: Scalar>(l: &MatSeries<F>) -> Result<Vec<Vec<Poly<F>>>> {
    if !l.is_polynomial() {
        return Err(Error::NotPolynomial);
    }
    Ok((0..l.rows()).map(|i| (0..l.cols()).map(|j| entry_poly(l, i, j)).collect()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSmith<F> {
    /// Monic nonzero invariant factors, each dividing the next.
    pub invariant_factors: Vec<Poly<F>>,
    pub local_exponents: Vec<usize>,
}

/// Smith normal form over `F[ε]` by elementary operations. Pivot: the
/// lowest-degree nonzero entry of the trailing block, ties row-major.
pub fn oracle_smith_polynomial<F: Scalar>(l: &MatSeries<F>) -> Result<OracleSmith<F>> {
    let mut a = poly_matrix(l)?;
    let (rows, cols) = (l.rows(), l.cols());
    let mut factors = Vec::new();
    for t in 0..rows.min(cols) {
        while let Some((pi, pj)) = lowest_degree(&a, t) {
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let piv = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let (q, r) = a[i][t].divrem(&piv).expect("nonzero pivot");
                for j in t..cols {
                    let v = a[i][j].sub(&q.mul(&a[t][j]));
                    a[i][j] = v;
                }
                clean &= r.is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let (q, r) = a[t][j].divrem(&piv).expect("nonzero pivot");
                for i in t..rows {
                    let v = a[i][j].sub(&q.mul(&a[i][t]));
                    a[i][j] = v;
                }
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            // row and column t are cleared; enforce divisibility
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !piv.divides(&a[i][j])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[t][j].add(&a[i][j]);
                        a[t][j] = v;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_zero() {
            break;
        }
        factors.push(a[t][t].monic());
    }
    let local_exponents = factors.iter().map(|f| f.ord0().expect("nonzero factor")).collect();
    Ok(OracleSmith { invariant_factors: factors, local_exponents })
}

fn lowest_degree<F: Scalar>(a: &[Vec<Poly<F>>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, p) in row.iter().enumerate().skip(t) {
            if let Some(d) = p.degree() {
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Determinant by cofactor expansion; for small oracle cross-checks.
pub fn poly_det<F: Scalar>(a: &[Vec<Poly<F>>]) -> Poly<F> {
    let n = a.len();
    match n {
        0 => Poly::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly<F>>> =
                    a[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect()).collect();
                let term = a[0][j].mul(&poly_det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Monic gcd of all `r × r` minors.
pub fn determinantal_divisor<F: Scalar>(a: &[Vec<Poly<F>>], r: usize) -> Poly<F> {
    let rows = a.len();
    let cols = a.first().map_or(0, |x| x.len());
    let mut g = Poly::zero();
    for ri in subsets(rows, r) {
        for ci in subsets(cols, r) {
            let minor: Vec<Vec<Poly<F>>> = ri.iter().map(|&i| ci.iter().map(|&j| a[i][j].clone()).collect()).collect();
            g = g.gcd(&poly_det(&minor));
        }
    }
    g
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if r > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mut s in subsets(n - 1, r - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out.extend(subsets(n - 1, r));
    out
}

/// Polynomial family from an entry matrix of polynomials.
pub fn from_poly_matrix<F: Scalar>(a: &[Vec<Poly<F>>], rows: usize, cols: usize) -> MatSeries<F> {
    let deg = a.iter().flatten().filter_map(|p| p.degree()).max().unwrap_or(0);
    let coeffs = (0..=deg)
        .map(|t| Mat::from_fn(rows, cols, |i, j| a[i][j].coeffs().get(t).cloned().unwrap_or_else(F::zero)))
        .collect();
    MatSeries::polynomial(rows, cols, coeffs).expect("consistent shapes")
}

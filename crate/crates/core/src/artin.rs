//! Power-series solutions of `L(ε) b(ε) = 0`: parametrization by `N_{k+1}`,
//! flat basis, strong approximation and the Artin–Rees splitting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{internal, Error, Result};
use crate::mat::Mat;
use crate::recursion::{block_toeplitz, RecursionState};
use crate::scalar::Scalar;
use crate::series::{series_mul, MatSeries};
use crate::subspace::{kernel, Subspace};
use crate::transform::Transform;

/// Finite jet `b_0, …, b_{N-1}` with its residual under `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionCurve<F> {
    pub coeffs: Vec<Vec<F>>,
    /// Smallest order with a nonzero coefficient of `L·b` among the
    /// checked ones; `None` means exact through `checked`.
    pub residual_order: Option<usize>,
    /// Number of coefficients of `L·b` the jet determines.
    pub checked: usize,
}

fn jet_of<F: Scalar>(m: usize, coeffs: &[Vec<F>]) -> Result<MatSeries<F>> {
    let mats = coeffs.iter().map(|c| Mat::column(c)).collect();
    MatSeries::jet(m, 1, mats)
}

impl<F: Scalar> SolutionCurve<F> {
    pub fn new(l: &MatSeries<F>, coeffs: Vec<Vec<F>>) -> Result<Self> {
        let m = l.cols();
        if coeffs.iter().any(|c| c.len() != m) {
            return Err(Error::Shape(format!("curve coefficients must have length {m}")));
        }
        if coeffs.is_empty() {
            return Ok(SolutionCurve { coeffs, residual_order: None, checked: 0 });
        }
        let lb = series_mul(l, &jet_of(m, &coeffs)?)?;
        let top = lb.valid_order().expect("jet product");
        Ok(SolutionCurve { residual_order: lb.first_nonzero(top), checked: top + 1, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_exact(&self) -> bool {
        self.residual_order.is_none()
    }

    /// Residual order, counting an exact jet as `checked`.
    pub fn approximation_order(&self) -> usize {
        self.residual_order.unwrap_or(self.checked)
    }

    pub fn as_series(&self, m: usize) -> Result<MatSeries<F>> {
        jet_of(m, &self.coeffs)
    }
}

#[derive(Clone, Debug)]
pub struct FlatBasis<F> {
    pub generators: Vec<SolutionCurve<F>>,
}

fn phi_times<F: Scalar>(phi: &Transform<F>, n: &[Vec<F>], len: usize) -> Vec<Vec<F>> {
    let m = n.first().map_or(0, |v| v.len());
    (0..len)
        .map(|t| {
            let mut acc = vec![F::zero(); m];
            for (i, ni) in n.iter().enumerate().take(t + 1) {
                let c = phi.series.coeff_ref(t - i).expect("within validity");
                for (a, x) in acc.iter_mut().zip(c.mat_vec(ni)) {
                    *a = a.add(&x);
                }
            }
            acc
        })
        .collect()
}

/// `nⁱ = b_i − Σ_{j=1}^{i} φ_j n^{i−j}`, each checked to lie in `N_{k+1}`.
fn extract<F: Scalar>(b: &[Vec<F>], count: usize, phi: &Transform<F>, nk: &Subspace<F>) -> Result<Vec<Vec<F>>> {
    let mut out: Vec<Vec<F>> = Vec::with_capacity(count);
    for i in 0..count {
        let mut v = b[i].clone();
        for j in 1..=i {
            let pj = phi.series.coeff_ref(j).expect("within validity");
            for (a, x) in v.iter_mut().zip(pj.mat_vec(&out[i - j])) {
                *a = a.sub(&x);
            }
        }
        if !nk.contains_vector(&v) {
            return Err(internal(format!("extracted coefficient {i} leaves the limit kernel")));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn parametrize_solution<F: Scalar>(b: &SolutionCurve<F>, phi: &Transform<F>, state: &RecursionState<F>) -> Result<Vec<Vec<F>>> {
    if let Some(got) = b.residual_order {
        return Err(Error::ResidualOrder { needed: b.checked, got });
    }
    let k = state.k()?;
    let count = b.order().min(phi.valid_order + 1);
    extract(&b.coeffs, count, phi, &state.record(k + 1).n)
}

pub fn flat_basis<F: Scalar>(state: &RecursionState<F>, phi: &Transform<F>) -> Result<FlatBasis<F>> {
    let k = state.k()?;
    let nk = state.record(k + 1).n.basis();
    let generators = (0..nk.cols())
        .map(|j| SolutionCurve::new(state.series(), phi_times(phi, &[nk.col(j)], phi.valid_order + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FlatBasis { generators })
}

/// Exact solution agreeing with `b` in its first `l` coefficients.
pub fn artin_approximate<F: Scalar>(b: &SolutionCurve<F>, l: usize, state: &RecursionState<F>, phi: &Transform<F>) -> Result<SolutionCurve<F>> {
    let k = state.k()?;
    let need = k + l;
    if l == 0 || b.approximation_order() < need || b.order() < l {
        return Err(Error::ResidualOrder { needed: need, got: b.approximation_order() });
    }
    if phi.valid_order + 1 < l {
        return Err(Error::OutsideValidity { requested: l, valid: phi.valid_order + 1 });
    }
    let n = extract(&b.coeffs, l, phi, &state.record(k + 1).n)?;
    let len = phi.valid_order + 1;
    let bhat = SolutionCurve::new(state.series(), phi_times(phi, &n, len))?;
    let agree = bhat.coeffs[..l].iter().flatten().zip(b.coeffs[..l].iter().flatten()).all(|(x, y)| x.sub(y).is_zero());
    if !agree {
        return Err(internal("approximation does not reproduce the leading coefficients"));
    }
    if !bhat.is_exact() {
        return Err(internal("approximation is not an exact solution"));
    }
    Ok(bhat)
}

pub fn greenberg<F: Scalar>(state: &RecursionState<F>, l: usize) -> Result<usize> {
    Ok(state.k()? + l)
}

#[derive(Clone, Debug)]
pub struct ArtinRees<F> {
    pub bhat: SolutionCurve<F>,
    /// `ε^{-l}(b − b̂)`.
    pub b0: Vec<Vec<F>>,
    /// Orders of `L·b` matched against `ε^l L·b₀`.
    pub verified_through: usize,
}

pub fn artin_rees_decompose<F: Scalar>(b: &SolutionCurve<F>, l: usize, state: &RecursionState<F>, phi: &Transform<F>) -> Result<ArtinRees<F>> {
    let bhat = artin_approximate(b, l, state, phi)?;
    let m = state.m();
    let common = b.order().min(bhat.order());
    let diff: Vec<Vec<F>> = (0..common).map(|t| b.coeffs[t].iter().zip(&bhat.coeffs[t]).map(|(x, y)| x.sub(y)).collect()).collect();
    if diff[..l].iter().flatten().any(|x| !x.is_zero()) {
        return Err(internal("difference does not vanish to the requested order"));
    }
    let b0: Vec<Vec<F>> = diff[l..].to_vec();
    let lser = state.series();
    let lb = series_mul(lser, &jet_of(m, &b.coeffs[..common])?)?;
    let mut verified_through = 0;
    if !b0.is_empty() {
        let lb0 = series_mul(lser, &jet_of(m, &b0)?)?;
        let top = lb.valid_order().unwrap_or(0).min(lb0.valid_order().unwrap_or(0) + l);
        for t in 0..=top {
            let lhs = lb.coeff(t).expect("valid");
            let ok = if t < l { lhs.is_zero() } else { lhs.approx_eq(&lb0.coeff(t - l).expect("valid")) };
            if !ok {
                return Err(internal(format!("L·b and ε^l L·b₀ differ at order {t}")));
            }
        }
        verified_through = top;
    }
    Ok(ArtinRees { bhat, b0, verified_through })
}

/// `φ(ε)(n⁰ + … + ε^c n^c)`.
pub fn truncation_solution<F: Scalar>(n: &[Vec<F>], c: usize, phi: &Transform<F>, state: &RecursionState<F>) -> Result<SolutionCurve<F>> {
    let k = state.k()?;
    let nk = &state.record(k + 1).n;
    let m = state.m();
    let mut kept: Vec<Vec<F>> = n.iter().take(c + 1).cloned().collect();
    if kept.iter().any(|v| v.len() != m) {
        return Err(Error::Shape(format!("series coefficients must have length {m}")));
    }
    if kept.iter().any(|v| !nk.contains_vector(v)) {
        return Err(Error::Containment);
    }
    if kept.is_empty() {
        kept.push(vec![F::zero(); m]);
    }
    SolutionCurve::new(state.series(), phi_times(phi, &kept, phi.valid_order + 1))
}

/// Jets `(b_0, …, b_{q-1})` of order-`q` approximations.
pub fn solution_jets<F: Scalar>(l: &MatSeries<F>, q: usize) -> Result<Subspace<F>> {
    Ok(kernel(&block_toeplitz(l, q)?))
}

/// First `q` coefficients of order-`(q + extra)` approximations.
pub fn extendable_jets<F: Scalar>(l: &MatSeries<F>, q: usize, extra: usize) -> Result<Subspace<F>> {
    let m = l.cols();
    let ker = solution_jets(l, q + extra)?;
    let top = ker.basis().block(0, 0, q * m, ker.dim());
    Ok(Subspace::span(&top))
}

/// Smallest order `q ≤ k + l` whose approximations already agree with
/// exact solutions in their first `l` coefficients.
pub fn empirical_greenberg<F: Scalar>(state: &RecursionState<F>, l: usize) -> Result<usize> {
    let k = state.k()?;
    let target = l * state.record(k + 1).n.dim();
    for q in l..=k + l {
        let jets = extendable_jets(state.series(), l, q - l)?;
        if jets.dim() == target {
            return Ok(q);
        }
    }
    Err(internal("no approximation order up to k + l pins the leading coefficients"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::transform::{diagonalize, DiagonalizeOptions};

    type M = Mat<Rational>;
    type S = MatSeries<Rational>;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn f4() -> S {
        S::polynomial(1, 2, vec![M::from_i64(&[&[1, 0]]), M::from_i64(&[&[0, 1]])]).unwrap()
    }

    fn f2() -> S {
        S::polynomial(2, 2, vec![M::from_i64(&[&[0, -1], &[0, 0]]), M::identity(2)]).unwrap()
    }

    #[test]
    fn f4_flat_basis_and_parametrization() {
        let d = diagonalize(&f4(), DiagonalizeOptions::default()).unwrap();
        let fb = flat_basis(&d.state, &d.phi).unwrap();
        assert_eq!(fb.generators.len(), 1);
        let g = &fb.generators[0];
        assert_eq!(g.coeffs[0], vec![r(0), r(1)]);
        assert_eq!(g.coeffs[1], vec![r(-1), r(0)]);
        assert!(g.coeffs[2..].iter().flatten().all(|x| x.is_zero()));
        assert!(g.is_exact());
        let n = parametrize_solution(g, &d.phi, &d.state).unwrap();
        assert_eq!(n[0], vec![r(0), r(1)]);
        assert!(n[1..].iter().flatten().all(|x| x.is_zero()));

        let e2 = vec![r(0), r(1)];
        let b = truncation_solution(&[e2.clone(), e2.clone()], 1, &d.phi, &d.state).unwrap();
        let n = parametrize_solution(&b, &d.phi, &d.state).unwrap();
        assert_eq!((n[0].clone(), n[1].clone()), (e2.clone(), e2));
        assert!(n[2..].iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn f4_strong_approximation() {
        let d = diagonalize(&f4(), DiagonalizeOptions::default()).unwrap();
        let b = SolutionCurve::new(&f4(), vec![vec![r(0), r(1)], vec![r(5), r(3)], vec![r(-2), r(7)]]).unwrap();
        assert_eq!(b.residual_order, Some(1));
        let ar = artin_rees_decompose(&b, 1, &d.state, &d.phi).unwrap();
        assert_eq!(ar.bhat.coeffs[1], vec![r(-1), r(0)]);
        assert_eq!(ar.b0[0], vec![r(6), r(3)]);
        assert_eq!(greenberg(&d.state, 5).unwrap(), 5);
        assert_eq!(empirical_greenberg(&d.state, 1).unwrap(), 1);
    }

    #[test]
    fn f2_forces_zero() {
        let d = diagonalize(&f2(), DiagonalizeOptions::default()).unwrap();
        assert!(flat_basis(&d.state, &d.phi).unwrap().generators.is_empty());
        assert_eq!(greenberg(&d.state, 1).unwrap(), 3);
        let z = vec![r(0), r(0)];
        let b = SolutionCurve::new(&f2(), vec![z.clone(), z.clone(), z.clone(), vec![r(1), r(4)]]).unwrap();
        assert!(b.approximation_order() >= 3);
        let ar = artin_rees_decompose(&b, 1, &d.state, &d.phi).unwrap();
        assert!(ar.bhat.coeffs.iter().flatten().all(|x| x.is_zero()));
        assert_eq!(ar.b0[2], vec![r(1), r(4)]);
        let bad = SolutionCurve::new(&f2(), vec![vec![r(1), r(0)], z.clone(), z.clone()]).unwrap();
        assert!(artin_approximate(&bad, 1, &d.state, &d.phi).is_err());
    }

    #[test]
    fn zero_family_solutions() {
        let d = diagonalize(&S::zero(2, 2), DiagonalizeOptions::default()).unwrap();
        let fb = flat_basis(&d.state, &d.phi).unwrap();
        assert_eq!(fb.generators.len(), 2);
        assert_eq!(fb.generators[0].coeffs[0], vec![r(1), r(0)]);
        assert!(fb.generators[0].coeffs[1..].iter().flatten().all(|x| x.is_zero()));
    }
}

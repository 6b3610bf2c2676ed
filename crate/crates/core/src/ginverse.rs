//! Generalized inverses as Laurent families, projection and kernel/range
//! families, and local Smith-form reporting.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::check::CheckEntry;
use crate::error::{internal, Error, Result};
use crate::laurent::LaurentSeries;
use crate::mat::Mat;
use crate::recursion::RecursionState;
use crate::scalar::Scalar;
use crate::series::{series_inverse_near_identity, series_mul, MatSeries};
use crate::subspace::{kernel, range, Subspace};
use crate::transform::{DefiningEqData, DiagonalForm, Diagonalization, Transform};

/// `Δ⁻¹(ε) = Σ ε^{-(i-1)} S_i⁻¹𝒫_i`, exact.
pub fn delta_pinv<F: Scalar>(diag: &DiagonalForm<F>) -> LaurentSeries<F> {
    let k = diag.k;
    let coeffs = (0..=k).rev().map(|i| diag.parts[i].sinv.clone()).collect();
    LaurentSeries::new(diag.cols(), diag.rows(), k, coeffs).expect("consistent shapes")
}

/// `L⁻¹ = φ Δ⁻¹ ψ⁻¹` through exponent `order`.
pub fn l_pinv_laurent<F: Scalar>(
    phi: &Transform<F>,
    dinv: &LaurentSeries<F>,
    psi: &Transform<F>,
    order: usize,
) -> Result<LaurentSeries<F>> {
    let k = dinv.pole_order();
    let need = order + k;
    let valid = phi.valid_order.min(psi.valid_order);
    if need > valid {
        return Err(Error::OutsideValidity { requested: order, valid: valid.saturating_sub(k) });
    }
    let psi_inv = series_inverse_near_identity(&psi.series, need)?;
    let left = LaurentSeries::from_shifted_series(&phi.series, 0, need)?;
    let right = LaurentSeries::from_shifted_series(&psi_inv, 0, need)?;
    left.mul(&dinv.padded_to(order as i64))?.mul(&right)
}

/// `(L⁻¹L, LL⁻¹) = (φ ΣP_i φ⁻¹, ψ Σ𝒫_i ψ⁻¹)`.
pub fn projection_families<F: Scalar>(
    phi: &Transform<F>,
    psi: &Transform<F>,
    diag: &DiagonalForm<F>,
    order: usize,
) -> Result<(MatSeries<F>, MatSeries<F>)> {
    let valid = phi.valid_order.min(psi.valid_order);
    if order > valid {
        return Err(Error::OutsideValidity { requested: order, valid });
    }
    let phi_s = phi.series.truncate(order);
    let psi_s = psi.series.truncate(order);
    let phi_inv = series_inverse_near_identity(&phi_s, order)?;
    let psi_inv = series_inverse_near_identity(&psi_s, order)?;
    let pn = series_mul(&phi_s.right_mul(&diag.sum_p()), &phi_inv)?;
    let pr = series_mul(&psi_s.right_mul(&diag.sum_proj_r()), &psi_inv)?;
    Ok((pn, pr))
}

/// Idempotency through `order` and the values at `ε = 0`.
pub fn check_projection_families<F: Scalar>(pn: &MatSeries<F>, pr: &MatSeries<F>, diag: &DiagonalForm<F>, order: usize) -> Vec<CheckEntry> {
    let mut out = Vec::new();
    for (name, fam, at0) in [("kernel-projection", pn, diag.sum_p()), ("range-projection", pr, diag.sum_proj_r())] {
        let sq = series_mul(fam, fam).and_then(|s| s.sub(fam));
        let r = match sq {
            Ok(d) => match d.first_nonzero(order) {
                None if fam.coeff(0).is_some_and(|c| c.approx_eq(&at0)) => Ok(()),
                None => Err(String::from("value at 0 is not the sum of the constant projectors")),
                Some(j) => Err(format!("Π² - Π nonzero at order {j}")),
            },
            Err(e) => Err(format!("{e}")),
        };
        out.push(CheckEntry::from_result(name, r));
    }
    out
}

/// `N(ε) = φ(ε)·N_{k+1}` and `R(ε) = ψ(ε)·(R_1 ⊕ … ⊕ R_{k+1})` as basis series.
pub fn kernel_range_families<F: Scalar>(
    phi: &Transform<F>,
    psi: &Transform<F>,
    state: &RecursionState<F>,
) -> Result<(MatSeries<F>, MatSeries<F>)> {
    let k = state.k()?;
    let nk = state.record(k + 1).n.basis().clone();
    let rbar = leading_basis(state, k);
    Ok((phi.series.right_mul(&nk), psi.series.right_mul(&rbar)))
}

fn leading_basis<F: Scalar>(state: &RecursionState<F>, k: usize) -> Mat<F> {
    let parts: Vec<&Mat<F>> = (1..=k + 1).map(|i| state.record(i).r.basis()).collect();
    Mat::hstack(state.mbar(), &parts)
}

/// Data behind a constant-operator factorization `L = Q(ε) P(ε) φ⁻¹(ε)`.
#[derive(Clone, Debug)]
pub struct SmithFactorization<F> {
    /// `S_p = Σ S_i P_i`, a bijection `B → B̄`.
    pub s_p: Mat<F>,
    /// `Q(ε) = ψ(ε) S_p`.
    pub q: MatSeries<F>,
    /// `P(ε) = Σ ε^{i-1} P_i`.
    pub p: MatSeries<F>,
}

#[derive(Clone, Debug)]
pub struct SmithLocalReport<F> {
    pub k: usize,
    pub exponents: Vec<usize>,
    pub rank_limit: usize,
    pub kernel_limit_dim: usize,
    pub full_smith: bool,
    pub degenerate: bool,
    pub factorization: Option<SmithFactorization<F>>,
}

pub fn smith_report<F: Scalar>(state: &RecursionState<F>, diag: &DiagonalForm<F>, psi: &Transform<F>) -> Result<SmithLocalReport<F>> {
    let st = state.stabilization().ok_or(Error::NotStabilized)?;
    let k = st.k;
    let exponents = st.exponents();
    let kernel_limit_dim = state.record(k + 1).n.dim();
    let rank_limit = (1..=k + 1).map(|i| state.record(i).r.dim()).sum();
    let full_smith = kernel_limit_dim == 0 && state.record(k + 1).r_c.is_zero();
    if exponents.len() + kernel_limit_dim != state.m() {
        return Err(internal("exponent count and limit kernel do not fill the domain"));
    }
    let factorization = if full_smith {
        let s_p = diag.s_p();
        let p = MatSeries::polynomial(diag.cols(), diag.cols(), diag.parts.iter().map(|p| p.p.clone()).collect())?;
        Some(SmithFactorization { q: psi.series.right_mul(&s_p), p, s_p })
    } else {
        None
    };
    Ok(SmithLocalReport { k, exponents, rank_limit, kernel_limit_dim, full_smith, degenerate: st.degenerate, factorization })
}

/// `(φ(e), ψ(e), ψ(e)⁻¹)`.
pub type PointTransforms<F> = (Mat<F>, Mat<F>, Mat<F>);

/// Exact evaluation of the transforms at a nonzero sample point through
/// their rational closed forms; needs a polynomial input.
pub struct Evaluator<'a, F> {
    state: &'a RecursionState<F>,
    data: &'a DefiningEqData<F>,
    diag: &'a DiagonalForm<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleOutcome {
    Checked(Vec<CheckEntry>),
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct SampleCheck<F> {
    pub point: F,
    pub outcome: SampleOutcome,
}

impl<F: Scalar> SampleCheck<F> {
    pub fn passed(&self) -> bool {
        match &self.outcome {
            SampleOutcome::Checked(c) => c.iter().all(|e| e.passed),
            SampleOutcome::Skipped(_) => true,
        }
    }
}

impl<'a, F: Scalar> Evaluator<'a, F> {
    pub fn new(d: &'a Diagonalization<F>) -> Result<Self> {
        if !d.state.series().is_polynomial() {
            return Err(Error::NotPolynomial);
        }
        Ok(Evaluator { state: &d.state, data: &d.defining, diag: &d.diag })
    }

    pub fn l_at(&self, e: &F) -> Mat<F> {
        self.state.series().eval(e).expect("polynomial input")
    }

    /// `None` at a pole of `φ`.
    pub fn phi_at(&self, e: &F) -> Option<Mat<F>> {
        let k = self.data.k;
        let m = self.state.m();
        let q = self.data.q.eval(e).ok()?;
        let n = q.rows();
        let lhs = &Mat::identity(n) - &q.scale(e);
        let d = lhs.solve(&self.data.qbar.eval(e).ok()?)?;
        let mut phi = Mat::identity(m);
        let mut w = F::one();
        for red in &self.data.red {
            w = w.mul(e);
            phi.add_assign(&red.scale(&w));
        }
        w = w.mul(e);
        phi.add_assign(&d.block(k * m, 0, m, m).scale(&w));
        Some(phi)
    }

    pub fn psi_at(&self, e: &F, phi: &Mat<F>) -> Mat<F> {
        let s = &self.l_at(e) * phi;
        let inv = e.recip();
        let mut psi = Mat::identity(self.state.mbar());
        let mut partial = s;
        let mut pw = F::one();
        for v in 1..=self.diag.k + 1 {
            partial = &partial - &self.state.record(v).s.scale(&pw);
            pw = pw.mul(e);
            let w = inv.pow(v as u32 - 1);
            let sv = &self.state.record(v).sinv;
            if !sv.is_zero() {
                psi.add_assign(&(&partial * sv).scale(&w));
            }
        }
        psi
    }

    pub fn delta_inv_at(&self, e: &F) -> Mat<F> {
        let inv = e.recip();
        let mut acc = Mat::zeros(self.diag.cols(), self.diag.rows());
        for (i, p) in self.diag.parts.iter().enumerate() {
            acc.add_assign(&p.sinv.scale(&inv.pow(i as u32)));
        }
        acc
    }

    /// `P(ε)⁻¹ = Σ ε^{-(i-1)} P_i`.
    pub fn p_inv_at(&self, e: &F) -> Mat<F> {
        let inv = e.recip();
        let mut acc = Mat::zeros(self.diag.cols(), self.diag.cols());
        for (i, p) in self.diag.parts.iter().enumerate() {
            acc.add_assign(&p.p.scale(&inv.pow(i as u32)));
        }
        acc
    }

    /// `(φ, ψ, ψ⁻¹)` at `e`, or the reason the point is unusable.
    pub fn transforms_at(&self, e: &F) -> core::result::Result<PointTransforms<F>, String> {
        if e.is_zero() {
            return Err(String::from("sample point must be nonzero"));
        }
        let phi = self.phi_at(e).ok_or_else(|| String::from("pole of the right transformation"))?;
        if phi.inverse().is_none() {
            return Err(String::from("right transformation singular"));
        }
        let psi = self.psi_at(e, &phi);
        let psi_inv = psi.inverse().ok_or_else(|| String::from("left transformation singular"))?;
        Ok((phi, psi, psi_inv))
    }

    pub fn pinv_at(&self, e: &F) -> core::result::Result<Mat<F>, String> {
        let (phi, _, psi_inv) = self.transforms_at(e)?;
        Ok(&(&phi * &self.delta_inv_at(e)) * &psi_inv)
    }

    pub fn ginverse_checks(&self, e: &F) -> SampleOutcome {
        let x = match self.pinv_at(e) {
            Ok(x) => x,
            Err(why) => return SampleOutcome::Skipped(why),
        };
        let l = self.l_at(e);
        let lxl = &(&l * &x) * &l;
        let xlx = &(&x * &l) * &x;
        SampleOutcome::Checked(vec![
            bool_check("LXL=L", lxl.approx_eq(&l)),
            bool_check("XLX=X", xlx.approx_eq(&x)),
        ])
    }

    pub fn kernel_range_checks(&self, e: &F) -> SampleOutcome {
        let (phi, psi, _) = match self.transforms_at(e) {
            Ok(t) => t,
            Err(why) => return SampleOutcome::Skipped(why),
        };
        let k = self.diag.k;
        let l = self.l_at(e);
        let n = &phi * self.state.record(k + 1).n.basis();
        let r = &psi * &leading_basis(self.state, k);
        let ker = kernel(&l);
        let ran = range(&l);
        let n_ok = n.rank() == n.cols() && ker.dim() == n.cols() && ker.contains_cols(&n);
        let r_sp = Subspace::span(&r);
        let r_ok = r_sp.dim() == r.cols() && r_sp.same_as(&ran);
        SampleOutcome::Checked(vec![bool_check("kernel-family", n_ok), bool_check("range-family", r_ok)])
    }

    /// `ψ⁻¹ L φ P⁻¹ = S_p` at `e`, for full-Smith inputs.
    pub fn factorization_check(&self, e: &F) -> SampleOutcome {
        let (phi, _, psi_inv) = match self.transforms_at(e) {
            Ok(t) => t,
            Err(why) => return SampleOutcome::Skipped(why),
        };
        let lhs = &(&(&psi_inv * &self.l_at(e)) * &phi) * &self.p_inv_at(e);
        SampleOutcome::Checked(vec![bool_check("constant-factorization", lhs.approx_eq(&self.diag.s_p()))])
    }
}

fn bool_check(name: &str, ok: bool) -> CheckEntry {
    if ok {
        CheckEntry::pass(name, None)
    } else {
        CheckEntry::fail(name, String::from("identity fails at sample point"))
    }
}

pub fn verify_ginverse_axioms<F: Scalar>(ev: &Evaluator<'_, F>, samples: &[F]) -> Vec<SampleCheck<F>> {
    samples.iter().map(|e| SampleCheck { point: e.clone(), outcome: ev.ginverse_checks(e) }).collect()
}

pub fn verify_kernel_range<F: Scalar>(ev: &Evaluator<'_, F>, samples: &[F]) -> Vec<SampleCheck<F>> {
    samples.iter().map(|e| SampleCheck { point: e.clone(), outcome: ev.kernel_range_checks(e) }).collect()
}

pub fn verify_factorization<F: Scalar>(ev: &Evaluator<'_, F>, samples: &[F]) -> Vec<SampleCheck<F>> {
    samples.iter().map(|e| SampleCheck { point: e.clone(), outcome: ev.factorization_check(e) }).collect()
}

/// Coefficient-level checks usable for jets: `LXL = L`, `XLX = X` on the
/// known window and `L·N(ε) = 0` through `order`.
pub fn laurent_checks<F: Scalar>(l: &MatSeries<F>, x: &LaurentSeries<F>, n_family: &MatSeries<F>, order: usize) -> Vec<CheckEntry> {
    let mut out = Vec::new();
    let top = x.order().max(0) as usize + x.pole_order();
    let top = l.valid_order().map_or(top, |v| v.min(top));
    let run = || -> Result<(LaurentSeries<F>, LaurentSeries<F>, LaurentSeries<F>)> {
        let ll = LaurentSeries::from_shifted_series(l, 0, top)?;
        let lxl = ll.mul(x)?.mul(&ll)?.sub(&ll)?;
        let xlx = x.mul(&ll)?.mul(x)?.sub(x)?;
        Ok((ll, lxl, xlx))
    };
    match run() {
        Ok((_, lxl, xlx)) => {
            out.push(window_check("laurent-LXL=L", &lxl));
            out.push(window_check("laurent-XLX=X", &xlx));
        }
        Err(e) => out.push(CheckEntry::fail("laurent-axioms", format!("{e}"))),
    }
    let ln = series_mul(l, n_family).map(|s| s.first_nonzero(order));
    out.push(match ln {
        Ok(None) => CheckEntry::pass("kernel-family-annihilated", Some(format!("through order {order}"))),
        Ok(Some(j)) => CheckEntry::fail("kernel-family-annihilated", format!("L·N(ε) nonzero at order {j}")),
        Err(e) => CheckEntry::fail("kernel-family-annihilated", format!("{e}")),
    });
    out
}

fn window_check<F: Scalar>(name: &str, d: &LaurentSeries<F>) -> CheckEntry {
    if d.is_zero_window() {
        CheckEntry::pass(name, Some(format!("zero on exponents {}..{}", -(d.pole_order() as i64), d.order())))
    } else {
        let first = d.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0) as i64 - d.pole_order() as i64;
        CheckEntry::fail(name, format!("first nonzero coefficient at exponent {first}"))
    }
}

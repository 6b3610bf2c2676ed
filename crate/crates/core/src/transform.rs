//! Right and left transformations: the polynomial pre-transformation, `φ`
//! from the Töplitz row and from the defining equation, `ψ`, and `Δ`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::check::CheckEntry;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::recursion::{block_toeplitz, run_until_stabilized, RecursionState};
use crate::scalar::Scalar;
use crate::series::{series_inverse_near_identity, series_mul, MatSeries};
use crate::subspace::{kernel, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ToeplitzRow,
    DefiningEquation,
    LeftFormula,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::ToeplitzRow => "toeplitz-row",
            Provenance::DefiningEquation => "defining-equation",
            Provenance::LeftFormula => "left-formula",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Transform<F> {
    pub series: MatSeries<F>,
    pub valid_order: usize,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct PreTransform<F> {
    pub k: usize,
    pub poly: MatSeries<F>,
}

/// `p_k(ε) = I + ε M_{k,k+1} + … + ε^k M_{1,k+1}`.
pub fn pre_transform<F: Scalar>(state: &RecursionState<F>) -> Result<PreTransform<F>> {
    let k = state.k()?;
    if state.len() < k + 1 {
        return Err(Error::InsufficientSteps { needed: k + 1, have: state.len() });
    }
    let coeffs = (0..=k).map(|t| state.m_entry(k + 1 - t, k + 1).clone()).collect();
    Ok(PreTransform { k, poly: MatSeries::polynomial(state.m(), state.m(), coeffs)? })
}

/// Verifies the partial triangular structure of `L·p_k` and returns it.
pub fn triangular_check<F: Scalar>(l: &MatSeries<F>, p: &PreTransform<F>, state: &RecursionState<F>) -> Result<MatSeries<F>> {
    let k = p.k;
    let sk = series_mul(l, &p.poly)?;
    let m = state.m();
    let mut earlier: Vec<&Subspace<F>> = Vec::new();
    let mut rc_prev = Subspace::full(state.mbar());
    for i in 1..=k + 1 {
        let si = sk.coeff_req(i - 1)?;
        let rec = state.record(i);
        let lower = Subspace::sum(&earlier, m);
        if !rc_prev.contains_cols(&(&si * lower.basis())) {
            return Err(Error::Internal(format!("S_{i} maps earlier complements outside R_{}^c", i - 1)));
        }
        if !rec.n_c.image(&si).same_as(&rec.r) {
            return Err(Error::Internal(format!("S_{i} N_{i}^c differs from R_{i}")));
        }
        if !(&si * rec.n.basis()).is_zero() {
            return Err(Error::Internal(format!("S_{i} does not annihilate N_{i}")));
        }
        earlier.push(&rec.n_c);
        rc_prev = rec.r_c.clone();
    }
    for i in 1..=k + 1 {
        let t = block_toeplitz(&sk, i)?;
        let ker = kernel(&t);
        let mut expect = Mat::zeros(m * i, 0);
        for pos in 0..i {
            let n = state.record(i - pos).n.basis();
            let mut blk = Mat::zeros(m * i, n.cols());
            blk.set_block(pos * m, 0, n);
            expect = Mat::hstack(m * i, &[&expect, &blk]);
        }
        if ker.dim() != expect.cols() || !ker.contains_cols(&expect) {
            return Err(Error::Internal(format!("transformed chains of length {i} are not N_{i} × … × N_1")));
        }
    }
    Ok(sk)
}

/// `φ_j = M_{k+1,k+1+j}` for `j ≤ J`.
pub fn phi_from_toeplitz<F: Scalar>(state: &mut RecursionState<F>, order: usize) -> Result<Transform<F>> {
    let k = state.k()?;
    let need = k + 1 + order;
    let avail = state.max_steps();
    if need > avail {
        return Err(Error::OutsideValidity { requested: order, valid: avail.saturating_sub(k + 1) });
    }
    state.extend_to(need)?;
    let coeffs = (0..=order).map(|j| state.m_entry(k + 1, k + 1 + j).clone()).collect();
    Ok(Transform {
        series: MatSeries::jet(state.m(), state.m(), coeffs)?,
        valid_order: order,
        provenance: Provenance::ToeplitzRow,
    })
}

/// Blocks of the defining equation `[I - εQ(ε)] d̄(ε) = q̄(ε)`.
#[derive(Clone, Debug)]
pub struct DefiningEqData<F> {
    pub k: usize,
    /// `H_1 .. H_{k+1}`.
    pub hbar: Vec<Mat<F>>,
    /// Block lower-triangular Töplitz matrix with `H_1` on the diagonal.
    pub hmat: Mat<F>,
    /// `φ_1 .. φ_k` taken from the Töplitz row.
    pub red: Vec<Mat<F>>,
    pub pbar: MatSeries<F>,
    pub qbar: MatSeries<F>,
    pub q: MatSeries<F>,
    pub gamma: MatSeries<F>,
    pub dbar: MatSeries<F>,
    /// Highest order through which `[I - εQ] d̄ - q̄` was checked to vanish.
    pub residual_zero_through: Option<usize>,
}

impl<F: Scalar> DefiningEqData<F> {
    /// `I - εQ(ε)`.
    pub fn lhs_operator(&self) -> Result<MatSeries<F>> {
        let n = self.q.rows();
        MatSeries::identity(n).sub(&self.q.shift_up(1))
    }

    /// `d_{k+1}(ε)`: the last block row of `d̄`.
    pub fn last_component(&self, m: usize) -> MatSeries<F> {
        let k = self.k;
        self.dbar.map_coeffs(|c| c.block(k * m, 0, m, m))
    }
}

/// `φ` from the defining equation, through `order`.
pub fn phi_from_defining_eq<F: Scalar>(state: &mut RecursionState<F>, order: usize) -> Result<(Transform<F>, DefiningEqData<F>)> {
    let k = state.k()?;
    let need = 2 * k + 1;
    if state.max_steps() < need {
        return Err(Error::InsufficientSteps { needed: need, have: state.max_steps() });
    }
    state.extend_to(need)?;
    let (m, mb) = (state.m(), state.mbar());
    let l = state.series().clone();
    let kk = k + 1;

    let e_next: Vec<Mat<F>> = (1..=kk).map(|i| state.e_product(i, k + 2)).collect();
    let mut hbar = Vec::with_capacity(kk);
    hbar.push(e_next[0].clone());
    for a in 1..=k {
        let mut acc = Mat::zeros(m, mb);
        for b in a..=k {
            acc.add_assign(&(state.m_entry(a, b) * &e_next[b]));
        }
        hbar.push(acc);
    }
    let mut hmat = Mat::zeros(kk * m, kk * mb);
    for a in 0..kk {
        for b in 0..=a {
            hmat.set_block(a * m, b * mb, &hbar[a - b]);
        }
    }
    let red: Vec<Mat<F>> = (1..=k).map(|j| state.m_entry(kk, kk + j).clone()).collect();

    // H·(1, ε, …, ε^k)ᵀ
    let h_eps = MatSeries::polynomial(kk * m, mb, (0..kk).map(|t| hmat.block(0, t * mb, kk * m, mb)).collect())?;

    // c(ε) = [L_1 … L_{k+1}]·top(M_{2k+1}) + Σ_{j<k} L̄_{2k+1-j} φ_j + ε L̄_{k+2} φ_k
    let mut head = Mat::zeros(mb, m);
    for a in 1..=kk {
        head.add_assign(&(&l.coeff_req(a)? * state.m_entry(a, 2 * k + 1)));
    }
    let mut c = MatSeries::constant(head);
    if let Some(t) = l.valid_order() {
        c = c.truncate(t);
    }
    for j in 0..k {
        let phi_j = if j == 0 { Mat::identity(m) } else { red[j - 1].clone() };
        c = c.add(&l.tail(2 * k + 1 - j)?.right_mul(&phi_j))?;
    }
    let phi_k = if k == 0 { Mat::identity(m) } else { red[k - 1].clone() };
    c = c.add(&l.tail(k + 2)?.right_mul(&phi_k).shift_up(1))?;

    // p̄ = H·v with v_j = Σ_{t=0}^{j-2} ε^t S̄_{2k+3-j+t}
    let vlen = k.max(1);
    let mut vco: Vec<Mat<F>> = vec![Mat::zeros(kk * mb, m); vlen];
    for j in 2..=kk {
        for t in 0..=j - 2 {
            let sbar = &state.record(2 * k + 3 - j + t).sbar;
            let mut blk = vco[t].block((j - 1) * mb, 0, mb, m);
            blk.add_assign(sbar);
            vco[t].set_block((j - 1) * mb, 0, &blk);
        }
    }
    let v = MatSeries::polynomial(kk * mb, m, vco)?;
    let pbar = v.left_mul(&hmat);
    let qbar = pbar.add(&series_mul(&h_eps, &c)?)?;

    // Q = H·ε-vector·[L_1 … L_k | L̄_{k+1}(ε)]
    let lk1 = l.tail(kk)?;
    let row_len = lk1.valid_order().map_or(lk1.stored().len().max(1), |t| t + 1);
    let mut row_coeffs = Vec::with_capacity(row_len);
    for t in 0..row_len {
        let mut blk = Mat::zeros(mb, kk * m);
        if t == 0 {
            for a in 1..=k {
                blk.set_block(0, (a - 1) * m, &l.coeff_req(a)?);
            }
        }
        blk.set_block(0, k * m, &lk1.coeff(t).expect("within validity"));
        row_coeffs.push(blk);
    }
    let lrow = match lk1.valid_order() {
        None => MatSeries::polynomial(mb, kk * m, row_coeffs)?,
        Some(_) => MatSeries::jet(mb, kk * m, row_coeffs)?,
    };
    let q = series_mul(&h_eps, &lrow)?;

    let d_order = order.saturating_sub(kk);
    let lhs = MatSeries::identity(kk * m).sub(&q.shift_up(1))?;
    let gamma = series_inverse_near_identity(&lhs, d_order)?;
    let dbar = series_mul(&gamma, &qbar)?.truncate(d_order);
    let d_valid = dbar.valid_order().unwrap_or(d_order);

    let resid = series_mul(&lhs, &dbar)?.sub(&qbar)?;
    let residual_zero_through = if resid.zero_through(d_valid) { Some(d_valid) } else { None };
    if residual_zero_through.is_none() {
        let at = resid.first_nonzero(d_valid).unwrap_or(0);
        return Err(Error::Internal(format!("defining-equation residual nonzero at order {at}")));
    }

    let data = DefiningEqData { k, hbar, hmat, red, pbar, qbar, q, gamma, dbar, residual_zero_through };
    let last = data.last_component(m);
    let valid = (kk + d_valid).min(order.max(k));
    let mut coeffs = Vec::with_capacity(valid + 1);
    for j in 0..=valid {
        let cj = if j == 0 {
            Mat::identity(m)
        } else if j <= k {
            data.red[j - 1].clone()
        } else {
            last.coeff(j - kk).expect("within validity")
        };
        coeffs.push(cj);
    }
    let phi = Transform { series: MatSeries::jet(m, m, coeffs)?, valid_order: valid, provenance: Provenance::DefiningEquation };
    Ok((phi, data))
}

/// `ψ_i = Σ_{v=1}^{k+1} S_{i+v} S_v⁻¹𝒫_v` from the coefficients of `S = Lφ`.
pub fn psi_build<F: Scalar>(state: &RecursionState<F>, s: &MatSeries<F>, order: usize) -> Result<Transform<F>> {
    let k = state.k()?;
    let mb = state.mbar();
    let s_valid = s.valid_order().unwrap_or(usize::MAX);
    if s_valid < k.saturating_add(order) {
        return Err(Error::OutsideValidity { requested: order, valid: s_valid.saturating_sub(k) });
    }
    let mut coeffs = vec![Mat::identity(mb)];
    for i in 1..=order {
        let mut acc = Mat::zeros(mb, mb);
        for v in 1..=k + 1 {
            let sv = &state.record(v).sinv;
            if sv.is_zero() {
                continue;
            }
            acc.add_assign(&(&s.coeff_req(i + v - 1)? * sv));
        }
        coeffs.push(acc);
    }
    Ok(Transform { series: MatSeries::jet(mb, mb, coeffs)?, valid_order: order, provenance: Provenance::LeftFormula })
}

#[derive(Clone, Debug)]
pub struct DiagonalPart<F> {
    pub s: Mat<F>,
    /// `P_i`, projector onto `N_i^c`.
    pub p: Mat<F>,
    /// `𝒫_i`, projector onto `R_i`.
    pub proj_r: Mat<F>,
    /// `S_i⁻¹𝒫_i`.
    pub sinv: Mat<F>,
    pub exponent: usize,
}

#[derive(Clone, Debug)]
pub struct DiagonalForm<F> {
    pub k: usize,
    pub parts: Vec<DiagonalPart<F>>,
    pub p_ker: Mat<F>,
    pub pi_coker: Mat<F>,
}

impl<F: Scalar> DiagonalForm<F> {
    pub fn from_state(state: &RecursionState<F>) -> Result<Self> {
        let k = state.k()?;
        let parts = (1..=k + 1)
            .map(|i| {
                let r = state.record(i);
                DiagonalPart { s: r.s.clone(), p: r.proj_n.clone(), proj_r: r.proj_r.clone(), sinv: r.sinv.clone(), exponent: i - 1 }
            })
            .collect();
        let last = state.record(k + 1);
        Ok(DiagonalForm { k, parts, p_ker: last.proj_nk.clone(), pi_coker: last.proj_rc.clone() })
    }

    pub fn rows(&self) -> usize {
        self.pi_coker.rows()
    }

    pub fn cols(&self) -> usize {
        self.p_ker.rows()
    }

    /// `Δ(ε) = Σ ε^{i-1} S_i P_i`.
    pub fn delta(&self) -> MatSeries<F> {
        let coeffs = self.parts.iter().map(|p| &p.s * &p.p).collect();
        MatSeries::polynomial(self.rows(), self.cols(), coeffs).expect("consistent shapes")
    }

    pub fn sum_p(&self) -> Mat<F> {
        let mut acc = Mat::zeros(self.cols(), self.cols());
        for p in &self.parts {
            acc.add_assign(&p.p);
        }
        acc
    }

    pub fn sum_proj_r(&self) -> Mat<F> {
        let mut acc = Mat::zeros(self.rows(), self.rows());
        for p in &self.parts {
            acc.add_assign(&p.proj_r);
        }
        acc
    }

    /// `S_p = Σ S_i P_i`.
    pub fn s_p(&self) -> Mat<F> {
        let mut acc = Mat::zeros(self.rows(), self.cols());
        for p in &self.parts {
            acc.add_assign(&(&p.s * &p.p));
        }
        acc
    }

    /// Each `S_i P_i` maps into `R_i` and kills every other part.
    pub fn check_structure(&self, state: &RecursionState<F>) -> core::result::Result<(), String> {
        let k = self.k;
        for (idx, part) in self.parts.iter().enumerate() {
            let i = idx + 1;
            let sp = &part.s * &part.p;
            if !state.record(i).r.contains_cols(&sp) {
                return Err(format!("S_{i}P_{i} leaves R_{i}"));
            }
            for j in 1..=k + 1 {
                if j != i && !(&sp * state.record(j).n_c.basis()).is_zero() {
                    return Err(format!("S_{i}P_{i} does not kill N_{j}^c"));
                }
            }
            if !(&sp * state.record(k + 1).n.basis()).is_zero() {
                return Err(format!("S_{i}P_{i} does not kill N_{}", k + 1));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagonalizeOptions {
    /// Order through which the diagonal identity is established
    /// (default `2k + 6`).
    pub order: Option<usize>,
    pub k_max: usize,
}

impl Default for DiagonalizeOptions {
    fn default() -> Self {
        DiagonalizeOptions { order: None, k_max: 64 }
    }
}

#[derive(Clone, Debug)]
pub struct Diagonalization<F> {
    pub state: RecursionState<F>,
    pub phi: Transform<F>,
    pub phi_alt: Transform<F>,
    pub defining: DefiningEqData<F>,
    /// `S(ε) = L(ε)φ(ε)`.
    pub s: MatSeries<F>,
    pub psi: Transform<F>,
    pub psi_inv: MatSeries<F>,
    pub diag: DiagonalForm<F>,
    /// Order through which the identities below were established.
    pub order: usize,
    pub checks: Vec<CheckEntry>,
}

fn first_diff<F: Scalar>(a: &MatSeries<F>, b: &MatSeries<F>, through: usize) -> Option<usize> {
    (0..=through).find(|&j| match (a.coeff(j), b.coeff(j)) {
        (Some(x), Some(y)) => !x.approx_eq(&y),
        _ => false,
    })
}

/// End-to-end driver: recursion, both `φ` paths, `S`, `ψ`, `Δ`, and the
/// identities relating them.
pub fn diagonalize<F: Scalar>(l: &MatSeries<F>, opts: DiagonalizeOptions) -> Result<Diagonalization<F>> {
    let mut state = run_until_stabilized(l.clone(), opts.k_max)?;
    let k = state.k()?;
    let avail = state.max_steps();
    if avail < 2 * k + 1 {
        return Err(Error::InsufficientSteps { needed: 2 * k + 1, have: avail });
    }
    let want = opts.order.unwrap_or(2 * k + 6);
    // φ through order + k feeds ψ through order.
    let phi_order = (want + k).min(avail - k - 1);
    let order = phi_order - k;

    let phi = phi_from_toeplitz(&mut state, phi_order)?;
    let (phi_alt, defining) = phi_from_defining_eq(&mut state, phi_order)?;
    let common = phi.valid_order.min(phi_alt.valid_order);
    if let Some(j) = first_diff(&phi.series, &phi_alt.series, common) {
        return Err(Error::Internal(format!("Töplitz and defining-equation φ differ at coefficient {j}")));
    }
    let mut checks = vec![CheckEntry::pass("dual-path-phi", Some(format!("agree through order {common}")))];
    checks.push(CheckEntry::pass(
        "defining-equation-residual",
        defining.residual_zero_through.map(|t| format!("zero through order {t}")),
    ));

    let s = series_mul(l, &phi.series)?.truncate(phi_order);
    let psi = psi_build(&state, &s, order)?;
    let diag = DiagonalForm::from_state(&state)?;
    let delta = diag.delta();
    let psi_inv = series_inverse_near_identity(&psi.series, order)?;

    let fact = series_mul(&psi.series, &delta)?.sub(&s)?;
    checks.push(zero_check("factorization", &fact, order));
    let ident = series_mul(&psi_inv, &s)?.sub(&delta)?;
    checks.push(zero_check("diagonal-identity", &ident, order));

    for t in 0..=k {
        let c = s.coeff_req(t)?;
        if !c.approx_eq(&state.record(t + 1).s) {
            checks.push(CheckEntry::fail("transformed-coefficients", format!("coefficient {t} of Lφ differs from S_{}", t + 1)));
        }
    }
    let nk = state.record(k + 1).n.basis().clone();
    checks.push(zero_check("annihilation", &s.right_mul(&nk), phi_order));
    checks.push(CheckEntry::from_result("remainder-confinement", remainder_confinement(&s, &diag, &nk, k, phi_order)));
    checks.push(CheckEntry::from_result("expansion-rate", expansion_rate(&s, &state, k)));
    checks.push(CheckEntry::from_result("diagonal-structure", diag.check_structure(&state)));

    Ok(Diagonalization { state, phi, phi_alt, defining, s, psi, psi_inv, diag, order, checks })
}

fn zero_check<F: Scalar>(name: &str, s: &MatSeries<F>, through: usize) -> CheckEntry {
    match s.first_nonzero(through) {
        None => CheckEntry::pass(name, Some(format!("zero through order {through}"))),
        Some(j) => CheckEntry::fail(name, format!("first nonzero coefficient at order {j}")),
    }
}

fn remainder_confinement<F: Scalar>(s: &MatSeries<F>, diag: &DiagonalForm<F>, nk: &Mat<F>, k: usize, top: usize) -> core::result::Result<(), String> {
    let proj = diag.sum_proj_r();
    for idx in k + 1..=top {
        let c = s.coeff(idx).ok_or_else(|| format!("S coefficient {idx} unknown"))?;
        if !(&proj * &c).is_zero() {
            return Err(format!("coefficient {idx} reaches the leading spaces"));
        }
        if !(&c * nk).is_zero() {
            return Err(format!("coefficient {idx} does not kill the limit kernel"));
        }
    }
    Ok(())
}

fn expansion_rate<F: Scalar>(s: &MatSeries<F>, state: &RecursionState<F>, k: usize) -> core::result::Result<(), String> {
    for i in 0..=k {
        let nc = state.record(i + 1).n_c.basis();
        if nc.cols() == 0 {
            continue;
        }
        let sn = s.right_mul(nc);
        for j in 0..i {
            if !sn.coeff(j).is_some_and(|c| c.is_zero()) {
                return Err(format!("Lφ n nonzero at order {j} for n in N_{}^c", i + 1));
            }
        }
        let lead = sn.coeff(i).ok_or("coefficient unknown")?;
        if !lead.approx_eq(&(&state.record(i + 1).s * nc)) || lead.rank() != nc.cols() {
            return Err(format!("leading coefficient at order {i} is not S_{} n", i + 1));
        }
    }
    Ok(())
}

/// Block structure of `H̄` and the column recursion behind the defining
/// equation, checked against the recursion's `M` columns.
pub fn check_defining_structure<F: Scalar>(state: &RecursionState<F>, data: &DefiningEqData<F>) -> core::result::Result<(), String> {
    let k = data.k;
    let kk = k + 1;
    let m = state.m();
    let mb = state.mbar();
    // top(M_{k+1+l}) = H·(S̄_{k+1+l}; …; S̄_{1+l}) for l ≥ k+1
    for l in kk..=state.len().saturating_sub(kk) {
        let mut stack = Mat::zeros(kk * mb, m);
        for a in 0..kk {
            stack.set_block(a * mb, 0, &state.record(kk + l - a).sbar);
        }
        let lhs = &data.hmat * &stack;
        for a in 0..kk {
            if !lhs.block(a * m, 0, m, m).approx_eq(state.m_entry(a + 1, kk + l)) {
                return Err(format!("top of column {} row {}", kk + l, a + 1));
            }
        }
    }
    // M_{k+1+l} = (H̄;0) S̄_{k+1+l} + (0; M_{k+l}) for l ≥ 1
    for l in 1..=state.len().saturating_sub(kk) {
        let c = kk + l;
        let sbar = &state.record(c).sbar;
        for a in 1..=c {
            let mut want = if a <= kk { &data.hbar[a - 1] * sbar } else { Mat::zeros(m, m) };
            if a >= 2 {
                want.add_assign(state.m_entry(a - 1, c - 1));
            }
            if !want.approx_eq(state.m_entry(a, c)) {
                return Err(format!("column {c} row {a} violates the shifted-column identity"));
            }
        }
    }
    // d̄ stacks the top components of M_{2k+2+t}
    let top = data.dbar.valid_order().unwrap_or(0);
    for t in 0..=top {
        let c = 2 * k + 2 + t;
        if c > state.len() {
            break;
        }
        let dt = data.dbar.coeff(t).expect("within validity");
        for a in 0..kk {
            if !dt.block(a * m, 0, m, m).approx_eq(state.m_entry(a + 1, c)) {
                return Err(format!("d̄ coefficient {t} block {} differs from M_{{{},{c}}}", a + 1, a + 1));
            }
        }
    }
    Ok(())
}

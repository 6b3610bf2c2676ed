//! The kernel/leading-coefficient recursion: nested kernels `N_i`, their
//! complements, the spaces `R_i`, the operators `S̄_i`, `S_i`, and the
//! triangular `E`/`M` columns.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::series::MatSeries;
use crate::subspace::{build_decomposition, complement_in, Subspace};

/// Everything produced by recursion step `index` (1-based).
#[derive(Clone, Debug)]
pub struct StepRecord<F> {
    pub index: usize,
    pub sbar: Mat<F>,
    pub s: Mat<F>,
    pub n: Subspace<F>,
    pub n_c: Subspace<F>,
    pub r: Subspace<F>,
    pub r_c: Subspace<F>,
    /// `E_{1,i} .. E_{i,i}`.
    pub e_col: Vec<Mat<F>>,
    /// `e_{1,i} .. e_{i-1,i}`, so that `E_{a,i} = e_{a,i} S̄_i` for `a < i`.
    pub e_prod: Vec<Mat<F>>,
    /// `M_{1,i} .. M_{i,i}`.
    pub m_col: Vec<Mat<F>>,
    /// `S_i⁻¹𝒫_i`: inverse of `S_i: N_i^c → R_i`, zero on the other parts.
    pub sinv: Mat<F>,
    /// `𝒫_i`, projector onto `R_i`.
    pub proj_r: Mat<F>,
    /// Projector onto `R_i^c` along `R_1 ⊕ … ⊕ R_i`.
    pub proj_rc: Mat<F>,
    /// `P_i`, projector onto `N_i^c`.
    pub proj_n: Mat<F>,
    /// Projector onto `N_i` along `N_1^c ⊕ … ⊕ N_i^c`.
    pub proj_nk: Mat<F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    ExhaustedDegreeBound,
    OracleSmith,
    ThroughOrderOnly,
}

impl Certification {
    pub fn label(self) -> &'static str {
        match self {
            Certification::ExhaustedDegreeBound => "exhausted-degree-bound",
            Certification::OracleSmith => "oracle-smith",
            Certification::ThroughOrderOnly => "through-order-only",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizationReport {
    pub k: usize,
    /// `dim N_{j+1}^c` for `j = 0..=k`.
    pub exponent_multiplicities: Vec<usize>,
    pub dim_kernel_limit: usize,
    pub dim_range_limit: usize,
    pub certified: bool,
    pub certification_method: Certification,
    /// Set when no `R_i` is nonzero (`L ≡ 0`).
    pub degenerate: bool,
    /// Rank over the rational function field, when known.
    pub generic_rank: Option<usize>,
    /// Number of steps that certification looked at or is allowed to reach.
    pub horizon: usize,
}

impl StabilizationReport {
    /// Exponent `j` repeated `dim N_{j+1}^c` times.
    pub fn exponents(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (j, &m) in self.exponent_multiplicities.iter().enumerate() {
            out.extend(core::iter::repeat_n(j, m));
        }
        out
    }
}

/// `rk(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainRank {
    Finite(usize),
    Infinite,
}

/// A chain `(b_0, …, b_{ℓ-1})` solving the block-Toeplitz system of length ℓ.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanChain<F> {
    pub coeffs: Vec<Vec<F>>,
}

impl<F: Scalar> JordanChain<F> {
    /// `(b_0; …; b_{ℓ-1})` as one column.
    pub fn stacked(&self) -> Vec<F> {
        self.coeffs.iter().flatten().cloned().collect()
    }
}

#[derive(Clone, Debug)]
pub struct RecursionState<F> {
    l: MatSeries<F>,
    steps: Vec<StepRecord<F>>,
    stabilization: Option<StabilizationReport>,
}

/// Rank of `L` over the field of rational functions, from evaluations at
/// `min(m, m̄)·d + 1` distinct integers. A nonzero minor of size `r` has
/// degree at most `r·d`, so one of those points is not a root of it.
pub fn generic_rank<F: Scalar>(l: &MatSeries<F>) -> Result<usize> {
    if !l.is_polynomial() {
        return Err(Error::NotPolynomial);
    }
    let full = l.rows().min(l.cols());
    let d = l.degree().unwrap_or(0);
    let mut best = 0;
    for p in 0..=(full * d) as i64 {
        let r = l.eval(&F::from_i64(p))?.rank();
        best = best.max(r);
        if best == full {
            break;
        }
    }
    Ok(best)
}

/// Block-Toeplitz matrix of length ℓ acting on `(b_0; …; b_{ℓ-1})`:
/// block `(p, q)` is `L_{p-q}` for `p ≥ q`.
pub fn block_toeplitz<F: Scalar>(l: &MatSeries<F>, length: usize) -> Result<Mat<F>> {
    let (mb, m) = (l.rows(), l.cols());
    let mut out = Mat::zeros(mb * length, m * length);
    for p in 0..length {
        for q in 0..=p {
            let c = l.coeff_req(p - q)?;
            out.set_block(p * mb, q * m, &c);
        }
    }
    Ok(out)
}

fn upper_block_product<F: Scalar>(a: &[Vec<Mat<F>>], b: &[Vec<Mat<F>>], rows: usize, cols: usize) -> Vec<Vec<Mat<F>>> {
    let n = a.len();
    let mut out = vec![vec![Mat::zeros(rows, cols); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut acc = Mat::zeros(rows, cols);
            for t in i..=j {
                if a[i][t].is_zero() || b[t][j].is_zero() {
                    continue;
                }
                acc.add_assign(&(&a[i][t] * &b[t][j]));
            }
            out[i][j] = acc;
        }
    }
    out
}

impl<F: Scalar> RecursionState<F> {
    pub fn new(l: MatSeries<F>) -> Self {
        RecursionState { l, steps: Vec::new(), stabilization: None }
    }

    pub fn series(&self) -> &MatSeries<F> {
        &self.l
    }

    /// Column dimension `m` (the space `B`).
    pub fn m(&self) -> usize {
        self.l.cols()
    }

    /// Row dimension `m̄` (the space `B̄`).
    pub fn mbar(&self) -> usize {
        self.l.rows()
    }

    pub fn steps(&self) -> &[StepRecord<F>] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn record(&self, i: usize) -> &StepRecord<F> {
        &self.steps[i - 1]
    }

    pub fn stabilization(&self) -> Option<&StabilizationReport> {
        self.stabilization.as_ref()
    }

    pub fn k(&self) -> Result<usize> {
        self.stabilization.as_ref().map(|s| s.k).ok_or(Error::NotStabilized)
    }

    pub fn set_certification(&mut self, method: Certification) {
        if let Some(s) = self.stabilization.as_mut() {
            s.certification_method = method;
            s.certified = true;
        }
    }

    /// `N_i`, with `N_0 = B` and `N_i = N_{k+1}` past the computed steps.
    pub fn kernel_space(&self, i: usize) -> Subspace<F> {
        if i == 0 || self.steps.is_empty() {
            return Subspace::full(self.m());
        }
        let idx = i.min(self.steps.len());
        self.steps[idx - 1].n.clone()
    }

    /// `R_1 ⊕ … ⊕ R_j`.
    pub fn leading_space(&self, j: usize) -> Subspace<F> {
        let parts: Vec<&Subspace<F>> = self.steps.iter().take(j).map(|s| &s.r).collect();
        Subspace::sum(&parts, self.mbar())
    }

    /// `M_{a,c}`.
    pub fn m_entry(&self, a: usize, c: usize) -> &Mat<F> {
        &self.steps[c - 1].m_col[a - 1]
    }

    /// `E_{a,c}`.
    pub fn e_entry(&self, a: usize, c: usize) -> &Mat<F> {
        &self.steps[c - 1].e_col[a - 1]
    }

    /// `B_v = S̄_v S_v⁻¹𝒫_v`.
    pub fn b_entry(&self, v: usize) -> Mat<F> {
        let st = &self.steps[v - 1];
        &st.sbar * &st.sinv
    }

    /// `e_{i,c} = -S_i⁻¹𝒫_i (I - B_{i+1}) ⋯ (I - B_{c-1})`, for any `c > i`
    /// with steps `1..c-1` available.
    pub fn e_product(&self, i: usize, c: usize) -> Mat<F> {
        let mbar = self.mbar();
        let mut t = Mat::identity(mbar);
        for v in (i + 1..c).rev() {
            let b = self.b_entry(v);
            if !b.is_zero() {
                t = &(&Mat::identity(mbar) - &b) * &t;
            }
        }
        -&(&self.steps[i - 1].sinv * &t)
    }

    /// Runs recursion step `len() + 1`.
    pub fn step(&mut self) -> Result<()> {
        let i = self.steps.len() + 1;
        let (m, mbar) = (self.m(), self.mbar());
        let sbar = if i == 1 {
            self.l.coeff_req(0)?
        } else {
            let mut acc = Mat::zeros(mbar, m);
            for a in 1..i {
                let la = self.l.coeff_req(a)?;
                if la.is_zero() {
                    continue;
                }
                let ma = self.m_entry(a, i - 1);
                if !ma.is_zero() {
                    acc.add_assign(&(&la * ma));
                }
            }
            acc
        };
        let (n_prev, rc_prev, proj_rc_prev) = match self.steps.last() {
            None => (Subspace::full(m), Subspace::full(mbar), Mat::identity(mbar)),
            Some(p) => (p.n.clone(), p.r_c.clone(), p.proj_rc.clone()),
        };
        let s = &proj_rc_prev * &sbar;

        let z = n_prev.basis();
        let restricted = &s * z;
        let n = Subspace::from_basis_unchecked(z * &restricted.kernel_basis());
        let n_c = complement_in(&n, &n_prev)?;
        let r = Subspace::from_basis_unchecked(&s * n_c.basis());
        let r_c = complement_in(&r, &rc_prev)?;

        let mut r_parts: Vec<Subspace<F>> = self.steps.iter().map(|s| s.r.clone()).collect();
        r_parts.push(r.clone());
        r_parts.push(r_c.clone());
        let dec_r = build_decomposition(&r_parts, mbar).map_err(|e| Error::Internal(format!("range split at step {i}: {e}")))?;
        let proj_r = dec_r.projector(i - 1).clone();
        let proj_rc = dec_r.projector(i).clone();
        let sinv = n_c.basis() * dec_r.coordinate_map(i - 1);

        let mut n_parts: Vec<Subspace<F>> = self.steps.iter().map(|s| s.n_c.clone()).collect();
        n_parts.push(n_c.clone());
        n_parts.push(n.clone());
        let dec_n = build_decomposition(&n_parts, m).map_err(|e| Error::Internal(format!("kernel split at step {i}: {e}")))?;
        let proj_n = dec_n.projector(i - 1).clone();
        let proj_nk = dec_n.projector(i).clone();

        // E column i from the explicit products, bottom up.
        let mut e_prod = vec![Mat::zeros(m, mbar); i - 1];
        let mut t = Mat::identity(mbar);
        for a in (1..i).rev() {
            let st = &self.steps[a - 1];
            if !st.sinv.is_zero() {
                e_prod[a - 1] = -&(&st.sinv * &t);
                let b = &st.sbar * &st.sinv;
                if !b.is_zero() {
                    t = &(&Mat::identity(mbar) - &b) * &t;
                }
            }
        }
        let mut e_col: Vec<Mat<F>> = e_prod.iter().map(|e| if e.is_zero() { Mat::zeros(m, m) } else { e * &sbar }).collect();
        e_col.push(Mat::identity(m));

        // M_i = diag(I, M^{i-1}) E_i.
        let mut m_col = Vec::with_capacity(i);
        m_col.push(e_col[0].clone());
        for a in 1..i {
            let mut acc = Mat::zeros(m, m);
            for b in a..i {
                let e = &e_col[b];
                if e.is_zero() {
                    continue;
                }
                let mab = self.m_entry(a, b);
                if !mab.is_zero() {
                    acc.add_assign(&(mab * e));
                }
            }
            m_col.push(acc);
        }

        self.steps.push(StepRecord {
            index: i,
            sbar,
            s,
            n,
            n_c,
            r,
            r_c,
            e_col,
            e_prod,
            m_col,
            sinv,
            proj_r,
            proj_rc,
            proj_n,
            proj_nk,
        });
        Ok(())
    }

    /// Runs steps until `len() == total`.
    pub fn extend_to(&mut self, total: usize) -> Result<()> {
        while self.steps.len() < total {
            self.step()?;
        }
        Ok(())
    }

    /// How many steps the input data supports (`usize::MAX` for polynomials).
    pub fn max_steps(&self) -> usize {
        self.l.valid_order().map_or(usize::MAX, |t| t + 1)
    }

    fn range_sum(&self) -> usize {
        self.steps.iter().map(|s| s.r.dim()).sum()
    }

    fn declare(&mut self, certified: bool, method: Certification, generic_rank: Option<usize>, horizon: usize) {
        let last = self.steps.iter().rposition(|s| !s.r.is_zero());
        let k = last.unwrap_or(0);
        let exponent_multiplicities = (1..=k + 1).map(|i| self.steps[i - 1].n_c.dim()).collect();
        self.stabilization = Some(StabilizationReport {
            k,
            exponent_multiplicities,
            dim_kernel_limit: self.steps[k].n.dim(),
            dim_range_limit: self.steps.iter().take(k + 1).map(|s| s.r.dim()).sum(),
            certified,
            certification_method: method,
            degenerate: last.is_none(),
            generic_rank,
            horizon,
        });
    }

    pub fn partial_r_dims(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.r.dim()).collect()
    }
}

/// Steps the recursion until the leading-coefficient spaces are certified
/// to have stopped growing.
pub fn run_until_stabilized<F: Scalar>(l: MatSeries<F>, k_max: usize) -> Result<RecursionState<F>> {
    let mut st = RecursionState::new(l);
    let full = st.m().min(st.mbar());
    if st.l.is_polynomial() {
        let r = generic_rank(&st.l)?;
        let d = st.l.degree().unwrap_or(0);
        let horizon = r * d;
        loop {
            if !st.steps.is_empty() && st.range_sum() == r {
                st.declare(true, Certification::ExhaustedDegreeBound, Some(r), horizon);
                return Ok(st);
            }
            if st.steps.len() > k_max {
                return Err(Error::KMaxExceeded { k_max, partial_r_dims: st.partial_r_dims() });
            }
            if st.steps.len() > horizon {
                return Err(Error::Internal(format!(
                    "leading-coefficient spaces reached dimension {} of generic rank {r} after {} steps",
                    st.range_sum(),
                    st.steps.len()
                )));
            }
            st.step()?;
        }
    } else {
        let cap = st.max_steps();
        loop {
            let done = !st.steps.is_empty() && st.range_sum() == full;
            if done || st.steps.len() == cap {
                let horizon = cap - 1;
                st.declare(done, Certification::ThroughOrderOnly, None, horizon);
                return Ok(st);
            }
            if st.steps.len() > k_max {
                return Err(Error::KMaxExceeded { k_max, partial_r_dims: st.partial_r_dims() });
            }
            st.step()?;
        }
    }
}

/// Basis of the chain space of length `length` built from the `M` columns.
pub fn jordan_chain_basis<F: Scalar>(state: &RecursionState<F>, length: usize) -> Result<Vec<JordanChain<F>>> {
    if state.len() < length {
        return Err(Error::InsufficientSteps { needed: length, have: state.len() });
    }
    let m = state.m();
    let mut out = Vec::new();
    for j in 1..=length {
        let nb = state.record(j).n.basis();
        for col in 0..nb.cols() {
            let v = nb.col(col);
            let mut coeffs = vec![vec![F::zero(); m]; length];
            for a in 1..=j {
                coeffs[length - a] = state.m_entry(a, j).mat_vec(&v);
            }
            out.push(JordanChain { coeffs });
        }
    }
    Ok(out)
}

pub fn rank_of<F: Scalar>(state: &RecursionState<F>, b: &[F]) -> Result<ChainRank> {
    let k = state.k()?;
    if b.iter().all(|x| x.is_zero()) {
        return Ok(ChainRank::Infinite);
    }
    for i in 1..=k + 1 {
        if !state.record(i).n.contains_vector(b) {
            return Ok(ChainRank::Finite(i - 1));
        }
    }
    Ok(ChainRank::Infinite)
}

pub fn lc_of<F: Scalar>(state: &RecursionState<F>, bbar: &[F]) -> Result<Option<usize>> {
    let k = state.k()?;
    if bbar.iter().all(|x| x.is_zero()) {
        return Ok(Some(0));
    }
    for j in 0..=k {
        if state.leading_space(j + 1).contains_vector(bbar) {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

type Check = core::result::Result<(), String>;

impl<F: Scalar> RecursionState<F> {
    /// `(L_0 … L_{c-1}) M_c = (S̄_1 … S̄_c) E_c = S_c` for every computed `c`.
    pub fn check_column_factorization(&self) -> Check {
        let (m, mbar) = (self.m(), self.mbar());
        for c in 1..=self.len() {
            let mut via_l = Mat::zeros(mbar, m);
            let mut via_sbar = Mat::zeros(mbar, m);
            for a in 1..=c {
                let la = self.l.coeff(a - 1).ok_or_else(|| format!("L_{} unknown", a - 1))?;
                via_l.add_assign(&(&la * self.m_entry(a, c)));
                via_sbar.add_assign(&(&self.record(a).sbar * self.e_entry(a, c)));
            }
            let s = &self.record(c).s;
            if !via_l.approx_eq(s) {
                return Err(format!("L-row times M column {c} differs from S_{c}"));
            }
            if !via_sbar.approx_eq(s) {
                return Err(format!("S̄-row times E column {c} differs from S_{c}"));
            }
        }
        Ok(())
    }

    /// `Σ_{a<c} S̄_a e_{a,c} = -(𝒫_1 + … + 𝒫_{c-1})`.
    pub fn check_projector_sum(&self) -> Check {
        let mbar = self.mbar();
        for c in 2..=self.len() {
            let mut lhs = Mat::zeros(mbar, mbar);
            let mut rhs = Mat::zeros(mbar, mbar);
            for a in 1..c {
                lhs.add_assign(&(&self.record(a).sbar * &self.record(c).e_prod[a - 1]));
                rhs.add_assign(&self.record(a).proj_r);
            }
            if !lhs.approx_eq(&(-&rhs)) {
                return Err(format!("column {c}"));
            }
        }
        Ok(())
    }

    /// Explicit products agree with `E_{a,c} = -S_a⁻¹𝒫_a Σ_{v>a} S̄_v E_{v,c}`.
    pub fn check_e_recursive(&self) -> Check {
        let m = self.m();
        for c in 2..=self.len() {
            for a in (1..c).rev() {
                let mut acc = Mat::zeros(self.mbar(), m);
                for v in a + 1..=c {
                    acc.add_assign(&(&self.record(v).sbar * self.e_entry(v, c)));
                }
                let rec = -&(&self.record(a).sinv * &acc);
                if !rec.approx_eq(self.e_entry(a, c)) {
                    return Err(format!("E_{{{a},{c}}}"));
                }
                if !self.e_product(a, c).approx_eq(&self.record(c).e_prod[a - 1]) {
                    return Err(format!("e_{{{a},{c}}} product"));
                }
            }
        }
        Ok(())
    }

    fn trailing(&self, which: char, size: usize, l: usize) -> Vec<Vec<Mat<F>>> {
        let m = self.m();
        let off = size - l;
        let mut out = vec![vec![Mat::zeros(m, m); l]; l];
        for i in 0..l {
            for j in i..l {
                let (a, c) = (off + i + 1, off + j + 1);
                out[i][j] = match which {
                    'M' => self.m_entry(a, c).clone(),
                    _ => self.e_entry(a, c).clone(),
                };
            }
        }
        out
    }

    /// Trailing `l×l` blocks: `M_l^{K} = M^l E_l^{l+1} ⋯ E_l^{K}` for all
    /// `K ≤ max_size` and `1 ≤ l < K`.
    pub fn check_subblock_factorization(&self, max_size: usize) -> Check {
        let top = max_size.min(self.len());
        let m = self.m();
        for l in 1..top {
            let mut prod = self.trailing('M', l, l);
            for big in l + 1..=top {
                prod = upper_block_product(&prod, &self.trailing('E', big, l), m, m);
                let want = self.trailing('M', big, l);
                for i in 0..l {
                    for j in i..l {
                        if !prod[i][j].approx_eq(&want[i][j]) {
                            return Err(format!("l = {l}, size {big}, block ({}, {})", i + 1, j + 1));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Rows `i ≥ k+1` copy row `k+1` along diagonals.
    pub fn check_toeplitz_rows(&self) -> Check {
        let k = self.k().map_err(|e| format!("{e}"))?;
        for c in k + 1..=self.len() {
            for i in k + 1..=c {
                let j = c - i;
                if !self.m_entry(i, c).approx_eq(self.m_entry(k + 1, k + 1 + j)) {
                    return Err(format!("M_{{{i},{c}}} differs from M_{{{},{}}}", k + 1, k + 1 + j));
                }
            }
        }
        Ok(())
    }

    /// `E_{i,c} = 0` for `k+2 ≤ i < c`.
    pub fn check_green_zero(&self) -> Check {
        let k = self.k().map_err(|e| format!("{e}"))?;
        for c in 1..=self.len() {
            for i in k + 2..c {
                if !self.e_entry(i, c).is_zero() {
                    return Err(format!("E_{{{i},{c}}} nonzero"));
                }
            }
        }
        Ok(())
    }

    /// Per-step nesting and bijection invariants of the records.
    pub fn check_records(&self) -> Check {
        let mut n_prev = Subspace::full(self.m());
        let mut rc_prev = Subspace::full(self.mbar());
        for st in &self.steps {
            let i = st.index;
            if !n_prev.contains(&st.n) || st.n.dim() + st.n_c.dim() != n_prev.dim() {
                return Err(format!("kernel nesting at step {i}"));
            }
            if !rc_prev.contains(&st.r) || !rc_prev.contains(&st.r_c) || st.r.dim() + st.r_c.dim() != rc_prev.dim() {
                return Err(format!("range split at step {i}"));
            }
            if !(&st.s * st.n.basis()).is_zero() {
                return Err(format!("S_{i} does not annihilate N_{i}"));
            }
            if st.r.dim() != st.n_c.dim() {
                return Err(format!("dim R_{i} differs from dim N_{i}^c"));
            }
            if !(&(&st.sinv * &st.s) * st.n_c.basis()).approx_eq(st.n_c.basis()) {
                return Err(format!("S_{i}⁻¹ is not a left inverse on N_{i}^c"));
            }
            if !st.m_col.last().is_some_and(|x| x == &Mat::identity(self.m())) {
                return Err(format!("M_{{{i},{i}}} is not the identity"));
            }
            n_prev = st.n.clone();
            rc_prev = st.r_c.clone();
        }
        Ok(())
    }

    /// The chains of length ℓ span exactly the kernel of the block-Toeplitz
    /// matrix of length ℓ.
    pub fn check_jordan_chains(&self, length: usize) -> Check {
        let chains = jordan_chain_basis(self, length).map_err(|e| format!("{e}"))?;
        let t = block_toeplitz(&self.l, length).map_err(|e| format!("{e}"))?;
        let ker = crate::subspace::kernel(&t);
        let cols: Vec<Mat<F>> = chains.iter().map(|c| Mat::column(&c.stacked())).collect();
        let refs: Vec<&Mat<F>> = cols.iter().collect();
        let span = Mat::hstack(self.m() * length, &refs);
        if span.rank() != chains.len() {
            return Err(format!("length {length}: chains are dependent"));
        }
        if chains.len() != ker.dim() {
            return Err(format!("length {length}: {} chains, kernel dimension {}", chains.len(), ker.dim()));
        }
        if !ker.contains_cols(&span) {
            return Err(format!("length {length}: a chain is not a solution"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type M = Mat<Rational>;
    type S = MatSeries<Rational>;

    fn f2() -> S {
        S::polynomial(2, 2, vec![M::from_i64(&[&[0, -1], &[0, 0]]), M::identity(2)]).unwrap()
    }

    fn e(i: usize, n: usize) -> Vec<Rational> {
        (0..n).map(|j| Rational::from_i64((i == j) as i64)).collect()
    }

    #[test]
    fn f2_step_records() {
        let st = run_until_stabilized(f2(), 10).unwrap();
        let s1 = st.record(1);
        assert_eq!(s1.s, M::from_i64(&[&[0, -1], &[0, 0]]));
        assert!(s1.n.same_as(&Subspace::from_basis(M::column(&e(0, 2))).unwrap()));
        assert!(s1.r.same_as(&Subspace::from_basis(M::column(&e(0, 2))).unwrap()));
        let s2 = st.record(2);
        assert!((&s2.s * s1.n.basis()).is_zero());
        assert!(s2.r.is_zero());
        assert_eq!(s2.n.dim(), 1);
        assert_eq!(st.e_entry(1, 2).mat_vec(&e(0, 2)), e(1, 2));
        let s3 = st.record(3);
        assert_eq!(s3.s.mat_vec(&e(0, 2)), e(1, 2));
        assert!(s3.r.same_as(&Subspace::from_basis(M::column(&e(1, 2))).unwrap()));
        assert!(s3.n.is_zero());
        let rep = st.stabilization().unwrap();
        assert_eq!(rep.k, 2);
        assert_eq!(rep.exponents(), vec![0, 2]);
        assert!(rep.certified);
    }

    #[test]
    fn f2_rank_and_leading_coefficient_queries() {
        let st = run_until_stabilized(f2(), 10).unwrap();
        assert_eq!(rank_of(&st, &e(0, 2)).unwrap(), ChainRank::Finite(2));
        assert_eq!(rank_of(&st, &e(1, 2)).unwrap(), ChainRank::Finite(0));
        assert_eq!(lc_of(&st, &e(0, 2)).unwrap(), Some(0));
        assert_eq!(lc_of(&st, &e(1, 2)).unwrap(), Some(2));
        let chains = jordan_chain_basis(&st, 2).unwrap();
        assert!(chains.iter().any(|c| c.coeffs == vec![e(0, 2), e(1, 2)]));
    }

    #[test]
    fn interleaved_diagonal() {
        let l = S::polynomial(
            2,
            2,
            vec![M::from_i64(&[&[1, 0], &[0, 0]]), M::zeros(2, 2), M::from_i64(&[&[0, 0], &[0, 1]])],
        )
        .unwrap();
        let st = run_until_stabilized(l, 10).unwrap();
        assert!(st.record(2).r.is_zero());
        assert!(!st.record(3).r.is_zero());
        assert_eq!(st.stabilization().unwrap().exponents(), vec![0, 2]);
    }

    #[test]
    fn f4_chain_and_rank() {
        let l = S::polynomial(1, 2, vec![M::from_i64(&[&[1, 0]]), M::from_i64(&[&[0, 1]])]).unwrap();
        let mut st = run_until_stabilized(l, 10).unwrap();
        assert_eq!(st.k().unwrap(), 0);
        assert_eq!(rank_of(&st, &e(1, 2)).unwrap(), ChainRank::Infinite);
        assert_eq!(rank_of(&st, &e(0, 2)).unwrap(), ChainRank::Finite(0));
        st.extend_to(2).unwrap();
        let chains = jordan_chain_basis(&st, 2).unwrap();
        let minus_e1: Vec<Rational> = e(0, 2).iter().map(|x| x.neg()).collect();
        assert!(chains.iter().any(|c| c.coeffs == vec![e(1, 2), minus_e1.clone()]));
    }

    #[test]
    fn zero_family_is_degenerate() {
        let st = run_until_stabilized(S::zero(2, 2), 5).unwrap();
        let rep = st.stabilization().unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.k, 0);
        assert_eq!(rep.dim_kernel_limit, 2);
        assert!(rep.exponents().is_empty());
    }

    #[test]
    fn invertible_constant() {
        let st = run_until_stabilized(S::constant(M::from_i64(&[&[2, 1], &[1, 1]])), 5).unwrap();
        assert_eq!(st.k().unwrap(), 0);
        assert!(st.record(1).n.is_zero());
        assert_eq!(st.record(1).r.dim(), 2);
    }

    #[test]
    fn lc_outside_leading_spaces() {
        let l = S::polynomial(2, 1, vec![M::from_i64(&[&[1], &[0]]), M::from_i64(&[&[0], &[1]])]).unwrap();
        let st = run_until_stabilized(l, 5).unwrap();
        assert_eq!(lc_of(&st, &e(1, 2)).unwrap(), None);
        assert_eq!(lc_of(&st, &[Rational::zero(), Rational::zero()]).unwrap(), Some(0));
    }
}

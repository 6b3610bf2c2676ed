//! Command drivers. Each returns a structured report; failures carry the
//! exit code they map to.

use locsmith_core::artin::{
    artin_rees_decompose, empirical_greenberg, extendable_jets, flat_basis, greenberg, parametrize_solution, SolutionCurve,
};
use locsmith_core::ginverse::{
    check_projection_families, delta_pinv, kernel_range_families, l_pinv_laurent, laurent_checks, projection_families, smith_report,
    verify_factorization, verify_ginverse_axioms, verify_kernel_range, Evaluator, SampleCheck, SampleOutcome, SmithLocalReport,
};
use locsmith_core::poly::oracle_smith_polynomial;
use locsmith_core::recursion::run_until_stabilized;
use locsmith_core::series::recenter;
use locsmith_core::transform::{check_defining_structure, pre_transform, triangular_check};
use locsmith_core::{diagonalize, CheckEntry, Diagonalization, DiagonalizeOptions, Error, Mat, MatSeries, RecursionState, Scalar, Subspace};
use serde_json::{json, Map, Value};

use crate::report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Diagonalize,
    Ginverse,
    Solve,
    Artin,
    OracleSmith,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Diagonalize => "diagonalize",
            Command::Ginverse => "ginverse",
            Command::Solve => "solve",
            Command::Artin => "artin",
            Command::OracleSmith => "oracle-smith",
        }
    }
}

pub struct Request<F> {
    pub command: Command,
    pub l: MatSeries<F>,
    pub order: Option<usize>,
    pub k_max: usize,
    pub check: bool,
    pub samples: Vec<F>,
    pub shift: Option<F>,
    pub curve: Option<Vec<Vec<F>>>,
    pub level: Option<usize>,
}

#[derive(Debug)]
pub enum Failure {
    /// Exit code 2.
    Input(String),
    /// Exit code 3, with whatever was computed.
    NotStabilized(String, Value),
    /// Exit code 4.
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NotStabilized(..) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

fn fail(e: Error) -> Failure {
    match e {
        Error::KMaxExceeded { k_max, ref partial_r_dims } => {
            Failure::NotStabilized(e.to_string(), json!({ "k_max": k_max, "partial_range_dims": partial_r_dims }))
        }
        Error::NotStabilized | Error::InsufficientSteps { .. } => Failure::NotStabilized(e.to_string(), Value::Null),
        Error::Shape(_)
        | Error::NotPolynomial
        | Error::JetShift
        | Error::OutsideValidity { .. }
        | Error::MissingCoefficient { .. }
        | Error::ResidualOrder { .. }
        | Error::Containment => Failure::Input(e.to_string()),
        other => Failure::Internal(other.to_string()),
    }
}

pub struct Outcome {
    pub report: Value,
    pub failed_checks: Vec<String>,
}

struct Builder {
    obj: Map<String, Value>,
    checks: Vec<CheckEntry>,
}

impl Builder {
    fn put(&mut self, k: &str, v: Value) {
        self.obj.insert(k.into(), v);
    }

    fn sample_checks<F: Scalar>(&mut self, prefix: &str, res: &[SampleCheck<F>]) {
        for s in res {
            match &s.outcome {
                SampleOutcome::Checked(cs) => {
                    for c in cs {
                        let mut c = c.clone();
                        c.name = format!("{prefix}{}@{}", c.name, s.point);
                        self.checks.push(c);
                    }
                }
                SampleOutcome::Skipped(why) => {
                    self.checks.push(CheckEntry::pass(&format!("{prefix}sample@{}", s.point), Some(format!("skipped: {why}"))));
                }
            }
        }
    }
}

pub fn run<F: Scalar>(req: Request<F>) -> Result<Outcome, Failure> {
    let mut b = Builder { obj: Map::new(), checks: Vec::new() };
    b.put("command", Value::String(req.command.label().into()));
    let l = match &req.shift {
        Some(s) => {
            b.put("shift", Value::String(s.to_string()));
            recenter(&req.l, s).map_err(fail)?
        }
        None => req.l.clone(),
    };
    b.put(
        "input",
        json!({
            "rows": l.rows(),
            "cols": l.cols(),
            "kind": if l.is_polynomial() { "polynomial" } else { "jet" },
            "degree": l.degree(),
            "valid_order": l.valid_order(),
        }),
    );
    match req.command {
        Command::Analyze => analyze(&mut b, &req, l)?,
        Command::OracleSmith => oracle(&mut b, &req, &l)?,
        _ => {
            let opts = DiagonalizeOptions { order: req.order, k_max: req.k_max };
            let d = diagonalize(&l, opts).map_err(fail)?;
            diag_section(&mut b, &d);
            if req.check {
                full_checks(&mut b, &d, &l)?;
            }
            match req.command {
                Command::Ginverse => ginverse(&mut b, &req, &d)?,
                Command::Solve => solve(&mut b, &req, &d)?,
                Command::Artin => artin(&mut b, &req, &d)?,
                _ => {}
            }
        }
    }
    let failed_checks = b.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let mut obj = b.obj;
    obj.insert("verification".into(), report::checks(&b.checks));
    Ok(Outcome { report: Value::Object(obj), failed_checks })
}

fn steps_json<F: Scalar>(st: &RecursionState<F>, upto: usize) -> Value {
    Value::Array(
        (1..=upto.min(st.len()))
            .map(|i| {
                let r = st.record(i);
                json!({
                    "index": i,
                    "s": report::mat(&r.s),
                    "dim_n": r.n.dim(),
                    "dim_n_complement": r.n_c.dim(),
                    "dim_r": r.r.dim(),
                    "dim_r_complement": r.r_c.dim(),
                    "n_basis": report::columns(r.n.basis()),
                    "r_basis": report::columns(r.r.basis()),
                })
            })
            .collect(),
    )
}

fn recursion_checks<F: Scalar>(b: &mut Builder, st: &RecursionState<F>, k: usize) {
    b.checks.push(CheckEntry::from_result("step-records", st.check_records()));
    b.checks.push(CheckEntry::from_result("column-factorization", st.check_column_factorization()));
    b.checks.push(CheckEntry::from_result("projector-sum", st.check_projector_sum()));
    b.checks.push(CheckEntry::from_result("e-recursion", st.check_e_recursive()));
    b.checks.push(CheckEntry::from_result("sub-block-factorization", st.check_subblock_factorization(2 * k + 5)));
    b.checks.push(CheckEntry::from_result("toeplitz-rows", st.check_toeplitz_rows()));
    b.checks.push(CheckEntry::from_result("green-zero", st.check_green_zero()));
    for len in 1..=(k + 3).min(st.len()) {
        b.checks.push(CheckEntry::from_result(&format!("jordan-chains-{len}"), st.check_jordan_chains(len)));
    }
}

fn oracle_check<F: Scalar>(b: &mut Builder, l: &MatSeries<F>, st: &RecursionState<F>) {
    if !l.is_polynomial() {
        b.checks.push(CheckEntry::pass("oracle-smith", Some("not applicable to jets".into())));
        return;
    }
    let res = oracle_smith_polynomial(l).map_err(|e| e.to_string()).and_then(|o| {
        let mut ours = st.stabilization().map(|s| s.exponents()).unwrap_or_default();
        let mut theirs = o.local_exponents.clone();
        ours.sort_unstable();
        theirs.sort_unstable();
        if ours == theirs {
            Ok(())
        } else {
            Err(format!("recursion {ours:?}, oracle {theirs:?}"))
        }
    });
    b.checks.push(CheckEntry::from_result("oracle-smith", res));
}

fn analyze<F: Scalar>(b: &mut Builder, req: &Request<F>, l: MatSeries<F>) -> Result<(), Failure> {
    let mut st = run_until_stabilized(l.clone(), req.k_max).map_err(fail)?;
    let rep = st.stabilization().expect("declared").clone();
    let k = rep.k;
    if req.check {
        let want = (k + 3).min(st.max_steps());
        st.extend_to(want).map_err(fail)?;
    }
    b.put("stabilization", report::stabilization(&rep));
    b.put("steps", steps_json(&st, k + 1));
    let mut acc = 0;
    let chain_dims: Vec<usize> = (1..=k + 1)
        .map(|i| {
            acc += st.record(i).n.dim();
            acc
        })
        .collect();
    let rank_classes: Vec<Value> = (1..=k + 1).map(|i| json!({ "rank": i - 1, "dim": st.record(i).n_c.dim() })).collect();
    let mut lead = 0;
    let lc_dims: Vec<usize> = (1..=k + 1)
        .map(|i| {
            lead += st.record(i).r.dim();
            lead
        })
        .collect();
    b.put(
        "chains",
        json!({
            "chain_space_dims": chain_dims,
            "root_rank_classes": rank_classes,
            "infinite_rank_dim": st.record(k + 1).n.dim(),
            "leading_coefficient_dims": lc_dims,
        }),
    );
    if req.check {
        let tri = pre_transform(&st).and_then(|p| triangular_check(&l, &p, &st).map(|_| ()));
        b.checks.push(CheckEntry::from_result("triangular-structure", tri.map_err(|e| e.to_string())));
        recursion_checks(b, &st, k);
        oracle_check(b, &l, &st);
    }
    Ok(())
}

fn diag_section<F: Scalar>(b: &mut Builder, d: &Diagonalization<F>) {
    let st = d.state.stabilization().expect("declared");
    b.put("stabilization", report::stabilization(st));
    b.put("steps", steps_json(&d.state, d.diag.k + 1));
    let phi_to = d.phi.valid_order;
    b.put(
        "transforms",
        json!({
            "phi": { "valid_order": phi_to, "provenance": d.phi.provenance.label(), "series": report::series(&d.phi.series, phi_to) },
            "psi": { "valid_order": d.psi.valid_order, "provenance": d.psi.provenance.label(), "series": report::series(&d.psi.series, d.psi.valid_order) },
        }),
    );
    let parts: Vec<Value> = d
        .diag
        .parts
        .iter()
        .map(|p| json!({ "exponent": p.exponent, "s_p": report::mat(&(&p.s * &p.p)), "p": report::mat(&p.p), "proj_r": report::mat(&p.proj_r) }))
        .collect();
    b.put(
        "diagonal",
        json!({
            "k": d.diag.k,
            "parts": parts,
            "delta": report::series(&d.diag.delta(), d.diag.k),
            "kernel_projector": report::mat(&d.diag.p_ker),
            "cokernel_projector": report::mat(&d.diag.pi_coker),
            "identities_through_order": d.order,
        }),
    );
    b.checks.extend(d.checks.iter().cloned());
}

fn full_checks<F: Scalar>(b: &mut Builder, d: &Diagonalization<F>, l: &MatSeries<F>) -> Result<(), Failure> {
    let k = d.diag.k;
    b.checks.push(CheckEntry::from_result("defining-equation-structure", check_defining_structure(&d.state, &d.defining)));
    let tri = pre_transform(&d.state).and_then(|p| triangular_check(l, &p, &d.state).map(|_| ()));
    b.checks.push(CheckEntry::from_result("triangular-structure", tri.map_err(|e| e.to_string())));
    recursion_checks(b, &d.state, k);
    oracle_check(b, l, &d.state);
    Ok(())
}

fn smith_json<F: Scalar>(r: &SmithLocalReport<F>, order: usize) -> Value {
    let fact = r.factorization.as_ref().map(|f| json!({ "s_p": report::mat(&f.s_p), "q": report::series(&f.q, order), "p": report::series(&f.p, r.k) }));
    json!({
        "k": r.k,
        "exponents": r.exponents,
        "rank_limit": r.rank_limit,
        "kernel_limit_dim": r.kernel_limit_dim,
        "full_smith": r.full_smith,
        "degenerate": r.degenerate,
        "factorization": fact,
    })
}

fn ginverse<F: Scalar>(b: &mut Builder, req: &Request<F>, d: &Diagonalization<F>) -> Result<(), Failure> {
    let k = d.diag.k;
    let dinv = delta_pinv(&d.diag);
    let x_top = d.order - k;
    let x = l_pinv_laurent(&d.phi, &dinv, &d.psi, x_top).map_err(fail)?;
    let (pn, pr) = projection_families(&d.phi, &d.psi, &d.diag, d.order).map_err(fail)?;
    let (nf, rf) = kernel_range_families(&d.phi, &d.psi, &d.state).map_err(fail)?;
    let smith = smith_report(&d.state, &d.diag, &d.psi).map_err(fail)?;
    b.put("delta_inverse", report::laurent(&dinv));
    b.put("inverse", report::laurent(&x));
    b.put("projections", json!({ "kernel_side": report::series(&pn, d.order), "range_side": report::series(&pr, d.order) }));
    b.put("families", json!({ "kernel": report::series(&nf, d.phi.valid_order), "range": report::series(&rf, d.psi.valid_order) }));
    b.put("smith", smith_json(&smith, d.psi.valid_order));
    b.checks.extend(check_projection_families(&pn, &pr, &d.diag, d.order));
    let pole = if x.pole_order() == k || smith.degenerate {
        CheckEntry::pass("pole-order", Some(format!("{}", x.pole_order())))
    } else {
        CheckEntry::fail("pole-order", format!("pole order {} against k = {k}", x.pole_order()))
    };
    b.checks.push(pole);
    if req.check {
        b.checks.extend(laurent_checks(d.state.series(), &x, &nf, d.phi.valid_order));
        if d.state.series().is_polynomial() {
            let ev = Evaluator::new(d).map_err(fail)?;
            b.sample_checks("", &verify_ginverse_axioms(&ev, &req.samples));
            b.sample_checks("", &verify_kernel_range(&ev, &req.samples));
            if smith.full_smith {
                b.sample_checks("", &verify_factorization(&ev, &req.samples));
            }
        }
    }
    Ok(())
}

fn curve_json<F: Scalar>(c: &SolutionCurve<F>) -> Value {
    json!({
        "coefficients": report::vectors(&c.coeffs),
        "residual_order": c.residual_order,
        "checked_orders": c.checked,
        "exact": c.is_exact(),
    })
}

fn solve<F: Scalar>(b: &mut Builder, req: &Request<F>, d: &Diagonalization<F>) -> Result<(), Failure> {
    let st = &d.state;
    let k = d.diag.k;
    let fb = flat_basis(st, &d.phi).map_err(fail)?;
    b.put(
        "solutions",
        json!({
            "limit_kernel_basis": report::columns(st.record(k + 1).n.basis()),
            "flat_basis": fb.generators.iter().map(curve_json).collect::<Vec<_>>(),
        }),
    );
    if let Some(c) = &req.curve {
        let curve = SolutionCurve::new(st.series(), c.clone()).map_err(fail)?;
        let mut entry = curve_json(&curve);
        if curve.is_exact() {
            let n = parametrize_solution(&curve, &d.phi, st).map_err(fail)?;
            entry["parameters"] = report::vectors(&n);
        }
        b.put("curve", entry);
    }
    if req.check {
        for (i, g) in fb.generators.iter().enumerate() {
            let res = parametrize_solution(g, &d.phi, st).map_err(|e| e.to_string()).and_then(|n| {
                let base = st.record(k + 1).n.basis().col(i);
                let ok = n[0] == base && n[1..].iter().flatten().all(|x| x.is_zero());
                if ok && g.is_exact() { Ok(()) } else { Err("generator does not parametrize back to its basis vector".into()) }
            });
            b.checks.push(CheckEntry::from_result(&format!("flat-roundtrip-{i}"), res));
        }
        let q = (d.phi.valid_order + 1).min(6);
        let have_l = st.series().valid_order().is_none_or(|v| v + 1 >= q + k + 2);
        if have_l {
            let res = solution_space_check(d, q);
            b.checks.push(CheckEntry::from_result("solution-jet-space", res));
        }
    }
    Ok(())
}

fn solution_space_check<F: Scalar>(d: &Diagonalization<F>, q: usize) -> Result<(), String> {
    let st = &d.state;
    let k = d.diag.k;
    let m = st.m();
    let jets = extendable_jets(st.series(), q, k + 2).map_err(|e| e.to_string())?;
    let fb = flat_basis(st, &d.phi).map_err(|e| e.to_string())?;
    let mut cols = Vec::new();
    for g in &fb.generators {
        for shift in 0..q {
            let mut v = vec![F::zero(); q * m];
            for t in shift..q {
                v[t * m..(t + 1) * m].clone_from_slice(&g.coeffs[t - shift]);
            }
            cols.push(Mat::column(&v));
        }
    }
    let refs: Vec<&Mat<F>> = cols.iter().collect();
    let ours = Subspace::span(&Mat::hstack(q * m, &refs));
    if ours.same_as(&jets) {
        Ok(())
    } else {
        Err(format!("jets of φ·n span {} dimensions, extendable jets {}", ours.dim(), jets.dim()))
    }
}

fn artin<F: Scalar>(b: &mut Builder, req: &Request<F>, d: &Diagonalization<F>) -> Result<(), Failure> {
    let st = &d.state;
    let levels: Vec<usize> = match req.level {
        Some(l) if l >= 1 => vec![l],
        Some(_) => return Err(Failure::Input("level must be at least 1".into())),
        None => vec![1, 2, 3],
    };
    let mut g = Vec::new();
    for &l in &levels {
        let emp = if st.series().valid_order().is_none_or(|v| v + 1 >= d.diag.k + l) {
            empirical_greenberg(st, l).ok()
        } else {
            None
        };
        g.push(json!({ "level": l, "greenberg": greenberg(st, l).map_err(fail)?, "empirical_minimum": emp }));
    }
    b.put("greenberg", Value::Array(g));
    if let Some(c) = &req.curve {
        let l = req.level.unwrap_or(1);
        let curve = SolutionCurve::new(st.series(), c.clone()).map_err(fail)?;
        let ar = artin_rees_decompose(&curve, l, st, &d.phi).map_err(fail)?;
        b.put(
            "approximation",
            json!({
                "level": l,
                "input": curve_json(&curve),
                "exact_solution": curve_json(&ar.bhat),
                "remainder": report::vectors(&ar.b0),
                "identity_verified_through": ar.verified_through,
            }),
        );
        let agree = ar.bhat.coeffs[..l].iter().flatten().zip(curve.coeffs[..l].iter().flatten()).all(|(x, y)| x.sub(y).is_zero());
        b.checks.push(if agree {
            CheckEntry::pass("artin-agreement", Some(format!("coefficients 0..={} reproduced", l - 1)))
        } else {
            CheckEntry::fail("artin-agreement", "leading coefficients differ".into())
        });
        b.checks.push(if ar.bhat.is_exact() {
            CheckEntry::pass("artin-exact", Some(format!("L·b̂ zero through order {}", ar.bhat.checked.saturating_sub(1))))
        } else {
            CheckEntry::fail("artin-exact", format!("L·b̂ nonzero at order {}", ar.bhat.approximation_order()))
        });
        let detail = if ar.b0.is_empty() {
            "curve has no coefficients past the agreed ones".to_string()
        } else {
            format!("L·b = ε^{l} L·b₀ through order {}", ar.verified_through)
        };
        b.checks.push(CheckEntry::pass("artin-rees-identity", Some(detail)));
    }
    Ok(())
}

fn oracle<F: Scalar>(b: &mut Builder, req: &Request<F>, l: &MatSeries<F>) -> Result<(), Failure> {
    let o = oracle_smith_polynomial(l).map_err(fail)?;
    let factors: Vec<Value> = o
        .invariant_factors
        .iter()
        .map(|f| json!({ "polynomial": f.render("ε"), "coefficients": report::vector(f.coeffs()) }))
        .collect();
    b.put("oracle", json!({ "invariant_factors": factors, "local_exponents": o.local_exponents }));
    if req.check {
        let st = run_until_stabilized(l.clone(), req.k_max).map_err(fail)?;
        b.put("stabilization", report::stabilization(st.stabilization().expect("declared")));
        oracle_check(b, l, &st);
    }
    Ok(())
}

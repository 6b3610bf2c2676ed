//! Acceptance run: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{battery, random_vector_in, samples, Case, M, S};
use locsmith_core::artin::{
    artin_approximate, empirical_greenberg, extendable_jets, flat_basis, greenberg, parametrize_solution, solution_jets,
    truncation_solution, SolutionCurve,
};
use locsmith_core::ginverse::{
    delta_pinv, kernel_range_families, l_pinv_laurent, smith_report, verify_ginverse_axioms, verify_kernel_range, Evaluator,
    SampleOutcome,
};
use locsmith_core::transform::check_defining_structure;
use locsmith_core::{diagonalize, oracle_smith_polynomial, Diagonalization, DiagonalizeOptions, Mat, Rational, Scalar, Subspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Tally {
    passed: usize,
    total: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { passed: 0, total: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn record(&mut self, name: &str, r: Result<(), String>) {
        self.total += 1;
        match r {
            Ok(()) => self.passed += 1,
            Err(e) => self.failures.push(format!("{name}: {e}")),
        }
    }

    fn ok(&self) -> bool {
        self.failures.is_empty() && self.total > 0
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn oracle_agreement(case: &Case, d: &Diagonalization<Rational>) -> Result<(), String> {
    let o = oracle_smith_polynomial(&case.l).map_err(|e| e.to_string())?;
    let st = d.state.stabilization().ok_or("no stabilization")?;
    let ours = sorted(st.exponents());
    let theirs = sorted(o.local_exponents.clone());
    if ours != theirs {
        return Err(format!("recursion {ours:?}, oracle {theirs:?}"));
    }
    let r = o.invariant_factors.len();
    if st.dim_kernel_limit != case.l.cols() - r {
        return Err(format!("dim N_(k+1) = {}, expected {}", st.dim_kernel_limit, case.l.cols() - r));
    }
    Ok(())
}

fn check_named(d: &Diagonalization<Rational>, names: &[&str]) -> Result<(), String> {
    for n in names {
        let e = d.checks.iter().find(|c| c.name == *n).ok_or(format!("check {n} missing"))?;
        if !e.passed {
            return Err(format!("{n}: {}", e.detail.clone().unwrap_or_default()));
        }
    }
    Ok(())
}

fn recursion_battery(d: &Diagonalization<Rational>) -> Result<(), String> {
    let st = &d.state;
    let k = d.diag.k;
    st.check_records().map_err(|e| format!("records: {e}"))?;
    st.check_column_factorization().map_err(|e| format!("column factorization: {e}"))?;
    st.check_projector_sum().map_err(|e| format!("projector sum: {e}"))?;
    st.check_e_recursive().map_err(|e| format!("E recursion: {e}"))?;
    st.check_subblock_factorization(2 * k + 5).map_err(|e| format!("sub-block factorization: {e}"))?;
    st.check_toeplitz_rows().map_err(|e| format!("Töplitz rows: {e}"))?;
    st.check_green_zero().map_err(|e| format!("green zero: {e}"))?;
    Ok(())
}

fn sample_pass(outcomes: &[SampleOutcome], skipped: &mut usize) -> Result<(), String> {
    for o in outcomes {
        match o {
            SampleOutcome::Checked(c) => {
                if let Some(f) = c.iter().find(|e| !e.passed) {
                    return Err(f.name.clone());
                }
            }
            SampleOutcome::Skipped(_) => *skipped += 1,
        }
    }
    Ok(())
}

fn ginverse(d: &Diagonalization<Rational>, skipped: &mut usize) -> Result<(), String> {
    let k = d.diag.k;
    let x = l_pinv_laurent(&d.phi, &delta_pinv(&d.diag), &d.psi, d.order - k).map_err(|e| e.to_string())?;
    if x.pole_order() != k {
        return Err(format!("pole order {} against k = {k}", x.pole_order()));
    }
    if !x.leading().approx_eq(&d.state.record(k + 1).sinv) && !d.state.stabilization().is_some_and(|s| s.degenerate) {
        return Err("leading coefficient is not S_(k+1)⁻¹𝒫_(k+1)".into());
    }
    let ev = Evaluator::new(d).map_err(|e| e.to_string())?;
    let out: Vec<SampleOutcome> = verify_ginverse_axioms(&ev, &samples()).into_iter().map(|c| c.outcome).collect();
    sample_pass(&out, skipped)
}

fn families(d: &Diagonalization<Rational>, skipped: &mut usize) -> Result<(), String> {
    let ev = Evaluator::new(d).map_err(|e| e.to_string())?;
    let out: Vec<SampleOutcome> = verify_kernel_range(&ev, &samples()).into_iter().map(|c| c.outcome).collect();
    sample_pass(&out, skipped)?;
    let (n, _) = kernel_range_families(&d.phi, &d.psi, &d.state).map_err(|e| e.to_string())?;
    let ln = d.state.series().mul(&n).map_err(|e| e.to_string())?;
    match ln.first_nonzero(d.phi.valid_order) {
        None => Ok(()),
        Some(j) => Err(format!("L·N(ε) nonzero at order {j}")),
    }
}

fn chains(d: &Diagonalization<Rational>) -> Result<(), String> {
    for len in 1..=d.diag.k + 3 {
        d.state.check_jordan_chains(len)?;
    }
    Ok(())
}

fn random_approximation(rng: &mut impl Rng, l: &S, order: usize) -> Result<SolutionCurve<Rational>, String> {
    let jets = solution_jets(l, order).map_err(|e| e.to_string())?;
    let v = random_vector_in(rng, &jets);
    let m = l.cols();
    let coeffs = (0..order).map(|t| v[t * m..(t + 1) * m].to_vec()).collect();
    SolutionCurve::new(l, coeffs).map_err(|e| e.to_string())
}

fn artin_suite(d: &Diagonalization<Rational>, rng: &mut impl Rng, notes: &mut Vec<String>, name: &str) -> Result<bool, String> {
    let st = &d.state;
    let k = d.diag.k;
    let nk = &st.record(k + 1).n;
    if nk.is_zero() {
        let fb = flat_basis(st, &d.phi).map_err(|e| e.to_string())?;
        return if fb.generators.is_empty() { Ok(false) } else { Err("flat basis should be empty".into()) };
    }
    let l = st.series();
    for lvl in 1..=3 {
        if greenberg(st, lvl).map_err(|e| e.to_string())? != k + lvl {
            return Err("greenberg value".into());
        }
        for _ in 0..20 {
            let b = random_approximation(rng, l, k + lvl)?;
            if b.approximation_order() < k + lvl {
                return Err("generated approximation too weak".into());
            }
            let bhat = artin_approximate(&b, lvl, st, &d.phi).map_err(|e| e.to_string())?;
            if !bhat.is_exact() || bhat.checked < k + lvl + 4 {
                return Err(format!("approximation exact only through {}", bhat.checked));
            }
            for t in 0..lvl {
                if bhat.coeffs[t] != b.coeffs[t] {
                    return Err(format!("coefficient {t} not reproduced"));
                }
            }
        }
    }
    let emp: Vec<usize> = (1..=3).map(|lvl| empirical_greenberg(st, lvl)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    if emp.iter().enumerate().any(|(i, &g)| g < i + 1 || g > k + i + 1) {
        return Err(format!("empirical Greenberg values {emp:?} outside [l, k+l]"));
    }
    if emp.iter().enumerate().any(|(i, &g)| g < k + i + 1) {
        notes.push(format!("{name}: k+l = {:?}, empirical minimum {emp:?}", (1..=3).map(|x| k + x).collect::<Vec<_>>()));
    }
    let c = 5;
    for _ in 0..20 {
        let n: Vec<Vec<Rational>> = (0..=c).map(|_| random_vector_in(rng, nk)).collect();
        let b = truncation_solution(&n, c, &d.phi, st).map_err(|e| e.to_string())?;
        if !b.is_exact() {
            return Err("built curve is not a solution".into());
        }
        let back = parametrize_solution(&b, &d.phi, st).map_err(|e| e.to_string())?;
        for (t, v) in back.iter().enumerate() {
            let want = if t <= c { n[t].clone() } else { vec![Rational::zero(); st.m()] };
            if *v != want {
                return Err(format!("roundtrip differs at coefficient {t}"));
            }
        }
    }
    // solution jets extending to all orders are exactly the jets of φ·n
    let q = (d.phi.valid_order + 1).min(6);
    let jets = extendable_jets(l, q, k + 2).map_err(|e| e.to_string())?;
    let more = extendable_jets(l, q, k + 4).map_err(|e| e.to_string())?;
    let fb = flat_basis(st, &d.phi).map_err(|e| e.to_string())?;
    let m = st.m();
    let mut cols = Vec::new();
    for g in &fb.generators {
        for shift in 0..q {
            let mut v = vec![Rational::zero(); q * m];
            for t in shift..q {
                v[t * m..(t + 1) * m].clone_from_slice(&g.coeffs[t - shift]);
            }
            cols.push(Mat::column(&v));
        }
    }
    let refs: Vec<&M> = cols.iter().collect();
    let ours = Subspace::span(&Mat::hstack(q * m, &refs));
    if !ours.same_as(&jets) || !jets.same_as(&more) {
        return Err(format!("solution-jet space mismatch at order {q}"));
    }
    Ok(true)
}

fn edge_cases() -> Result<(), String> {
    let opts = DiagonalizeOptions::default();
    let run = |l: &S| diagonalize(l, opts).map_err(|e| e.to_string());
    let report = |d: &Diagonalization<Rational>| smith_report(&d.state, &d.diag, &d.psi).map_err(|e| e.to_string());

    let zero = S::zero(2, 2);
    let d = run(&zero)?;
    let r = report(&d)?;
    if !(r.degenerate && r.exponents.is_empty() && r.kernel_limit_dim == 2) {
        return Err("L ≡ 0 report".into());
    }
    if flat_basis(&d.state, &d.phi).map_err(|e| e.to_string())?.generators.len() != 2 {
        return Err("L ≡ 0 flat basis".into());
    }

    let l0 = M::from_i64(&[&[2, 1], &[1, 1]]);
    let inv = S::polynomial(2, 2, vec![l0.clone(), M::from_i64(&[&[0, 1], &[1, 0]])]).map_err(|e| e.to_string())?;
    let d = run(&inv)?;
    let r = report(&d)?;
    if !(d.diag.k == 0 && r.exponents == vec![0, 0] && r.full_smith && d.diag.delta().coeff(0) == Some(l0.clone())) {
        return Err("invertible L_0 report".into());
    }

    let row = common::poly(1, 3, &[&[&[0, 0, 0]], &[&[1, 0, 0]], &[&[0, 1, 0]]]);
    let d = run(&row)?;
    let r = report(&d)?;
    if !(r.exponents == vec![1] && r.kernel_limit_dim == 2 && !r.full_smith) {
        return Err(format!("1×3 report {:?} / {}", r.exponents, r.kernel_limit_dim));
    }
    let col = common::poly(3, 1, &[&[&[0], &[0], &[0]], &[&[0], &[0], &[0]], &[&[1], &[0], &[1]]]);
    let d = run(&col)?;
    let r = report(&d)?;
    if !(r.exponents == vec![2] && r.kernel_limit_dim == 0 && !r.full_smith) {
        return Err("3×1 report".into());
    }
    let mut skipped = 0;
    ginverse(&d, &mut skipped)?;

    let d = run(&common::f3())?;
    let st = &d.state;
    if !(st.record(2).r.is_zero() && !st.record(3).r.is_zero() && d.diag.k == 2 && report(&d)?.exponents == vec![0, 2]) {
        return Err("interleaved diag(1, ε²)".into());
    }
    for d in [run(&zero)?, run(&inv)?, run(&row)?, run(&col)?, run(&common::f3())?] {
        if let Some(f) = d.checks.iter().find(|c| !c.passed) {
            return Err(format!("edge case check {} failed", f.name));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cases = battery();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tallies: Vec<Tally> = (0..9).map(|_| Tally::new()).collect();
    let mut skipped5 = 0;
    let mut skipped6 = 0;
    let mut artin_cases = 0;
    let mut k_hist = std::collections::BTreeMap::new();

    for case in &cases {
        let d = match diagonalize(&case.l, DiagonalizeOptions::default()) {
            Ok(d) => d,
            Err(e) => {
                for t in tallies.iter_mut().take(8) {
                    t.record(&case.name, Err(format!("pipeline: {e}")));
                }
                continue;
            }
        };
        let k = d.diag.k;
        *k_hist.entry(k).or_insert(0usize) += 1;
        tallies[0].record(&case.name, oracle_agreement(case, &d));
        tallies[1].record(
            &case.name,
            check_named(&d, &["diagonal-identity"]).and_then(|_| {
                if d.order >= 2 * k + 6 { Ok(()) } else { Err(format!("only through order {}", d.order)) }
            }),
        );
        tallies[2].record(
            &case.name,
            check_named(&d, &["dual-path-phi", "defining-equation-residual"]).and_then(|_| check_defining_structure(&d.state, &d.defining)),
        );
        tallies[3].record(&case.name, recursion_battery(&d));
        tallies[4].record(&case.name, ginverse(&d, &mut skipped5));
        tallies[5].record(&case.name, families(&d, &mut skipped6));
        tallies[6].record(&case.name, chains(&d));
        let t8 = &mut tallies[7];
        match artin_suite(&d, &mut rng, &mut t8.notes, &case.name) {
            Ok(ran) => {
                artin_cases += ran as usize;
                t8.record(&case.name, Ok(()));
            }
            Err(e) => t8.record(&case.name, Err(e)),
        }
    }
    tallies[8].record("edge cases", edge_cases());

    let labels = [
        "oracle Smith agreement (exponent multisets, exact)",
        "diagonal identity ψ⁻¹Lφ − Δ = 0 through order 2k+6 (exact)",
        "dual-path φ agreement and defining-equation residual (exact)",
        "recursion identity batteries at every step (exact)",
        "generalized inverse: pole order k, LXL = L and XLX = X at 1/7, -1/5, 2 (exact)",
        "kernel/range families at 1/7, -1/5, 2 (exact)",
        "Jordan chains span ker of block-Töplitz, lengths 1..k+3 (exact)",
        "Artin suite: 20 approximations per l = 1..3, flatness roundtrip, Greenberg k+l",
        "edge cases: L ≡ 0, invertible L_0, 1×n, n×1, diag(1, ε²)",
    ];
    let mut all = true;
    for (i, (t, label)) in tallies.iter().zip(labels).enumerate() {
        let status = if t.ok() { "PASS" } else { "FAIL" };
        all &= t.ok();
        let mut extra = String::new();
        if i == 4 && skipped5 > 0 {
            extra = format!(" ({skipped5} sample evaluations skipped at poles)");
        }
        if i == 5 && skipped6 > 0 {
            extra = format!(" ({skipped6} sample evaluations skipped at poles)");
        }
        if i == 7 {
            extra = format!(" ({artin_cases} inputs with nontrivial limit kernel)");
        }
        println!("[{status}] criterion {}: {label}: {}/{}{extra}", i + 1, t.passed, t.total);
        for f in t.failures.iter().take(5) {
            println!("        {f}");
        }
        for n in &t.notes {
            println!("        note: {n}");
        }
    }
    println!("battery: {} inputs, pole orders {k_hist:?}, {:.1} s", cases.len(), start.elapsed().as_secs_f64());
    if all { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

#![allow(dead_code)]

use locsmith_core::{Mat, MatSeries, Rational, Scalar, Subspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = Mat<Rational>;
pub type S = MatSeries<Rational>;

pub struct Case {
    pub name: String,
    pub l: S,
}

fn case(name: impl Into<String>, l: S) -> Case {
    Case { name: name.into(), l }
}

pub fn poly(rows: usize, cols: usize, coeffs: &[&[&[i64]]]) -> S {
    S::polynomial(rows, cols, coeffs.iter().map(|c| M::from_i64(c)).collect()).unwrap()
}

pub fn f1() -> S {
    poly(1, 1, &[&[&[1]], &[&[1]]])
}

pub fn f2() -> S {
    poly(2, 2, &[&[&[0, -1], &[0, 0]], &[&[1, 0], &[0, 1]]])
}

pub fn f3() -> S {
    poly(2, 2, &[&[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 0]], &[&[0, 0], &[0, 1]]])
}

pub fn f4() -> S {
    poly(1, 2, &[&[&[1, 0]], &[&[0, 1]]])
}

pub fn f5() -> S {
    poly(2, 1, &[&[&[1], &[0]], &[&[0], &[1]]])
}

/// `εI − J` with `J` the nilpotent Jordan block.
pub fn jordan_pencil(n: usize) -> S {
    let mut j = M::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        j.set(i, i + 1, Rational::one());
    }
    S::polynomial(n, n, vec![-&j, M::identity(n)]).unwrap()
}

pub fn diag_powers(exps: &[usize]) -> S {
    let n = exps.len();
    let d = exps.iter().copied().max().unwrap_or(0);
    let coeffs = (0..=d)
        .map(|t| M::from_fn(n, n, |i, j| Rational::from_i64((i == j && exps[i] == t) as i64)))
        .collect();
    S::polynomial(n, n, coeffs).unwrap()
}

pub fn fixtures() -> Vec<Case> {
    let mut out = vec![case("F1", f1()), case("F2", f2()), case("F3", f3()), case("F4", f4()), case("F5", f5())];
    for n in 2..=6 {
        out.push(case(format!("jordan-{n}"), jordan_pencil(n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..4 {
        let n = rng.gen_range(2..=4);
        let exps: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        out.push(case(format!("diag-powers-{i}-{exps:?}"), diag_powers(&exps)));
    }
    out
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    match rng.gen_range(0..10) {
        0..=2 => Rational::zero(),
        3 => Rational::new(1, 2),
        4 => Rational::new(-1, 3),
        _ => Rational::from_i64(rng.gen_range(-2..=2)),
    }
}

pub fn random_mat(rng: &mut impl Rng, rows: usize, cols: usize) -> M {
    M::from_fn(rows, cols, |_, _| small_rational(rng))
}

fn random_invertible(rng: &mut impl Rng, n: usize) -> M {
    loop {
        let a = random_mat(rng, n, n);
        if a.rank() == n {
            return a;
        }
    }
}

fn random_family(rng: &mut impl Rng, rows: usize, cols: usize, deg: usize) -> S {
    S::polynomial(rows, cols, (0..=deg).map(|_| random_mat(rng, rows, cols)).collect()).unwrap()
}

/// `A (I + εC) D(ε) B` with `D` carrying powers of `ε` (some zero columns).
fn structured(rng: &mut impl Rng, rows: usize, cols: usize) -> S {
    let a = random_invertible(rng, rows);
    let b = random_invertible(rng, cols);
    let c = random_mat(rng, rows, rows);
    let r = rows.min(cols);
    let exps: Vec<Option<usize>> = (0..r).map(|_| if rng.gen_bool(0.2) { None } else { Some(rng.gen_range(0..=2)) }).collect();
    let d = S::polynomial(
        rows,
        cols,
        (0..=2)
            .map(|t| M::from_fn(rows, cols, |i, j| Rational::from_i64((i == j && i < r && exps[i] == Some(t)) as i64)))
            .collect(),
    )
    .unwrap();
    let left = S::polynomial(rows, rows, vec![a.clone(), &a * &c]).unwrap();
    left.mul(&d).unwrap().right_mul(&b).into_polynomial()
}

/// Rank-deficient `L_0` with random higher coefficients.
fn deficient(rng: &mut impl Rng, rows: usize, cols: usize, deg: usize) -> S {
    let inner = rng.gen_range(0..rows.min(cols));
    let l0 = &random_mat(rng, rows, inner) * &random_mat(rng, inner, cols);
    let mut coeffs = vec![l0];
    for _ in 1..=deg.max(1) {
        coeffs.push(random_mat(rng, rows, cols));
    }
    S::polynomial(rows, cols, coeffs).unwrap()
}

pub fn random_battery(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let deg = rng.gen_range(0..=3);
            let (tag, l) = match i % 4 {
                0 => ("random", random_family(&mut rng, rows, cols, deg)),
                1 => ("deficient", deficient(&mut rng, rows, cols, deg)),
                _ => ("structured", structured(&mut rng, rows, cols)),
            };
            case(format!("{tag}-{i}-{rows}x{cols}"), l)
        })
        .collect()
}

pub fn battery() -> Vec<Case> {
    let mut out = random_battery(100, 2024);
    out.extend(fixtures());
    out
}

pub fn random_vector_in(rng: &mut impl Rng, sp: &Subspace<Rational>) -> Vec<Rational> {
    let c: Vec<Rational> = (0..sp.dim()).map(|_| small_rational(rng)).collect();
    sp.basis().mat_vec(&c)
}

pub fn samples() -> Vec<Rational> {
    vec![Rational::new(1, 7), Rational::new(-1, 5), Rational::from_i64(2)]
}

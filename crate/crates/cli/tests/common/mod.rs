//! Independent reference computations for the acceptance and property tests.
#![allow(dead_code)]

use genbvp::boundary::GeneralBoundaryOperator;
use genbvp::bvp::BvpProblem;
use genbvp::funcspace::{Grid, PiecewisePoly, Poly, PolyMatrix, PolyVector};
use genbvp::stieltjes::{Atom, MatrixMeasure, ScalarMeasure};
use genbvp::{CMatrix, CVector, C64};
use rand::Rng;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn mat_norm1(m: &CMatrix) -> f64 {
    m.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(M)` by scaling and squaring with a degree-24 Taylor polynomial.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = mat_norm1(m);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / c(2f64.powi(s));
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for j in 1..=24 {
        term = &term * &scaled / c(j as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Second-order box scheme for `v' + P(t) v = g(t)` on a uniform grid with the linear
/// boundary functional `bc(v_0, ..., v_n) = q`, solved by condensation
/// `v_i = M_i v_0 + w_i`.
pub fn box_scheme(
    a: f64,
    b: f64,
    n: usize,
    dim: usize,
    p: impl Fn(f64) -> CMatrix,
    g: impl Fn(f64) -> CVector,
    bc: impl Fn(&[CVector]) -> CVector,
    q: &CVector,
) -> Vec<CVector> {
    let h = (b - a) / n as f64;
    let eye = CMatrix::identity(dim, dim);
    let mut ms = vec![eye.clone()];
    let mut ws = vec![CVector::zeros(dim)];
    for i in 0..n {
        let tm = a + (i as f64 + 0.5) * h;
        let pm = p(tm) * c(0.5 * h);
        let lhs_inv = (&eye + &pm).try_inverse().expect("step matrix invertible");
        let step = &lhs_inv * (&eye - &pm);
        let src = &lhs_inv * g(tm) * c(h);
        let next_m = &step * &ms[i];
        let next_w = &step * &ws[i] + src;
        ms.push(next_m);
        ws.push(next_w);
    }
    let mut k = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col: Vec<CVector> = ms.iter().map(|m| m.column(j).into_owned()).collect();
        k.set_column(j, &bc(&col));
    }
    let rhs = q - bc(&ws);
    let c0 = k.lu().solve(&rhs).expect("boundary matrix invertible");
    ms.iter().zip(&ws).map(|(m, w)| m * &c0 + w).collect()
}

/// Composite trapezoid rule over uniformly spaced samples.
pub fn trapezoid(h: f64, xs: &[C64]) -> C64 {
    let n = xs.len() - 1;
    let inner: C64 = xs[1..n].iter().sum();
    (inner + (xs[0] + xs[n]) * 0.5) * h
}

fn rand_c(rng: &mut impl Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_pp(rng: &mut impl Rng, a: f64, b: f64, scale: f64) -> PiecewisePoly {
    let pieces = rng.gen_range(1..=3);
    let mut breaks: Vec<f64> = (1..pieces).map(|_| rng.gen_range(a + 0.05..b - 0.05)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() < 0.05);
    breaks.insert(0, a);
    breaks.push(b);
    let polys = (0..breaks.len() - 1)
        .map(|_| {
            let deg = rng.gen_range(0..=2);
            Poly::new((0..=deg).map(|_| rand_c(rng, scale)).collect())
        })
        .collect();
    PiecewisePoly::new(breaks, polys).unwrap()
}

fn random_measure(rng: &mut impl Rng, a: f64, b: f64) -> ScalarMeasure {
    let atoms = (0..rng.gen_range(0..=2))
        .map(|_| Atom::new(rng.gen_range(a..=b), rand_c(rng, 1.0)))
        .collect();
    let density = if rng.gen_bool(0.5) {
        random_pp(rng, a, b, 1.0)
    } else {
        PiecewisePoly::zero(a, b)
    };
    ScalarMeasure::new(a, b, atoms, density).unwrap()
}

/// Random problem with `r ≤ 3`, `m ≤ 3` and piecewise-polynomial data on `[0, 1]`.
/// The boundary operator always contains the initial conditions `y^(l)(0)` with a
/// random perturbation, which keeps most draws uniquely solvable.
pub fn random_problem(rng: &mut impl Rng, n: usize) -> BvpProblem {
    let (a, b) = (0.0, 1.0);
    let r = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let d = r * m;
    let coefficients = (0..r)
        .map(|_| PolyMatrix::new(m, m, (0..m * m).map(|_| random_pp(rng, a, b, 1.0)).collect()).unwrap())
        .collect();
    let mut alphas: Vec<CMatrix> = (0..r - 1)
        .map(|_| CMatrix::from_fn(d, m, |_, _| rand_c(rng, 0.3)))
        .collect();
    for (l, al) in alphas.iter_mut().enumerate() {
        for i in 0..m {
            al[(l * m + i, i)] += c(1.0);
        }
    }
    let mut entries = Vec::with_capacity(d * m);
    for i in 0..d {
        for j in 0..m {
            let mut mu = random_measure(rng, a, b).scale(c(0.3));
            if i == (r - 1) * m + j {
                mu = ScalarMeasure::new(
                    a,
                    b,
                    mu.atoms().iter().copied().chain([Atom::new(a, c(1.0))]).collect(),
                    mu.density().clone(),
                )
                .unwrap();
            }
            entries.push(mu);
        }
    }
    let phi = MatrixMeasure::new(d, m, entries).unwrap();
    let bop = GeneralBoundaryOperator::new(r, m, alphas, phi).unwrap();
    let rhs = PolyVector::new((0..m).map(|_| random_pp(rng, a, b, 2.0)).collect()).unwrap();
    let q = CVector::from_fn(d, |_, _| rand_c(rng, 2.0));
    BvpProblem::new(Grid::new(a, b, n).unwrap(), coefficients, rhs, q, bop.into()).unwrap()
}

/// Random right-hand side of the right shape for `p`.
pub fn random_rhs(rng: &mut impl Rng, p: &BvpProblem) -> (PolyVector, CVector) {
    let (a, b) = p.interval();
    let f = PolyVector::new((0..p.m()).map(|_| random_pp(rng, a, b, 2.0)).collect()).unwrap();
    let q = CVector::from_fn(p.r() * p.m(), |_, _| rand_c(rng, 2.0));
    (f, q)
}

//! Built-in problems with manufactured closed-form solutions.
//!
//! * `P1`: `y' + y = 1 + t`, `∫_0^1 y = 3/2 - e⁻¹`; `y = e^{-t} + t`.
//! * `P2`: `y'' + (1 + t) y = f`, `y(0) = 0`, `y'(1) + ∫_0^1 y = 7/4`; `y = t³ - t`.
//! * `P3`: `y' + A y = f` with `A = [[1, 1], [-2, 0]]`,
//!   `y_1(0) + y_2(1) = 0`, `∫_0^1 y_1 + y_2(0) = 4/3`; `y = (t², 1 - t)`.

use crate::boundary::GeneralBoundaryOperator;
use crate::bvp::{residuals, BvpProblem};
use crate::error::{Error, Result};
use crate::funcspace::{Grid, PiecewisePoly, Poly, PolyMatrix, PolyVector, SampledJet};
use crate::stieltjes::{Atom, MatrixMeasure, ScalarMeasure};
use crate::{CMatrix, CVector, C64};

/// Residual tolerance the exact solution must meet when an entry is loaded.
pub const LOAD_TOL: f64 = 1e-8;

pub const NAMES: [&str; 3] = ["P1", "P2", "P3"];

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub problem: BvpProblem,
    /// `exact(t, j) = y^(j)(t)` for `j = 0..=r`.
    pub exact: fn(f64, usize) -> CVector,
}

impl CorpusEntry {
    /// Exact solution sampled on the problem grid, orders `0..=r`.
    pub fn exact_jet(&self) -> SampledJet {
        let p = &self.problem;
        SampledJet::from_fn(p.grid(), p.m(), p.r(), self.exact)
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn poly(a: f64, b: f64, coeffs: &[f64]) -> PiecewisePoly {
    PiecewisePoly::from_poly(a, b, Poly::from_real(coeffs))
}

fn scalar_vec(vals: &[f64]) -> CVector {
    CVector::from_iterator(vals.len(), vals.iter().map(|&x| c(x)))
}

fn p1(grid: Grid) -> Result<CorpusEntry> {
    let (a, b) = (grid.a(), grid.b());
    let bop = GeneralBoundaryOperator::new(1, 1, vec![], MatrixMeasure::new(1, 1, vec![ScalarMeasure::lebesgue(a, b)])?)?;
    let problem = BvpProblem::new(
        grid,
        vec![PolyMatrix::new(1, 1, vec![poly(a, b, &[1.0])])?],
        PolyVector::new(vec![poly(a, b, &[1.0, 1.0])])?,
        scalar_vec(&[1.5 - (-1.0f64).exp()]),
        bop.into(),
    )?;
    Ok(CorpusEntry {
        name: "P1",
        description: "r = 1, m = 1: y' + y = 1 + t with an integral condition",
        problem,
        exact: |t, j| {
            let e = (-t).exp();
            scalar_vec(&[match j {
                0 => e + t,
                1 => 1.0 - e,
                _ => unreachable!(),
            }])
        },
    })
}

fn p2(grid: Grid) -> Result<CorpusEntry> {
    let (a, b) = (grid.a(), grid.b());
    let alpha = CMatrix::from_element(2, 1, c(1.0));
    let mut phi = MatrixMeasure::zeros(a, b, 2, 1);
    // ∫ y = y(0) + ∫ (1 - s) y'(s) ds
    phi.set(1, 0, ScalarMeasure::new(a, b, vec![Atom::new(1.0, c(1.0))], poly(a, b, &[1.0, -1.0]))?);
    let bop = GeneralBoundaryOperator::new(2, 1, vec![alpha], phi)?;
    let problem = BvpProblem::new(
        grid,
        vec![
            PolyMatrix::new(1, 1, vec![poly(a, b, &[1.0, 1.0])])?,
            PolyMatrix::zeros(a, b, 1, 1),
        ],
        PolyVector::new(vec![poly(a, b, &[0.0, 5.0, -1.0, 1.0, 1.0])])?,
        scalar_vec(&[0.0, 1.75]),
        bop.into(),
    )?;
    Ok(CorpusEntry {
        name: "P2",
        description: "r = 2, m = 1: y'' + (1 + t) y = f with point and integral conditions",
        problem,
        exact: |t, j| {
            scalar_vec(&[match j {
                0 => t * t * t - t,
                1 => 3.0 * t * t - 1.0,
                2 => 6.0 * t,
                _ => unreachable!(),
            }])
        },
    })
}

fn p3(grid: Grid) -> Result<CorpusEntry> {
    let (a, b) = (grid.a(), grid.b());
    let at = |t: f64| ScalarMeasure::dirac(a, b, t, c(1.0));
    let phi = MatrixMeasure::new(2, 2, vec![at(0.0)?, at(1.0)?, ScalarMeasure::lebesgue(a, b), at(0.0)?])?;
    let bop = GeneralBoundaryOperator::new(1, 2, vec![], phi)?;
    let coef = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(-2.0), c(0.0)]);
    let problem = BvpProblem::new(
        grid,
        vec![PolyMatrix::constant(a, b, &coef)],
        PolyVector::new(vec![poly(a, b, &[1.0, 1.0, 1.0]), poly(a, b, &[-1.0, 0.0, -2.0])])?,
        scalar_vec(&[0.0, 4.0 / 3.0]),
        bop.into(),
    )?;
    Ok(CorpusEntry {
        name: "P3",
        description: "r = 1, m = 2: constant coupled system with two-point and integral conditions",
        problem,
        exact: |t, j| match j {
            0 => scalar_vec(&[t * t, 1.0 - t]),
            1 => scalar_vec(&[2.0 * t, -1.0]),
            _ => unreachable!(),
        },
    })
}

/// Builds a corpus entry on `[0, 1]` with `n` grid cells, without verification.
pub fn build(name: &str, n: usize) -> Result<CorpusEntry> {
    let grid = Grid::new(0.0, 1.0, n)?;
    match name.to_ascii_uppercase().as_str() {
        "P1" => p1(grid),
        "P2" => p2(grid),
        "P3" => p3(grid),
        _ => Err(Error::InvalidArgument(format!(
            "unknown corpus problem `{name}` (available: {})",
            NAMES.join(", ")
        ))),
    }
}

/// Builds an entry and checks that its exact solution satisfies the problem.
pub fn load(name: &str, n: usize) -> Result<CorpusEntry> {
    let entry = build(name, n)?;
    let (ode, bc) = residuals(&entry.problem, &entry.exact_jet())?;
    if !(ode <= LOAD_TOL && bc <= LOAD_TOL) {
        return Err(Error::Precondition(format!(
            "corpus problem {}: exact solution residuals ({ode:e}, {bc:e}) exceed {LOAD_TOL:e}",
            entry.name
        )));
    }
    Ok(entry)
}

pub fn all(n: usize) -> Result<Vec<CorpusEntry>> {
    NAMES.iter().map(|name| load(name, n)).collect()
}

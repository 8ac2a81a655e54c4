//! Fundamental matrices of `x' + A(t) x = 0` and the particular solution of the
//! inhomogeneous system by variation of constants.
//!
//! All integrators take fixed RK4 steps on the grid. Coefficients are evaluated
//! with one-sided limits at the step ends, so breakpoints lying on grid nodes do not
//! degrade the order.

use crate::error::{Error, Result};
use crate::funcspace::{matrix_norm_c, Grid, PolyMatrix, PolyVector, SampledFn, SampledJet, Side};
use crate::{CMatrix, CVector, C64};

/// Matrix samples `M(t_i)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTrajectory {
    grid: Grid,
    dim: usize,
    values: Vec<CMatrix>,
}

impl MatrixTrajectory {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn at(&self, i: usize) -> &CMatrix {
        &self.values[i]
    }

    /// Column `j` as a sampled vector function.
    pub fn column(&self, j: usize) -> Result<SampledFn> {
        SampledFn::new(
            self.grid,
            self.values.iter().map(|m| m.column(j).into_owned()).collect(),
        )
    }

    /// `‖M‖_C` with the max-column convention.
    pub fn norm_c(&self) -> f64 {
        matrix_norm_c(&self.values)
    }
}

fn check(a: &PolyMatrix, grid: &Grid) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::dims("coefficient matrix (square)", a.rows(), a.cols()));
    }
    let (da, db) = a.domain();
    if da != grid.a() || db != grid.b() {
        return Err(Error::InvalidArgument(format!(
            "coefficients live on [{da}, {db}], grid on [{}, {}]",
            grid.a(),
            grid.b()
        )));
    }
    Ok(())
}

fn eval_checked(a: &PolyMatrix, t: f64, side: Side) -> Result<CMatrix> {
    let m = a.eval(t, side);
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite(format!("coefficient matrix at t = {t}")));
    }
    Ok(m)
}

/// Stage values `A(t_i+)`, `A(t_i + h/2)`, `A(t_{i+1}-)` for each step.
fn stage_coefficients(a: &PolyMatrix, grid: &Grid) -> Result<Vec<[CMatrix; 3]>> {
    let h = grid.h();
    (0..grid.n())
        .map(|i| {
            let t0 = grid.node(i);
            Ok([
                eval_checked(a, t0, Side::Right)?,
                eval_checked(a, t0 + 0.5 * h, Side::Right)?,
                eval_checked(a, grid.node(i + 1), Side::Left)?,
            ])
        })
        .collect()
}

fn rk4(grid: &Grid, dim: usize, stages: &[[CMatrix; 3]], rhs: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Vec<CMatrix> {
    let h = C64::new(grid.h(), 0.0);
    let half = h * 0.5;
    let mut cur = CMatrix::identity(dim, dim);
    let mut values = Vec::with_capacity(grid.len());
    values.push(cur.clone());
    for [a0, am, a1] in stages {
        let k1 = rhs(a0, &cur);
        let k2 = rhs(am, &(&cur + &k1 * half));
        let k3 = rhs(am, &(&cur + &k2 * half));
        let k4 = rhs(a1, &(&cur + &k3 * h));
        cur += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (h / 6.0);
        values.push(cur.clone());
    }
    values
}

/// Matrizant: `Y' = -A(t) Y`, `Y(a) = I`.
pub fn fundamental_matrix(a: &PolyMatrix, grid: &Grid) -> Result<MatrixTrajectory> {
    check(a, grid)?;
    let stages = stage_coefficients(a, grid)?;
    let values = rk4(grid, a.rows(), &stages, |am, y| -(am * y));
    Ok(MatrixTrajectory {
        grid: *grid,
        dim: a.rows(),
        values,
    })
}

/// `Z' = Z A(t)`, `Z(a) = I`; analytically `Z = Y⁻¹`.
pub fn inverse_fundamental(a: &PolyMatrix, grid: &Grid) -> Result<MatrixTrajectory> {
    check(a, grid)?;
    let stages = stage_coefficients(a, grid)?;
    let values = rk4(grid, a.rows(), &stages, |am, z| z * am);
    Ok(MatrixTrajectory {
        grid: *grid,
        dim: a.rows(),
        values,
    })
}

/// `R(t) = Y(t) ∫_a^t Y⁻¹(τ) f(τ) dτ`, the solution of `R' + A R = f`, `R(a) = 0`.
///
/// The integral is accumulated with the endpoint-corrected trapezoid rule
/// `h/2 (g_i + g_{i+1}) - h²/12 (g'_{i+1} - g'_i)` where `g = Z f` and
/// `g' = Z (A f + f')`, which is fourth order like the RK4 trajectories.
/// The returned jet has order 1: channel 1 is `R' = f - A R`.
pub fn variation_of_constants(
    y: &MatrixTrajectory,
    z: &MatrixTrajectory,
    a: &PolyMatrix,
    f: &PolyVector,
) -> Result<SampledJet> {
    let d = y.dim;
    if z.dim != d || a.rows() != d || f.dim() != d {
        let found = if z.dim != d {
            z.dim
        } else if a.rows() != d {
            a.rows()
        } else {
            f.dim()
        };
        return Err(Error::dims("variation of constants", d, found));
    }
    if y.grid != z.grid {
        return Err(Error::InvalidArgument("trajectories on different grids".into()));
    }
    let grid = y.grid;
    let h = grid.h();
    let df = f.derivative();

    // one-sided integrand value and derivative at node i
    let g_and_dg = |i: usize, side: Side| -> (CVector, CVector) {
        let t = grid.node(i);
        let fv = f.eval(t, side);
        let dfv = df.eval(t, side);
        let av = a.eval(t, side);
        let g = &z.values[i] * &fv;
        let dg = &z.values[i] * (av * &fv + dfv);
        (g, dg)
    };

    let mut acc = CVector::zeros(d);
    let mut r = Vec::with_capacity(grid.len());
    r.push(CVector::zeros(d));
    for i in 0..grid.n() {
        let (g0, dg0) = g_and_dg(i, Side::Right);
        let (g1, dg1) = g_and_dg(i + 1, Side::Left);
        acc += (g0 + g1) * C64::new(0.5 * h, 0.0) - (dg1 - dg0) * C64::new(h * h / 12.0, 0.0);
        r.push(&y.values[i + 1] * &acc);
    }
    let r = SampledFn::new(grid, r)?;
    let dr = r.map(d, |i, ri| {
        let t = grid.node(i);
        f.eval(t, Side::Right) - a.eval(t, Side::Right) * ri
    });
    SampledJet::new(vec![r, dr])
}

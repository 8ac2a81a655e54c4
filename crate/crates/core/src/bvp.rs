//! Problem container, companion reduction and the matrizant-based solver.
//!
//! The order-`r` system is rewritten for `v = col(y, y', ..., y^(r-1))` as
//! `v' + P v = g` with `T v = q`, and solved as `v = V c + R` where `V` is the
//! matrizant of `P`, `R` the variation-of-constants particular solution and
//! `c = [T V]⁻¹ (q - T R)`.

use crate::boundary::{lift, BoundaryOperator, LiftedOperator};
use crate::error::{Error, Result};
use crate::funcspace::{
    matrix_norm, norm_l1, vector_norm, Grid, PiecewisePoly, PolyMatrix, PolyVector, SampledFn, SampledJet, Side,
};
use crate::linode::{fundamental_matrix, inverse_fundamental, variation_of_constants};
use crate::{CMatrix, CVector, C64};

/// Relative determinant threshold: `|det| < DET_TOL · ‖[TV]‖^{rm}` is singular.
pub const DET_TOL: f64 = 1e-12;
/// Condition estimates above this are singular.
pub const COND_MAX: f64 = 1e12;

/// `y^(r) + Σ_{l<r} A_l y^(l) = f` on `[a, b]` with `B y = q`.
#[derive(Debug, Clone, PartialEq)]
pub struct BvpProblem {
    r: usize,
    m: usize,
    grid: Grid,
    coefficients: Vec<PolyMatrix>,
    rhs: PolyVector,
    q: CVector,
    boundary: BoundaryOperator,
}

fn snap_entry(p: &PiecewisePoly, grid: &Grid, what: &str) -> PiecewisePoly {
    let (snapped, shift) = p.snapped(grid);
    if shift > 0.0 {
        log::warn!("{what}: breakpoint moved by {shift:e} onto the grid (h = {:e})", grid.h());
    }
    snapped
}

impl BvpProblem {
    /// `coefficients[l]` is `A_l` (`l = 0..r`). Breakpoints of the coefficients and of
    /// `rhs` are moved to the nearest grid node.
    pub fn new(
        grid: Grid,
        coefficients: Vec<PolyMatrix>,
        rhs: PolyVector,
        q: CVector,
        boundary: BoundaryOperator,
    ) -> Result<Self> {
        let r = coefficients.len();
        if r == 0 {
            return Err(Error::InvalidArgument("order must be at least 1".into()));
        }
        let m = rhs.dim();
        let interval = (grid.a(), grid.b());
        for (l, a) in coefficients.iter().enumerate() {
            if a.rows() != m || a.cols() != m {
                return Err(Error::dims(format!("coefficient A_{l}"), m, if a.rows() != m { a.rows() } else { a.cols() }));
            }
            if a.domain() != interval {
                return Err(Error::InvalidArgument(format!("coefficient A_{l} is not defined on the grid interval")));
            }
        }
        if rhs.domain() != interval {
            return Err(Error::InvalidArgument("right-hand side is not defined on the grid interval".into()));
        }
        if q.len() != r * m {
            return Err(Error::dims("q", r * m, q.len()));
        }
        if q.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("q".into()));
        }
        if boundary.r() != r {
            return Err(Error::dims("boundary operator order", r, boundary.r()));
        }
        if boundary.m() != m {
            return Err(Error::dims("boundary operator dimension", m, boundary.m()));
        }
        if boundary.interval() != interval {
            return Err(Error::InvalidArgument("boundary operator is not defined on the grid interval".into()));
        }
        let coefficients = coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| a.map(|p| snap_entry(p, &grid, &format!("coefficient A_{l}"))))
            .collect();
        let rhs = rhs.map(|p| snap_entry(p, &grid, "right-hand side"));
        Ok(Self {
            r,
            m,
            grid,
            coefficients,
            rhs,
            q,
            boundary,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.grid.a(), self.grid.b())
    }

    pub fn coefficients(&self) -> &[PolyMatrix] {
        &self.coefficients
    }

    pub fn rhs(&self) -> &PolyVector {
        &self.rhs
    }

    pub fn q(&self) -> &CVector {
        &self.q
    }

    pub fn boundary(&self) -> &BoundaryOperator {
        &self.boundary
    }

    /// Same operator `(L, B)` with a new right-hand side.
    pub fn with_rhs(&self, rhs: PolyVector, q: CVector) -> Result<Self> {
        Self::new(self.grid, self.coefficients.clone(), rhs, q, self.boundary.clone())
    }

    /// Same data sampled on a different grid.
    pub fn with_grid(&self, grid: Grid) -> Result<Self> {
        Self::new(grid, self.coefficients.clone(), self.rhs.clone(), self.q.clone(), self.boundary.clone())
    }
}

/// `v' + P v = g`, `T v = q` on `v = col(y, ..., y^(r-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderProblem {
    pub p: PolyMatrix,
    pub g: PolyVector,
    pub t: LiftedOperator,
    pub q: CVector,
}

pub fn companion_reduce(p: &BvpProblem) -> FirstOrderProblem {
    let (r, m) = (p.r, p.m);
    let (a, b) = p.interval();
    let mut big = PolyMatrix::zeros(a, b, r * m, r * m);
    let minus_one = PiecewisePoly::constant(a, b, C64::new(-1.0, 0.0));
    for blk in 0..r - 1 {
        for i in 0..m {
            big.set(blk * m + i, (blk + 1) * m + i, minus_one.clone());
        }
    }
    for (l, al) in p.coefficients.iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                big.set((r - 1) * m + i, l * m + j, al.get(i, j).clone());
            }
        }
    }
    let mut g = vec![PiecewisePoly::zero(a, b); (r - 1) * m];
    g.extend(p.rhs.entries().iter().cloned());
    FirstOrderProblem {
        p: big,
        g: PolyVector::new(g).expect("entries share the problem interval"),
        t: lift(&p.boundary),
        q: p.q.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvpSolution {
    /// Channels `y, y', ..., y^(r)`.
    pub y: SampledJet,
    /// `[T V]`.
    pub char_matrix: CMatrix,
    pub det: C64,
    /// `‖[TV]‖·‖[TV]⁻¹‖` in the max-column norm.
    pub condition: f64,
    pub boundary_residual: f64,
    pub ode_residual: f64,
    /// `‖V‖_C`.
    pub fundamental_norm: f64,
    /// `‖V⁻¹‖_C`.
    pub inverse_fundamental_norm: f64,
    /// `‖[TV]⁻¹‖`.
    pub char_inverse_norm: f64,
}

impl BvpSolution {
    /// `‖V‖_C · ‖[TV]⁻¹‖`.
    pub fn stability(&self) -> f64 {
        self.fundamental_norm * self.char_inverse_norm
    }
}

pub fn solve(p: &BvpProblem) -> Result<BvpSolution> {
    let (r, m) = (p.r, p.m);
    let d = r * m;
    let grid = p.grid;
    let fp = companion_reduce(p);
    let v = fundamental_matrix(&fp.p, &grid)?;
    let z = inverse_fundamental(&fp.p, &grid)?;
    let tv = fp.t.characteristic_matrix(&v)?;

    let lu = tv.clone().lu();
    let det = lu.determinant();
    let tv_norm = matrix_norm(&tv);
    let inv = lu.try_inverse();
    let inv_norm = inv.as_ref().map_or(f64::INFINITY, matrix_norm);
    let condition = tv_norm * inv_norm;
    let singular = !(det.norm() >= DET_TOL * tv_norm.powi(d as i32)) || !(condition <= COND_MAX);
    let inv = match inv {
        Some(inv) if !singular => inv,
        _ => {
            return Err(Error::NotUniquelySolvable {
                det: det.norm(),
                condition,
            })
        }
    };

    let part = variation_of_constants(&v, &z, &fp.p, &fp.g)?;
    let rr = part.channel(0)?;
    let dr = part.channel(1)?;
    let coef = &inv * (&fp.q - fp.t.apply(rr)?);
    let u = SampledFn::new(
        grid,
        (0..grid.len()).map(|i| v.at(i) * &coef + rr.value(i)).collect(),
    )?;
    // u' = R' - P V c
    let du = SampledFn::new(
        grid,
        (0..grid.len())
            .map(|i| dr.value(i) - fp.p.eval(grid.node(i), Side::Right) * (v.at(i) * &coef))
            .collect(),
    )?;

    let mut channels: Vec<SampledFn> = (0..r).map(|j| u.block(j * m, m)).collect();
    channels.push(du.block((r - 1) * m, m));
    let y = SampledJet::new(channels)?;
    let (ode_residual, boundary_residual) = residuals(p, &y)?;

    Ok(BvpSolution {
        y,
        char_matrix: tv,
        det,
        condition,
        boundary_residual,
        ode_residual,
        fundamental_norm: v.norm_c(),
        inverse_fundamental_norm: z.norm_c(),
        char_inverse_norm: inv_norm,
    })
}

/// `(‖L y - f‖_1, ‖B y - q‖)` for a jet holding orders `0..=r`.
pub fn residuals(p: &BvpProblem, y: &SampledJet) -> Result<(f64, f64)> {
    if y.m() != p.m {
        return Err(Error::dims("jet components", p.m, y.m()));
    }
    if y.order() < p.r {
        return Err(Error::OrderOutOfRange {
            requested: p.r,
            available: y.order(),
        });
    }
    if *y.grid() != p.grid {
        return Err(Error::InvalidArgument("jet and problem use different grids".into()));
    }
    let top = y.channel(p.r)?;
    let defect = top.map(p.m, |i, yr| {
        let t = p.grid.node(i);
        let mut acc = yr - p.rhs.eval(t, Side::Right);
        for (l, al) in p.coefficients.iter().enumerate() {
            acc += al.eval(t, Side::Right) * y.channels()[l].value(i);
        }
        acc
    });
    let bres = vector_norm(&(p.boundary.apply(y)? - &p.q));
    Ok((norm_l1(&defect), bres))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::GeneralBoundaryOperator;
    use crate::funcspace::Poly;
    use crate::stieltjes::{MatrixMeasure, ScalarMeasure};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn grid() -> Grid {
        Grid::new(0.0, 1.0, 2048).unwrap()
    }

    fn scalar_coef(p: Poly) -> PolyMatrix {
        PolyMatrix::new(1, 1, vec![PiecewisePoly::from_poly(0.0, 1.0, p)]).unwrap()
    }

    fn scalar_rhs(p: Poly) -> PolyVector {
        PolyVector::new(vec![PiecewisePoly::from_poly(0.0, 1.0, p)]).unwrap()
    }

    fn first_order(mu: ScalarMeasure, f: Poly, q: f64) -> BvpProblem {
        let b = GeneralBoundaryOperator::new(1, 1, vec![], MatrixMeasure::new(1, 1, vec![mu]).unwrap()).unwrap();
        BvpProblem::new(grid(), vec![scalar_coef(Poly::zero())], scalar_rhs(f), CVector::from_element(1, c(q)), b.into())
            .unwrap()
    }

    /// `y'' = f` with rows `(y^(p0)(0), y^(p1)(1))`; only orders 0/1 supported.
    fn second_order(orders: [usize; 2], f: Poly, q: [f64; 2]) -> BvpProblem {
        let mut alpha = CMatrix::zeros(2, 1);
        let mut phi = MatrixMeasure::zeros(0.0, 1.0, 2, 1);
        if orders[0] == 0 {
            alpha[(0, 0)] = c(1.0);
        } else {
            phi.set(0, 0, ScalarMeasure::dirac(0.0, 1.0, 0.0, c(1.0)).unwrap());
        }
        if orders[1] == 0 {
            // y(1) = y(0) + ∫ y'
            alpha[(1, 0)] = c(1.0);
            phi.set(1, 0, ScalarMeasure::lebesgue(0.0, 1.0));
        } else {
            phi.set(1, 0, ScalarMeasure::dirac(0.0, 1.0, 1.0, c(1.0)).unwrap());
        }
        let b = GeneralBoundaryOperator::new(2, 1, vec![alpha], phi).unwrap();
        BvpProblem::new(
            grid(),
            vec![scalar_coef(Poly::zero()), scalar_coef(Poly::zero())],
            scalar_rhs(f),
            CVector::from_vec(vec![c(q[0]), c(q[1])]),
            b.into(),
        )
        .unwrap()
    }

    fn max_err(ch: &SampledFn, exact: impl Fn(f64) -> f64) -> f64 {
        let g = ch.grid();
        (0..g.len())
            .map(|i| (ch.value(i)[0] - c(exact(g.node(i)))).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn companion_examples() {
        let (a, b) = (0.0, 1.0);
        let konst = |x: f64| PolyMatrix::constant(a, b, &CMatrix::from_element(1, 1, c(x)));
        let bop = GeneralBoundaryOperator::new(
            2,
            1,
            vec![CMatrix::from_element(2, 1, c(1.0))],
            MatrixMeasure::zeros(a, b, 2, 1),
        )
        .unwrap();
        let p = BvpProblem::new(grid(), vec![konst(2.0), konst(3.0)], scalar_rhs(Poly::zero()), CVector::zeros(2), bop.into())
            .unwrap();
        let fp = companion_reduce(&p);
        let expect = CMatrix::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(2.0), c(3.0)]);
        assert_eq!(fp.p.eval(0.3, Side::Right), expect);

        let p1 = first_order(ScalarMeasure::dirac(0.0, 1.0, 0.0, c(1.0)).unwrap(), Poly::from_real(&[1.0]), 0.0);
        let fp = companion_reduce(&p1);
        assert_eq!(&fp.p, &p1.coefficients()[0]);
        assert_eq!(&fp.g, p1.rhs());

        let bop = GeneralBoundaryOperator::new(
            3,
            1,
            vec![CMatrix::zeros(3, 1), CMatrix::zeros(3, 1)],
            MatrixMeasure::zeros(a, b, 3, 1),
        )
        .unwrap();
        let p3 = BvpProblem::new(grid(), vec![konst(0.0); 3], scalar_rhs(Poly::zero()), CVector::zeros(3), bop.into())
            .unwrap();
        let m = companion_reduce(&p3).p.eval(0.5, Side::Right);
        let expect = [[0.0, -1.0, 0.0], [0.0, 0.0, -1.0], [0.0, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[(i, j)], c(expect[i][j]));
            }
        }
    }

    #[test]
    fn solve_examples() {
        let p = first_order(ScalarMeasure::dirac(0.0, 1.0, 0.0, c(1.0)).unwrap(), Poly::from_real(&[1.0]), 0.0);
        let s = solve(&p).unwrap();
        assert!(max_err(&s.y.channels()[0], |t| t) < 1e-12);
        assert!(s.ode_residual < 1e-8 && s.boundary_residual < 1e-8);

        let p = first_order(ScalarMeasure::lebesgue(0.0, 1.0), Poly::zero(), 1.0);
        let s = solve(&p).unwrap();
        assert!(max_err(&s.y.channels()[0], |_| 1.0) < 1e-12);

        let p = second_order([0, 0], Poly::zero(), [0.0, 1.0]);
        let s = solve(&p).unwrap();
        assert!(max_err(&s.y.channels()[0], |t| t) < 1e-12);
        assert!(max_err(&s.y.channels()[1], |_| 1.0) < 1e-12);
        assert!(max_err(&s.y.channels()[2], |_| 0.0) < 1e-12);
        assert!(s.ode_residual < 1e-8 && s.boundary_residual < 1e-8);
    }

    #[test]
    fn neumann_neumann_is_singular() {
        let p = second_order([1, 1], Poly::zero(), [0.0, 0.0]);
        match solve(&p) {
            Err(Error::NotUniquelySolvable { det, .. }) => assert!(det < 1e-12),
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn polynomial_solution_second_order() {
        // y = t³ - t: y(0) = 0, y(1) = 0, y'' = 6t
        let p = second_order([0, 0], Poly::from_real(&[0.0, 6.0]), [0.0, 0.0]);
        let s = solve(&p).unwrap();
        assert!(max_err(&s.y.channels()[0], |t| t * t * t - t) < 1e-10);
        assert!(max_err(&s.y.channels()[1], |t| 3.0 * t * t - 1.0) < 1e-10);
        assert!(max_err(&s.y.channels()[2], |t| 6.0 * t) < 1e-10);
    }

    #[test]
    fn residual_detects_wrong_solution() {
        let p = second_order([0, 0], Poly::zero(), [0.0, 1.0]);
        let s = solve(&p).unwrap();
        let shifted = SampledJet::new(vec![
            s.y.channels()[0].map(1, |_, v| v.add_scalar(c(1.0))),
            s.y.channels()[1].clone(),
            s.y.channels()[2].clone(),
        ])
        .unwrap();
        let (_, bres) = residuals(&p, &shifted).unwrap();
        assert!(bres > 0.5);
    }

    #[test]
    fn zero_problem_has_zero_solution() {
        let p = second_order([0, 0], Poly::zero(), [0.0, 0.0]);
        let s = solve(&p).unwrap();
        assert!(s.y.channels().iter().all(|ch| ch.values().iter().all(|v| v.iter().all(|z| *z == c(0.0)))));
        assert_eq!(s.ode_residual, 0.0);
        assert_eq!(s.boundary_residual, 0.0);
    }

    #[test]
    fn jet_channels_are_blocks_of_first_order_solution() {
        let p = second_order([0, 0], Poly::from_real(&[1.0, 2.0]), [0.5, -1.0]);
        let s = solve(&p).unwrap();
        assert!(s.y.consistency_defect() < 1e-5);
        assert_eq!(s.y.order(), 2);
    }

    #[test]
    fn construction_validates() {
        let b = GeneralBoundaryOperator::new(
            1,
            1,
            vec![],
            MatrixMeasure::new(1, 1, vec![ScalarMeasure::lebesgue(0.0, 1.0)]).unwrap(),
        )
        .unwrap();
        let err = BvpProblem::new(
            grid(),
            vec![scalar_coef(Poly::zero())],
            scalar_rhs(Poly::zero()),
            CVector::zeros(2),
            b.clone().into(),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        let err = BvpProblem::new(
            grid(),
            vec![scalar_coef(Poly::zero()), scalar_coef(Poly::zero())],
            scalar_rhs(Poly::zero()),
            CVector::zeros(2),
            b.into(),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn breakpoints_are_snapped() {
        let g = Grid::new(0.0, 1.0, 8).unwrap();
        let step = PiecewisePoly::new(vec![0.0, 0.3, 1.0], vec![Poly::from_real(&[1.0]), Poly::from_real(&[2.0])]).unwrap();
        let b = GeneralBoundaryOperator::new(
            1,
            1,
            vec![],
            MatrixMeasure::new(1, 1, vec![ScalarMeasure::dirac(0.0, 1.0, 0.0, c(1.0)).unwrap()]).unwrap(),
        )
        .unwrap();
        let p = BvpProblem::new(
            g,
            vec![PolyMatrix::new(1, 1, vec![step.clone()]).unwrap()],
            PolyVector::new(vec![step]).unwrap(),
            CVector::zeros(1),
            b.into(),
        )
        .unwrap();
        assert_eq!(p.coefficients()[0].get(0, 0).breakpoints(), &[0.0, 0.25, 1.0]);
        assert_eq!(p.rhs().entry(0).breakpoints(), &[0.0, 0.25, 1.0]);
    }
}

//! Complex measures on `[a, b]` represented as finitely many point masses plus a
//! piecewise-polynomial density, i.e. NBV functions `φ` through `dφ`.
//!
//! The Riemann–Stieltjes functional `x ↦ ∫ x dφ`, total variation, and the
//! discretizers that turn an arbitrary measure into a purely atomic one converging
//! weak-* to it live here.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::funcspace::{simpson_c, Grid, PiecewisePoly, SampledFn};
use crate::{CVector, C64};

/// Relative distance below which two atom locations are treated as the same point.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub t: f64,
    pub w: C64,
}

impl Atom {
    pub fn new(t: f64, w: C64) -> Self {
        Self { t, w }
    }
}

/// Point masses plus an absolutely continuous part.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMeasure {
    a: f64,
    b: f64,
    atoms: Vec<Atom>,
    density: PiecewisePoly,
}

impl ScalarMeasure {
    /// Sorts atoms, merges those closer than `(b - a) * 1e-12` and drops zero weights.
    pub fn new(a: f64, b: f64, atoms: Vec<Atom>, density: PiecewisePoly) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Interval { a, b });
        }
        if density.domain() != (a, b) {
            let (da, db) = density.domain();
            return Err(Error::InvalidArgument(format!(
                "density lives on [{da}, {db}], measure on [{a}, {b}]"
            )));
        }
        for at in &atoms {
            if !(at.t.is_finite() && at.w.re.is_finite() && at.w.im.is_finite()) {
                return Err(Error::NonFinite("atom".into()));
            }
            if at.t < a || at.t > b {
                return Err(Error::InvalidArgument(format!(
                    "atom at {} lies outside [{a}, {b}]",
                    at.t
                )));
            }
        }
        Ok(Self {
            a,
            b,
            atoms: merge_atoms(atoms, (b - a) * ATOM_MERGE_TOL),
            density,
        })
    }

    pub fn zero(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            atoms: Vec::new(),
            density: PiecewisePoly::zero(a, b),
        }
    }

    pub fn dirac(a: f64, b: f64, t: f64, w: C64) -> Result<Self> {
        Self::new(a, b, vec![Atom::new(t, w)], PiecewisePoly::zero(a, b))
    }

    /// Lebesgue measure (density 1).
    pub fn lebesgue(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            atoms: Vec::new(),
            density: PiecewisePoly::constant(a, b, C64::new(1.0, 0.0)),
        }
    }

    pub fn with_density(density: PiecewisePoly) -> Self {
        let (a, b) = density.domain();
        Self {
            a,
            b,
            atoms: Vec::new(),
            density,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &PiecewisePoly {
        &self.density
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.is_zero()
    }

    /// `φ(b) = μ([a, b])`.
    pub fn total_mass(&self) -> C64 {
        self.atoms.iter().map(|at| at.w).sum::<C64>() + self.density.integrate(self.a, self.b)
    }

    /// Formal difference `self - other` (same interval required).
    pub fn sub(&self, other: &ScalarMeasure) -> Result<ScalarMeasure> {
        if self.interval() != other.interval() {
            return Err(Error::InvalidArgument("measures on different intervals".into()));
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().map(|at| Atom::new(at.t, -at.w)));
        ScalarMeasure::new(self.a, self.b, atoms, self.density.sub(&other.density))
    }

    pub fn scale(&self, s: C64) -> ScalarMeasure {
        Self {
            a: self.a,
            b: self.b,
            atoms: self
                .atoms
                .iter()
                .map(|at| Atom::new(at.t, at.w * s))
                .filter(|at| at.w != C64::new(0.0, 0.0))
                .collect(),
            density: self.density.scale(s),
        }
    }
}

fn merge_atoms(mut atoms: Vec<Atom>, tol: f64) -> Vec<Atom> {
    atoms.sort_by(|x, y| x.t.total_cmp(&y.t));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for at in atoms {
        match out.last_mut() {
            Some(last) if (at.t - last.t).abs() <= tol => last.w += at.w,
            _ => out.push(at),
        }
    }
    out.retain(|at| at.w != C64::new(0.0, 0.0));
    out
}

/// Density samples at grid nodes (right-hand limits, left-hand at `b`).
fn density_samples(mu: &ScalarMeasure, grid: &Grid) -> Vec<C64> {
    grid.nodes().into_iter().map(|t| mu.density.eval(t)).collect()
}

/// `∫_a^b x dμ` for `x` sampled on `grid`.
///
/// Atoms use linear interpolation of `x`; the density part uses composite Simpson
/// quadrature of `x · ρ` on the grid (trapezoid when `n` is odd).
pub fn rs_integrate(grid: &Grid, x: &[C64], mu: &ScalarMeasure) -> C64 {
    let atomic: C64 = mu
        .atoms
        .iter()
        .map(|at| {
            let (i, th) = grid.locate(at.t);
            let v = if th == 0.0 {
                x[i]
            } else if th == 1.0 {
                x[i + 1]
            } else {
                x[i] * (1.0 - th) + x[i + 1] * th
            };
            at.w * v
        })
        .sum();
    if mu.density.is_zero() {
        return atomic;
    }
    let rho = density_samples(mu, grid);
    let prod: Vec<C64> = x.iter().zip(&rho).map(|(a, b)| a * b).collect();
    atomic + simpson_c(grid, &prod)
}

/// `V(φ, [a, b]) = Σ |w_i| + ∫ |ρ|`.
pub fn total_variation(mu: &ScalarMeasure) -> f64 {
    mu.atoms.iter().map(|at| at.w.norm()).sum::<f64>() + mu.density.abs_integral(mu.a, mu.b)
}

/// Total variation of `μ - ν`.
pub fn tv_distance(mu: &ScalarMeasure, nu: &ScalarMeasure) -> Result<f64> {
    Ok(total_variation(&mu.sub(nu)?))
}

/// A rule producing a purely atomic measure (plus the input's own atoms) from `μ`
/// and a subinterval count `k`, converging weak-* to `μ` as `k → ∞`.
pub trait MeasureDiscretizer: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Location of the atom carrying the mass of `[lo, hi]`.
    fn tag(&self, lo: f64, hi: f64) -> f64;

    fn discretize(&self, mu: &ScalarMeasure, k: usize) -> Result<ScalarMeasure> {
        if k == 0 {
            return Err(Error::InvalidArgument("discretization needs k >= 1".into()));
        }
        let (a, b) = mu.interval();
        let mut atoms = mu.atoms.clone();
        if !mu.density.is_zero() {
            atoms.extend((0..k).map(|j| {
                let lo = cell_edge(a, b, k, j);
                let hi = cell_edge(a, b, k, j + 1);
                Atom::new(self.tag(lo, hi), mu.density.integrate(lo, hi))
            }));
        }
        ScalarMeasure::new(a, b, atoms, PiecewisePoly::zero(a, b))
    }
}

/// `a + j (b - a) / k`, exact at `j = k`.
pub fn cell_edge(a: f64, b: f64, k: usize, j: usize) -> f64 {
    if j >= k {
        b
    } else {
        a + (b - a) * (j as f64) / (k as f64)
    }
}

/// Each of `k` equal cells contributes one atom at its midpoint carrying the cell's mass.
#[derive(Debug, Clone, Copy, Default)]
pub struct MidpointDiscretizer;

impl MeasureDiscretizer for MidpointDiscretizer {
    fn name(&self) -> &'static str {
        "midpoint"
    }

    fn description(&self) -> &'static str {
        "cell mass placed at the cell midpoint (second order on smooth densities)"
    }

    fn tag(&self, lo: f64, hi: f64) -> f64 {
        0.5 * (lo + hi)
    }
}

/// Cell mass at the right end of the cell: the step function `Σ w_j χ_(c_j, b]`
/// jumps where the cell ends.
#[derive(Debug, Clone, Copy, Default)]
pub struct RightEndpointDiscretizer;

impl MeasureDiscretizer for RightEndpointDiscretizer {
    fn name(&self) -> &'static str {
        "right-endpoint"
    }

    fn description(&self) -> &'static str {
        "cell mass placed at the right end of the cell (first order)"
    }

    fn tag(&self, _lo: f64, hi: f64) -> f64 {
        hi
    }
}

/// Midpoint discretization into `k` cells.
pub fn discretize_measure(mu: &ScalarMeasure, k: usize) -> Result<ScalarMeasure> {
    MidpointDiscretizer.discretize(mu, k)
}

/// `rows × cols` matrix of scalar measures on a common interval.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeasure {
    rows: usize,
    cols: usize,
    entries: Vec<ScalarMeasure>,
}

impl MatrixMeasure {
    pub fn new(rows: usize, cols: usize, entries: Vec<ScalarMeasure>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims("matrix measure entries", rows * cols, entries.len()));
        }
        if let Some(first) = entries.first() {
            if entries.iter().any(|e| e.interval() != first.interval()) {
                return Err(Error::InvalidArgument(
                    "matrix measure entries live on different intervals".into(),
                ));
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(a: f64, b: f64, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ScalarMeasure::zero(a, b); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarMeasure {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, mu: ScalarMeasure) {
        self.entries[i * self.cols + j] = mu;
    }

    pub fn entries(&self) -> &[ScalarMeasure] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ScalarMeasure::is_zero)
    }

    pub fn try_map(&self, f: impl Fn(&ScalarMeasure) -> Result<ScalarMeasure>) -> Result<Self> {
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Entrywise total variations `V(Φ, [a, b])`.
    pub fn variation_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| total_variation(self.get(i, j)))
    }

    /// `Σ_μ ∫ x_μ dΦ_{λμ}` for a sampled `cols`-vector function `x`.
    pub fn apply(&self, x: &SampledFn) -> Result<CVector> {
        if x.dim() != self.cols {
            return Err(Error::dims("matrix measure argument", self.cols, x.dim()));
        }
        let comps: Vec<Vec<C64>> = (0..self.cols).map(|c| x.component(c)).collect();
        let mut out = CVector::zeros(self.rows);
        for i in 0..self.rows {
            for (j, comp) in comps.iter().enumerate() {
                let mu = self.get(i, j);
                if !mu.is_zero() {
                    out[i] += rs_integrate(x.grid(), comp, mu);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Poly;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn samples(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<C64> {
        grid.nodes().into_iter().map(|t| c(f(t))).collect()
    }

    fn density_t() -> PiecewisePoly {
        PiecewisePoly::from_poly(0.0, 1.0, Poly::from_real(&[0.0, 1.0]))
    }

    #[test]
    fn rs_integrate_examples() {
        let g = Grid::new(0.0, 1.0, 256).unwrap();
        let point = ScalarMeasure::dirac(0.0, 1.0, 0.3, c(2.5)).unwrap();
        assert!((rs_integrate(&g, &samples(&g, |_| 1.0), &point) - c(2.5)).norm() < 1e-15);
        let leb = ScalarMeasure::lebesgue(0.0, 1.0);
        assert!((rs_integrate(&g, &samples(&g, |t| t * t), &leb) - c(1.0 / 3.0)).norm() < 1e-14);
        let mixed = ScalarMeasure::new(
            0.0,
            1.0,
            vec![Atom::new(0.5, c(2.0))],
            PiecewisePoly::constant(0.0, 1.0, c(3.0)),
        )
        .unwrap();
        assert!((rs_integrate(&g, &samples(&g, |t| t), &mixed) - c(2.5)).norm() < 1e-14);
    }

    #[test]
    fn total_variation_examples() {
        let atoms = ScalarMeasure::new(
            0.0,
            1.0,
            vec![Atom::new(0.2, c(1.0)), Atom::new(0.7, c(-2.0))],
            PiecewisePoly::zero(0.0, 1.0),
        )
        .unwrap();
        assert_eq!(total_variation(&atoms), 3.0);
        assert_eq!(total_variation(&ScalarMeasure::lebesgue(0.0, 1.0)), 1.0);
        let mixed = ScalarMeasure::new(
            0.0,
            1.0,
            vec![Atom::new(0.5, C64::new(0.0, 1.0))],
            PiecewisePoly::constant(0.0, 1.0, c(2.0)),
        )
        .unwrap();
        assert_eq!(total_variation(&mixed), 3.0);
    }

    #[test]
    fn tv_distance_examples() {
        let leb = ScalarMeasure::lebesgue(0.0, 1.0);
        assert_eq!(tv_distance(&leb, &leb).unwrap(), 0.0);
        let point = ScalarMeasure::dirac(0.0, 1.0, 0.5, c(1.0)).unwrap();
        let point_plus = ScalarMeasure::new(0.0, 1.0, vec![Atom::new(0.5, c(1.0))], leb.density().clone()).unwrap();
        assert!((tv_distance(&point, &point_plus).unwrap() - 1.0).abs() < 1e-15);
        let disc = discretize_measure(&leb, 4).unwrap();
        assert!((tv_distance(&disc, &leb).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn discretize_examples() {
        let leb = ScalarMeasure::lebesgue(0.0, 1.0);
        let d = discretize_measure(&leb, 2).unwrap();
        assert_eq!(d.atoms(), &[Atom::new(0.25, c(0.5)), Atom::new(0.75, c(0.5))]);
        assert!(d.is_atomic());

        let atomic = ScalarMeasure::new(
            0.0,
            1.0,
            vec![Atom::new(0.1, c(1.0)), Atom::new(0.9, C64::new(0.0, -1.0))],
            PiecewisePoly::zero(0.0, 1.0),
        )
        .unwrap();
        for k in [1, 3, 17] {
            assert_eq!(discretize_measure(&atomic, k).unwrap(), atomic);
        }

        let d = discretize_measure(&ScalarMeasure::with_density(density_t()), 1).unwrap();
        assert_eq!(d.atoms(), &[Atom::new(0.5, c(0.5))]);

        assert!(matches!(discretize_measure(&leb, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn construction_merges_and_validates() {
        let mu = ScalarMeasure::new(
            0.0,
            1.0,
            vec![Atom::new(0.5, c(1.0)), Atom::new(0.5 + 1e-14, c(2.0)), Atom::new(0.2, c(1.0))],
            PiecewisePoly::zero(0.0, 1.0),
        )
        .unwrap();
        assert_eq!(mu.atoms().len(), 2);
        assert_eq!(mu.atoms()[1].w, c(3.0));
        assert!(ScalarMeasure::dirac(0.0, 1.0, 1.5, c(1.0)).is_err());
        assert!(ScalarMeasure::new(0.0, 1.0, vec![], PiecewisePoly::zero(0.0, 2.0)).is_err());
    }

    #[test]
    fn right_endpoint_discretizer_preserves_mass() {
        let mu = ScalarMeasure::with_density(density_t());
        let d = RightEndpointDiscretizer.discretize(&mu, 4).unwrap();
        assert_eq!(d.atoms().last().unwrap().t, 1.0);
        assert!((d.total_mass() - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn matrix_measure_applies_rowwise() {
        let g = Grid::new(0.0, 1.0, 64).unwrap();
        let mut phi = MatrixMeasure::zeros(0.0, 1.0, 2, 2);
        phi.set(0, 0, ScalarMeasure::dirac(0.0, 1.0, 0.0, c(1.0)).unwrap());
        phi.set(1, 1, ScalarMeasure::lebesgue(0.0, 1.0));
        let x = SampledFn::from_fn(&g, 2, |t| CVector::from_vec(vec![c(1.0 + t), c(t)]));
        let v = phi.apply(&x).unwrap();
        assert!((v[0] - c(1.0)).norm() < 1e-15);
        assert!((v[1] - c(0.5)).norm() < 1e-14);
        assert_eq!(phi.variation_matrix()[(1, 1)], 1.0);
    }
}

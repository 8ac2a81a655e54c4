use crate::error::{Error, Result};
use crate::funcspace::{Grid, PiecewisePoly, Side, SampledFn};
use crate::{CMatrix, CVector, C64};

/// Vector function whose components are piecewise polynomials on a common interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVector {
    entries: Vec<PiecewisePoly>,
}

impl PolyVector {
    pub fn new(entries: Vec<PiecewisePoly>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty vector function".into()));
        }
        check_domains(&entries)?;
        Ok(Self { entries })
    }

    pub fn zeros(a: f64, b: f64, dim: usize) -> Self {
        Self {
            entries: vec![PiecewisePoly::zero(a, b); dim],
        }
    }

    pub fn constant(a: f64, b: f64, v: &CVector) -> Self {
        Self {
            entries: v.iter().map(|&c| PiecewisePoly::constant(a, b, c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.entries[0].domain()
    }

    pub fn entries(&self) -> &[PiecewisePoly] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &PiecewisePoly {
        &self.entries[i]
    }

    pub fn eval(&self, t: f64, side: Side) -> CVector {
        CVector::from_iterator(self.dim(), self.entries.iter().map(|p| p.eval_side(t, side)))
    }

    pub fn derivative(&self) -> PolyVector {
        Self {
            entries: self.entries.iter().map(PiecewisePoly::derivative).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&PiecewisePoly) -> PiecewisePoly) -> PolyVector {
        Self {
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &PolyVector) -> Result<PolyVector> {
        if self.dim() != other.dim() {
            return Err(Error::dims("vector function sum", self.dim(), other.dim()));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(p, q)| p.add(q))
                .collect(),
        })
    }

    pub fn sub(&self, other: &PolyVector) -> Result<PolyVector> {
        other.map(|p| p.scale(C64::new(-1.0, 0.0))).add(self)
    }

    /// Node values (right-hand limits, left at `b`).
    pub fn sample(&self, grid: &Grid) -> SampledFn {
        SampledFn::from_fn(grid, self.dim(), |t| self.eval(t, Side::Right))
    }

    /// `Σ_i ‖f_i‖_1`, computed piecewise.
    pub fn norm_l1(&self) -> f64 {
        let (a, b) = self.domain();
        self.entries.iter().map(|p| p.abs_integral(a, b)).sum()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        collect_breaks(&self.entries)
    }
}

/// Matrix function with piecewise-polynomial entries (row-major storage).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<PiecewisePoly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<PiecewisePoly>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("empty matrix function".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::dims("matrix function entries", rows * cols, entries.len()));
        }
        check_domains(&entries)?;
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
            entries: vec![PiecewisePoly::zero(a, b); rows * cols],
        }
    }

    pub fn constant(a: f64, b: f64, m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| PiecewisePoly::constant(a, b, m[(i, j)]))
            .collect();
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> (f64, f64) {
        self.entries[0].domain()
    }

    pub fn get(&self, i: usize, j: usize) -> &PiecewisePoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: PiecewisePoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[PiecewisePoly] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&PiecewisePoly) -> PiecewisePoly) -> PolyMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn eval(&self, t: f64, side: Side) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_side(t, side))
    }

    /// Matrix-function `L¹` norm: maximum over columns of `Σ_i ∫ |a_ij|`.
    pub fn norm_l1(&self) -> f64 {
        let (a, b) = self.domain();
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self.get(i, j).abs_integral(a, b))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `∫_a^b trace` exactly.
    pub fn trace_integral(&self, c: f64, d: f64) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).integrate(c, d))
            .sum()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        collect_breaks(&self.entries)
    }

    pub fn is_finite_at(&self, t: f64) -> bool {
        self.eval(t, Side::Right).iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn check_domains(entries: &[PiecewisePoly]) -> Result<()> {
    let d0 = entries[0].domain();
    if entries.iter().any(|p| p.domain() != d0) {
        return Err(Error::InvalidArgument(
            "all entries must share the same interval".into(),
        ));
    }
    Ok(())
}

fn collect_breaks(entries: &[PiecewisePoly]) -> Vec<f64> {
    let mut all: Vec<f64> = entries
        .iter()
        .flat_map(|p| p.breakpoints().iter().copied())
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

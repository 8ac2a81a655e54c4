use crate::error::{Error, Result};
use crate::funcspace::Grid;
use crate::{CVector, C64};

/// Vector function sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    grid: Grid,
    dim: usize,
    values: Vec<CVector>,
}

impl SampledFn {
    pub fn new(grid: Grid, values: Vec<CVector>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::dims("sample count", grid.len(), values.len()));
        }
        let dim = values[0].len();
        if let Some(bad) = values.iter().find(|v| v.len() != dim) {
            return Err(Error::dims("sample dimension", dim, bad.len()));
        }
        if values
            .iter()
            .flat_map(|v| v.iter())
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite("sampled function".into()));
        }
        Ok(Self { grid, dim, values })
    }

    pub fn from_fn(grid: &Grid, dim: usize, f: impl Fn(f64) -> CVector) -> Self {
        let values = grid.nodes().into_iter().map(&f).collect();
        Self {
            grid: *grid,
            dim,
            values,
        }
    }

    pub fn zeros(grid: &Grid, dim: usize) -> Self {
        Self {
            grid: *grid,
            dim,
            values: vec![CVector::zeros(dim); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[CVector] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &CVector {
        &self.values[i]
    }

    pub fn component(&self, c: usize) -> Vec<C64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    /// Rows `start..start+len` of every sample.
    pub fn block(&self, start: usize, len: usize) -> SampledFn {
        Self {
            grid: self.grid,
            dim: len,
            values: self.values.iter().map(|v| v.rows(start, len).into_owned()).collect(),
        }
    }

    /// Piecewise-linear interpolation.
    pub fn interpolate(&self, t: f64) -> CVector {
        let (i, th) = self.grid.locate(t);
        if th == 0.0 {
            self.values[i].clone()
        } else if th == 1.0 {
            self.values[i + 1].clone()
        } else {
            &self.values[i] * C64::new(1.0 - th, 0.0) + &self.values[i + 1] * C64::new(th, 0.0)
        }
    }

    fn zip(&self, other: &SampledFn, op: impl Fn(&CVector, &CVector) -> CVector) -> Result<SampledFn> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("sampled functions live on different grids".into()));
        }
        if self.dim != other.dim {
            return Err(Error::dims("sampled function", self.dim, other.dim));
        }
        Ok(Self {
            grid: self.grid,
            dim: self.dim,
            values: self.values.iter().zip(&other.values).map(|(x, y)| op(x, y)).collect(),
        })
    }

    pub fn add(&self, other: &SampledFn) -> Result<SampledFn> {
        self.zip(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &SampledFn) -> Result<SampledFn> {
        self.zip(other, |x, y| x - y)
    }

    pub fn scale(&self, s: C64) -> SampledFn {
        Self {
            grid: self.grid,
            dim: self.dim,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn map(&self, dim: usize, f: impl Fn(usize, &CVector) -> CVector) -> SampledFn {
        Self {
            grid: self.grid,
            dim,
            values: self.values.iter().enumerate().map(|(i, v)| f(i, v)).collect(),
        }
    }
}

/// Uniform-grid trapezoid rule on real samples.
pub fn trapezoid(grid: &Grid, samples: &[f64]) -> f64 {
    let n = samples.len() - 1;
    let inner: f64 = samples[1..n].iter().sum();
    grid.h() * (inner + 0.5 * (samples[0] + samples[n]))
}

/// Uniform-grid trapezoid rule on complex samples.
pub fn trapezoid_c(grid: &Grid, samples: &[C64]) -> C64 {
    let n = samples.len() - 1;
    let inner: C64 = samples[1..n].iter().sum();
    (inner + (samples[0] + samples[n]) * 0.5) * grid.h()
}

/// Composite Simpson rule; falls back to the trapezoid rule on odd subinterval counts.
pub fn simpson_c(grid: &Grid, samples: &[C64]) -> C64 {
    let n = samples.len() - 1;
    if n % 2 == 1 {
        return trapezoid_c(grid, samples);
    }
    let mut acc = samples[0] + samples[n];
    for (i, s) in samples.iter().enumerate().take(n).skip(1) {
        acc += s * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (grid.h() / 3.0)
}

/// Primitive with `F(a) = 0`, by cumulative trapezoid quadrature.
pub fn antiderivative(f: &SampledFn) -> SampledFn {
    let h = f.grid.h();
    let mut acc = CVector::zeros(f.dim);
    let mut values = Vec::with_capacity(f.values.len());
    values.push(acc.clone());
    for w in f.values.windows(2) {
        acc += (&w[0] + &w[1]) * C64::new(0.5 * h, 0.0);
        values.push(acc.clone());
    }
    SampledFn {
        grid: f.grid,
        dim: f.dim,
        values,
    }
}

/// `‖x‖_1`: sum over components of the trapezoid integral of `|x_c|`.
pub fn norm_l1(x: &SampledFn) -> f64 {
    (0..x.dim)
        .map(|c| {
            let abs: Vec<f64> = x.values.iter().map(|v| v[c].norm()).collect();
            trapezoid(&x.grid, &abs)
        })
        .sum()
}

/// `‖x‖_C`: sum over components of the maximum modulus over the nodes.
pub fn norm_c(x: &SampledFn) -> f64 {
    (0..x.dim)
        .map(|c| x.values.iter().map(|v| v[c].norm()).fold(0.0, f64::max))
        .sum()
}

/// Solution samples `y^(j)(t_i)` for `j = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledJet {
    channels: Vec<SampledFn>,
}

impl SampledJet {
    pub fn new(channels: Vec<SampledFn>) -> Result<Self> {
        let Some(first) = channels.first() else {
            return Err(Error::InvalidArgument("jet needs at least one channel".into()));
        };
        for ch in &channels[1..] {
            if ch.grid != first.grid {
                return Err(Error::InvalidArgument("jet channels live on different grids".into()));
            }
            if ch.dim != first.dim {
                return Err(Error::dims("jet channel", first.dim, ch.dim));
            }
        }
        Ok(Self { channels })
    }

    /// Samples `f(t, j)` for every derivative order `j = 0..=order`.
    pub fn from_fn(grid: &Grid, m: usize, order: usize, f: impl Fn(f64, usize) -> CVector) -> Self {
        let channels = (0..=order)
            .map(|j| SampledFn::from_fn(grid, m, |t| f(t, j)))
            .collect();
        Self { channels }
    }

    pub fn zeros(grid: &Grid, m: usize, order: usize) -> Self {
        Self {
            channels: vec![SampledFn::zeros(grid, m); order + 1],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.channels[0].grid
    }

    pub fn m(&self) -> usize {
        self.channels[0].dim
    }

    /// Highest stored derivative order.
    pub fn order(&self) -> usize {
        self.channels.len() - 1
    }

    pub fn channels(&self) -> &[SampledFn] {
        &self.channels
    }

    pub fn channel(&self, j: usize) -> Result<&SampledFn> {
        self.channels.get(j).ok_or(Error::OrderOutOfRange {
            requested: j,
            available: self.order(),
        })
    }

    /// Jet restricted to orders `0..=order`.
    pub fn truncated(&self, order: usize) -> Result<SampledJet> {
        if order > self.order() {
            return Err(Error::OrderOutOfRange {
                requested: order,
                available: self.order(),
            });
        }
        Ok(Self {
            channels: self.channels[..=order].to_vec(),
        })
    }

    pub fn sub(&self, other: &SampledJet) -> Result<SampledJet> {
        if self.order() != other.order() {
            return Err(Error::dims("jet order", self.order(), other.order()));
        }
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(x, y)| x.sub(y))
            .collect::<Result<_>>()?;
        Ok(Self { channels })
    }

    pub fn add(&self, other: &SampledJet) -> Result<SampledJet> {
        if self.order() != other.order() {
            return Err(Error::dims("jet order", self.order(), other.order()));
        }
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(x, y)| x.add(y))
            .collect::<Result<_>>()?;
        Ok(Self { channels })
    }

    /// Largest mismatch between centred differences of channel `j` and channel `j+1`
    /// over interior nodes. `O(h²)` for smooth jets.
    pub fn consistency_defect(&self) -> f64 {
        let grid = self.grid();
        let h2 = 2.0 * grid.h();
        let mut worst: f64 = 0.0;
        for w in self.channels.windows(2) {
            for i in 1..grid.n() {
                let fd = (&w[0].values[i + 1] - &w[0].values[i - 1]) / C64::new(h2, 0.0);
                let d = (fd - &w[1].values[i]).iter().map(|z| z.norm()).sum::<f64>();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// `‖y‖_(l) = Σ_{j=0..l} ‖y^(j)‖_C`.
pub fn norm_cl(y: &SampledJet, l: usize) -> Result<f64> {
    if l > y.order() {
        return Err(Error::OrderOutOfRange {
            requested: l,
            available: y.order(),
        });
    }
    Ok(y.channels[..=l].iter().map(norm_c).sum())
}

/// `‖y‖_{r,1} = Σ_{j=0..r} ‖y^(j)‖_1` over every stored channel.
pub fn norm_w1r(y: &SampledJet) -> f64 {
    y.channels.iter().map(norm_l1).sum()
}

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::C64;

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Complex polynomial in the absolute variable `t`, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            Self::zero()
        } else {
            Self { coeffs }
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != C64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// Drops trailing zero coefficients.
    pub fn trimmed(mut self) -> Self {
        let d = self.degree();
        self.coeffs.truncate(d + 1);
        self
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(C64::new(0.0, 0.0));
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| c / (j + 1) as f64),
        );
        Poly::new(out)
    }

    /// Exact integral over `[c, d]`.
    pub fn integrate(&self, c: f64, d: f64) -> C64 {
        let prim = self.antiderivative();
        prim.eval(d) - prim.eval(c)
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        Poly::new(
            (0..len)
                .map(|j| {
                    self.coeffs.get(j).copied().unwrap_or(zero)
                        + other.coeffs.get(j).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            for (j, &y) in other.coeffs.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Poly::new(out)
    }

    /// `p(alpha + beta * t)` as a polynomial in `t`.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Poly {
        let lin = Poly::from_real(&[alpha, beta]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| acc.mul(&lin).add(&Poly::constant(c)))
    }

    /// `∫_c^d |p(t)| dt`.
    ///
    /// Purely real (or purely imaginary) polynomials are split at their real roots and
    /// integrated exactly; general complex polynomials use adaptive Gauss-Legendre.
    pub fn abs_integral(&self, c: f64, d: f64) -> f64 {
        if d <= c || self.is_zero() {
            return 0.0;
        }
        let re: Vec<f64> = self.coeffs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.coeffs.iter().map(|z| z.im).collect();
        let real_only = im.iter().all(|&x| x == 0.0);
        let imag_only = re.iter().all(|&x| x == 0.0);
        if real_only || imag_only {
            let part = if real_only { re } else { im };
            let p = Poly::from_real(&part);
            let mut cuts = vec![c];
            cuts.extend(real_roots(&part, c, d));
            cuts.push(d);
            return cuts
                .windows(2)
                .map(|w| p.integrate(w[0], w[1]).re.abs())
                .sum();
        }
        let scale = gauss().integrate(c, d, |t| self.eval(t).norm());
        adaptive_abs(self, c, d, 1e-14 * scale.max(f64::MIN_POSITIVE), 0)
    }
}

fn gauss() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(12).expect("valid Gauss-Legendre degree"))
}

fn adaptive_abs(p: &Poly, c: f64, d: f64, tol: f64, depth: usize) -> f64 {
    let rule = gauss();
    let f = |t: f64| p.eval(t).norm();
    let whole = rule.integrate(c, d, f);
    let mid = 0.5 * (c + d);
    let split = rule.integrate(c, mid, f) + rule.integrate(mid, d, f);
    if depth >= 50 || (split - whole).abs() <= tol.max(64.0 * f64::EPSILON * split.abs()) {
        split
    } else {
        adaptive_abs(p, c, mid, 0.5 * tol, depth + 1) + adaptive_abs(p, mid, d, 0.5 * tol, depth + 1)
    }
}

fn eval_real(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Real roots of a real polynomial strictly inside `(lo, hi)` where it changes sign,
/// found by splitting at critical points (recursively) and bisecting monotone pieces.
pub(crate) fn real_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let deg = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    let coeffs = &coeffs[..=deg];
    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| c * j as f64)
        .collect();
    let mut cuts = vec![lo];
    cuts.extend(real_roots(&deriv, lo, hi));
    cuts.push(hi);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (mut x0, mut x1) = (w[0], w[1]);
        let (mut f0, f1) = (eval_real(coeffs, x0), eval_real(coeffs, x1));
        if f0 == 0.0 || f1 == 0.0 || f0.signum() == f1.signum() {
            continue;
        }
        for _ in 0..200 {
            let xm = 0.5 * (x0 + x1);
            if xm <= x0 || xm >= x1 {
                break;
            }
            let fm = eval_real(coeffs, xm);
            if fm == 0.0 {
                x0 = xm;
                x1 = xm;
                break;
            }
            if fm.signum() == f0.signum() {
                x0 = xm;
                f0 = fm;
            } else {
                x1 = xm;
            }
        }
        roots.push(0.5 * (x0 + x1));
    }
    // Critical points that are themselves roots do not create sign changes; keep order.
    roots.retain(|&r| r > lo && r < hi);
    roots
}

/// Polynomial pieces over increasing breakpoints covering `[a, b]`.
///
/// Evaluation at an interior breakpoint uses the right-hand piece (except at `b`, which
/// belongs to the last piece); [`Side::Left`] selects the left-hand limit instead.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        if breaks.len() < 2 || pieces.len() + 1 != breaks.len() {
            return Err(Error::InvalidArgument(format!(
                "piecewise polynomial needs p + 1 breakpoints for p pieces (got {} breakpoints, {} pieces)",
                breaks.len(),
                pieces.len()
            )));
        }
        if breaks.iter().any(|t| !t.is_finite()) || pieces.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("piecewise polynomial".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self { breaks, pieces })
    }

    pub fn from_poly(a: f64, b: f64, p: Poly) -> Self {
        Self {
            breaks: vec![a, b],
            pieces: vec![p],
        }
    }

    pub fn constant(a: f64, b: f64, c: C64) -> Self {
        Self::from_poly(a, b, Poly::constant(c))
    }

    pub fn zero(a: f64, b: f64) -> Self {
        Self::from_poly(a, b, Poly::zero())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(Poly::is_zero)
    }

    fn piece_index(&self, t: f64, side: Side) -> usize {
        let p = self.pieces.len();
        // number of interior breakpoints `<= t` (right) or `< t` (left)
        let interior = &self.breaks[1..p];
        let k = match side {
            Side::Right => interior.partition_point(|&x| x <= t),
            Side::Left => interior.partition_point(|&x| x < t),
        };
        k.min(p - 1)
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.eval_side(t, Side::Right)
    }

    pub fn eval_left(&self, t: f64) -> C64 {
        self.eval_side(t, Side::Left)
    }

    pub fn eval_side(&self, t: f64, side: Side) -> C64 {
        self.pieces[self.piece_index(t, side)].eval(t)
    }

    pub fn derivative(&self) -> PiecewisePoly {
        Self {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(Poly::derivative).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> PiecewisePoly {
        Self {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(s)).collect(),
        }
    }

    /// Exact `∫_c^d` (clipped to the domain).
    pub fn integrate(&self, c: f64, d: f64) -> C64 {
        self.over_pieces(c, d)
            .map(|(p, lo, hi)| p.integrate(lo, hi))
            .sum()
    }

    /// `∫_c^d |p(t)| dt`.
    pub fn abs_integral(&self, c: f64, d: f64) -> f64 {
        self.over_pieces(c, d)
            .map(|(p, lo, hi)| p.abs_integral(lo, hi))
            .sum()
    }

    /// Mean value over `[c, d]`.
    pub fn mean(&self, c: f64, d: f64) -> C64 {
        self.integrate(c, d) / (d - c)
    }

    fn over_pieces(&self, c: f64, d: f64) -> impl Iterator<Item = (&Poly, f64, f64)> + '_ {
        self.pieces.iter().enumerate().filter_map(move |(j, p)| {
            let lo = self.breaks[j].max(c);
            let hi = self.breaks[j + 1].min(d);
            (hi > lo).then_some((p, lo, hi))
        })
    }

    /// Combines two functions on the same domain over the union of their breakpoints.
    pub fn zip_with(&self, other: &PiecewisePoly, op: impl Fn(&Poly, &Poly) -> Poly) -> PiecewisePoly {
        let (a, b) = self.domain();
        let tol = 1e-14 * (b - a);
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() <= tol);
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                op(
                    &self.pieces[self.piece_index(mid, Side::Right)],
                    &other.pieces[other.piece_index(mid, Side::Right)],
                )
            })
            .collect();
        PiecewisePoly { breaks, pieces }.simplified()
    }

    pub fn add(&self, other: &PiecewisePoly) -> PiecewisePoly {
        self.zip_with(other, |p, q| p.add(q).trimmed())
    }

    pub fn sub(&self, other: &PiecewisePoly) -> PiecewisePoly {
        self.zip_with(other, |p, q| p.sub(q).trimmed())
    }

    pub fn mul(&self, other: &PiecewisePoly) -> PiecewisePoly {
        self.zip_with(other, |p, q| p.mul(q).trimmed())
    }

    /// Merges adjacent pieces carrying identical polynomials.
    pub fn simplified(self) -> PiecewisePoly {
        let mut breaks = vec![self.breaks[0]];
        let mut pieces: Vec<Poly> = Vec::with_capacity(self.pieces.len());
        for (j, p) in self.pieces.into_iter().enumerate() {
            if pieces.last() == Some(&p) {
                *breaks.last_mut().unwrap() = self.breaks[j + 1];
            } else {
                pieces.push(p);
                breaks.push(self.breaks[j + 1]);
            }
        }
        PiecewisePoly { breaks, pieces }
    }

    /// Moves interior breakpoints onto the nearest grid node. Pieces collapsing to zero
    /// length are dropped. Returns the largest displacement.
    pub fn snapped(&self, grid: &crate::funcspace::Grid) -> (PiecewisePoly, f64) {
        let mut max_shift: f64 = 0.0;
        let p = self.pieces.len();
        let mut breaks = vec![self.breaks[0]];
        let mut pieces: Vec<Poly> = Vec::new();
        for j in 0..p {
            let end = if j + 1 == p {
                self.breaks[p]
            } else {
                let (node, shift) = grid.snap(self.breaks[j + 1]);
                max_shift = max_shift.max(shift);
                node
            };
            if end > *breaks.last().unwrap() {
                pieces.push(self.pieces[j].clone());
                breaks.push(end);
            }
        }
        if pieces.is_empty() {
            pieces.push(self.pieces[p - 1].clone());
            breaks.push(self.breaks[p]);
        }
        (PiecewisePoly { breaks, pieces }, max_shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn horner_and_calculus() {
        let p = Poly::from_real(&[1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), c(9.0));
        assert_eq!(p.derivative(), Poly::from_real(&[-2.0, 6.0]));
        assert!((p.integrate(0.0, 1.0) - c(1.0)).norm() < 1e-15);
        assert_eq!(p.degree(), 2);
        let q = p.compose_affine(1.0, 2.0);
        assert!((q.eval(0.25) - p.eval(1.5)).norm() < 1e-14);
    }

    #[test]
    fn abs_integral_splits_at_roots() {
        // |2t - 1| on [0,1] = 1/2
        let p = Poly::from_real(&[-1.0, 2.0]);
        assert!((p.abs_integral(0.0, 1.0) - 0.5).abs() < 1e-15);
        // |t^2 - 1/4| on [0,1] = 1/4
        let q = Poly::from_real(&[-0.25, 0.0, 1.0]);
        assert!((q.abs_integral(0.0, 1.0) - 0.25).abs() < 1e-15);
        // |i t| on [0, 1]
        let r = Poly::new(vec![c(0.0), C64::new(0.0, 1.0)]);
        assert!((r.abs_integral(0.0, 1.0) - 0.5).abs() < 1e-15);
        // |1 + i t| on [0,1] = (sqrt 2 + asinh 1)/2
        let s = Poly::new(vec![c(1.0), C64::new(0.0, 1.0)]);
        let exact = 0.5 * (2f64.sqrt() + 1f64.asinh());
        assert!((s.abs_integral(0.0, 1.0) - exact).abs() < 1e-14);
        // complex root inside the interval: (1 + i)(t - 0.37)
        let k = Poly::new(vec![C64::new(-0.37, -0.37), C64::new(1.0, 1.0)]);
        let exact = 2f64.sqrt() * 0.5 * (0.37f64.powi(2) + 0.63f64.powi(2));
        assert!((k.abs_integral(0.0, 1.0) - exact).abs() < 1e-12);
    }

    #[test]
    fn breakpoint_sides() {
        let f = PiecewisePoly::new(
            vec![0.0, 0.5, 1.0],
            vec![Poly::constant(c(1.0)), Poly::constant(c(2.0))],
        )
        .unwrap();
        assert_eq!(f.eval(0.5), c(2.0));
        assert_eq!(f.eval_left(0.5), c(1.0));
        assert_eq!(f.eval(1.0), c(2.0));
        assert_eq!(f.eval_left(0.0), c(1.0));
        assert!((f.integrate(0.25, 0.75) - c(0.75)).norm() < 1e-15);
        assert!((f.mean(0.0, 1.0) - c(1.5)).norm() < 1e-15);
    }

    #[test]
    fn rejects_malformed() {
        assert!(PiecewisePoly::new(vec![0.0], vec![]).is_err());
        assert!(PiecewisePoly::new(vec![0.0, 0.0], vec![Poly::zero()]).is_err());
        assert!(PiecewisePoly::new(vec![0.0, 1.0], vec![Poly::from_real(&[f64::NAN])]).is_err());
    }

    #[test]
    fn arithmetic_merges_breakpoints_and_simplifies() {
        let f = PiecewisePoly::new(
            vec![0.0, 0.5, 1.0],
            vec![Poly::from_real(&[1.0]), Poly::from_real(&[2.0])],
        )
        .unwrap();
        let g = PiecewisePoly::new(
            vec![0.0, 0.5, 1.0],
            vec![Poly::from_real(&[1.0]), Poly::from_real(&[0.0])],
        )
        .unwrap();
        let s = f.add(&g);
        assert_eq!(s.breakpoints(), &[0.0, 1.0]);
        assert_eq!(s.eval(0.2), c(2.0));
        let d = f.sub(&f);
        assert!(d.is_zero());
    }

    #[test]
    fn snapping_moves_breaks_to_nodes() {
        let grid = crate::funcspace::Grid::new(0.0, 1.0, 10).unwrap();
        let f = PiecewisePoly::new(
            vec![0.0, 0.33, 0.34, 1.0],
            vec![Poly::from_real(&[1.0]), Poly::from_real(&[2.0]), Poly::from_real(&[3.0])],
        )
        .unwrap();
        let (g, shift) = f.snapped(&grid);
        // both interior breaks land on 0.3: the middle piece disappears
        assert_eq!(g.breakpoints(), &[0.0, 0.3, 1.0]);
        assert!((shift - 0.04).abs() < 1e-12);
        assert_eq!(g.eval(0.5), c(3.0));
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `[a, b]` into `n` subintervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

/// Default number of subintervals.
pub const DEFAULT_GRID_N: usize = 2048;

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Interval { a, b });
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 subintervals, got {n}"
            )));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// `t_i = a + i (b - a) / n`, with `t_n = b` exactly.
    pub fn node(&self, i: usize) -> f64 {
        if i >= self.n {
            self.b
        } else {
            self.a + (self.b - self.a) * (i as f64) / (self.n as f64)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }

    /// Position of `t` in node units, rounded onto a node when within 1e-9 of it.
    fn position(&self, t: f64) -> f64 {
        let s = (t - self.a) / (self.b - self.a) * self.n as f64;
        let r = s.round();
        if (s - r).abs() < 1e-9 {
            r
        } else {
            s
        }
    }

    /// Cell index `i` and local coordinate `theta` with `t = (1-theta) t_i + theta t_{i+1}`.
    /// Points outside `[a, b]` are clamped.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let s = self.position(t).clamp(0.0, self.n as f64);
        let i = (s.floor() as usize).min(self.n - 1);
        (i, (s - i as f64).clamp(0.0, 1.0))
    }

    /// Nearest node index to `t` (clamped to the grid).
    pub fn nearest_node(&self, t: f64) -> usize {
        let s = self.position(t).clamp(0.0, self.n as f64);
        s.round() as usize
    }

    /// Node closest to `t` together with the displacement `|node - t|`.
    pub fn snap(&self, t: f64) -> (f64, f64) {
        let node = self.node(self.nearest_node(t));
        (node, (node - t).abs())
    }

    /// Same interval with a different subinterval count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Grid::new(self.a, self.b, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_intervals() {
        assert!(matches!(Grid::new(1.0, 1.0, 4), Err(Error::Interval { .. })));
        assert!(matches!(Grid::new(2.0, 1.0, 4), Err(Error::Interval { .. })));
        assert!(Grid::new(f64::NAN, 1.0, 4).is_err());
        assert!(matches!(
            Grid::new(0.0, 1.0, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn nodes_are_uniform_and_hit_endpoints() {
        let g = Grid::new(-1.0, 2.0, 7).unwrap();
        let nodes = g.nodes();
        assert_eq!(nodes[0], -1.0);
        assert_eq!(nodes[7], 2.0);
        for w in nodes.windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] - w[0] - g.h()).abs() < 1e-14);
        }
    }

    #[test]
    fn locate_is_exact_on_nodes() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        assert_eq!(g.locate(0.3), (3, 0.0));
        assert_eq!(g.locate(1.0), (9, 1.0));
        let (i, th) = g.locate(0.35);
        assert_eq!(i, 3);
        assert!((th - 0.5).abs() < 1e-12);
        assert_eq!(g.snap(0.33), (g.node(3), (g.node(3) - 0.33).abs()));
    }
}

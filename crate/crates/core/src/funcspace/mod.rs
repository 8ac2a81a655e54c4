//! Grids, piecewise-polynomial functions, sampled jets and the norms used throughout:
//! vector norms sum over components, matrix norms take the maximum over columns.

mod grid;
mod poly;
mod polymat;
mod sampled;

pub use grid::{Grid, DEFAULT_GRID_N};
pub use poly::{PiecewisePoly, Poly, Side};
pub use polymat::{PolyMatrix, PolyVector};
pub use sampled::{
    antiderivative, norm_c, norm_cl, norm_l1, norm_w1r, simpson_c, trapezoid, trapezoid_c,
    SampledFn, SampledJet,
};

use crate::{CMatrix, CVector};

/// Numeric vector norm: sum of moduli.
pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// Numeric matrix norm induced by [`vector_norm`]: maximum absolute column sum.
pub fn matrix_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖M‖_C` of a sampled matrix function: maximum over columns of the summed
/// component sup-norms.
pub fn matrix_norm_c(values: &[CMatrix]) -> f64 {
    let Some(first) = values.first() else {
        return 0.0;
    };
    let (rows, cols) = first.shape();
    (0..cols)
        .map(|j| {
            (0..rows)
                .map(|i| values.iter().map(|m| m[(i, j)].norm()).fold(0.0, f64::max))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn matrix_c_norm_max_column() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-2.0, 0.0),
                C64::new(3.0, 0.0),
            ],
        );
        assert_eq!(matrix_norm_c(&vec![m.clone(); 5]), 3.0);
        assert_eq!(matrix_norm(&m), 3.0);
        assert_eq!(vector_norm(&CVector::from_vec(vec![C64::new(3.0, 4.0), C64::new(-1.0, 0.0)])), 6.0);
    }
}

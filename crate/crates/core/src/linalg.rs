//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Relative pivot threshold below which a square system is treated as singular.
const SINGULAR_REL: f64 = 1e-11;

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], n_cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), n_cols, |i, j| rows[i][j])
}

/// Solves `m x = rhs` by LU with partial pivoting; `None` when `m` is
/// numerically singular.
pub(crate) fn solve_square(m: DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    if n == 0 {
        return Some(Vec::new());
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let lu = m.lu();
    let u = lu.u();
    if (0..n).any(|i| u[(i, i)].abs() <= SINGULAR_REL * scale) {
        return None;
    }
    let b = DVector::from_column_slice(rhs);
    lu.solve(&b).map(|x| x.iter().copied().collect())
}

/// Numerical rank with an absolute singular-value cutoff scaled by the
/// largest entry.
pub(crate) fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    m.clone().rank(1e-10 * scale)
}

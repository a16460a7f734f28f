//! Small dense helpers shared by the builders, the solver, and the checks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Builds a matrix from row slices. All rows must have the same length.
pub fn from_rows(rows: &[&[f64]]) -> Mat {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(nrows, ncols, |i, j| rows[i][j])
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// `M + Mᵀ`.
pub fn he(m: &Mat) -> Mat {
    m + m.transpose()
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn symmetry_defect(m: &Mat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.transpose()))
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &Mat) -> Vector {
    if m.nrows() == 0 {
        return Vector::zeros(0);
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    Vector::from_vec(vals)
}

pub fn max_eig(m: &Mat) -> f64 {
    sym_eigenvalues(m).iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min_eig(m: &Mat) -> f64 {
    sym_eigenvalues(m).iter().copied().fold(f64::INFINITY, f64::min)
}

/// 2-norm condition number via singular values; infinite when singular.
pub fn condition_number(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 || !smin.is_finite() {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Assembles a block matrix. Every block row must agree on heights and
/// every block column on widths; `None` entries are zero blocks whose
/// size is inferred from their row and column neighbours.
pub fn block(grid: &[Vec<Option<Mat>>], row_sizes: &[usize], col_sizes: &[usize]) -> Mat {
    let total_r: usize = row_sizes.iter().sum();
    let total_c: usize = col_sizes.iter().sum();
    let mut out = Mat::zeros(total_r, total_c);
    let mut r0 = 0;
    for (bi, row) in grid.iter().enumerate() {
        let mut c0 = 0;
        for (bj, entry) in row.iter().enumerate() {
            if let Some(m) = entry {
                debug_assert_eq!(m.nrows(), row_sizes[bi]);
                debug_assert_eq!(m.ncols(), col_sizes[bj]);
                out.view_mut((r0, c0), (m.nrows(), m.ncols())).copy_from(m);
            }
            c0 += col_sizes[bj];
        }
        r0 += row_sizes[bi];
    }
    out
}

/// Symmetric block matrix from its upper triangle (`grid[i][j]` for `j >= i`).
pub fn sym_block(upper: &[Vec<Option<Mat>>], sizes: &[usize]) -> Mat {
    let k = sizes.len();
    let mut grid: Vec<Vec<Option<Mat>>> = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            if let Some(m) = upper[i].get(j - i).cloned().flatten() {
                if i != j {
                    grid[j][i] = Some(m.transpose());
                }
                grid[i][j] = Some(m);
            }
        }
    }
    block(&grid, sizes, sizes)
}

/// Euclidean norm of a concatenation of vectors.
pub fn stacked_norm(parts: &[&Vector]) -> f64 {
    parts.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_block_mirrors_upper_triangle() {
        let a = from_rows(&[&[1.0]]);
        let b = from_rows(&[&[2.0, 3.0]]);
        let c = from_rows(&[&[4.0, 5.0], &[5.0, 6.0]]);
        let m = sym_block(&[vec![Some(a), Some(b)], vec![Some(c)]], &[1, 2]);
        assert_eq!(m, from_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 5.0], &[3.0, 5.0, 6.0]]));
    }

    #[test]
    fn eigenvalues_sorted() {
        let m = from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = sym_eigenvalues(&m);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_infinite_condition() {
        let m = from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(condition_number(&m) > 1e15);
    }
}

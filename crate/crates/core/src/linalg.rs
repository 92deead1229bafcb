//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

/// Returns `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &Mat) -> Mat {
    (a + a.transpose()) * 0.5
}

pub fn symmetrize_in_place(a: &mut Mat) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
}

/// Largest absolute entry of `A - Aᵀ`.
pub fn asymmetry(a: &Mat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub fn check_symmetric(a: &Mat, tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let asym = asymmetry(a);
    let scale = 1.0 + a.amax();
    if asym > tol * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Sorted (ascending) eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(a: &Mat) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v
}

pub fn min_eigenvalue(a: &Mat) -> f64 {
    sym_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Smallest eigenvalue magnitude of a symmetric matrix.
pub fn min_abs_eigenvalue(a: &Mat) -> f64 {
    sym_eigenvalues(a).iter().fold(f64::INFINITY, |m, l| m.min(l.abs()))
}

pub fn max_eigenvalue(a: &Mat) -> f64 {
    sym_eigenvalues(a).last().copied().unwrap_or(0.0)
}

/// Spectral (operator 2-) norm.
pub fn op_norm(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().fold(0.0_f64, |m, &s| m.max(s))
}

pub fn min_singular_value(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().fold(f64::INFINITY, |m, &s| m.min(s))
}

pub fn is_psd(a: &Mat, tol: f64) -> bool {
    min_eigenvalue(a) >= -tol
}

pub fn diag(values: &[f64]) -> Mat {
    let n = values.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
}

/// Rank by singular values, relative threshold.
pub fn numerical_rank(a: &Mat, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.singular_values();
    let smax = sv.iter().fold(0.0_f64, |m, &s| m.max(s));
    sv.iter().filter(|&&s| s > rel_tol * smax.max(1.0)).count()
}

/// Builds a matrix from nested rows, checking they are rectangular.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    for r in rows {
        if r.len() != ncols {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                got: r.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn to_rows(a: &Mat) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

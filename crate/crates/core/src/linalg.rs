//! Thin wrappers over the dense complex kernels in `faer`.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = Mat<C64>;

/// Eigenvalues and (unnormalized) right eigenvectors of a general complex matrix.
pub fn eig(m: MatRef<'_, C64>) -> Result<(Vec<C64>, CMat)> {
    let evd = m.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

pub fn eigenvalues(m: MatRef<'_, C64>) -> Result<Vec<C64>> {
    m.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))
}

pub fn inverse(m: MatRef<'_, C64>) -> CMat {
    m.partial_piv_lu().inverse()
}

pub fn determinant(m: MatRef<'_, C64>) -> C64 {
    if m.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    m.determinant()
}

/// 2-norm condition number, `inf` for a numerically singular matrix.
pub fn cond2(m: MatRef<'_, C64>) -> f64 {
    match m.singular_values() {
        Ok(s) => {
            let max = s.iter().copied().fold(0.0_f64, f64::max);
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            if min > 0.0 {
                max / min
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

pub fn max_abs(m: MatRef<'_, C64>) -> f64 {
    let mut out = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

pub fn col_norm(m: MatRef<'_, C64>, j: usize) -> f64 {
    (0..m.nrows()).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt()
}

/// `a^† b` for two columns.
pub fn col_dot(a: MatRef<'_, C64>, ja: usize, b: MatRef<'_, C64>, jb: usize) -> C64 {
    (0..a.nrows()).map(|i| a[(i, ja)].conj() * b[(i, jb)]).sum()
}

/// Ordinary least squares `min |X beta - y|` through a QR factorization.
pub fn least_squares(design: &Mat<f64>, y: &[f64]) -> Vec<f64> {
    let n = design.nrows();
    let p = design.ncols();
    let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| y[i]);
    let qr = design.qr();
    use faer::linalg::solvers::SolveLstsq;
    qr.solve_lstsq_in_place(rhs.as_mut());
    (0..p).map(|i| rhs[(i, 0)]).collect()
}

/// Smallest-to-largest singular value ratio of a real design matrix.
pub fn rcond_real(design: &Mat<f64>) -> f64 {
    match design.singular_values() {
        Ok(s) => {
            let max = s.iter().copied().fold(0.0_f64, f64::max);
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            if max > 0.0 {
                min / max
            } else {
                0.0
            }
        }
        Err(_) => 0.0,
    }
}

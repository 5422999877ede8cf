//! Closed-form zero-mode candidate of the critical impurity chain.
//!
//! At `v1 = -w1` the uniform state with `(1, -i)` on every cell is annihilated
//! by the clean hopping, and the impurity block maps `(1, -i)` to
//! `(i d lambda^2 - i o lambda, lambda o - d lambda^2)`, which vanishes for
//! `lambda = 1` and `d = o`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, pt_operator, ChainSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpReport {
    pub residual_norm: f64,
    pub exists: bool,
    pub tol: f64,
    pub candidate_state: Vec<C64>,
}

/// `(1, -i) / sqrt(2 n_cells)` on every cell.
pub fn ep_candidate(n_cells: usize) -> Result<Vec<C64>> {
    if n_cells < 2 {
        return Err(Error::TooFewCells(n_cells));
    }
    let a = 1.0 / ((2 * n_cells) as f64).sqrt();
    Ok((0..n_cells).flat_map(|_| [C64::new(a, 0.0), C64::new(0.0, -a)]).collect())
}

/// Default residual tolerance, `1e-10 max |H_ij|`.
pub fn default_tol(spec: &ChainSpec) -> Result<f64> {
    Ok(1e-10 * build_hamiltonian(spec)?.max_abs())
}

pub fn check_ep(spec: &ChainSpec, tol: f64) -> Result<EpReport> {
    let h = build_hamiltonian(spec)?;
    let phi = ep_candidate(spec.n_cells)?;
    let m = h.matrix();
    let residual_norm = (0..h.dim())
        .map(|i| (0..h.dim()).map(|j| m[(i, j)] * phi[j]).sum::<C64>().norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(EpReport {
        residual_norm,
        exists: residual_norm < tol,
        tol,
        candidate_state: phi,
    })
}

/// Image of a state under PT: `P conj(v)`.
pub fn pt_image(spec: &ChainSpec, v: &[C64]) -> Vec<C64> {
    let p = pt_operator(spec);
    (0..p.nrows())
        .map(|i| (0..p.ncols()).map(|j| p[(i, j)] * v[j].conj()).sum())
        .collect()
}

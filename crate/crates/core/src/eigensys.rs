//! Biorthogonal eigensystem of the single-particle Hamiltonian, PT phase
//! classification and the half-filled many-body ground state.
//!
//! Left eigenvectors are taken from the inverse-adjoint of the right
//! eigenvector matrix, so `left^† right = 1` holds to rounding whenever the
//! right eigenvectors are linearly independent. Near an exceptional point the
//! right eigenvectors become nearly parallel; this shows up in `overlap_cond`
//! and in the per-state phase rigidity.

use std::cmp::Ordering;

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{build_hamiltonian, ChainSpec, Hamiltonian};

/// Relative realness tolerance; the absolute tolerance is this times `max |H_ij|`.
pub const DEFAULT_REALNESS_REL_TOL: f64 = 1e-8;

/// Above this right-eigenvector condition number the eigenbasis is treated as
/// sitting on an exceptional point.
pub const DEFAULT_EP_COND_THRESHOLD: f64 = 1e6;

/// Relative step `eta` used to approach an exceptional point from the
/// PT-preserving side, `lambda -> lambda (1 - eta)`.
pub const DEFAULT_EP_ETA: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct BiorthSystem {
    pub energies: Vec<C64>,
    pub right_vecs: CMat,
    pub left_vecs: CMat,
    pub overlap_cond: f64,
    pub phase_rigidity: Vec<f64>,
    pub realness_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PtPhase {
    Preserved,
    Broken,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyBodyState {
    pub occupied: Vec<usize>,
    pub total_energy: C64,
}

fn energy_order(a: &(usize, C64), b: &(usize, C64)) -> Ordering {
    a.1.re
        .total_cmp(&b.1.re)
        .then(a.1.im.total_cmp(&b.1.im))
        .then(a.0.cmp(&b.0))
}

pub fn diagonalize(h: &Hamiltonian, realness_tol: f64) -> Result<BiorthSystem> {
    let m = h.matrix();
    if !(0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite())) {
        return Err(Error::Eigen("Hamiltonian has non-finite entries".into()));
    }
    let n = h.dim();
    let (values, vectors) = linalg::eig(m)?;

    let mut order: Vec<(usize, C64)> = values.into_iter().enumerate().collect();
    order.sort_by(energy_order);

    let energies: Vec<C64> = order.iter().map(|&(_, e)| e).collect();
    let right = Mat::<C64>::from_fn(n, n, |i, j| vectors[(i, order[j].0)]);
    let right = orthonormalize_degenerate(normalize_columns(right), &energies, DEGENERACY_REL_TOL * h.max_abs());

    let overlap_cond = linalg::cond2(right.as_ref());
    if !overlap_cond.is_finite() {
        return Err(Error::EpDegenerate { overlap_cond });
    }
    let inv = linalg::inverse(right.as_ref());
    let left = inv.adjoint().to_owned();
    if !(0..n).all(|j| (0..n).all(|i| left[(i, j)].re.is_finite() && left[(i, j)].im.is_finite())) {
        return Err(Error::EpDegenerate { overlap_cond });
    }

    let phase_rigidity = (0..n)
        .map(|j| {
            let ov = linalg::col_dot(left.as_ref(), j, right.as_ref(), j).norm();
            ov / (linalg::col_norm(left.as_ref(), j) * linalg::col_norm(right.as_ref(), j))
        })
        .collect();

    Ok(BiorthSystem {
        energies,
        right_vecs: right,
        left_vecs: left,
        overlap_cond,
        phase_rigidity,
        realness_tol,
    })
}

/// Eigenvalues closer than this (relative to `max |H_ij|`) span one eigenspace.
/// Far below the `sqrt(eps)` splitting of a coalesced pair, so exceptional
/// points are never merged.
const DEGENERACY_REL_TOL: f64 = 1e-11;

/// Modified Gram-Schmidt inside each cluster of degenerate eigenvalues. Any
/// basis of a degenerate eigenspace is valid; an orthonormal one keeps the
/// Hermitian limit exactly self-dual.
fn orthonormalize_degenerate(mut m: CMat, energies: &[C64], tol: f64) -> CMat {
    let n = energies.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (energies[end] - energies[start]).norm() <= tol {
            end += 1;
        }
        for j in start + 1..end {
            for k in start..j {
                let proj = linalg::col_dot(m.as_ref(), k, m.as_ref(), j);
                for i in 0..m.nrows() {
                    let v = m[(i, k)];
                    m[(i, j)] -= proj * v;
                }
            }
            let norm = linalg::col_norm(m.as_ref(), j);
            for i in 0..m.nrows() {
                m[(i, j)] /= norm;
            }
        }
        start = end;
    }
    m
}

fn normalize_columns(mut m: CMat) -> CMat {
    for j in 0..m.ncols() {
        let norm = linalg::col_norm(m.as_ref(), j);
        if norm > 0.0 {
            for i in 0..m.nrows() {
                m[(i, j)] /= norm;
            }
        }
    }
    m
}

impl BiorthSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn max_imag(&self) -> f64 {
        self.energies.iter().map(|e| e.im.abs()).fold(0.0, f64::max)
    }

    pub fn min_phase_rigidity(&self) -> f64 {
        self.phase_rigidity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_abs_energy(&self) -> f64 {
        self.energies.iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Largest entry of `left^† right - 1`.
    pub fn biorthonormality_defect(&self) -> f64 {
        let g = self.left_vecs.adjoint() * &self.right_vecs;
        let n = self.dim();
        let mut out = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                out = out.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        out
    }

    /// Largest entry of `H R - R diag(E)`.
    pub fn eigen_residual(&self, h: MatRef<'_, C64>) -> f64 {
        let hr = h * &self.right_vecs;
        let n = self.dim();
        let mut out = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                out = out.max((hr[(i, j)] - self.right_vecs[(i, j)] * self.energies[j]).norm());
            }
        }
        out
    }

    pub fn classify(&self) -> PtPhase {
        classify_pt(self, self.realness_tol)
    }
}

/// Distance between the spectrum and its complex conjugate, matched greedily:
/// the largest `min_m |E_n - conj(E_m)|` over `n`.
pub fn conjugate_pairing_defect(energies: &[C64]) -> f64 {
    energies
        .iter()
        .map(|e| {
            energies
                .iter()
                .map(|f| (e - f.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn classify_pt(sys: &BiorthSystem, realness_tol: f64) -> PtPhase {
    if sys.max_imag() < realness_tol {
        PtPhase::Preserved
    } else {
        PtPhase::Broken
    }
}

/// Half filling: the `dim / 2` orbitals with lowest real energy. Orbitals are
/// already sorted, so a coalesced pair at the Fermi level contributes its
/// lower-index member.
pub fn ground_state(sys: &BiorthSystem) -> Result<ManyBodyState> {
    if classify_pt(sys, sys.realness_tol) == PtPhase::Broken {
        return Err(Error::PtBroken { max_im: sys.max_imag() });
    }
    let n_occ = sys.dim() / 2;
    let occupied: Vec<usize> = (0..n_occ).collect();
    let total_energy = occupied.iter().map(|&i| sys.energies[i]).sum();
    Ok(ManyBodyState {
        occupied,
        total_energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub realness_rel_tol: f64,
    pub ep_cond_threshold: f64,
    /// `None` disables the exceptional-point approach and solves exactly at
    /// the requested parameters.
    pub ep_eta: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            realness_rel_tol: DEFAULT_REALNESS_REL_TOL,
            ep_cond_threshold: DEFAULT_EP_COND_THRESHOLD,
            ep_eta: Some(DEFAULT_EP_ETA),
        }
    }
}

impl SolveOptions {
    pub fn exact() -> Self {
        Self {
            ep_eta: None,
            ..Self::default()
        }
    }
}

/// Eigensystem and half-filled ground state of one chain.
#[derive(Debug, Clone)]
pub struct SolvedChain {
    /// The spec actually diagonalized; differs from the request only when the
    /// exceptional point was approached from the PT-preserving side.
    pub spec_used: ChainSpec,
    pub hamiltonian: Hamiltonian,
    pub system: BiorthSystem,
    pub state: ManyBodyState,
    /// Diagnostics of the exact-parameter eigenbasis before any approach.
    pub raw_overlap_cond: f64,
    pub ep_approached: bool,
}

fn realness_tol_for(h: &Hamiltonian, opts: &SolveOptions) -> f64 {
    opts.realness_rel_tol * h.max_abs().max(f64::MIN_POSITIVE)
}

/// Build, diagonalize and fill a chain. When the eigenbasis at the requested
/// parameters is singular to working precision (an exceptional point), the
/// biorthogonal quantities are evaluated at `lambda (1 - eta)`, the nearby
/// point on the PT-preserving side where left and right eigenvectors exist.
pub fn solve_chain(spec: &ChainSpec, opts: &SolveOptions) -> Result<SolvedChain> {
    let h = build_hamiltonian(spec)?;
    let tol = realness_tol_for(&h, opts);
    let first = diagonalize(&h, tol);
    let raw_overlap_cond = match &first {
        Ok(sys) => sys.overlap_cond,
        Err(Error::EpDegenerate { overlap_cond }) => *overlap_cond,
        Err(_) => f64::NAN,
    };
    let at_ep = match &first {
        Ok(sys) => sys.overlap_cond > opts.ep_cond_threshold,
        Err(Error::EpDegenerate { .. }) => true,
        Err(_) => false,
    };
    let can_approach = spec.impurities.iter().any(|imp| imp.lambda != 0.0);

    if let (true, true, Some(eta)) = (at_ep, can_approach, opts.ep_eta) {
        let shifted = spec.with_lambda_scaled(1.0 - eta);
        let h2 = build_hamiltonian(&shifted)?;
        let sys = diagonalize(&h2, realness_tol_for(&h2, opts))?;
        let state = ground_state(&sys)?;
        return Ok(SolvedChain {
            spec_used: shifted,
            hamiltonian: h2,
            system: sys,
            state,
            raw_overlap_cond,
            ep_approached: true,
        });
    }

    let sys = first?;
    let state = ground_state(&sys)?;
    Ok(SolvedChain {
        spec_used: spec.clone(),
        hamiltonian: h,
        system: sys,
        state,
        raw_overlap_cond,
        ep_approached: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint {
    pub size: usize,
    pub energy: f64,
    pub energy_imag: f64,
    pub overlap_cond: f64,
    pub min_phase_rigidity: f64,
}

/// Ground-state energy `Re E(L)` for each chain length, with the impurity
/// positions held fixed in the symmetric coordinate.
pub fn energy_vs_size(template: &ChainSpec, sizes: &[usize], opts: &SolveOptions) -> Result<Vec<EnergyPoint>> {
    sizes
        .par_iter()
        .map(|&size| {
            let spec = template.with_n_cells(size);
            let h = build_hamiltonian(&spec).map_err(|e| Error::at_size(size, e))?;
            let tol = realness_tol_for(&h, opts);
            // Only eigenvalues enter the energy; the eigenbasis is kept for the
            // diagnostics columns and may legitimately be degenerate.
            let values = linalg::eigenvalues(h.matrix()).map_err(|e| Error::at_size(size, e))?;
            let max_im = values.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
            if max_im >= tol {
                return Err(Error::at_size(size, Error::PtBroken { max_im }));
            }
            let mut sorted: Vec<(usize, C64)> = values.into_iter().enumerate().collect();
            sorted.sort_by(energy_order);
            let total: C64 = sorted[..size].iter().map(|&(_, e)| e).sum();
            let (overlap_cond, min_phase_rigidity) = match diagonalize(&h, tol) {
                Ok(sys) => (sys.overlap_cond, sys.min_phase_rigidity()),
                Err(Error::EpDegenerate { overlap_cond }) => (overlap_cond, 0.0),
                Err(e) => return Err(Error::at_size(size, e)),
            };
            Ok(EnergyPoint {
                size,
                energy: total.re,
                energy_imag: total.im,
                overlap_cond,
                min_phase_rigidity,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Boundary, ImpuritySpec};
    use std::f64::consts::PI;

    fn impurity_ring(n: usize, lambda: f64) -> ChainSpec {
        ChainSpec::critical(n, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, lambda, 3.0))
    }

    fn solve_exact(spec: &ChainSpec) -> BiorthSystem {
        let h = build_hamiltonian(spec).unwrap();
        diagonalize(&h, 1e-8 * h.max_abs()).unwrap()
    }

    #[test]
    fn hermitian_chain_has_unit_phase_rigidity() {
        let sys = solve_exact(&impurity_ring(32, 0.0));
        for r in &sys.phase_rigidity {
            assert!((r - 1.0).abs() < 1e-10, "rigidity {r}");
        }
    }

    #[test]
    fn clean_ring_matches_dispersion() {
        let n = 32;
        let sys = solve_exact(&ChainSpec::critical(n, Boundary::Pbc));
        let mut expected: Vec<f64> = (0..n)
            .flat_map(|m| {
                let k = 2.0 * PI * m as f64 / n as f64;
                let e = 2.0 * (k / 2.0).sin().abs();
                [e, -e]
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        for (e, x) in sys.energies.iter().zip(&expected) {
            assert!((e.re - x).abs() < 1e-10 && e.im.abs() < 1e-10);
        }
    }

    #[test]
    fn exact_ep_shows_small_rigidity() {
        let sys = solve_exact(&impurity_ring(32, 1.0));
        assert!(sys.min_phase_rigidity() < 0.1, "{}", sys.min_phase_rigidity());
    }

    #[test]
    fn impurity_ring_stays_real_up_to_lambda_one() {
        for lambda in [0.0, 0.2, 0.5, 0.8, 0.95, 1.0] {
            let h = build_hamiltonian(&impurity_ring(64, lambda)).unwrap();
            let sys = diagonalize(&h, 1e-8 * h.max_abs()).unwrap();
            assert_eq!(sys.classify(), PtPhase::Preserved, "lambda {lambda}");
        }
    }

    #[test]
    fn weak_diagonal_breaks_pt() {
        // On an odd, centred open chain the spectrum leaves the real axis once alpha - beta > 1.
        let spec = ChainSpec::critical(33, Boundary::Obc).with_impurity(ImpuritySpec::tuned(0, 1.0, 2.0, 0.2));
        let sys = solve_exact(&spec);
        assert_eq!(sys.classify(), PtPhase::Broken);
        assert!(conjugate_pairing_defect(&sys.energies) < 1e-8);
        assert!(matches!(ground_state(&sys), Err(Error::PtBroken { .. })));
    }

    #[test]
    fn biorthonormal_and_eigen_residual() {
        let spec = impurity_ring(24, 0.7);
        let h = build_hamiltonian(&spec).unwrap();
        let sys = diagonalize(&h, 1e-8 * h.max_abs()).unwrap();
        assert!(sys.overlap_cond < 1e6);
        assert!(sys.biorthonormality_defect() < 1e-8);
        assert!(sys.eigen_residual(h.matrix()) < 1e-8 * h.max_abs());
    }

    #[test]
    fn ep_ground_state_contains_zero_mode() {
        let sys = solve_exact(&impurity_ring(32, 1.0));
        let gs = ground_state(&sys).unwrap();
        let zero = (0..sys.dim())
            .min_by(|&a, &b| sys.energies[a].norm().total_cmp(&sys.energies[b].norm()))
            .unwrap();
        // The coalesced pair straddles the Fermi level; one member is filled.
        let partner = if gs.occupied.contains(&zero) { zero } else { zero - 1 };
        assert!(gs.occupied.contains(&partner));
        assert!(sys.energies[partner].norm() < 1e-6);
        assert_eq!(gs.occupied.len(), 32);
    }

    #[test]
    fn ground_energy_density() {
        // Re E(L) = -(4/pi) L + O(1/L) for the clean ring.
        for n in [64usize, 128] {
            let sys = solve_exact(&ChainSpec::critical(n, Boundary::Pbc));
            let e = ground_state(&sys).unwrap().total_energy.re;
            assert!((e + 4.0 / PI * n as f64).abs() < 2.0 / n as f64, "{n}: {e}");
        }
    }

    #[test]
    fn solve_chain_approaches_exact_ep() {
        let solved = solve_chain(&impurity_ring(64, 1.0), &SolveOptions::default()).unwrap();
        assert!(solved.ep_approached);
        assert!(solved.raw_overlap_cond > DEFAULT_EP_COND_THRESHOLD);
        assert!(solved.system.overlap_cond < DEFAULT_EP_COND_THRESHOLD);
        assert!(solved.system.biorthonormality_defect() < 1e-6);

        let plain = solve_chain(&impurity_ring(64, 0.5), &SolveOptions::default()).unwrap();
        assert!(!plain.ep_approached);
        assert_eq!(plain.spec_used, impurity_ring(64, 0.5));
    }

    #[test]
    fn energy_sweep_is_ordered_and_tagged() {
        let pts = energy_vs_size(&impurity_ring(8, 1.0), &[32, 16, 24], &SolveOptions::default()).unwrap();
        assert_eq!(pts.iter().map(|p| p.size).collect::<Vec<_>>(), vec![32, 16, 24]);
        let bad = ChainSpec::critical(8, Boundary::Obc).with_impurity(ImpuritySpec::tuned(0, 1.0, 2.0, 0.2));
        match energy_vs_size(&bad, &[17], &SolveOptions::default()) {
            Err(Error::AtSize { size, .. }) => assert_eq!(size, 17),
            other => panic!("expected tagged error, got {other:?}"),
        }
    }
}

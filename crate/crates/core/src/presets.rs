//! Chains used by the figure presets and the acceptance suite.
//!
//! Every impurity sits at the centre cell `x = 0` and cuts start at the first
//! cell of the chain. Open chains use an odd number of cells so the centred
//! impurity is mapped onto itself by the chain reflection.

use crate::model::{Boundary, ChainSpec, ImpuritySpec};

pub const U: f64 = 3.0;
pub const ALPHA: f64 = 7.0 / 5.0;
pub const BETA: f64 = 2.0 / 5.0;

pub const ENTROPY_CELLS_RING: usize = 128;
pub const ENTROPY_CELLS_OPEN: usize = 129;
pub const FIDELITY_CELLS_RING: usize = 64;
pub const FIDELITY_CELLS_OPEN: usize = 65;
pub const FIDELITY_STEPS: usize = 1000;

pub fn ring(n_cells: usize, lambda: f64) -> ChainSpec {
    ChainSpec::critical(n_cells, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, lambda, U))
}

pub fn twisted(n_cells: usize, lambda: f64, phi: f64) -> ChainSpec {
    let mut spec = ring(n_cells, lambda);
    spec.boundary = Boundary::Tbc;
    spec.with_phi(phi)
}

pub fn open(n_cells: usize, lambda: f64) -> ChainSpec {
    ChainSpec::critical(n_cells, Boundary::Obc).with_impurity(ImpuritySpec::uniform(0, lambda, U))
}

pub fn open_tuned(n_cells: usize, lambda: f64) -> ChainSpec {
    ChainSpec::critical(n_cells, Boundary::Obc).with_impurity(ImpuritySpec::tuned(0, lambda, ALPHA, BETA))
}

/// `32, 48, ..., 256`.
pub fn ring_energy_sizes() -> Vec<usize> {
    crate::scaling::default_energy_sizes()
}

/// `33, 49, ..., 257`.
pub fn open_energy_sizes() -> Vec<usize> {
    (33..=257).step_by(16).collect()
}

/// `0, pi/4, ..., 2 pi`.
pub fn tbc_phis() -> Vec<f64> {
    (0..=8).map(|k| k as f64 * std::f64::consts::FRAC_PI_4).collect()
}

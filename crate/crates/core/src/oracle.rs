//! Brute-force occupation-basis reference for chains of at most 12 sites.
//!
//! Sites are Jordan-Wigner ordered by index; a configuration is a bitmask and
//! `c_j` acting on it picks up `(-1)^(occupied sites below j)`.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::Hamiltonian;

pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub n_sites: usize,
    pub n_particles: usize,
    /// Occupation bitmasks in increasing order.
    pub basis: Vec<u32>,
    pub amplitudes: Vec<C64>,
    pub energy: C64,
}

fn guard(n_sites: usize) -> Result<()> {
    if n_sites > MAX_SITES {
        Err(Error::DimensionGuard {
            sites: n_sites,
            max: MAX_SITES,
        })
    } else {
        Ok(())
    }
}

/// All `n`-particle configurations of `sites` sites, ascending.
pub fn fock_basis(n_sites: usize, n_particles: usize) -> Result<Vec<u32>> {
    guard(n_sites)?;
    if n_particles > n_sites {
        return Err(Error::DimensionMismatch(format!("{n_particles} particles on {n_sites} sites")));
    }
    Ok((0u32..1 << n_sites).filter(|m| m.count_ones() as usize == n_particles).collect())
}

fn parity_below(mask: u32, site: usize) -> f64 {
    if (mask & ((1u32 << site) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_i^dag c_j |mask>` as `(sign, new mask)`, or `None` if it vanishes.
fn hop(mask: u32, i: usize, j: usize) -> Option<(f64, u32)> {
    if mask & (1 << j) == 0 {
        return None;
    }
    let s1 = parity_below(mask, j);
    let m1 = mask & !(1 << j);
    if m1 & (1 << i) != 0 {
        return None;
    }
    let s2 = parity_below(m1, i);
    Some((s1 * s2, m1 | (1 << i)))
}

/// Many-body matrix of `sum_ij h_ij c_i^dag c_j` in the given basis.
pub fn many_body_matrix(h: &Hamiltonian, basis: &[u32]) -> CMat {
    let n = h.dim();
    let index = |m: u32| basis.binary_search(&m).expect("hop preserves particle number");
    let mut out = Mat::<C64>::zeros(basis.len(), basis.len());
    for (col, &mask) in basis.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let hij = h.matrix()[(i, j)];
                if hij == C64::new(0.0, 0.0) {
                    continue;
                }
                if let Some((sign, m)) = hop(mask, i, j) {
                    out[(index(m), col)] += hij * sign;
                }
            }
        }
    }
    out
}

fn fix_phase(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Eigenstate of the many-body Hamiltonian with the lowest real energy,
/// normalized with its largest amplitude real and positive.
pub fn fock_ground_state(h: &Hamiltonian, n_particles: usize) -> Result<FockState> {
    let basis = fock_basis(h.dim(), n_particles)?;
    let hm = many_body_matrix(h, &basis);
    let (values, vectors) = linalg::eig(hm.as_ref())?;
    let k = (0..values.len())
        .min_by(|&a, &b| values[a].re.total_cmp(&values[b].re).then(a.cmp(&b)))
        .expect("basis is never empty");
    let mut amplitudes: Vec<C64> = (0..basis.len()).map(|i| vectors[(i, k)]).collect();
    fix_phase(&mut amplitudes);
    Ok(FockState {
        n_sites: h.dim(),
        n_particles,
        basis,
        amplitudes,
        energy: values[k],
    })
}

/// Slater determinant `prod_n (sum_i orbitals[i, n] c_i^dag) |0>`.
pub fn slater_state(orbitals: &CMat) -> Result<FockState> {
    let n_sites = orbitals.nrows();
    let n = orbitals.ncols();
    let basis = fock_basis(n_sites, n)?;
    let amplitudes = basis
        .iter()
        .map(|&mask| {
            let sites: Vec<usize> = (0..n_sites).filter(|s| mask & (1 << s) != 0).collect();
            let m = Mat::<C64>::from_fn(n, n, |r, c| orbitals[(sites[r], c)]);
            linalg::determinant(m.as_ref())
        })
        .collect();
    Ok(FockState {
        n_sites,
        n_particles: n,
        basis,
        amplitudes,
        energy: C64::new(f64::NAN, 0.0),
    })
}

/// Standard inner product `<a|b>`; zero across particle-number sectors.
pub fn fock_overlap(a: &FockState, b: &FockState) -> Result<C64> {
    if a.n_sites != b.n_sites {
        return Err(Error::DimensionMismatch(format!("{} vs {} sites", a.n_sites, b.n_sites)));
    }
    if a.n_particles != b.n_particles {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

/// `G_ij = <psi| c_i^dag c_j |psi>` for a normalized state.
pub fn fock_correlation(state: &FockState) -> CMat {
    let n = state.n_sites;
    let mut g = Mat::<C64>::zeros(n, n);
    for (col, &mask) in state.basis.iter().enumerate() {
        let amp = state.amplitudes[col];
        for i in 0..n {
            for j in 0..n {
                if let Some((sign, m)) = hop(mask, i, j) {
                    let row = state.basis.binary_search(&m).expect("same sector");
                    g[(i, j)] += state.amplitudes[row].conj() * amp * sign;
                }
            }
        }
    }
    g
}

/// Von Neumann entropy of the reduced density matrix on `cut`.
pub fn fock_entropy(state: &FockState, cut: &[usize]) -> Result<f64> {
    guard(state.n_sites)?;
    let n = state.n_sites;
    if cut.iter().any(|&s| s >= n) {
        return Err(Error::InvalidCut(format!("site outside chain of {n} sites")));
    }
    let cut_mask: u32 = cut.iter().fold(0, |m, &s| m | (1 << s));
    let rest: Vec<usize> = (0..n).filter(|s| cut_mask & (1 << s) == 0).collect();
    let n_a = cut_mask.count_ones() as usize;

    // Moving the cut modes in front of the rest reorders the creation
    // operators; each (rest, cut) pair out of order costs a sign.
    let compress = |mask: u32, sites: &[usize]| -> usize {
        sites
            .iter()
            .enumerate()
            .filter(|(_, &s)| mask & (1 << s) != 0)
            .fold(0usize, |acc, (k, _)| acc | (1 << k))
    };
    let cut_sorted: Vec<usize> = (0..n).filter(|s| cut_mask & (1 << s) != 0).collect();
    let mut psi = Mat::<C64>::zeros(1 << n_a, 1 << rest.len());
    for (&mask, &amp) in state.basis.iter().zip(&state.amplitudes) {
        let mut swaps = 0u32;
        for &b in &rest {
            if mask & (1 << b) != 0 {
                swaps += (mask & cut_mask & !((1u32 << (b + 1)) - 1)).count_ones();
            }
        }
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        psi[(compress(mask, &cut_sorted), compress(mask, &rest))] += amp * sign;
    }
    let s = psi
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(s.iter()
        .map(|&sv| {
            let p = sv * sv;
            if p > 0.0 {
                -p * p.ln()
            } else {
                0.0
            }
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, Boundary, ChainSpec};

    #[test]
    fn basis_size_and_order() {
        let b = fock_basis(6, 3).unwrap();
        assert_eq!(b.len(), 20);
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(fock_basis(14, 7), Err(Error::DimensionGuard { sites: 14, max: 12 })));
    }

    #[test]
    fn free_fermion_energy() {
        let mut spec = ChainSpec::critical(2, Boundary::Obc);
        spec.v1 = 1.5;
        let h = build_hamiltonian(&spec).unwrap();
        let gs = fock_ground_state(&h, 2).unwrap();
        let mut e: Vec<f64> = linalg::eigenvalues(h.matrix()).unwrap().iter().map(|z| z.re).collect();
        e.sort_by(f64::total_cmp);
        assert!((gs.energy.re - (e[0] + e[1])).abs() < 1e-10);
    }

    #[test]
    fn vacuum() {
        let h = build_hamiltonian(&ChainSpec::critical(2, Boundary::Pbc)).unwrap();
        let gs = fock_ground_state(&h, 0).unwrap();
        assert_eq!(gs.basis, vec![0]);
        assert!(gs.energy.norm() < 1e-15);
        assert!((gs.amplitudes[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_state_has_no_entropy() {
        let state = FockState {
            n_sites: 4,
            n_particles: 2,
            basis: fock_basis(4, 2).unwrap(),
            amplitudes: fock_basis(4, 2)
                .unwrap()
                .iter()
                .map(|&m| if m == 0b0101 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                .collect(),
            energy: C64::new(0.0, 0.0),
        };
        assert!(fock_entropy(&state, &[0, 1]).unwrap().abs() < 1e-15);
        assert!(fock_entropy(&state, &[2]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn overlaps() {
        let h = build_hamiltonian(&ChainSpec::critical(3, Boundary::Obc)).unwrap();
        let a = fock_ground_state(&h, 3).unwrap();
        assert!((fock_overlap(&a, &a).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
        let b = fock_ground_state(&h, 2).unwrap();
        assert_eq!(fock_overlap(&a, &b).unwrap(), C64::new(0.0, 0.0));
        let h4 = build_hamiltonian(&ChainSpec::critical(2, Boundary::Obc)).unwrap();
        let c = fock_ground_state(&h4, 2).unwrap();
        assert!(matches!(fock_overlap(&a, &c), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn slater_matches_ground_state() {
        let h = build_hamiltonian(&ChainSpec::critical(3, Boundary::Obc)).unwrap();
        let gs = fock_ground_state(&h, 3).unwrap();
        let ev = h.matrix().self_adjoint_eigen(faer::Side::Lower).unwrap();
        let orb = Mat::<C64>::from_fn(6, 3, |i, j| ev.U()[(i, j)]);
        let sl = slater_state(&orb).unwrap();
        let norm = fock_overlap(&sl, &sl).unwrap().re;
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((fock_overlap(&gs, &sl).unwrap().norm() - 1.0).abs() < 1e-10);
    }
}

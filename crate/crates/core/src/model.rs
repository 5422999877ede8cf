//! SSH chain with PT-symmetric non-Hermitian impurities.
//!
//! Sites are ordered cell-major with sublattice A before B, so site `2c` is
//! `A_c` and `2c + 1` is `B_c` for internal cell index `c` in `[0, n_cells)`.
//! Impurity positions are given in the symmetric coordinate `x`, where the
//! chain runs over `x = -n_cells/2 ..` and `x = 0` is the internal cell
//! `n_cells / 2`. Keeping `x` fixed while changing `n_cells` keeps the
//! impurity centred during size sweeps.

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Boundary {
    Pbc,
    Obc,
    Tbc,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Pbc => "PBC",
            Boundary::Obc => "OBC",
            Boundary::Tbc => "TBC",
        }
    }

    /// Whether the chain is closed into a ring.
    pub fn is_closed(self) -> bool {
        !matches!(self, Boundary::Obc)
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PBC" => Ok(Boundary::Pbc),
            "OBC" => Ok(Boundary::Obc),
            "TBC" => Ok(Boundary::Tbc),
            other => Err(Error::InvalidSpec(format!("unknown boundary '{other}'"))),
        }
    }
}

/// On-cell impurity block `[[i d l^2, l o], [l o, -i d l^2]]` with `d = diag`,
/// `o = offdiag`, `l = lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpuritySpec {
    pub cell: i64,
    pub lambda: f64,
    pub diag: f64,
    pub offdiag: f64,
}

impl ImpuritySpec {
    /// Single-strength impurity with `diag = offdiag = u`.
    pub fn uniform(cell: i64, lambda: f64, u: f64) -> Self {
        Self {
            cell,
            lambda,
            diag: u,
            offdiag: u,
        }
    }

    /// Generalized impurity with independent diagonal (`alpha`) and
    /// off-diagonal (`beta`) strengths.
    pub fn tuned(cell: i64, lambda: f64, alpha: f64, beta: f64) -> Self {
        Self {
            cell,
            lambda,
            diag: alpha,
            offdiag: beta,
        }
    }

    pub fn block(&self) -> [[C64; 2]; 2] {
        let l = self.lambda;
        let on = C64::new(0.0, self.diag * l * l);
        let off = C64::new(self.offdiag * l, 0.0);
        [[on, off], [off, -on]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_cells: usize,
    pub v1: f64,
    pub w1: f64,
    #[serde(default)]
    pub impurities: Vec<ImpuritySpec>,
    pub boundary: Boundary,
    #[serde(default)]
    pub phi: f64,
}

impl ChainSpec {
    /// Critical chain `v1 = -w1 = 1` without impurities.
    pub fn critical(n_cells: usize, boundary: Boundary) -> Self {
        Self {
            n_cells,
            v1: 1.0,
            w1: -1.0,
            impurities: Vec::new(),
            boundary,
            phi: 0.0,
        }
    }

    pub fn with_impurity(mut self, imp: ImpuritySpec) -> Self {
        self.impurities.push(imp);
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_n_cells(&self, n_cells: usize) -> Self {
        Self {
            n_cells,
            ..self.clone()
        }
    }

    /// Same chain with every impurity moved to `lambda`.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for imp in &mut out.impurities {
            imp.lambda = lambda;
        }
        out
    }

    /// Same chain with every impurity strength parameter scaled by `factor`.
    pub fn with_lambda_scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for imp in &mut out.impurities {
            imp.lambda *= factor;
        }
        out
    }

    pub fn dim(&self) -> usize {
        2 * self.n_cells
    }

    /// Lowest symmetric coordinate `x` of the chain.
    pub fn x_min(&self) -> i64 {
        -((self.n_cells / 2) as i64)
    }

    pub fn x_max(&self) -> i64 {
        self.x_min() + self.n_cells as i64 - 1
    }

    /// Internal cell index of symmetric coordinate `x`.
    pub fn cell_index(&self, x: i64) -> Result<usize> {
        if x < self.x_min() || x > self.x_max() {
            return Err(Error::ImpurityOutOfRange {
                cell: x,
                min: self.x_min(),
                max: self.x_max(),
                n_cells: self.n_cells,
            });
        }
        Ok((x - self.x_min()) as usize)
    }

    pub fn impurity_cells(&self) -> Result<Vec<usize>> {
        self.impurities.iter().map(|i| self.cell_index(i.cell)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 2 {
            return Err(Error::TooFewCells(self.n_cells));
        }
        for (name, v) in [("v1", self.v1), ("w1", self.w1), ("phi", self.phi)] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} is not finite")));
            }
        }
        if self.boundary == Boundary::Obc && self.phi != 0.0 {
            return Err(Error::InvalidSpec("phi must be 0 for OBC".into()));
        }
        let mut seen = Vec::with_capacity(self.impurities.len());
        for imp in &self.impurities {
            if ![imp.lambda, imp.diag, imp.offdiag].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidSpec(format!("impurity at x={} has non-finite parameters", imp.cell)));
            }
            self.cell_index(imp.cell)?;
            if seen.contains(&imp.cell) {
                return Err(Error::DuplicateImpurity(imp.cell));
            }
            seen.push(imp.cell);
        }
        Ok(())
    }

    /// Stable hex digest of the canonical JSON form, used to tag output files.
    pub fn spec_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("ChainSpec serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Dense single-particle Hamiltonian in the cell-major (A, B) site basis.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: CMat,
}

impl Hamiltonian {
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian must be square with even dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_cells(&self) -> usize {
        self.dim() / 2
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(self.matrix())
    }

    /// Largest entry of `H - H^†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut out = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                out = out.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }
}

pub fn build_hamiltonian(spec: &ChainSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    let n = spec.n_cells;
    let dim = spec.dim();
    let mut h = Mat::<C64>::zeros(dim, dim);
    let v1 = C64::new(spec.v1, 0.0);
    let w1 = C64::new(spec.w1, 0.0);

    for c in 0..n {
        let (a, b) = (2 * c, 2 * c + 1);
        h[(b, a)] += v1;
        h[(a, b)] += v1;
        if c + 1 < n {
            let a_next = 2 * (c + 1);
            h[(a_next, b)] += w1;
            h[(b, a_next)] += w1;
        }
    }

    // Closing bond between B of the last cell and A of the first.
    if spec.boundary.is_closed() {
        let phase = match spec.boundary {
            Boundary::Tbc => C64::from_polar(1.0, spec.phi),
            _ => C64::new(1.0, 0.0),
        };
        let b_last = dim - 1;
        h[(0, b_last)] += w1 * phase;
        h[(b_last, 0)] += w1 * phase.conj();
    }

    for imp in &spec.impurities {
        let c = spec.cell_index(imp.cell)?;
        let blk = imp.block();
        for (r, row) in blk.iter().enumerate() {
            for (s, val) in row.iter().enumerate() {
                h[(2 * c + r, 2 * c + s)] += *val;
            }
        }
    }

    Hamiltonian::from_matrix(h)
}

/// Parity partner of every cell: reflection about the chain centre for OBC,
/// inversion about the first impurity (cell `x = 0` when there is none) on a
/// ring.
fn parity_cell_map(spec: &ChainSpec) -> Vec<usize> {
    let n = spec.n_cells.max(1);
    match spec.boundary {
        Boundary::Obc => (0..n).map(|c| n - 1 - c).collect(),
        _ => {
            let centre = spec
                .impurities
                .first()
                .and_then(|imp| spec.cell_index(imp.cell).ok())
                .unwrap_or_else(|| spec.cell_index(0).unwrap_or(0));
            (0..n).map(|c| (2 * centre + n - c % n) % n).collect()
        }
    }
}

/// Permutation matrix of the parity part of PT: sublattice swap combined with
/// the spatial reflection that maps the bond pattern onto itself. PT acts as
/// `H -> P conj(H) P`.
pub fn pt_operator(spec: &ChainSpec) -> CMat {
    let n = spec.n_cells.max(1);
    let map = parity_cell_map(spec);
    let mut p = Mat::<C64>::zeros(2 * n, 2 * n);
    for (c, &pc) in map.iter().enumerate() {
        p[(2 * pc + 1, 2 * c)] = C64::new(1.0, 0.0);
        p[(2 * pc, 2 * c + 1)] = C64::new(1.0, 0.0);
    }
    p
}

/// Largest entry of `P conj(H) P - H`.
pub fn pt_defect(spec: &ChainSpec, h: &Hamiltonian) -> f64 {
    let p = pt_operator(spec);
    let conj_h = Mat::<C64>::from_fn(h.dim(), h.dim(), |i, j| h.matrix()[(i, j)].conj());
    let transformed = &p * &conj_h * &p;
    let diff = &transformed - h.matrix();
    linalg::max_abs(diff.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lambda_zero_is_hermitian() {
        let spec = ChainSpec::critical(64, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.0, 3.0));
        let h = build_hamiltonian(&spec).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn two_cell_ring_matches_hand_built_matrix() {
        // L = 2 ring, impurity at x = 0 (internal cell 1), lambda = 1, u = 3.
        // Cell 0: sites 0 (A), 1 (B); cell 1: sites 2 (A), 3 (B).
        // Bonds: v1 on (0,1) and (2,3); w1 on (1,2); closing w1 on (3,0).
        let spec = ChainSpec::critical(2, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 1.0, 3.0));
        let h = build_hamiltonian(&spec).unwrap();
        let expected = [
            [c(0., 0.), c(1., 0.), c(0., 0.), c(-1., 0.)],
            [c(1., 0.), c(0., 0.), c(-1., 0.), c(0., 0.)],
            [c(0., 0.), c(-1., 0.), c(0., 3.), c(1. + 3., 0.)],
            [c(-1., 0.), c(0., 0.), c(1. + 3., 0.), c(0., -3.)],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h.matrix()[(i, j)], expected[i][j], "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn tbc_at_zero_phase_equals_pbc() {
        let imp = ImpuritySpec::uniform(0, 0.7, 3.0);
        let pbc = build_hamiltonian(&ChainSpec::critical(16, Boundary::Pbc).with_impurity(imp)).unwrap();
        let tbc = build_hamiltonian(&ChainSpec::critical(16, Boundary::Tbc).with_impurity(imp)).unwrap();
        assert_eq!(pbc.matrix(), tbc.matrix());
    }

    #[test]
    fn tbc_phase_sits_on_closing_bond() {
        let spec = ChainSpec::critical(4, Boundary::Tbc).with_phi(PI / 3.0);
        let h = build_hamiltonian(&spec).unwrap();
        let expect = C64::from_polar(1.0, PI / 3.0) * -1.0;
        assert!((h.matrix()[(0, 7)] - expect).norm() < 1e-15);
        assert!((h.matrix()[(7, 0)] - expect.conj()).norm() < 1e-15);
        assert!(h.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn obc_has_no_closing_bond() {
        let h = build_hamiltonian(&ChainSpec::critical(4, Boundary::Obc)).unwrap();
        assert_eq!(h.matrix()[(0, 7)], c(0., 0.));
    }

    #[test]
    fn single_cell_pt_operator_is_swap() {
        let spec = ChainSpec::critical(1, Boundary::Pbc);
        let p = pt_operator(&spec);
        assert_eq!(p[(0, 1)], c(1., 0.));
        assert_eq!(p[(1, 0)], c(1., 0.));
        assert_eq!(p[(0, 0)], c(0., 0.));
        assert_eq!(p[(1, 1)], c(0., 0.));
    }

    #[test]
    fn pt_operator_is_an_involution() {
        for (n, b) in [(2, Boundary::Pbc), (7, Boundary::Obc), (10, Boundary::Pbc), (9, Boundary::Tbc)] {
            let spec = ChainSpec::critical(n, b).with_impurity(ImpuritySpec::uniform(1, 1.0, 3.0));
            let p = pt_operator(&spec);
            let p2 = &p * &p;
            let id = Mat::<C64>::identity(2 * n, 2 * n);
            assert_eq!(linalg::max_abs((&p2 - &id).as_ref()), 0.0);
        }
    }

    #[test]
    fn impurity_ring_is_pt_symmetric() {
        let spec = ChainSpec::critical(32, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 1.0, 3.0));
        let h = build_hamiltonian(&spec).unwrap();
        assert!(pt_defect(&spec, &h) < 1e-14);
    }

    #[test]
    fn centred_open_chain_is_pt_symmetric_only_for_odd_length() {
        let odd = ChainSpec::critical(33, Boundary::Obc).with_impurity(ImpuritySpec::tuned(0, 1.0, 1.4, 0.4));
        assert!(pt_defect(&odd, &build_hamiltonian(&odd).unwrap()) < 1e-14);
        let even = odd.with_n_cells(32);
        assert!(pt_defect(&even, &build_hamiltonian(&even).unwrap()) > 1.0);
    }

    #[test]
    fn trace_vanishes() {
        let spec = ChainSpec::critical(12, Boundary::Obc)
            .with_impurity(ImpuritySpec::tuned(0, 0.8, 1.4, 0.4))
            .with_impurity(ImpuritySpec::uniform(3, 0.3, 2.0));
        assert!(build_hamiltonian(&spec).unwrap().trace().norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            build_hamiltonian(&ChainSpec::critical(1, Boundary::Pbc)),
            Err(Error::TooFewCells(1))
        ));
        let out = ChainSpec::critical(8, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(4, 1.0, 3.0));
        assert!(matches!(build_hamiltonian(&out), Err(Error::ImpurityOutOfRange { .. })));
        let dup = ChainSpec::critical(8, Boundary::Pbc)
            .with_impurity(ImpuritySpec::uniform(1, 1.0, 3.0))
            .with_impurity(ImpuritySpec::uniform(1, 0.5, 3.0));
        assert!(matches!(build_hamiltonian(&dup), Err(Error::DuplicateImpurity(1))));
        let obc_phi = ChainSpec::critical(8, Boundary::Obc).with_phi(0.3);
        assert!(build_hamiltonian(&obc_phi).is_err());
    }

    #[test]
    fn symmetric_coordinates() {
        let even = ChainSpec::critical(8, Boundary::Pbc);
        assert_eq!((even.x_min(), even.x_max()), (-4, 3));
        assert_eq!(even.cell_index(0).unwrap(), 4);
        let odd = ChainSpec::critical(9, Boundary::Obc);
        assert_eq!((odd.x_min(), odd.x_max()), (-4, 4));
        assert_eq!(odd.cell_index(0).unwrap(), 4);
    }

    #[test]
    fn json_round_trip_uses_snake_case_fields() {
        let spec = ChainSpec::critical(16, Boundary::Tbc)
            .with_phi(0.5)
            .with_impurity(ImpuritySpec::uniform(0, 1.0, 3.0));
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(json["n_cells"], 16);
        assert_eq!(json["boundary"], "TBC");
        assert_eq!(json["impurities"][0]["offdiag"], 3.0);
        let back: ChainSpec = serde_json::from_value(json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.spec_hash(), spec.spec_hash());
    }
}

//! Biorthogonal correlation matrix and subsystem entropies.

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensys::{solve_chain, BiorthSystem, ManyBodyState, SolveOptions, SolvedChain};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{Boundary, ChainSpec};

/// Imaginary residue above which an entropy sample is flagged.
pub const IMAG_FLAG_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub matrix: CMat,
    /// Set to the eigenbasis condition number when it exceeds the EP threshold.
    pub ep_warning: Option<f64>,
}

/// `C_ij = sum_{n occupied} R_n(i) conj(L_n(j))`.
pub fn correlation_matrix(sys: &BiorthSystem, state: &ManyBodyState) -> CorrelationMatrix {
    let dim = sys.dim();
    let occ = &state.occupied;
    let r = Mat::<C64>::from_fn(dim, occ.len(), |i, k| sys.right_vecs[(i, occ[k])]);
    let l = Mat::<C64>::from_fn(dim, occ.len(), |i, k| sys.left_vecs[(i, occ[k])]);
    let matrix = &r * l.adjoint();
    let ep_warning = (sys.overlap_cond > crate::eigensys::DEFAULT_EP_COND_THRESHOLD).then_some(sys.overlap_cond);
    CorrelationMatrix { matrix, ep_warning }
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Largest entry of `C^2 - C`.
    pub fn projector_defect(&self) -> f64 {
        let sq = &self.matrix * &self.matrix;
        let diff = &sq - &self.matrix;
        linalg::max_abs(diff.as_ref())
    }

    pub fn block(&self, cut: &Cut) -> Result<CMat> {
        let sites = cut.sites(self.dim())?;
        Ok(Mat::<C64>::from_fn(sites.len(), sites.len(), |i, j| self.matrix[(sites[i], sites[j])]))
    }

    pub fn block_eigenvalues(&self, cut: &Cut) -> Result<Vec<C64>> {
        let blk = self.block(cut)?;
        linalg::eigenvalues(blk.as_ref())
    }
}

/// Contiguous run of sites, wrapping around the end of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub start: usize,
    pub len: usize,
}

impl Cut {
    pub fn sites_range(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    /// `n_cells` whole unit cells starting at cell `start_cell`.
    pub fn cells(start_cell: usize, n_cells: usize) -> Self {
        Self {
            start: 2 * start_cell,
            len: 2 * n_cells,
        }
    }

    pub fn complement(&self, dim: usize) -> Self {
        Self {
            start: (self.start + self.len) % dim,
            len: dim - self.len,
        }
    }

    pub fn sites(&self, dim: usize) -> Result<Vec<usize>> {
        if self.len == 0 || self.len >= dim {
            return Err(Error::InvalidCut(format!("{} sites out of {dim}; need a nonempty proper subset", self.len)));
        }
        if self.start >= dim {
            return Err(Error::InvalidCut(format!("start site {} outside chain of {dim} sites", self.start)));
        }
        Ok((0..self.len).map(|k| (self.start + k) % dim).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsystemEntropy {
    pub value: f64,
    pub imag: f64,
}

impl SubsystemEntropy {
    pub fn flagged(&self) -> bool {
        !(self.imag.abs() <= IMAG_FLAG_TOL) || !self.value.is_finite()
    }
}

fn check_renyi(n: f64) -> Result<()> {
    if n.is_finite() && n > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRenyi(n))
    }
}

fn xlogx(z: C64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        C64::new(0.0, 0.0)
    } else {
        z * z.ln()
    }
}

fn cpow(z: C64, n: f64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        z
    } else if n.fract() == 0.0 && n.abs() < i32::MAX as f64 {
        z.powi(n as i32)
    } else {
        z.powf(n)
    }
}

/// Entropy contributed by a set of correlation eigenvalues. Complex logs use
/// the principal branch.
pub fn entropy_from_spectrum(zetas: &[C64], renyi_n: f64) -> Result<C64> {
    check_renyi(renyi_n)?;
    let one = C64::new(1.0, 0.0);
    let total = if renyi_n == 1.0 {
        zetas.iter().map(|&z| -(xlogx(z) + xlogx(one - z))).sum()
    } else {
        let s: C64 = zetas
            .iter()
            .map(|&z| (cpow(z, renyi_n) + cpow(one - z, renyi_n)).ln())
            .sum();
        s / (1.0 - renyi_n)
    };
    Ok(total)
}

pub fn subsystem_entropy(c: &CorrelationMatrix, cut: &Cut, renyi_n: f64) -> Result<SubsystemEntropy> {
    check_renyi(renyi_n)?;
    let zetas = c.block_eigenvalues(cut)?;
    let s = entropy_from_spectrum(&zetas, renyi_n)?;
    Ok(SubsystemEntropy { value: s.re, imag: s.im })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySample {
    /// Subsystem size in unit cells.
    pub l_a: usize,
    pub value: f64,
    pub max_im: f64,
    pub flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub samples: Vec<EntropySample>,
    pub renyi_n: f64,
    pub total_l: usize,
    pub boundary: Boundary,
    pub max_im: f64,
    pub spec_hash: String,
    /// Impurity cells measured from the cell where every cut starts.
    pub impurity_offsets: Vec<usize>,
    pub cut_origin: usize,
    pub overlap_cond: f64,
    pub raw_overlap_cond: f64,
    pub min_phase_rigidity: f64,
    pub ep_approached: bool,
    /// Impurity strength actually diagonalized, one per impurity.
    pub lambda_used: Vec<f64>,
}

impl EntropyCurve {
    pub fn n_flagged(&self) -> usize {
        self.samples.iter().filter(|s| s.flag).count()
    }
}

/// Every proper cut in whole cells, `1..n_cells`.
pub fn all_cell_cuts(n_cells: usize) -> Vec<usize> {
    (1..n_cells).collect()
}

/// Entropy profile of one solved chain for each Rényi index. All curves share
/// the same correlation matrix.
pub fn entropy_curves(
    solved: &SolvedChain,
    requested: &ChainSpec,
    renyi_ns: &[f64],
    cut_origin: usize,
    cut_sizes: &[usize],
) -> Result<Vec<EntropyCurve>> {
    for &n in renyi_ns {
        check_renyi(n)?;
    }
    let spec = &solved.spec_used;
    let dim = spec.dim();
    if cut_origin >= dim || cut_origin % 2 != 0 {
        return Err(Error::InvalidCut(format!("cut origin {cut_origin} must be an A site of the chain")));
    }
    let origin_cell = cut_origin / 2;
    let c = correlation_matrix(&solved.system, &solved.state);

    let spectra: Vec<Vec<C64>> = cut_sizes
        .par_iter()
        .map(|&l_a| c.block_eigenvalues(&Cut::cells(origin_cell, l_a)).map_err(|e| Error::at_size(l_a, e)))
        .collect::<Result<_>>()?;

    let impurity_offsets = spec
        .impurity_cells()?
        .into_iter()
        .map(|ic| (ic + spec.n_cells - origin_cell) % spec.n_cells)
        .collect::<Vec<_>>();

    renyi_ns
        .iter()
        .map(|&n| {
            let samples = cut_sizes
                .iter()
                .zip(&spectra)
                .map(|(&l_a, z)| {
                    let s = entropy_from_spectrum(z, n)?;
                    let e = SubsystemEntropy { value: s.re, imag: s.im };
                    Ok(EntropySample {
                        l_a,
                        value: e.value,
                        max_im: e.imag.abs(),
                        flag: e.flagged(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let max_im = samples.iter().map(|s| s.max_im).fold(0.0, f64::max);
            Ok(EntropyCurve {
                samples,
                renyi_n: n,
                total_l: spec.n_cells,
                boundary: spec.boundary,
                max_im,
                spec_hash: requested.spec_hash(),
                impurity_offsets: impurity_offsets.clone(),
                cut_origin,
                overlap_cond: solved.system.overlap_cond,
                raw_overlap_cond: solved.raw_overlap_cond,
                min_phase_rigidity: solved.system.min_phase_rigidity(),
                ep_approached: solved.ep_approached,
                lambda_used: spec.impurities.iter().map(|i| i.lambda).collect(),
            })
        })
        .collect()
}

pub fn entropy_profile_with(
    spec: &ChainSpec,
    opts: &SolveOptions,
    renyi_n: f64,
    cut_origin: usize,
    cut_sizes: &[usize],
) -> Result<EntropyCurve> {
    check_renyi(renyi_n)?;
    let solved = solve_chain(spec, opts)?;
    let mut curves = entropy_curves(&solved, spec, &[renyi_n], cut_origin, cut_sizes)?;
    Ok(curves.remove(0))
}

/// One diagonalization, one entropy sample per cut size (in cells), cuts
/// starting at site `cut_origin`.
pub fn entropy_profile(spec: &ChainSpec, renyi_n: f64, cut_origin: usize, cut_sizes: &[usize]) -> Result<EntropyCurve> {
    entropy_profile_with(spec, &SolveOptions::default(), renyi_n, cut_origin, cut_sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensys::{diagonalize, ground_state};
    use crate::model::{build_hamiltonian, ImpuritySpec};

    fn solved(spec: &ChainSpec) -> (BiorthSystem, ManyBodyState) {
        let h = build_hamiltonian(spec).unwrap();
        let sys = diagonalize(&h, 1e-8 * h.max_abs()).unwrap();
        let gs = ground_state(&sys).unwrap();
        (sys, gs)
    }

    fn hermitian_entropy(c: &CMat, sites: &[usize]) -> f64 {
        // Peschel: eigenvalues of the Hermitian block, real by construction.
        let k = sites.len();
        let blk = Mat::<C64>::from_fn(k, k, |i, j| c[(sites[i], sites[j])]);
        let ev = blk.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        ev.iter()
            .map(|&z| {
                let z = z.clamp(0.0, 1.0);
                let a = if z > 0.0 { -z * z.ln() } else { 0.0 };
                let b = if z < 1.0 { -(1.0 - z) * (1.0 - z).ln() } else { 0.0 };
                a + b
            })
            .sum()
    }

    #[test]
    fn hermitian_correlation_is_hermitian_projector() {
        let spec = ChainSpec::critical(16, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.0, 3.0));
        let (sys, gs) = solved(&spec);
        let c = correlation_matrix(&sys, &gs);
        let diff = &c.matrix - c.matrix.adjoint();
        assert!(linalg::max_abs(diff.as_ref()) < 1e-12);
        assert!(c.projector_defect() < 1e-10);
        assert!((c.trace() - C64::new(16.0, 0.0)).norm() < 1e-8);
        for z in c.block_eigenvalues(&Cut::cells(0, 5)).unwrap() {
            assert!(z.re > -1e-10 && z.re < 1.0 + 1e-10 && z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn peschel_limit() {
        let spec = ChainSpec::critical(20, Boundary::Obc);
        let (sys, gs) = solved(&spec);
        let c = correlation_matrix(&sys, &gs);
        for l_a in [1usize, 3, 7, 10] {
            let cut = Cut::cells(0, l_a);
            let s = subsystem_entropy(&c, &cut, 1.0).unwrap();
            let reference = hermitian_entropy(&c.matrix, &cut.sites(c.dim()).unwrap());
            assert!((s.value - reference).abs() < 1e-10, "{l_a}: {} vs {reference}", s.value);
            assert!(!s.flagged());
        }
    }

    #[test]
    fn nearly_full_cut_is_nonnegative() {
        let spec = ChainSpec::critical(12, Boundary::Pbc);
        let (sys, gs) = solved(&spec);
        let c = correlation_matrix(&sys, &gs);
        let s = subsystem_entropy(&c, &Cut::sites_range(0, c.dim() - 1), 1.0).unwrap();
        assert!(s.value >= -1e-12);
    }

    #[test]
    fn entropy_of_pure_zetas() {
        let z = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        assert_eq!(entropy_from_spectrum(&z, 1.0).unwrap(), C64::new(0.0, 0.0));
        assert!(entropy_from_spectrum(&z, 2.0).unwrap().norm() < 1e-15);
        let half = [C64::new(0.5, 0.0)];
        let ln2 = std::f64::consts::LN_2;
        assert!((entropy_from_spectrum(&half, 1.0).unwrap().re - ln2).abs() < 1e-15);
        assert!((entropy_from_spectrum(&half, 2.0).unwrap().re - ln2).abs() < 1e-15);
        assert!((entropy_from_spectrum(&half, 0.5).unwrap().re - ln2).abs() < 1e-14);
    }

    #[test]
    fn renyi_continuity() {
        let spec = ChainSpec::critical(24, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.6, 3.0));
        let (sys, gs) = solved(&spec);
        let c = correlation_matrix(&sys, &gs);
        let cut = Cut::cells(0, 9);
        let s1 = subsystem_entropy(&c, &cut, 1.0).unwrap().value;
        let s1p = subsystem_entropy(&c, &cut, 1.0001).unwrap().value;
        assert!((s1 - s1p).abs() < 1e-3);
    }

    #[test]
    fn bad_arguments() {
        let spec = ChainSpec::critical(4, Boundary::Pbc);
        let (sys, gs) = solved(&spec);
        let c = correlation_matrix(&sys, &gs);
        assert!(matches!(subsystem_entropy(&c, &Cut::sites_range(0, 0), 1.0), Err(Error::InvalidCut(_))));
        assert!(matches!(subsystem_entropy(&c, &Cut::sites_range(0, 8), 1.0), Err(Error::InvalidCut(_))));
        assert!(matches!(subsystem_entropy(&c, &Cut::sites_range(9, 2), 1.0), Err(Error::InvalidCut(_))));
        assert!(matches!(subsystem_entropy(&c, &Cut::cells(0, 1), 0.0), Err(Error::InvalidRenyi(_))));
        assert!(matches!(subsystem_entropy(&c, &Cut::cells(0, 1), -1.0), Err(Error::InvalidRenyi(_))));
    }

    #[test]
    fn wrapped_cut_matches_complement() {
        let spec = ChainSpec::critical(10, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.4, 3.0));
        let (sys, gs) = solved(&spec);
        let c = correlation_matrix(&sys, &gs);
        let cut = Cut::sites_range(15, 8);
        assert_eq!(cut.sites(20).unwrap(), vec![15, 16, 17, 18, 19, 0, 1, 2]);
        let a = subsystem_entropy(&c, &cut, 1.0).unwrap().value;
        let b = subsystem_entropy(&c, &cut.complement(20), 1.0).unwrap().value;
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn profile_carries_metadata() {
        let spec = ChainSpec::critical(32, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 1.0, 3.0));
        let curve = entropy_profile(&spec, 1.0, 0, &all_cell_cuts(32)).unwrap();
        assert_eq!(curve.samples.len(), 31);
        assert_eq!(curve.impurity_offsets, vec![16]);
        assert!(curve.ep_approached);
        assert_eq!(curve.spec_hash, spec.spec_hash());
        assert!(curve.lambda_used[0] < 1.0);
    }
}

//! Biorthogonal many-body fidelity along the impurity path.

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensys::{solve_chain, BiorthSystem, ManyBodyState, SolveOptions, SolvedChain};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::ChainSpec;

/// Parameter values closer than this share one diagonalization.
const NODE_MERGE_TOL: f64 = 1e-12;

/// `<GS_L(a) | GS_R(b)>`: determinant of the occupied left(a)-right(b) overlaps.
pub fn gs_overlap(a: (&BiorthSystem, &ManyBodyState), b: (&BiorthSystem, &ManyBodyState)) -> Result<C64> {
    let (sa, ga) = a;
    let (sb, gb) = b;
    if sa.dim() != sb.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {} sites", sa.dim(), sb.dim())));
    }
    if ga.occupied.len() != gb.occupied.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} particles",
            ga.occupied.len(),
            gb.occupied.len()
        )));
    }
    let n = ga.occupied.len();
    let m = Mat::<C64>::from_fn(n, n, |i, j| {
        linalg::col_dot(sa.left_vecs.as_ref(), ga.occupied[i], sb.right_vecs.as_ref(), gb.occupied[j])
    });
    Ok(linalg::determinant(m.as_ref()))
}

fn overlap_of(a: &SolvedChain, b: &SolvedChain) -> Result<C64> {
    gs_overlap((&a.system, &a.state), (&b.system, &b.state))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub lambdas: Vec<f64>,
    pub eps: f64,
    pub chi: Vec<f64>,
    pub fidelity_raw: Vec<C64>,
    /// Whether either endpoint of the step had to be moved off an exceptional point.
    pub ep_approached: Vec<bool>,
    pub spec_hash: String,
}

impl FidelityCurve {
    pub fn max_im_fidelity(&self) -> f64 {
        self.fidelity_raw.iter().map(|f| f.im.abs()).fold(0.0, f64::max)
    }
}

/// `steps` equally spaced points `k / steps`, `k = 0..steps`, so the last
/// point plus one step lands on 1.
pub fn lambda_grid(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| k as f64 / steps as f64).collect()
}

fn validate_grid(lambdas: &[f64], eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidSpec(format!("fidelity step eps = {eps} must be positive")));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidSpec("empty lambda grid".into()));
    }
    for w in lambdas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidSpec("lambda grid must be strictly increasing".into()));
        }
    }
    let first = lambdas[0];
    let last = lambdas[lambdas.len() - 1];
    if !(first >= 0.0) || !(last + eps <= 1.0 + 1e-12) {
        return Err(Error::InvalidSpec(format!(
            "lambda grid [{first}, {last}] with step {eps} leaves [0, 1]"
        )));
    }
    Ok(())
}

pub fn fidelity_susceptibility_with(
    spec_template: &ChainSpec,
    lambdas: &[f64],
    eps: f64,
    opts: &SolveOptions,
) -> Result<FidelityCurve> {
    validate_grid(lambdas, eps)?;
    spec_template.validate()?;
    // Grid points and shifted points usually coincide (eps = grid step), so
    // every distinct lambda is solved once.
    let mut nodes: Vec<f64> = lambdas.iter().flat_map(|&l| [l, (l + eps).min(1.0)]).collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|a, b| (*a - *b).abs() <= NODE_MERGE_TOL);
    let solved: Vec<SolvedChain> = nodes
        .par_iter()
        .map(|&l| solve_chain(&spec_template.with_lambda(l), opts).map_err(|e| Error::at_lambda(l, e)))
        .collect::<Result<_>>()?;
    let node_of = |l: f64| {
        let i = nodes.partition_point(|&x| x < l - NODE_MERGE_TOL);
        &solved[i.min(nodes.len() - 1)]
    };
    let points: Vec<(C64, bool)> = lambdas
        .iter()
        .map(|&lambda| {
            let a = node_of(lambda);
            let b = node_of((lambda + eps).min(1.0));
            let f = overlap_of(a, b)? * overlap_of(b, a)?;
            Ok((f, a.ep_approached || b.ep_approached))
        })
        .collect::<Result<_>>()?;
    let fidelity_raw: Vec<C64> = points.iter().map(|p| p.0).collect();
    Ok(FidelityCurve {
        lambdas: lambdas.to_vec(),
        eps,
        chi: fidelity_raw.iter().map(|f| (1.0 - f.re) / (eps * eps)).collect(),
        fidelity_raw,
        ep_approached: points.iter().map(|p| p.1).collect(),
        spec_hash: spec_template.spec_hash(),
    })
}

/// `chi(lambda) = (1 - Re F) / eps^2` with
/// `F = <GS_L(lambda)|GS_R(lambda+eps)> <GS_L(lambda+eps)|GS_R(lambda)>`.
pub fn fidelity_susceptibility(spec_template: &ChainSpec, lambdas: &[f64], eps: f64) -> Result<FidelityCurve> {
    fidelity_susceptibility_with(spec_template, lambdas, eps, &SolveOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Boundary, ImpuritySpec};

    fn solved(spec: &ChainSpec) -> SolvedChain {
        solve_chain(spec, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn self_overlap_is_one() {
        let s = solved(&ChainSpec::critical(16, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.7, 3.0)));
        let o = overlap_of(&s, &s).unwrap();
        assert!((o - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn hermitian_swap_conjugates() {
        let mut a = ChainSpec::critical(8, Boundary::Obc);
        a.v1 = 1.3;
        let mut b = a.clone();
        b.v1 = 0.8;
        let (sa, sb) = (solved(&a), solved(&b));
        let ab = overlap_of(&sa, &sb).unwrap();
        let ba = overlap_of(&sb, &sa).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
        assert!(ab.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn mismatched_systems() {
        let a = solved(&ChainSpec::critical(4, Boundary::Obc));
        let b = solved(&ChainSpec::critical(5, Boundary::Obc));
        assert!(matches!(overlap_of(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn flat_path_has_zero_chi() {
        let spec = ChainSpec::critical(16, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.0, 0.0));
        let curve = fidelity_susceptibility(&spec, &[0.0, 0.3, 0.9], 1e-3).unwrap();
        for (chi, f) in curve.chi.iter().zip(&curve.fidelity_raw) {
            // |1 - F| < 1e-10 bounds chi by 1e-10 / eps^2.
            assert!(chi.abs() < 1e-4, "{chi}");
            assert!((f - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn grid_validation() {
        let spec = ChainSpec::critical(8, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.0, 3.0));
        assert!(fidelity_susceptibility(&spec, &[0.2, 0.1], 1e-3).is_err());
        assert!(fidelity_susceptibility(&spec, &[0.5], 0.0).is_err());
        assert!(fidelity_susceptibility(&spec, &[0.9995], 1e-3).is_err());
        assert!(fidelity_susceptibility(&spec, &[], 1e-3).is_err());
        let g = lambda_grid(1000);
        assert_eq!(g.len(), 1000);
        assert_eq!(g[0], 0.0);
        assert!((g[999] - 0.999).abs() < 1e-15);
    }

    #[test]
    fn ring_chi_turns_negative_near_one() {
        let spec = ChainSpec::critical(32, Boundary::Pbc).with_impurity(ImpuritySpec::uniform(0, 0.0, 3.0));
        let curve = fidelity_susceptibility(&spec, &[0.5, 0.99], 1e-3).unwrap();
        assert!(curve.chi[1] < 0.0);
        assert!(curve.chi[1].abs() > 10.0 * curve.chi[0].abs());
    }
}

//! Central-charge extraction by ordinary least squares.
//!
//! Entropy: `S = k c x + b` with `x = ln[(L/pi) sin(pi L_A / L)]` and
//! `k = (n+1)/(6n)` on a ring, `(n+1)/(12n)` on an open chain.
//!
//! Energy: `E = A + eps L + B/L + C/L^2`, with `c = -6B/(pi v_F)` on a ring
//! and `c = -24B/(pi v_F)` on an open chain.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::entanglement::EntropyCurve;
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::Boundary;

pub const DEFAULT_EXCLUDE_MARGIN: usize = 4;
pub const DEFAULT_V_FERMI: f64 = 1.0;

/// Design matrices with a smaller singular-value ratio are rejected.
const RCOND_MIN: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Geometry {
    Pbc,
    Obc,
}

impl From<Boundary> for Geometry {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Obc => Geometry::Obc,
            Boundary::Pbc | Boundary::Tbc => Geometry::Pbc,
        }
    }
}

impl Geometry {
    pub fn as_str(self) -> &'static str {
        match self {
            Geometry::Pbc => "pbc",
            Geometry::Obc => "obc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: String,
    pub coefficients: BTreeMap<String, f64>,
    pub v_fermi: f64,
    pub residual_rms: f64,
    pub r_squared: f64,
    pub n_points_used: usize,
    pub n_excluded: usize,
    pub n_flagged: usize,
    pub window: String,
}

impl FitResult {
    pub fn coef(&self, name: &str) -> f64 {
        self.coefficients.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn c(&self) -> f64 {
        self.coef("c")
    }

    pub fn summary(&self) -> String {
        format!(
            "model={} c={:.6} residual_rms={:.3e} n_points={}",
            self.model,
            self.c(),
            self.residual_rms,
            self.n_points_used
        )
    }
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

/// Slope prefactor multiplying `c` in front of the chord logarithm.
pub fn entropy_prefactor(geometry: Geometry, renyi_n: f64) -> f64 {
    let k = (renyi_n + 1.0) / (6.0 * renyi_n);
    match geometry {
        Geometry::Pbc => k,
        Geometry::Obc => k / 2.0,
    }
}

pub fn chord_log(total_l: usize, l_a: usize) -> f64 {
    let l = total_l as f64;
    (l / PI * (PI * l_a as f64 / l).sin()).ln()
}

struct Ols {
    beta: Vec<f64>,
    residual_rms: f64,
    r_squared: f64,
}

/// OLS with unit-norm column scaling, undone on the returned coefficients.
fn ols(columns: &[Vec<f64>], y: &[f64]) -> Result<Ols> {
    let n = y.len();
    let p = columns.len();
    let scales: Vec<f64> = columns
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::DegenerateFit("a basis column vanishes".into()));
    }
    let design = Mat::<f64>::from_fn(n, p, |i, j| columns[j][i] / scales[j]);
    let rcond = linalg::rcond_real(&design);
    if rcond < RCOND_MIN {
        return Err(Error::DegenerateFit(format!("design matrix rank-deficient (rcond {rcond:.3e})")));
    }
    let scaled = linalg::least_squares(&design, y);
    let beta: Vec<f64> = scaled.iter().zip(&scales).map(|(b, s)| b / s).collect();

    let fitted: Vec<f64> = (0..n).map(|i| (0..p).map(|j| columns[j][i] * beta[j]).sum()).collect();
    let ss_res: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|a| (a - mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(Ols {
        beta,
        residual_rms: (ss_res / n as f64).sqrt(),
        r_squared,
    })
}

fn circular_distance(a: usize, b: usize, l: usize, closed: bool) -> usize {
    let d = a.abs_diff(b);
    if closed {
        d.min(l - d.min(l))
    } else {
        d
    }
}

/// Fit a Cardy-Calabrese line through the unflagged samples with
/// `exclude_margin <= L_A <= L - exclude_margin` whose moving cut boundary is
/// more than `exclude_margin` cells from every impurity.
pub fn fit_entropy(curve: &EntropyCurve, geometry: Geometry, exclude_margin: usize) -> Result<FitResult> {
    let l = curve.total_l;
    let closed = geometry == Geometry::Pbc;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut n_excluded = 0;
    let mut n_flagged = 0;
    for s in &curve.samples {
        let in_window = s.l_a >= exclude_margin
            && s.l_a + exclude_margin <= l
            && s.l_a > 0
            && s.l_a < l
            && curve
                .impurity_offsets
                .iter()
                .all(|&ic| circular_distance(s.l_a, ic, l, closed) > exclude_margin);
        if !in_window {
            n_excluded += 1;
            continue;
        }
        if s.flag {
            n_excluded += 1;
            n_flagged += 1;
            continue;
        }
        xs.push(chord_log(l, s.l_a));
        ys.push(s.value);
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: xs.len(),
        });
    }
    let x0 = xs[0];
    if xs.iter().all(|x| (x - x0).abs() < 1e-14) {
        return Err(Error::DegenerateFit("no variance in the chord logarithm".into()));
    }
    let fit = ols(&[xs.clone(), vec![1.0; xs.len()]], &ys)?;
    let slope = fit.beta[0];
    let pref = entropy_prefactor(geometry, curve.renyi_n);
    let mut coefficients = BTreeMap::new();
    coefficients.insert("c".to_string(), slope / pref);
    coefficients.insert("const".to_string(), fit.beta[1]);
    coefficients.insert("slope".to_string(), slope);
    Ok(FitResult {
        model: format!("entropy-{}-n{}", geometry.as_str(), curve.renyi_n),
        coefficients,
        v_fermi: DEFAULT_V_FERMI,
        residual_rms: fit.residual_rms,
        r_squared: fit.r_squared,
        n_points_used: xs.len(),
        n_excluded,
        n_flagged,
        window: format!(
            "L_A in [{exclude_margin}, {}], |L_A - impurity| > {exclude_margin}, unflagged only",
            l.saturating_sub(exclude_margin)
        ),
    })
}

/// Fit `E = A + eps L + B/L + C/L^2` on points with `L >= min_size`.
pub fn fit_energy_window(points: &[(usize, f64)], geometry: Geometry, v_fermi: f64, min_size: usize) -> Result<FitResult> {
    if !(v_fermi.is_finite() && v_fermi != 0.0) {
        return Err(Error::DegenerateFit(format!("v_F = {v_fermi}")));
    }
    let used: Vec<(usize, f64)> = points.iter().copied().filter(|&(l, _)| l >= min_size).collect();
    if used.len() < 5 {
        return Err(Error::InsufficientPoints {
            needed: 5,
            got: used.len(),
        });
    }
    let mut sizes: Vec<usize> = used.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() != used.len() || sizes[0] == 0 {
        return Err(Error::DegenerateFit("sizes must be distinct and positive".into()));
    }
    let ls: Vec<f64> = used.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1).collect();
    let columns = vec![
        vec![1.0; ls.len()],
        ls.clone(),
        ls.iter().map(|l| 1.0 / l).collect(),
        ls.iter().map(|l| 1.0 / (l * l)).collect(),
    ];
    let fit = ols(&columns, &ys)?;
    let b = fit.beta[2];
    let c = match geometry {
        Geometry::Pbc => -6.0 * b / (PI * v_fermi),
        Geometry::Obc => -24.0 * b / (PI * v_fermi),
    };
    let mut coefficients = BTreeMap::new();
    coefficients.insert("A".to_string(), fit.beta[0]);
    coefficients.insert("eps_density".to_string(), fit.beta[1]);
    coefficients.insert("B".to_string(), b);
    coefficients.insert("c".to_string(), c);
    coefficients.insert("C_coeff".to_string(), fit.beta[3]);
    Ok(FitResult {
        model: format!("energy-{}", geometry.as_str()),
        coefficients,
        v_fermi,
        residual_rms: fit.residual_rms,
        r_squared: fit.r_squared,
        n_points_used: used.len(),
        n_excluded: points.len() - used.len(),
        n_flagged: 0,
        window: format!("L >= {min_size}"),
    })
}

pub fn fit_energy(points: &[(usize, f64)], geometry: Geometry, v_fermi: f64) -> Result<FitResult> {
    fit_energy_window(points, geometry, v_fermi, 0)
}

/// Default size sweep for energy fits, `32, 48, ..., 256`.
pub fn default_energy_sizes() -> Vec<usize> {
    (32..=256).step_by(16).collect()
}

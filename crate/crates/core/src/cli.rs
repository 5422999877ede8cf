//! Task configuration, execution and output files for the command-line driver.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{check_ep, default_tol};
use crate::eigensys::{diagonalize, energy_vs_size, solve_chain, EnergyPoint, SolveOptions};
use crate::entanglement::{all_cell_cuts, entropy_curves, EntropyCurve, IMAG_FLAG_TOL};
use crate::error::{Error, Result};
use crate::fidelity::{fidelity_susceptibility_with, lambda_grid, FidelityCurve};
use crate::model::{build_hamiltonian, Boundary, ChainSpec};
use crate::presets;
use crate::scaling::{fit_energy_window, fit_entropy, FitResult, Geometry, DEFAULT_EXCLUDE_MARGIN, DEFAULT_V_FERMI};

pub const TOOL_NAME: &str = "nonunitary-lab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Spectrum,
    Entropy,
    Renyi,
    EnergyScaling,
    Fidelity,
    EpCheck,
    TbcSweep,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Spectrum => "spectrum",
            Task::Entropy => "entropy",
            Task::Renyi => "renyi",
            Task::EnergyScaling => "energy-scaling",
            Task::Fidelity => "fidelity",
            Task::EpCheck => "ep-check",
            Task::TbcSweep => "tbc-sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

fn default_margin() -> usize {
    DEFAULT_EXCLUDE_MARGIN
}

fn default_v_fermi() -> f64 {
    DEFAULT_V_FERMI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub spec: ChainSpec,
    pub task: Task,
    #[serde(default)]
    pub renyi_n: Option<f64>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    /// Smallest size kept in the energy fit.
    #[serde(default)]
    pub min_size: Option<usize>,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    /// Equally spaced grid `k / steps`; used when `lambdas` is absent.
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub phis: Option<Vec<f64>>,
    #[serde(default = "default_margin")]
    pub exclude_margin: usize,
    #[serde(default)]
    pub cut_origin: usize,
    #[serde(default)]
    pub cut_sizes: Option<Vec<usize>>,
    #[serde(default = "default_v_fermi")]
    pub v_fermi: f64,
    #[serde(default)]
    pub solve: SolveOptions,
    /// Residual tolerance for `ep-check`; defaults to `1e-10 max |H_ij|`.
    #[serde(default)]
    pub ep_tol: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(spec: ChainSpec, task: Task) -> Self {
        Self {
            spec,
            task,
            renyi_n: None,
            sizes: None,
            min_size: None,
            lambdas: None,
            steps: None,
            eps: None,
            phis: None,
            exclude_margin: DEFAULT_EXCLUDE_MARGIN,
            cut_origin: 0,
            cut_sizes: None,
            v_fermi: DEFAULT_V_FERMI,
            solve: SolveOptions::default(),
            ep_tol: None,
            out: None,
            format: OutputFormat::Csv,
        }
    }

    /// Parse a config document. A bare chain description (no `spec` key) is
    /// accepted and paired with `task`.
    pub fn from_json(text: &str, task: Task) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
        if !obj.contains_key("spec") {
            let spec = Value::Object(std::mem::take(obj));
            obj.insert("spec".into(), spec);
        }
        obj.insert("task".into(), serde_json::to_value(task)?);
        serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn lambda_grid(&self) -> Option<Vec<f64>> {
        self.lambdas.clone().or_else(|| self.steps.map(lambda_grid))
    }

    pub fn renyi_index(&self) -> f64 {
        match self.task {
            Task::Entropy => 1.0,
            _ => self.renyi_n.unwrap_or(1.0),
        }
    }

    /// Check that the task has every parameter it needs, before any numerics.
    pub fn validate(&self) -> Result<()> {
        self.spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        let need = |what: &str| Error::Config(format!("task {} requires {what}", self.task.as_str()));
        match self.task {
            Task::Spectrum | Task::EpCheck => {}
            Task::Entropy => {
                if let Some(n) = self.renyi_n {
                    if n != 1.0 {
                        return Err(Error::Config("entropy is the n = 1 case; use the renyi task".into()));
                    }
                }
            }
            Task::Renyi => {
                let n = self.renyi_n.ok_or_else(|| need("renyi_n"))?;
                if !(n.is_finite() && n > 0.0) {
                    return Err(Error::Config(format!("renyi_n = {n} must be positive")));
                }
            }
            Task::EnergyScaling => {
                let sizes = self.sizes.as_ref().ok_or_else(|| need("sizes"))?;
                if sizes.iter().any(|&l| l < 2) {
                    return Err(Error::Config("sizes must be at least 2 cells".into()));
                }
            }
            Task::Fidelity => {
                self.lambda_grid().ok_or_else(|| need("lambdas or steps"))?;
                if self.spec.impurities.is_empty() {
                    return Err(need("at least one impurity"));
                }
            }
            Task::TbcSweep => {
                let phis = self.phis.as_ref().ok_or_else(|| need("phis"))?;
                if phis.is_empty() || phis.iter().any(|p| !p.is_finite()) {
                    return Err(Error::Config("phis must be a nonempty list of finite angles".into()));
                }
                if self.spec.boundary == Boundary::Obc {
                    return Err(Error::Config("tbc-sweep needs a closed chain".into()));
                }
            }
        }
        if let Some(cuts) = &self.cut_sizes {
            if cuts.iter().any(|&c| c == 0 || c >= self.spec.n_cells) {
                return Err(Error::Config("cut sizes must lie in 1..n_cells".into()));
            }
        }
        Ok(())
    }

    fn eps(&self) -> f64 {
        self.eps
            .or_else(|| self.steps.map(|s| 1.0 / s as f64))
            .unwrap_or(1e-3)
    }
}

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summaries: Vec<String>,
    pub fits: Vec<FitResult>,
}

/// Floats in output files: 17 significant digits, no locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// JSON text with every float printed to 17 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn tolerances(config: &RunConfig) -> Value {
    json!({
        "realness_rel_tol": config.solve.realness_rel_tol,
        "ep_cond_threshold": config.solve.ep_cond_threshold,
        "ep_eta": config.solve.ep_eta,
        "imag_flag_tol": IMAG_FLAG_TOL,
        "exclude_margin": config.exclude_margin,
    })
}

fn metadata(config: &RunConfig, extra: Value) -> Value {
    let mut meta = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "task": config.task.as_str(),
        "spec_hash": config.spec.spec_hash(),
        "spec": config.spec,
        "tolerances": tolerances(config),
    });
    if let (Some(m), Value::Object(e)) = (meta.as_object_mut(), extra) {
        m.extend(e);
    }
    meta
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json_rows: Vec<Value>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
            json_rows: Vec::new(),
        }
    }

    fn push(&mut self, csv: Vec<String>, json: Value) {
        self.rows.push(csv);
        self.json_rows.push(json);
    }
}

fn render(meta: &Value, table: &Table, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            writeln!(out, "# {}", to_json_string(meta)?).expect("string write");
            writeln!(out, "{}", table.header.join(",")).expect("string write");
            for row in &table.rows {
                writeln!(out, "{}", row.join(",")).expect("string write");
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let doc = json!({ "metadata": meta, "data": table.json_rows });
            Ok(to_json_string(&doc)? + "\n")
        }
    }
}

fn fit_document(meta: &Value, fit: &FitResult) -> Result<String> {
    Ok(to_json_string(&json!({ "metadata": meta, "fit": fit }))? + "\n")
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

struct Sink<'a> {
    config: &'a RunConfig,
    report: RunReport,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn data(&mut self, text: &str) -> Result<()> {
        match &self.config.out {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(path, text)?;
                self.report.files.push(path.clone());
            }
            None => self.stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn fit(&mut self, meta: &Value, fit: FitResult) -> Result<()> {
        let text = fit_document(meta, &fit)?;
        if let Some(path) = &self.config.out {
            let p = sibling(path, ".fit.json");
            fs::write(&p, text)?;
            self.report.files.push(p);
        }
        self.report.summaries.push(fit.summary());
        self.report.fits.push(fit);
        Ok(())
    }

    fn summary(&mut self, line: String) {
        self.report.summaries.push(line);
    }
}

fn curve_meta(curve: &EntropyCurve) -> Value {
    json!({
        "renyi_n": curve.renyi_n,
        "total_l": curve.total_l,
        "boundary": curve.boundary,
        "cut_origin": curve.cut_origin,
        "max_im": curve.max_im,
        "n_flagged": curve.n_flagged(),
        "overlap_cond": curve.overlap_cond,
        "raw_overlap_cond": curve.raw_overlap_cond,
        "min_phase_rigidity": curve.min_phase_rigidity,
        "ep_approached": curve.ep_approached,
        "lambda_used": curve.lambda_used,
    })
}

fn entropy_table(curve: &EntropyCurve) -> Table {
    let mut t = Table::new(vec!["L_A", "S", "max_im", "flag"]);
    for s in &curve.samples {
        t.push(
            vec![s.l_a.to_string(), fmt_f64(s.value), fmt_f64(s.max_im), (s.flag as u8).to_string()],
            json!({ "L_A": s.l_a, "S": s.value, "max_im": s.max_im, "flag": s.flag }),
        );
    }
    t
}

fn energy_table(points: &[EnergyPoint]) -> Table {
    let mut t = Table::new(vec!["L", "E", "overlap_cond", "min_phase_rigidity"]);
    for p in points {
        t.push(
            vec![
                p.size.to_string(),
                fmt_f64(p.energy),
                fmt_f64(p.overlap_cond),
                fmt_f64(p.min_phase_rigidity),
            ],
            json!({
                "L": p.size,
                "E": p.energy,
                "E_imag": p.energy_imag,
                "overlap_cond": p.overlap_cond,
                "min_phase_rigidity": p.min_phase_rigidity,
            }),
        );
    }
    t
}

fn fidelity_table(curve: &FidelityCurve) -> Table {
    let mut t = Table::new(vec!["lambda", "chi", "re_F", "im_F"]);
    for ((l, chi), f) in curve.lambdas.iter().zip(&curve.chi).zip(&curve.fidelity_raw) {
        t.push(
            vec![fmt_f64(*l), fmt_f64(*chi), fmt_f64(f.re), fmt_f64(f.im)],
            json!({ "lambda": l, "chi": chi, "re_F": f.re, "im_F": f.im }),
        );
    }
    t
}

/// Compute the entropy curve and its fit for one chain.
pub fn entropy_with_fit(config: &RunConfig, spec: &ChainSpec, renyi_n: f64) -> Result<(EntropyCurve, Result<FitResult>)> {
    let solved = solve_chain(spec, &config.solve)?;
    let cuts = config.cut_sizes.clone().unwrap_or_else(|| all_cell_cuts(spec.n_cells));
    let curve = entropy_curves(&solved, spec, &[renyi_n], config.cut_origin, &cuts)?.remove(0);
    let fit = fit_entropy(&curve, spec.boundary.into(), config.exclude_margin);
    Ok((curve, fit))
}

/// Run one configured task, writing data to `config.out` (or `stdout`).
pub fn run_to(config: &RunConfig, stdout: &mut dyn Write) -> Result<RunReport> {
    config.validate()?;
    let mut sink = Sink {
        config,
        report: RunReport::default(),
        stdout,
    };
    let spec = &config.spec;
    match config.task {
        Task::Spectrum => {
            let h = build_hamiltonian(spec)?;
            let tol = config.solve.realness_rel_tol * h.max_abs();
            let sys = diagonalize(&h, tol)?;
            let meta = metadata(
                config,
                json!({
                    "pt_phase": sys.classify(),
                    "overlap_cond": sys.overlap_cond,
                    "min_phase_rigidity": sys.min_phase_rigidity(),
                    "max_im": sys.max_imag(),
                    "realness_tol": tol,
                }),
            );
            let mut t = Table::new(vec!["index", "re_E", "im_E", "phase_rigidity"]);
            for (i, (e, r)) in sys.energies.iter().zip(&sys.phase_rigidity).enumerate() {
                t.push(
                    vec![i.to_string(), fmt_f64(e.re), fmt_f64(e.im), fmt_f64(*r)],
                    json!({ "index": i, "re_E": e.re, "im_E": e.im, "phase_rigidity": r }),
                );
            }
            sink.data(&render(&meta, &t, config.format)?)?;
            sink.summary(format!(
                "spectrum: {} levels, pt_phase={:?}, max_im={:.3e}, overlap_cond={:.3e}, min_phase_rigidity={:.3e}",
                sys.dim(),
                sys.classify(),
                sys.max_imag(),
                sys.overlap_cond,
                sys.min_phase_rigidity()
            ));
        }
        Task::Entropy | Task::Renyi => {
            let n = config.renyi_index();
            let (curve, fit) = entropy_with_fit(config, spec, n)?;
            let meta = metadata(config, curve_meta(&curve));
            sink.data(&render(&meta, &entropy_table(&curve), config.format)?)?;
            match fit {
                Ok(fit) => sink.fit(&meta, fit)?,
                Err(e) => sink.summary(format!("model=entropy-{}-n{n} fit unavailable: {e}", Geometry::from(spec.boundary).as_str())),
            }
        }
        Task::EnergyScaling => {
            let sizes = config.sizes.clone().expect("validated");
            let points = energy_vs_size(spec, &sizes, &config.solve)?;
            let meta = metadata(config, json!({ "sizes": sizes, "v_fermi": config.v_fermi }));
            sink.data(&render(&meta, &energy_table(&points), config.format)?)?;
            let pairs: Vec<(usize, f64)> = points.iter().map(|p| (p.size, p.energy)).collect();
            let fit = fit_energy_window(&pairs, spec.boundary.into(), config.v_fermi, config.min_size.unwrap_or(0))?;
            sink.fit(&meta, fit)?;
        }
        Task::Fidelity => {
            let lambdas = config.lambda_grid().expect("validated");
            let eps = config.eps();
            let curve = fidelity_susceptibility_with(spec, &lambdas, eps, &config.solve)?;
            let meta = metadata(
                config,
                json!({
                    "eps": eps,
                    "n_points": lambdas.len(),
                    "max_im_F": curve.max_im_fidelity(),
                    "n_ep_approached": curve.ep_approached.iter().filter(|b| **b).count(),
                }),
            );
            sink.data(&render(&meta, &fidelity_table(&curve), config.format)?)?;
            let last = curve.chi.len() - 1;
            sink.summary(format!(
                "fidelity: {} points, eps={}, chi(first)={:.6e}, chi(last)={:.6e}, max_im_F={:.3e}",
                curve.chi.len(),
                eps,
                curve.chi[0],
                curve.chi[last],
                curve.max_im_fidelity()
            ));
        }
        Task::EpCheck => {
            let tol = match config.ep_tol {
                Some(t) => t,
                None => default_tol(spec)?,
            };
            let report = check_ep(spec, tol)?;
            let meta = metadata(config, json!({ "ep_tol": tol }));
            let mut t = Table::new(vec!["residual_norm", "tol", "exists"]);
            t.push(
                vec![fmt_f64(report.residual_norm), fmt_f64(tol), report.exists.to_string()],
                json!({ "residual_norm": report.residual_norm, "tol": tol, "exists": report.exists }),
            );
            sink.data(&render(&meta, &t, config.format)?)?;
            sink.summary(format!(
                "ep-check: residual={:.6e} tol={:.3e} verdict={}",
                report.residual_norm,
                tol,
                if report.exists { "EP candidate is a zero mode" } else { "no EP zero mode" }
            ));
        }
        Task::TbcSweep => {
            let phis = config.phis.clone().expect("validated");
            let mut t = Table::new(vec!["phi", "c", "residual_rms", "n_points", "max_im"]);
            for &phi in &phis {
                let mut s = spec.clone();
                s.boundary = Boundary::Tbc;
                s.phi = phi;
                let (curve, fit) = entropy_with_fit(config, &s, config.renyi_index())?;
                let fit = match fit {
                    Ok(fit) => fit,
                    Err(e) => {
                        t.push(
                            vec![fmt_f64(phi), fmt_f64(f64::NAN), fmt_f64(f64::NAN), "0".into(), fmt_f64(curve.max_im)],
                            json!({ "phi": phi, "c": null, "residual_rms": null, "n_points": 0, "max_im": curve.max_im }),
                        );
                        sink.summary(format!("phi={phi:.6} fit unavailable: {e}"));
                        continue;
                    }
                };
                t.push(
                    vec![
                        fmt_f64(phi),
                        fmt_f64(fit.c()),
                        fmt_f64(fit.residual_rms),
                        fit.n_points_used.to_string(),
                        fmt_f64(curve.max_im),
                    ],
                    json!({
                        "phi": phi,
                        "c": fit.c(),
                        "residual_rms": fit.residual_rms,
                        "n_points": fit.n_points_used,
                        "max_im": curve.max_im,
                    }),
                );
                sink.summary(format!("phi={phi:.6} {}", fit.summary()));
                sink.report.fits.push(fit);
            }
            let meta = metadata(config, json!({ "phis": phis, "renyi_n": config.renyi_index() }));
            sink.data(&render(&meta, &t, config.format)?)?;
        }
    }
    Ok(sink.report)
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    run_to(config, &mut io::stdout().lock())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig2c,
    FigS2,
    FigS3,
    FigS4,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig2c,
        FigureId::FigS2,
        FigureId::FigS3,
        FigureId::FigS4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
            FigureId::FigS2 => "figS2",
            FigureId::FigS3 => "figS3",
            FigureId::FigS4 => "figS4",
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown figure {s:?}")))
    }
}

fn cfg(spec: ChainSpec, task: Task) -> RunConfig {
    RunConfig::new(spec, task)
}

fn fidelity_cfg(spec: ChainSpec, steps: usize) -> RunConfig {
    RunConfig {
        steps: Some(steps),
        eps: Some(1.0 / steps as f64),
        ..cfg(spec, Task::Fidelity)
    }
}

fn energy_cfg(spec: ChainSpec, sizes: Vec<usize>) -> RunConfig {
    RunConfig {
        sizes: Some(sizes),
        ..cfg(spec, Task::EnergyScaling)
    }
}

fn renyi_cfg(spec: ChainSpec, n: f64) -> RunConfig {
    RunConfig {
        renyi_n: Some(n),
        ..cfg(spec, Task::Renyi)
    }
}

/// Named runs that make up a figure preset; the name is the output file stem.
pub fn figure_configs(id: FigureId) -> Vec<(String, RunConfig)> {
    use presets::*;
    let runs: Vec<(&str, RunConfig)> = match id {
        FigureId::Fig2a => vec![("entropy", cfg(ring(ENTROPY_CELLS_RING, 1.0), Task::Entropy))],
        FigureId::Fig2b => vec![("energy", energy_cfg(ring(8, 1.0), ring_energy_sizes()))],
        FigureId::Fig2c => vec![("fidelity", fidelity_cfg(ring(FIDELITY_CELLS_RING, 0.0), FIDELITY_STEPS))],
        FigureId::FigS2 => vec![
            ("entropy", cfg(open(ENTROPY_CELLS_OPEN, 1.0), Task::Entropy)),
            ("energy", energy_cfg(open(9, 1.0), open_energy_sizes())),
            ("fidelity", fidelity_cfg(open(FIDELITY_CELLS_OPEN, 0.0), 4000)),
        ],
        FigureId::FigS3 => vec![
            ("entropy", cfg(open_tuned(ENTROPY_CELLS_OPEN, 1.0), Task::Entropy)),
            ("energy", energy_cfg(open_tuned(9, 1.0), open_energy_sizes())),
            ("fidelity", fidelity_cfg(open_tuned(FIDELITY_CELLS_OPEN, 0.0), FIDELITY_STEPS)),
        ],
        FigureId::FigS4 => {
            let mut v = Vec::new();
            for (tag, n) in [("n1", 1.0), ("n2", 2.0), ("n3", 3.0)] {
                v.push((format!("ring_renyi_{tag}"), renyi_cfg(ring(ENTROPY_CELLS_RING, 1.0), n)));
                v.push((format!("open_tuned_renyi_{tag}"), renyi_cfg(open_tuned(ENTROPY_CELLS_OPEN, 1.0), n)));
            }
            return v;
        }
    };
    runs.into_iter().map(|(n, c)| (n.to_string(), c)).collect()
}

/// Run every configuration of a figure preset, writing
/// `<out_dir>/<figure>_<name>.<ext>` plus the fit documents.
pub fn reproduce_figure(id: FigureId, out_dir: &Path, format: OutputFormat) -> Result<RunReport> {
    fs::create_dir_all(out_dir)?;
    let mut report = RunReport::default();
    for (name, mut config) in figure_configs(id) {
        config.format = format;
        config.out = Some(out_dir.join(format!("{}_{name}.{}", id.as_str(), format.extension())));
        let r = run_to(&config, &mut io::sink())?;
        report.files.extend(r.files);
        report
            .summaries
            .extend(r.summaries.into_iter().map(|s| format!("{}_{name}: {s}", id.as_str())));
        report.fits.extend(r.fits);
    }
    Ok(report)
}

/// Machine-readable error document printed by the binary on failure.
pub fn error_json(err: &Error) -> String {
    let mut chain = Vec::new();
    let mut cur: Option<&(dyn std::error::Error + 'static)> = std::error::Error::source(err);
    while let Some(e) = cur {
        chain.push(e.to_string());
        cur = e.source();
    }
    json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "causes": chain,
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
        }
    })
    .to_string()
}

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use nonunitary_lab::cli::{self, error_json, FigureId, OutputFormat, RunConfig, Task};
use nonunitary_lab::{presets, Boundary, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "nonunitary-lab", version, about = "Non-Hermitian impurity chains: entanglement, energy scaling, fidelity")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON config: a full run config or a bare chain spec.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (tasks) or directory (figure presets).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Worker threads; falls back to NONUNITARY_LAB_THREADS.
    #[arg(long, global = true, env = "NONUNITARY_LAB_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true)]
    n_cells: Option<usize>,

    #[arg(long, global = true)]
    boundary: Option<Boundary>,

    /// Set every impurity to this lambda.
    #[arg(long, global = true)]
    lambda: Option<f64>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<f64>,

    #[arg(long, global = true)]
    renyi_n: Option<f64>,

    /// Comma-separated chain lengths for energy scaling.
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,

    #[arg(long, global = true)]
    min_size: Option<usize>,

    #[arg(long, global = true)]
    steps: Option<usize>,

    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Comma-separated twist angles in radians.
    #[arg(long, global = true, value_delimiter = ',')]
    phis: Option<Vec<f64>>,

    /// Sweep phi = 2 pi k / n for k = 0..=n instead of listing angles.
    #[arg(long, global = true)]
    phi_divisions: Option<usize>,

    #[arg(long, global = true)]
    exclude_margin: Option<usize>,

    #[arg(long, global = true)]
    cut_origin: Option<usize>,

    #[arg(long, global = true)]
    v_fermi: Option<f64>,

    /// Relative step used to move off an exceptional point; 0 disables it.
    #[arg(long, global = true)]
    ep_eta: Option<f64>,

    #[arg(long, global = true)]
    ep_tol: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    Spectrum,
    Entropy,
    Renyi,
    EnergyScaling,
    Fidelity,
    EpCheck,
    TbcSweep,
    Fig2a,
    Fig2b,
    Fig2c,
    #[command(name = "figS2", alias = "figs2")]
    FigS2,
    #[command(name = "figS3", alias = "figs3")]
    FigS3,
    #[command(name = "figS4", alias = "figs4")]
    FigS4,
}

impl Command {
    fn task(self) -> std::result::Result<Task, FigureId> {
        match self {
            Command::Spectrum => Ok(Task::Spectrum),
            Command::Entropy => Ok(Task::Entropy),
            Command::Renyi => Ok(Task::Renyi),
            Command::EnergyScaling => Ok(Task::EnergyScaling),
            Command::Fidelity => Ok(Task::Fidelity),
            Command::EpCheck => Ok(Task::EpCheck),
            Command::TbcSweep => Ok(Task::TbcSweep),
            Command::Fig2a => Err(FigureId::Fig2a),
            Command::Fig2b => Err(FigureId::Fig2b),
            Command::Fig2c => Err(FigureId::Fig2c),
            Command::FigS2 => Err(FigureId::FigS2),
            Command::FigS3 => Err(FigureId::FigS3),
            Command::FigS4 => Err(FigureId::FigS4),
        }
    }
}

fn build_config(task: Task, c: &Common) -> Result<RunConfig> {
    let mut config = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text, task)?
        }
        None => RunConfig::new(presets::ring(presets::ENTROPY_CELLS_RING, 1.0), task),
    };
    if let Some(n) = c.n_cells {
        config.spec.n_cells = n;
    }
    if let Some(b) = c.boundary {
        config.spec.boundary = b;
    }
    if let Some(l) = c.lambda {
        config.spec = config.spec.with_lambda(l);
    }
    if let Some(p) = c.phi {
        config.spec.phi = p;
    }
    if c.renyi_n.is_some() {
        config.renyi_n = c.renyi_n;
    }
    if c.sizes.is_some() {
        config.sizes = c.sizes.clone();
    }
    if c.min_size.is_some() {
        config.min_size = c.min_size;
    }
    if c.steps.is_some() {
        config.steps = c.steps;
        config.lambdas = None;
    }
    if c.eps.is_some() {
        config.eps = c.eps;
    }
    if c.phis.is_some() {
        config.phis = c.phis.clone();
    }
    if let Some(n) = c.phi_divisions {
        config.phis = Some((0..=n).map(|k| 2.0 * PI * k as f64 / n.max(1) as f64).collect());
    }
    if let Some(m) = c.exclude_margin {
        config.exclude_margin = m;
    }
    if let Some(o) = c.cut_origin {
        config.cut_origin = o;
    }
    if let Some(v) = c.v_fermi {
        config.v_fermi = v;
    }
    if let Some(eta) = c.ep_eta {
        config.solve.ep_eta = (eta > 0.0).then_some(eta);
    }
    if c.ep_tol.is_some() {
        config.ep_tol = c.ep_tol;
    }
    if c.out.is_some() {
        config.out = c.out.clone();
    }
    if let Some(f) = &c.format {
        config.format = f.parse()?;
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let report = match cli.command.task() {
        Ok(task) => {
            let config = build_config(task, &cli.common)?;
            let to_stdout = config.out.is_none();
            let report = cli::run(&config)?;
            for line in &report.summaries {
                if to_stdout {
                    eprintln!("{line}");
                } else {
                    println!("{line}");
                }
            }
            report
        }
        Err(figure) => {
            let format: OutputFormat = cli.common.format.as_deref().unwrap_or("csv").parse()?;
            let dir = cli.common.out.clone().unwrap_or_else(|| PathBuf::from(figure.as_str()));
            let report = cli::reproduce_figure(figure, &dir, format)?;
            for line in &report.summaries {
                println!("{line}");
            }
            report
        }
    };
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let message = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                "a subcommand is required; see --help".to_string()
            } else {
                let rendered = e.render().to_string();
                rendered.lines().next().unwrap_or("").trim_start_matches("error: ").to_string()
            };
            eprintln!("{}", error_json(&Error::Config(message)));
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            if matches!(e, Error::Config(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

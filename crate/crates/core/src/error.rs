use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chain needs at least 2 unit cells, got {0}")]
    TooFewCells(usize),

    #[error("impurity at cell x={cell} is outside [{min}, {max}] for a chain of {n_cells} cells")]
    ImpurityOutOfRange {
        cell: i64,
        min: i64,
        max: i64,
        n_cells: usize,
    },

    #[error("two impurities share cell x={0}")]
    DuplicateImpurity(i64),

    #[error("invalid chain spec: {0}")]
    InvalidSpec(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("right eigenvector matrix is singular at an exceptional point (overlap_cond = {overlap_cond:e})")]
    EpDegenerate { overlap_cond: f64 },

    #[error("spectrum is PT-broken (max |Im E| = {max_im:e}); half-filled ground state is undefined")]
    PtBroken { max_im: f64 },

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("invalid Renyi index {0}: must be positive")]
    InvalidRenyi(f64),

    #[error("fit needs at least {needed} usable points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("Fock oracle limited to {max} sites, got {sites}")]
    DimensionGuard { sites: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("at L = {size}: {source}")]
    AtSize {
        size: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("at lambda = {lambda}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_size(size: usize, e: Error) -> Self {
        Error::AtSize {
            size,
            source: Box::new(e),
        }
    }

    pub(crate) fn at_lambda(lambda: f64, e: Error) -> Self {
        Error::AtLambda {
            lambda,
            source: Box::new(e),
        }
    }

    /// Short machine-readable tag used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TooFewCells(_) | Error::ImpurityOutOfRange { .. } | Error::DuplicateImpurity(_) | Error::InvalidSpec(_) => "invalid_spec",
            Error::Eigen(_) => "eigen",
            Error::EpDegenerate { .. } => "ep_degenerate",
            Error::PtBroken { .. } => "pt_broken",
            Error::InvalidCut(_) | Error::InvalidRenyi(_) => "invalid_argument",
            Error::InsufficientPoints { .. } | Error::DegenerateFit(_) => "fit",
            Error::DimensionGuard { .. } | Error::DimensionMismatch(_) => "dimension",
            Error::AtSize { source, .. } | Error::AtLambda { source, .. } => source.kind(),
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

//! Non-Hermitian SSH chains with PT-symmetric impurities: biorthogonal
//! entanglement, finite-size energy scaling and fidelity susceptibility.

pub mod analytic;
pub mod cli;
pub mod eigensys;
pub mod entanglement;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod presets;
pub mod scaling;

pub use eigensys::{BiorthSystem, ManyBodyState, PtPhase, SolveOptions, SolvedChain};
pub use entanglement::{CorrelationMatrix, Cut, EntropyCurve};
pub use error::{Error, Result};
pub use fidelity::FidelityCurve;
pub use model::{Boundary, ChainSpec, Hamiltonian, ImpuritySpec};
pub use scaling::{FitResult, Geometry};

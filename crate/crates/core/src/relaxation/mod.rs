//! Relaxation experiments: stream functions, decreasing rearrangements,
//! decay fits and the near-equilibrium presets.

mod fit;
mod presets;
mod rearrangement;
mod stream;

use thiserror::Error;

use crate::solver::SolverError;

pub use fit::{decay_fit, DecayFit};
pub use presets::{
    bfv_sample, preset_bfv_stability, preset_helicity, preset_rearrangement, preset_velocity_relaxation,
    BfvParams, BfvReport, BfvSample, HelicityParams, HelicityReport, RearrangementReport, VelocityParams,
    VelocityReport,
};
pub use rearrangement::{decreasing_rearrangement, RearrangementProfile};
pub use stream::{project_p0, project_perp, stream_function, StreamFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelaxationError {
    #[error("stream functions are planar, field has dimension {0}")]
    Dimension(usize),
    #[error("nonpositive value {value} at t = {t} inside the fit window")]
    NonPositive { t: f64, value: f64 },
    #[error("fit window holds {0} distinct points, need at least 2")]
    TooFewPoints(usize),
    #[error("invalid preset parameters: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

//! Norms, Littlewood–Paley/Besov machinery and topology diagnostics.

mod besov;
pub mod littlewood_paley;
mod norms;
mod topology;

use thiserror::Error;

pub use besov::{besov_norm, besov_norm_fd, log_interp_check, LogInterpolation};
pub use littlewood_paley::{lp_decompose, LPDecomposition};
pub use norms::{lp_norm, lp_norm_samples, sobolev_norm, FieldNorms};
pub use topology::{
    current_l2, helicity, levelset_distribution, levelset_grid, LEVELSET_LEVELS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("exponent must be ≥ 1, got {0}")]
    Exponent(f64),
    #[error("smoothness must lie in (0, 1), got {0}")]
    Smoothness(f64),
    #[error("theta must be > 0, got {0}")]
    Theta(f64),
    #[error("operation requires dimension {expected}, field has dimension {found}")]
    Dimension { expected: usize, found: usize },
}

/// Scalar observables sampled at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `‖B‖²_{L²}`.
    pub energy: f64,
    /// `‖u‖²_{Ḣ^γ}`.
    pub dissipation: f64,
    /// `∫₀ᵗ ‖u‖²_{Ḣ^γ} dτ`.
    pub cum_dissipation: f64,
    /// `E(t) + 2·cum_dissipation − E(0)`.
    pub energy_residual: f64,
    /// `(p, ‖B‖_{L^p})` in configured order.
    pub lp_norms: Vec<(f64, f64)>,
    /// `(α, ‖u‖_{H^α})` in configured order.
    pub u_sobolev: Vec<(f64, f64)>,
    pub u_grad_linf: f64,
    pub u_linf: f64,
    /// Only defined in three dimensions.
    pub helicity: Option<f64>,
    pub current_l2: f64,
    pub div_b_residual: f64,
    /// `‖B‖²_{H^s}` with `s = d/2 + 3/2`, monitored against `hs_envelope`.
    pub hs_norm_sq: f64,
    /// Double-exponential a priori bound for `hs_norm_sq` with unit constant.
    pub hs_envelope: f64,
    /// Bound for `‖B‖²_{L^{2+ε}}` with unit constant, `2+ε` the largest finite
    /// exponent above 2 in the configured list (NaN when there is none).
    pub lp_envelope: f64,
    /// `μ(λ)` of the stream function on the fixed level grid (2-D only).
    pub levelset_mu: Vec<f64>,
}

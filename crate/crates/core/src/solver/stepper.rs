use crate::spectral::{leray_project, Grid, SpectralVector};

use super::dynamics::{compute_velocity, evaluate, RhsEval};
use super::SolverError;

/// Largest step for which classical RK4 is stable on the negative real axis.
pub const RK4_REAL_STABILITY: f64 = 2.785;

const GRAD_FLOOR: f64 = 1e-12;

/// Time, field, and the running dissipation integral `∫₀ᵗ ‖u‖²_{Ḣ^γ} dτ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub b: SpectralVector,
    pub cum_dissipation: f64,
}

impl SolverState {
    pub fn new(b: SpectralVector) -> Self {
        Self {
            t: 0.0,
            b,
            cum_dissipation: 0.0,
        }
    }

    /// `‖B‖²_{L²}` (normalized measure).
    pub fn energy(&self) -> f64 {
        self.b.norm_sq()
    }
}

/// Advective CFL step
/// `min(dt_max, cfl·min(h/‖u‖_∞, 1/max(‖∇u‖_∞, 10⁻¹²)))`.
pub fn cfl_dt(b: &SpectralVector, gamma: f64, cfl: f64, dt_max: f64) -> f64 {
    let grid = *b.grid();
    let u = compute_velocity(b, gamma);
    let u_linf = u.magnitude_samples().into_iter().fold(0.0, f64::max);
    let mut grad_sq = vec![0.0; grid.len()];
    for c in u.components() {
        for a in 0..grid.dim() {
            let s = crate::spectral::derivative(c, a).to_samples();
            for (g, v) in grad_sq.iter_mut().zip(&s) {
                *g += v * v;
            }
        }
    }
    let grad_linf = grad_sq.into_iter().fold(0.0, f64::max).sqrt();
    cfl_dt_from_norms(&grid, u_linf, grad_linf, cfl, dt_max)
}

pub(crate) fn cfl_dt_from_norms(grid: &Grid, u_linf: f64, grad_linf: f64, cfl: f64, dt_max: f64) -> f64 {
    let advective = if u_linf > 0.0 {
        grid.spacing() / u_linf
    } else {
        f64::INFINITY
    };
    let strain = 1.0 / grad_linf.max(GRAD_FLOOR);
    dt_max.min(cfl * advective.min(strain))
}

/// Step bound from the frozen-coefficient linearization of the induction
/// equation, whose symbol is `−(2π k·B)² (2π|k|)^{−2γ}` (times a projection).
/// For `γ < 1` this term is stiff at high wavenumber and limits explicit RK4
/// even when `u` itself is tiny.
pub fn stability_dt(b: &SpectralVector, gamma: f64, cfl: f64) -> f64 {
    let b_linf = b.truncated().magnitude_samples().into_iter().fold(0.0, f64::max);
    stability_dt_from_norm(b.grid(), b_linf, gamma, cfl)
}

pub(crate) fn stability_dt_from_norm(grid: &Grid, b_linf: f64, gamma: f64, cfl: f64) -> f64 {
    if b_linf == 0.0 {
        return f64::INFINITY;
    }
    let scale = grid.wave_scale();
    let kmin = scale;
    let kmax = scale * grid.dealias_kmax() as f64 * (grid.dim() as f64).sqrt();
    let exponent = 2.0 - 2.0 * gamma;
    let symbol = kmin.powf(exponent).max(kmax.powf(exponent));
    cfl * RK4_REAL_STABILITY / (b_linf * b_linf * symbol)
}

fn check_finite(stage: &RhsEval, state: &SolverState) -> Result<(), SolverError> {
    let finite = stage.dissipation.is_finite()
        && stage
            .db
            .components()
            .iter()
            .all(|c| c.coeffs().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    if finite {
        Ok(())
    } else {
        Err(SolverError::BlowUp {
            t: state.t,
            energy: state.energy(),
            max_coeff: state.b.max_abs_coeff(),
        })
    }
}

/// One classical RK4 step of the augmented system
/// `(B, ∫‖u‖²_{Ḣ^γ})`, followed by Hermitian symmetrization and Leray
/// projection of `B`.
pub fn rk4_step(state: &SolverState, dt: f64, gamma: f64) -> Result<SolverState, SolverError> {
    let k1 = evaluate(&state.b, gamma);
    rk4_step_from(state, k1, dt, gamma)
}

pub(crate) fn rk4_step_from(
    state: &SolverState,
    k1: RhsEval,
    dt: f64,
    gamma: f64,
) -> Result<SolverState, SolverError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::InvalidStep(dt));
    }
    check_finite(&k1, state)?;
    let b = &state.b;
    let k2 = evaluate(&b.axpy(0.5 * dt, &k1.db), gamma);
    check_finite(&k2, state)?;
    let k3 = evaluate(&b.axpy(0.5 * dt, &k2.db), gamma);
    check_finite(&k3, state)?;
    let k4 = evaluate(&b.axpy(dt, &k3.db), gamma);
    check_finite(&k4, state)?;

    let w = dt / 6.0;
    let next = b
        .axpy(w, &k1.db)
        .axpy(2.0 * w, &k2.db)
        .axpy(2.0 * w, &k3.db)
        .axpy(w, &k4.db);
    let mut next = next.truncated();
    next.symmetrize();
    let zero_mean = b.is_zero_mean();
    let next = leray_project(&next).with_flags(true, zero_mean);
    let cum = state.cum_dissipation
        + w * (k1.dissipation + 2.0 * k2.dissipation + 2.0 * k3.dissipation + k4.dissipation);
    let out = SolverState {
        t: state.t + dt,
        b: next,
        cum_dissipation: cum,
    };
    if !out.energy().is_finite() {
        return Err(SolverError::BlowUp {
            t: out.t,
            energy: out.energy(),
            max_coeff: out.b.max_abs_coeff(),
        });
    }
    Ok(out)
}

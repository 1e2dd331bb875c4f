use crate::analysis::{
    current_l2, helicity, levelset_distribution, levelset_grid, lp_norm, sobolev_norm,
    DiagnosticsRecord, LEVELSET_LEVELS,
};
use crate::relaxation::stream_function;
use crate::spectral::{derivative, SpectralVector};

use super::config::DiagnosticsSpec;
use super::dynamics::{compute_velocity, dissipation_rate};
use super::stepper::SolverState;

/// Quantities frozen at `t = 0` that later records are measured against.
#[derive(Debug, Clone)]
pub struct DiagnosticsContext {
    gamma: f64,
    spec: DiagnosticsSpec,
    e0: f64,
    hs: f64,
    b0_hs_sq: f64,
    b0_linf: f64,
    b0_l2: f64,
    envelope_p: Option<(f64, f64)>,
    levels: Vec<f64>,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

impl DiagnosticsContext {
    pub fn new(b0: &SpectralVector, gamma: f64, spec: &DiagnosticsSpec) -> Self {
        let d = b0.dim();
        let hs = d as f64 / 2.0 + 1.5;
        let envelope_p = spec
            .p_list
            .iter()
            .copied()
            .filter(|p| p.is_finite() && *p > 2.0)
            .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))))
            .map(|p| (p, lp_norm(b0, p).unwrap_or(f64::NAN)));
        let levels = match stream_function(b0) {
            Ok(phi) => {
                let max_abs = phi.samples().iter().fold(0.0, |m: f64, v| m.max(v.abs()));
                levelset_grid(max_abs, LEVELSET_LEVELS)
            }
            Err(_) => Vec::new(),
        };
        Self {
            gamma,
            spec: spec.clone(),
            e0: b0.norm_sq(),
            hs,
            b0_hs_sq: sobolev_norm(b0, hs, false).powi(2),
            b0_linf: max_of(&b0.magnitude_samples()),
            b0_l2: b0.norm_sq().sqrt(),
            envelope_p,
            levels,
        }
    }

    pub fn initial_energy(&self) -> f64 {
        self.e0
    }

    /// Level grid used for the stream-function distribution (empty unless 2-D).
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// `‖B₀‖²_{H^s} · exp(exp((1+t‖B₀‖²_{H^s}) · exp((1+t+‖B₀‖²_∞)³ e^{√t‖B₀‖_{L²}})))`.
    pub fn hs_envelope(&self, t: f64) -> f64 {
        let inner = (1.0 + t + self.b0_linf.powi(2)).powi(3) * (t.sqrt() * self.b0_l2).exp();
        let mid = (1.0 + t * self.b0_hs_sq) * inner.exp();
        self.b0_hs_sq * mid.exp().exp()
    }

    /// `exp((1 + t + ‖B₀‖²_{L^p}) · e^{√t‖B₀‖_{L²}})`.
    pub fn lp_envelope(&self, t: f64) -> f64 {
        match self.envelope_p {
            Some((_, b0p)) => ((1.0 + t + b0p * b0p) * (t.sqrt() * self.b0_l2).exp()).exp(),
            None => f64::NAN,
        }
    }

    pub fn record(&self, state: &SolverState) -> DiagnosticsRecord {
        let b = &state.b;
        let grid = *b.grid();
        let d = grid.dim();
        let u = compute_velocity(b, self.gamma);
        let energy = b.norm_sq();

        let mut grad_sq = vec![0.0; grid.len()];
        for c in u.components() {
            for a in 0..d {
                for (g, v) in grad_sq.iter_mut().zip(derivative(c, a).to_samples()) {
                    *g += v * v;
                }
            }
        }
        let lp_norms = self
            .spec
            .p_list
            .iter()
            .map(|&p| (p, lp_norm(b, p).unwrap_or(f64::NAN)))
            .collect();
        let u_sobolev = self
            .spec
            .alpha_list
            .iter()
            .map(|&a| (a, sobolev_norm(&u, a, false)))
            .collect();
        let levelset_mu = match (self.levels.is_empty(), stream_function(b)) {
            (false, Ok(phi)) => levelset_distribution(&phi.samples(), &self.levels),
            _ => Vec::new(),
        };
        DiagnosticsRecord {
            t: state.t,
            energy,
            dissipation: dissipation_rate(&u, self.gamma),
            cum_dissipation: state.cum_dissipation,
            energy_residual: energy + 2.0 * state.cum_dissipation - self.e0,
            lp_norms,
            u_sobolev,
            u_grad_linf: max_of(&grad_sq).sqrt(),
            u_linf: max_of(&u.magnitude_samples()),
            helicity: helicity(b).ok(),
            current_l2: current_l2(b),
            div_b_residual: b.divergence_residual(),
            hs_norm_sq: sobolev_norm(b, self.hs, false).powi(2),
            hs_envelope: self.hs_envelope(state.t),
            lp_envelope: self.lp_envelope(state.t),
            levelset_mu,
        }
    }
}

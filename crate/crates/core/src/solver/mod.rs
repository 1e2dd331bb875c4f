//! Time integration of the magnetic relaxation system
//! `∂_t B + u·∇B = B·∇u`, `u = Λ^{−2γ} P div(B⊗B)`.

mod config;
mod diagnostics;
mod dynamics;
mod initial;
mod stepper;

use thiserror::Error;

use crate::analysis::DiagnosticsRecord;
use crate::spectral::SpectralVector;

pub use config::{DiagnosticsSpec, InitialData, ModeCoeff, SimConfig};
pub use diagnostics::DiagnosticsContext;
pub use dynamics::{compute_pressure, compute_velocity, dissipation_rate, pressure_residual, rhs, RhsEval};
pub use initial::{build_initial_field, random_solenoidal};
pub use stepper::{cfl_dt, rk4_step, stability_dt, SolverState, RK4_REAL_STABILITY};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("blow-up at t = {t}: energy = {energy}, max |B̂_k| = {max_coeff}")]
    BlowUp { t: f64, energy: f64, max_coeff: f64 },
    #[error("invalid time step {0}")]
    InvalidStep(f64),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("sink failed: {0}")]
    Sink(String),
}

/// Consumer of output samples.
pub trait Sink {
    fn observe(&mut self, state: &SolverState, record: &DiagnosticsRecord) -> Result<(), SolverError>;
}

impl<F> Sink for F
where
    F: FnMut(&SolverState, &DiagnosticsRecord) -> Result<(), SolverError>,
{
    fn observe(&mut self, state: &SolverState, record: &DiagnosticsRecord) -> Result<(), SolverError> {
        self(state, record)
    }
}

/// Sink that keeps every record.
#[derive(Debug, Default, Clone)]
pub struct RecordLog {
    pub records: Vec<DiagnosticsRecord>,
}

impl Sink for RecordLog {
    fn observe(&mut self, _state: &SolverState, record: &DiagnosticsRecord) -> Result<(), SolverError> {
        self.records.push(record.clone());
        Ok(())
    }
}

/// Final state plus step statistics.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SolverState,
    pub steps: usize,
    pub outputs: usize,
    /// Largest `(E_{n+1} − E_n)/E_n` over accepted steps (≤ 0 when monotone).
    pub max_energy_increase: f64,
    /// Largest relative divergence residual over accepted steps.
    pub max_div_residual: f64,
}

/// Builds the initial field from `config` and integrates to `t_end`.
pub fn run_simulation(config: &SimConfig, sinks: &mut [&mut dyn Sink]) -> Result<RunOutcome, SolverError> {
    config.validate().map_err(SolverError::InvalidConfig)?;
    let b0 = build_initial_field(config.grid, &config.initial_data, config.seed)?;
    run_from(config, b0, sinks)
}

/// Integrates `b0` with the stepping parameters of `config` (the recipe is ignored).
pub fn run_from(
    config: &SimConfig,
    b0: SpectralVector,
    sinks: &mut [&mut dyn Sink],
) -> Result<RunOutcome, SolverError> {
    config.validate().map_err(SolverError::InvalidConfig)?;
    let gamma = config.gamma;
    if gamma < config.gamma_critical() {
        log::warn!(
            "gamma = {gamma} is below the critical value {}: global regularity is open, the run may blow up",
            config.gamma_critical()
        );
    }
    let grid = *b0.grid();
    let ctx = DiagnosticsContext::new(&b0, gamma, &config.diagnostics);
    let mut state = SolverState::new(b0);
    let mut outputs = 0;
    let mut emit = |state: &SolverState, sinks: &mut [&mut dyn Sink]| -> Result<(), SolverError> {
        let record = ctx.record(state);
        for sink in sinks.iter_mut() {
            sink.observe(state, &record)?;
        }
        outputs += 1;
        Ok(())
    };
    emit(&state, sinks)?;

    let mut steps = 0;
    let mut max_increase = f64::NEG_INFINITY;
    let mut max_div = state.b.divergence_residual();
    let mut next_output = 1usize;
    while state.t < config.t_end {
        let nominal = next_output as f64 * config.output_every;
        let (target, is_output) = if nominal >= config.t_end * (1.0 - 1e-12) {
            (config.t_end, true)
        } else {
            (nominal, true)
        };
        let k1 = dynamics::evaluate(&state.b, gamma);
        let mut dt = match config.dt_fixed {
            Some(dt) => dt,
            None => stepper::cfl_dt_from_norms(&grid, k1.u_linf, k1.grad_u_linf, config.cfl, config.dt_max)
                .min(stepper::stability_dt_from_norm(&grid, k1.b_linf, gamma, config.cfl)),
        };
        let remaining = target - state.t;
        let hit = dt >= remaining - 1e-10 * dt;
        if hit {
            dt = remaining;
        }
        if !(dt > 0.0) {
            return Err(SolverError::InvalidStep(dt));
        }
        let e_old = state.energy();
        let mut next = stepper::rk4_step_from(&state, k1, dt, gamma)?;
        if hit {
            next.t = target;
        }
        let e_new = next.energy();
        if e_old > 0.0 {
            max_increase = max_increase.max((e_new - e_old) / e_old);
        }
        max_div = max_div.max(next.b.divergence_residual());
        state = next;
        steps += 1;
        if hit && is_output {
            log::debug!("t = {:.6} energy = {:.12e} steps = {steps}", state.t, e_new);
            emit(&state, sinks)?;
            next_output += 1;
        }
    }
    Ok(RunOutcome {
        state,
        steps,
        outputs,
        max_energy_increase: max_increase,
        max_div_residual: max_div,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn shear_config(gamma: f64) -> SimConfig {
        let g = Grid::new(2, 16).unwrap();
        let recipe = InitialData::Shear {
            amplitude: 1.0,
            wavenumber: 1,
            mean: 0.0,
        };
        SimConfig::new(g, gamma, 1.0, recipe)
    }

    #[test]
    fn shear_is_fixed_point() {
        for gamma in [0.0, 2.0, 3.0] {
            let cfg = shear_config(gamma);
            let b0 = build_initial_field(cfg.grid, &cfg.initial_data, 0).unwrap();
            let mut log = RecordLog::default();
            let out = run_simulation(&cfg, &mut [&mut log]).unwrap();
            assert!((out.state.t - 1.0).abs() < 1e-15);
            assert!(out.state.b.max_abs_diff(&b0) < 1e-12);
            assert_eq!(log.records.len(), 101);
            assert!(log.records.iter().all(|r| r.energy_residual.abs() < 1e-14));
        }
    }

    #[test]
    fn outputs_hit_requested_times() {
        let mut cfg = shear_config(2.0);
        cfg.output_every = 0.3;
        let mut times = Vec::new();
        let mut sink = |s: &SolverState, _: &DiagnosticsRecord| {
            times.push(s.t);
            Ok(())
        };
        run_simulation(&cfg, &mut [&mut sink]).unwrap();
        assert_eq!(times.len(), 5);
        assert_eq!(*times.last().unwrap(), 1.0);
        assert!((times[2] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn random_run_is_monotone() {
        let g = Grid::new(2, 16).unwrap();
        let recipe = InitialData::RandomBandlimited {
            kmax: 4,
            amplitude: 1.0,
        };
        let mut cfg = SimConfig::new(g, 2.0, 0.2, recipe);
        cfg.seed = 7;
        let out = run_simulation(&cfg, &mut []).unwrap();
        assert!(out.max_energy_increase <= 1e-12);
        assert!(out.max_div_residual <= 1e-12);
        assert!(out.state.cum_dissipation > 0.0);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = shear_config(2.0);
        cfg.gamma = -1.0;
        let err = run_simulation(&cfg, &mut []).unwrap_err();
        assert_eq!(err, SolverError::InvalidConfig("gamma must be ≥ 0".into()));
    }
}

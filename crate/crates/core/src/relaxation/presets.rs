//! Experiment presets built on the solver.

use std::f64::consts::PI;

use crate::analysis::{levelset_distribution, levelset_grid, DiagnosticsRecord, LEVELSET_LEVELS};
use crate::solver::{
    build_initial_field, compute_velocity, run_from, InitialData, RecordLog, RunOutcome, SimConfig, Sink,
    SolverError, SolverState,
};
use crate::spectral::{Grid, SpectralVector};

use super::fit::{decay_fit, DecayFit};
use super::rearrangement::{decreasing_rearrangement, RearrangementProfile};
use super::stream::{project_p0, project_perp, stream_function};
use super::RelaxationError;

fn grid(dim: usize, n: usize, period: f64) -> Result<Grid, RelaxationError> {
    Grid::new(dim, n)
        .and_then(|g| g.with_period(period))
        .map_err(|e| RelaxationError::Config(e.to_string()))
}

/// Parameters shared by the near-`e₁` presets (`d = 2`, `γ = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct BfvParams {
    pub eta: f64,
    pub n: usize,
    pub t_end: f64,
    pub seed: u64,
    /// Torus side; `2π` makes the slowest linear decay rate equal to one.
    pub period: f64,
    pub kmax: u32,
    pub cfl: f64,
    pub output_every: f64,
    pub window: [f64; 2],
}

impl BfvParams {
    pub fn new(eta: f64, n: usize, t_end: f64, seed: u64) -> Self {
        Self {
            eta,
            n,
            t_end,
            seed,
            period: 2.0 * PI,
            kmax: 8,
            cfl: 0.5,
            output_every: 0.1,
            window: [2.0, t_end.min(10.0)],
        }
    }

    pub fn config(&self) -> Result<SimConfig, RelaxationError> {
        let recipe = InitialData::E1PlusPerturbation {
            eta: self.eta,
            kmax: self.kmax,
        };
        let mut cfg = SimConfig::new(grid(2, self.n, self.period)?, 0.0, self.t_end, recipe);
        cfg.cfl = self.cfl;
        cfg.dt_max = self.output_every;
        cfg.output_every = self.output_every;
        cfg.seed = self.seed;
        Ok(cfg)
    }
}

/// Perturbation norms at one output time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfvSample {
    pub t: f64,
    /// `‖P⊥(B − e₁)‖_{L²}`.
    pub perp: f64,
    /// `‖P₀(B¹ − 1)‖_{L²}`.
    pub p0_b1: f64,
    /// `‖B − e₁‖_{L²}`.
    pub deviation: f64,
    /// `‖P₀B²‖_∞`.
    pub p0_b2_linf: f64,
}

pub fn bfv_sample(t: f64, b: &SpectralVector) -> BfvSample {
    let mut b1 = b.component(0).clone();
    b1.coeffs_mut()[0] -= 1.0;
    let b2 = b.component(1);
    let perp = (project_perp(&b1).norm_sq() + project_perp(b2).norm_sq()).sqrt();
    let p0_b1 = project_p0(&b1).norm_sq().sqrt();
    let deviation = (b1.norm_sq() + b2.norm_sq()).sqrt();
    let p0_b2_linf = project_p0(b2)
        .to_samples()
        .into_iter()
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    BfvSample {
        t,
        perp,
        p0_b1,
        deviation,
        p0_b2_linf,
    }
}

#[derive(Debug, Clone)]
pub struct BfvReport {
    pub params: BfvParams,
    pub samples: Vec<BfvSample>,
    pub records: Vec<DiagnosticsRecord>,
    /// Fit of `‖P⊥(B − e₁)‖` on the window; fails when the series vanishes.
    pub fit: Result<DecayFit, RelaxationError>,
    pub outcome: RunOutcome,
}

impl BfvReport {
    pub fn max_deviation(&self) -> f64 {
        self.samples.iter().map(|s| s.deviation).fold(0.0, f64::max)
    }

    pub fn max_p0_b2(&self) -> f64 {
        self.samples.iter().map(|s| s.p0_b2_linf).fold(0.0, f64::max)
    }

    /// Whether `‖P⊥(B − e₁)‖` is nonincreasing on output samples with `t ≥ t0`.
    pub fn perp_monotone_after(&self, t0: f64) -> bool {
        let tail: Vec<f64> = self.samples.iter().filter(|s| s.t >= t0).map(|s| s.perp).collect();
        tail.windows(2).all(|w| w[1] <= w[0])
    }
}

fn run_near_e1(
    params: &BfvParams,
    extra: &mut dyn Sink,
) -> Result<(SimConfig, SpectralVector, Vec<BfvSample>, RecordLog, RunOutcome), RelaxationError> {
    let cfg = params.config()?;
    let b0 = build_initial_field(cfg.grid, &cfg.initial_data, cfg.seed)?;
    let mut samples = Vec::new();
    let mut sampler = |s: &SolverState, _: &DiagnosticsRecord| -> Result<(), SolverError> {
        samples.push(bfv_sample(s.t, &s.b));
        Ok(())
    };
    let mut log = RecordLog::default();
    let outcome = run_from(&cfg, b0.clone(), &mut [&mut sampler, &mut log, extra])?;
    Ok((cfg, b0, samples, log, outcome))
}

/// Near-`e₁` stability run: decay of `‖P⊥(B − e₁)‖` and the invariants
/// `‖B − e₁‖ ≤ η`, `P₀B² ≡ 0`.
pub fn preset_bfv_stability(params: &BfvParams) -> Result<BfvReport, RelaxationError> {
    let mut none = |_: &SolverState, _: &DiagnosticsRecord| Ok(());
    let (_, _, samples, log, outcome) = run_near_e1(params, &mut none)?;
    let series: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.perp)).collect();
    let fit = decay_fit(&series, params.window);
    Ok(BfvReport {
        params: params.clone(),
        samples,
        records: log.records,
        fit,
        outcome,
    })
}

#[derive(Debug, Clone)]
pub struct RearrangementReport {
    pub bfv: BfvReport,
    /// Gauge constant added to the stream function so that `P₀φ₀ = L − x₂ ≥ 0`.
    pub offset: f64,
    pub profile: RearrangementProfile,
    /// `P₀φ(T)` on the `x₂` grid.
    pub final_average: Vec<f64>,
    /// `‖P₀φ(T) − φ^∞‖ / ‖φ^∞‖` over the `x₂` grid.
    pub error: f64,
    /// `(t, max_λ |μ_t(λ) − μ₀(λ)|)` at every output.
    pub drift: Vec<(f64, f64)>,
}

impl RearrangementReport {
    /// Largest level-set drift over outputs with `t ≤ t_max`.
    pub fn max_drift_until(&self, t_max: f64) -> f64 {
        self.drift
            .iter()
            .filter(|(t, _)| *t <= t_max + 1e-9)
            .map(|d| d.1)
            .fold(0.0, f64::max)
    }
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Long near-`e₁` run compared with the layer-cake limit of `|φ₀|`.
pub fn preset_rearrangement(params: &BfvParams) -> Result<RearrangementReport, RelaxationError> {
    let g = grid(2, params.n, params.period)?;
    let offset = params.period;
    let recipe = InitialData::E1PlusPerturbation {
        eta: params.eta,
        kmax: params.kmax,
    };
    let b0 = build_initial_field(g, &recipe, params.seed)?;
    let phi0 = stream_function(&b0)?.with_offset(offset).samples();
    let max_abs = phi0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let levels = levelset_grid(max_abs, LEVELSET_LEVELS);
    let mu0 = levelset_distribution(&phi0, &levels);

    let mut drift = Vec::new();
    let mut final_average = Vec::new();
    let mut observer = |s: &SolverState, _: &DiagnosticsRecord| -> Result<(), SolverError> {
        let phi = stream_function(&s.b)
            .map_err(|e| SolverError::Sink(e.to_string()))?
            .with_offset(offset);
        let mu = levelset_distribution(&phi.samples(), &levels);
        let d = mu.iter().zip(&mu0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        drift.push((s.t, d));
        final_average = phi.horizontal_average();
        Ok(())
    };
    let (_, _, samples, log, outcome) = run_near_e1(params, &mut observer)?;
    let series: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.perp)).collect();
    let fit = decay_fit(&series, params.window);

    let profile = decreasing_rearrangement(&phi0, params.n, params.period);
    let error = rel_l2(&final_average, &profile.phi_inf);
    Ok(RearrangementReport {
        bfv: BfvReport {
            params: params.clone(),
            samples,
            records: log.records,
            fit,
            outcome,
        },
        offset,
        profile,
        final_average,
        error,
        drift,
    })
}

/// Velocity relaxation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityParams {
    pub dim: usize,
    pub gamma: f64,
    pub alpha_list: Vec<f64>,
    pub n: usize,
    pub t_end: f64,
    pub seed: u64,
    pub initial_data: InitialData,
    pub period: f64,
    pub cfl: f64,
    pub output_every: f64,
}

impl VelocityParams {
    /// Random band-limited data (`|k| ≤ 8`) of `L²` size `amplitude`.
    pub fn new(dim: usize, gamma: f64, n: usize, t_end: f64, amplitude: f64, seed: u64) -> Self {
        Self {
            dim,
            gamma,
            alpha_list: vec![1.0],
            n,
            t_end,
            seed,
            initial_data: InitialData::RandomBandlimited { kmax: 8, amplitude },
            period: 1.0,
            cfl: 0.5,
            output_every: t_end / 100.0,
        }
    }

    pub fn config(&self) -> Result<SimConfig, RelaxationError> {
        let mut cfg = SimConfig::new(
            grid(self.dim, self.n, self.period)?,
            self.gamma,
            self.t_end,
            self.initial_data.clone(),
        );
        cfg.cfl = self.cfl;
        cfg.output_every = self.output_every;
        cfg.dt_max = self.output_every;
        cfg.seed = self.seed;
        cfg.diagnostics.alpha_list = self.alpha_list.clone();
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct VelocityReport {
    pub params: VelocityParams,
    /// `(t, [‖u(t)‖_{H^α} for α in alpha_list])`.
    pub table: Vec<(f64, Vec<f64>)>,
    /// `‖u(T)‖_{H^α} / ‖u(0)‖_{H^α}`; NaN when `u(0) = 0`.
    pub ratios: Vec<f64>,
    /// Fraction of output intervals on which each norm decreased.
    pub decreasing_fraction: Vec<f64>,
    /// Exponents outside the range where relaxation is guaranteed.
    pub warnings: Vec<String>,
    pub records: Vec<DiagnosticsRecord>,
    pub outcome: RunOutcome,
}

/// Tracks `‖u(t)‖_{H^α}`; exponents `α ≥ 2γ − γ_c` (or `γ < γ_c`) are warned
/// about but still measured.
pub fn preset_velocity_relaxation(params: &VelocityParams) -> Result<VelocityReport, RelaxationError> {
    let cfg = params.config()?;
    let gamma_c = cfg.gamma_critical();
    let mut warnings = Vec::new();
    if params.gamma < gamma_c {
        warnings.push(format!(
            "gamma = {} < {gamma_c}: velocity relaxation is not covered",
            params.gamma
        ));
    }
    for &a in &params.alpha_list {
        if !(a >= 0.0 && a < 2.0 * params.gamma - gamma_c) {
            warnings.push(format!("alpha = {a} outside [0, {})", 2.0 * params.gamma - gamma_c));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut log = RecordLog::default();
    let b0 = build_initial_field(cfg.grid, &cfg.initial_data, cfg.seed)?;
    let outcome = run_from(&cfg, b0, &mut [&mut log])?;
    let table: Vec<(f64, Vec<f64>)> = log
        .records
        .iter()
        .map(|r| (r.t, r.u_sobolev.iter().map(|p| p.1).collect()))
        .collect();
    let k = params.alpha_list.len();
    let first = &table[0].1;
    let last = &table[table.len() - 1].1;
    let ratios = (0..k)
        .map(|i| if first[i] > 0.0 { last[i] / first[i] } else { f64::NAN })
        .collect();
    let intervals = (table.len() - 1).max(1) as f64;
    let decreasing_fraction = (0..k)
        .map(|i| table.windows(2).filter(|w| w[1].1[i] < w[0].1[i]).count() as f64 / intervals)
        .collect();
    Ok(VelocityReport {
        params: params.clone(),
        table,
        ratios,
        decreasing_fraction,
        warnings,
        records: log.records,
        outcome,
    })
}

/// Helicity conservation experiment on an ABC-type field (`d = 3`).
#[derive(Debug, Clone, PartialEq)]
pub struct HelicityParams {
    pub n: usize,
    pub gamma: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Overall amplitude of the ABC field.
    pub scale: f64,
    /// `L²` size of the random solenoidal perturbation.
    pub eta: f64,
    pub cfl: f64,
    pub dt_fixed: Option<f64>,
    pub output_every: f64,
}

impl HelicityParams {
    pub fn new(n: usize, gamma: f64, t_end: f64, scale: f64, eta: f64, seed: u64) -> Self {
        Self {
            n,
            gamma,
            t_end,
            seed,
            scale,
            eta,
            cfl: 0.5,
            dt_fixed: None,
            output_every: t_end / 20.0,
        }
    }

    pub fn config(&self) -> Result<SimConfig, RelaxationError> {
        let recipe = InitialData::Abc {
            a: 1.0,
            b: 1.0,
            c: 1.0,
            wavenumber: 1,
            scale: self.scale,
            eta: self.eta,
            kmax: 4,
        };
        let mut cfg = SimConfig::new(grid(3, self.n, 1.0)?, self.gamma, self.t_end, recipe);
        cfg.cfl = self.cfl;
        cfg.dt_fixed = self.dt_fixed;
        cfg.output_every = self.output_every;
        cfg.dt_max = self.output_every;
        cfg.seed = self.seed;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct HelicityReport {
    pub params: HelicityParams,
    /// `(t, ∫A·B)`.
    pub series: Vec<(f64, f64)>,
    /// `max_t |H(t) − H(0)| / |H(0)|`.
    pub drift: f64,
    /// `‖u(0)‖_{L²}`, to confirm the dynamics are not trivial.
    pub u0_l2: f64,
    pub records: Vec<DiagnosticsRecord>,
    pub outcome: RunOutcome,
}

pub fn preset_helicity(params: &HelicityParams) -> Result<HelicityReport, RelaxationError> {
    let cfg = params.config()?;
    let b0 = build_initial_field(cfg.grid, &cfg.initial_data, cfg.seed)?;
    let u0_l2 = compute_velocity(&b0, cfg.gamma).norm_sq().sqrt();
    let mut log = RecordLog::default();
    let outcome = run_from(&cfg, b0, &mut [&mut log])?;
    let series: Vec<(f64, f64)> = log
        .records
        .iter()
        .map(|r| (r.t, r.helicity.unwrap_or(f64::NAN)))
        .collect();
    let h0 = series[0].1;
    let drift = series
        .iter()
        .map(|(_, h)| (h - h0).abs() / h0.abs())
        .fold(0.0, f64::max);
    Ok(HelicityReport {
        params: params.clone(),
        series,
        drift,
        u0_l2,
        records: log.records,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_bfv_is_trivial() {
        let mut p = BfvParams::new(0.0, 16, 0.5, 1);
        p.window = [0.1, 0.5];
        let r = preset_bfv_stability(&p).unwrap();
        assert!(r.samples.iter().all(|s| s.perp == 0.0 && s.p0_b1 == 0.0 && s.deviation == 0.0));
        assert!(r.fit.is_err());
    }

    #[test]
    fn unperturbed_rearrangement_is_exact() {
        let p = BfvParams::new(0.0, 16, 0.2, 1);
        let r = preset_rearrangement(&p).unwrap();
        assert!(r.error <= 2.0 / 16.0);
        assert!(r.max_drift_until(0.1) == 0.0);
    }

    #[test]
    fn short_bfv_run_keeps_invariants() {
        let p = BfvParams::new(0.01, 16, 0.5, 3);
        let r = preset_bfv_stability(&p).unwrap();
        assert!(r.max_deviation() <= 0.01 * (1.0 + 1e-12));
        assert!(r.max_p0_b2() <= 1e-10);
        assert!(r.samples[0].perp > 0.0);
    }

    #[test]
    fn shear_velocity_is_zero() {
        let mut p = VelocityParams::new(2, 2.5, 16, 0.1, 1.0, 0);
        p.initial_data = InitialData::Shear {
            amplitude: 1.0,
            wavenumber: 1,
            mean: 0.0,
        };
        let r = preset_velocity_relaxation(&p).unwrap();
        assert!(r.ratios[0].is_nan());
        assert!(r.table.iter().all(|(_, v)| v[0] < 1e-12));
    }

    #[test]
    fn alpha_range_warning() {
        let mut p = VelocityParams::new(2, 2.0, 8, 0.01, 0.1, 0);
        p.alpha_list = vec![0.0, 2.5];
        let r = preset_velocity_relaxation(&p).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }
}

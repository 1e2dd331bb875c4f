//! Command-line front end of the `mre` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{besov_norm, lp_norm, sobolev_norm, AnalysisError, DiagnosticsRecord};
use crate::io::{
    emit_config, parse_config, read_snapshot, render_heatmap, slice_3d, write_diagnostics_csv, write_snapshot,
    write_table_csv, IoError, OutputLock, RunManifest, Snapshot,
};
use crate::lagrangian::{lagrange_check, LagrangianError};
use crate::oracle::{compare, OracleOp};
use crate::relaxation::{
    preset_bfv_stability, preset_helicity, preset_rearrangement, preset_velocity_relaxation, stream_function,
    BfvParams, BfvReport, HelicityParams, RelaxationError, VelocityParams,
};
use crate::solver::{build_initial_field, run_from, DiagnosticsSpec, RecordLog, SimConfig, SolverError};

/// Tolerance of the `oracle` subcommand.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "mre", version, about = "Magnetic relaxation simulator and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named experiment preset.
    Preset {
        #[command(subcommand)]
        preset: Preset,
    },
    /// Flow-map consistency checks (Cauchy formula, Neumann series) for a config.
    LagrangeCheck {
        #[arg(long)]
        config: PathBuf,
        /// Particles per axis.
        #[arg(long, default_value_t = 16)]
        m: usize,
        /// Flow-map step; the solver advances with half of it.
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print norms of the fields stored in a snapshot.
    Norms {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        period: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare spectral operators against the brute-force DFT reference.
    Oracle {
        /// Operator name or `all`.
        #[arg(long, default_value = "all")]
        op: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct OutDir {
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Preset {
    /// Near-e₁ stability run with γ = 0.
    Bfv {
        #[command(flatten)]
        out: OutDir,
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Long near-e₁ run compared with the decreasing rearrangement.
    Rearrange {
        #[command(flatten)]
        out: OutDir,
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 40.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Velocity relaxation from random data.
    Relax {
        #[command(flatten)]
        out: OutDir,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 2.5)]
        gamma: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 20.0)]
        t_end: f64,
        #[arg(long, default_value_t = 20.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Helicity drift of a perturbed ABC field in 3-D.
    Helicity {
        #[command(flatten)]
        out: OutDir,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 100.0)]
        scale: f64,
        #[arg(long, default_value_t = 30.0)]
        eta: f64,
        #[arg(long, default_value_t = 5)]
        seed: u64,
    },
}

/// Failure of a subcommand: a short category and a one-line message.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub category: &'static str,
    pub message: String,
}

impl CliError {
    fn new(category: &'static str, message: impl Into<String>) -> Self {
        Self {
            category,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let one_line = self.message.replace('\n', " ");
        write!(f, "error[{}]: {}", self.category, one_line)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        Self::new(e.category(), e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        Self::new("solver", e.to_string())
    }
}

impl From<RelaxationError> for CliError {
    fn from(e: RelaxationError) -> Self {
        match e {
            RelaxationError::Solver(s) => s.into(),
            other => Self::new("relaxation", other.to_string()),
        }
    }
}

impl From<LagrangianError> for CliError {
    fn from(e: LagrangianError) -> Self {
        match e {
            LagrangianError::Solver(s) => s.into(),
            other => Self::new("lagrangian", other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        Self::new("analysis", e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 2 on usage errors, 1 otherwise.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, out } => cmd_run(&config, &out),
        Command::Preset { preset } => cmd_preset(preset),
        Command::LagrangeCheck { config, m, dt, out } => cmd_lagrange(&config, m, dt, out.as_deref()),
        Command::Norms { snapshot, period, out } => cmd_norms(&snapshot, period, out.as_deref()),
        Command::Oracle {
            op,
            dim,
            n,
            seed,
            out,
        } => cmd_oracle(&op, dim, n, seed, out.as_deref()),
    }
}

/// Output directory session: holds the lock and collects artifacts.
struct Session {
    dir: PathBuf,
    manifest: RunManifest,
    start: Instant,
    _lock: OutputLock,
}

impl Session {
    fn open(dir: &Path, command: &str) -> Result<Self, CliError> {
        let lock = OutputLock::acquire(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest::new(command),
            start: Instant::now(),
            _lock: lock,
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.artifact(name);
        self.dir.join(name)
    }

    fn config(&mut self, cfg: &SimConfig) -> Result<(), CliError> {
        let text = emit_config(cfg);
        let path = self.path("config.json");
        std::fs::write(&path, text.as_bytes()).map_err(|e| IoError::io(&path, e))?;
        self.manifest.config = serde_json::from_str(&text).ok();
        self.manifest.rng_seed = Some(cfg.seed);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<(), CliError> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value).expect("json value serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| IoError::io(&path, e))?;
        Ok(())
    }

    fn diagnostics(&mut self, records: &[DiagnosticsRecord], spec: &DiagnosticsSpec) -> Result<(), CliError> {
        let path = self.path("diagnostics.csv");
        write_diagnostics_csv(records, spec, path)?;
        Ok(())
    }

    fn heatmap(&mut self, name: &str, samples: &[f64], n: usize) -> Result<(), CliError> {
        let path = self.path(name);
        let info = render_heatmap(samples, n, &path)?;
        let sidecar = info.sidecar.file_name().expect("sidecar name").to_string_lossy().into_owned();
        self.manifest.artifact(sidecar);
        Ok(())
    }

    fn finish(mut self) -> Result<PathBuf, CliError> {
        self.manifest.time("total", self.start.elapsed().as_secs_f64());
        Ok(self.manifest.write(&self.dir)?)
    }
}

fn final_field_images(session: &mut Session, b: &crate::spectral::SpectralVector) -> Result<(), CliError> {
    let n = b.grid().n();
    if b.dim() == 2 {
        let phi = stream_function(b).map_err(CliError::from)?.samples();
        session.heatmap("phi_final.pgm", &phi, n)
    } else {
        let mag = b.magnitude_samples();
        session.heatmap("b_final_slice.pgm", &slice_3d(&mag, n, 0), n)
    }
}

fn cmd_run(config: &Path, out: &Path) -> Result<(), CliError> {
    let cfg = parse_config(config)?;
    let mut session = Session::open(out, "run")?;
    session.config(&cfg)?;
    let b0 = build_initial_field(cfg.grid, &cfg.initial_data, cfg.seed)?;
    write_snapshot(session.path("initial.mref"), &Snapshot::from_vector(&b0, 0.0, cfg.gamma))?;

    let t0 = Instant::now();
    let mut log = RecordLog::default();
    let outcome = run_from(&cfg, b0, &mut [&mut log])?;
    session.manifest.time("simulation", t0.elapsed().as_secs_f64());

    let state = &outcome.state;
    write_snapshot(session.path("final.mref"), &Snapshot::from_vector(&state.b, state.t, cfg.gamma))?;
    session.diagnostics(&log.records, &cfg.diagnostics)?;
    let mu: Vec<Vec<f64>> = log
        .records
        .iter()
        .filter(|r| !r.levelset_mu.is_empty())
        .map(|r| std::iter::once(r.t).chain(r.levelset_mu.iter().copied()).collect())
        .collect();
    if let Some(first) = mu.first() {
        let cols: Vec<String> = std::iter::once("t".to_string())
            .chain((0..first.len() - 1).map(|i| format!("mu_{i}")))
            .collect();
        write_table_csv(session.path("levelsets.csv"), &cols, &mu)?;
    }
    final_field_images(&mut session, &state.b)?;

    let e0 = log.records.first().map_or(0.0, |r| r.energy);
    let max_res = log.records.iter().map(|r| r.energy_residual.abs()).fold(0.0, f64::max);
    println!(
        "run: t = {}, steps = {}, outputs = {}, E(T)/E(0) = {:.6e}, max |energy_residual| = {:.3e}, max divB = {:.3e}",
        state.t,
        outcome.steps,
        outcome.outputs,
        state.energy() / e0,
        max_res,
        outcome.max_div_residual
    );
    let manifest = session.finish()?;
    println!("manifest: {}", manifest.display());
    Ok(())
}

fn bfv_outputs(session: &mut Session, report: &BfvReport) -> Result<(), CliError> {
    let cfg = report.params.config()?;
    session.config(&cfg)?;
    session.diagnostics(&report.records, &cfg.diagnostics)?;
    let rows: Vec<Vec<f64>> = report
        .samples
        .iter()
        .map(|s| vec![s.t, s.perp, s.p0_b1, s.deviation, s.p0_b2_linf])
        .collect();
    let cols: Vec<String> = ["t", "perp_l2", "p0_b1_l2", "deviation_l2", "p0_b2_linf"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    write_table_csv(session.path("bfv_series.csv"), &cols, &rows)?;
    final_field_images(session, &report.outcome.state.b)
}

fn fit_json(report: &BfvReport) -> serde_json::Value {
    match &report.fit {
        Ok(f) => json!({"window": f.window, "rate": f.rate, "r2": f.r2, "points": f.series.len()}),
        Err(e) => json!({"error": e.to_string()}),
    }
}

fn print_fit(report: &BfvReport) {
    match &report.fit {
        Ok(f) => println!(
            "decay fit on [{}, {}]: rate = {:.6}, r2 = {:.6} ({} points)",
            f.window[0],
            f.window[1],
            f.rate,
            f.r2,
            f.series.len()
        ),
        Err(e) => println!("decay fit failed: {e}"),
    }
    println!(
        "max ‖B − e₁‖ = {:.6e}, max ‖P₀B²‖_∞ = {:.3e}, steps = {}",
        report.max_deviation(),
        report.max_p0_b2(),
        report.outcome.steps
    );
}

fn cmd_preset(preset: Preset) -> Result<(), CliError> {
    match preset {
        Preset::Bfv {
            out,
            eta,
            n,
            t_end,
            seed,
        } => {
            let mut session = Session::open(&out.out, "preset bfv")?;
            let report = preset_bfv_stability(&BfvParams::new(eta, n, t_end, seed))?;
            bfv_outputs(&mut session, &report)?;
            print_fit(&report);
            let summary = json!({
                "fit": fit_json(&report),
                "max_deviation": report.max_deviation(),
                "max_p0_b2_linf": report.max_p0_b2(),
                "steps": report.outcome.steps,
            });
            session.json("summary.json", &summary)?;
            session.finish()?;
        }
        Preset::Rearrange {
            out,
            eta,
            n,
            t_end,
            seed,
        } => {
            let mut session = Session::open(&out.out, "preset rearrange")?;
            let report = preset_rearrangement(&BfvParams::new(eta, n, t_end, seed))?;
            bfv_outputs(&mut session, &report.bfv)?;
            let rows: Vec<Vec<f64>> = (0..report.profile.x2_grid.len())
                .map(|i| {
                    vec![
                        report.profile.x2_grid[i],
                        report.profile.phi_inf[i],
                        report.profile.b_inf[i],
                        report.final_average[i],
                    ]
                })
                .collect();
            let cols: Vec<String> = ["x2", "phi_inf", "b_inf", "phi_final_average"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            write_table_csv(session.path("profile.csv"), &cols, &rows)?;
            let drift: Vec<Vec<f64>> = report.drift.iter().map(|d| vec![d.0, d.1]).collect();
            write_table_csv(session.path("levelset_drift.csv"), &["t".into(), "drift".into()], &drift)?;
            print_fit(&report.bfv);
            let half = t_end / 2.0;
            println!(
                "rearrangement error = {:.6e}, level-set drift up to t = {half} is {:.3e}",
                report.error,
                report.max_drift_until(half)
            );
            let summary = json!({
                "fit": fit_json(&report.bfv),
                "error": report.error,
                "drift_half_time": report.max_drift_until(half),
                "offset": report.offset,
            });
            session.json("summary.json", &summary)?;
            session.finish()?;
        }
        Preset::Relax {
            out,
            dim,
            gamma,
            n,
            t_end,
            amplitude,
            seed,
        } => {
            let mut session = Session::open(&out.out, "preset relax")?;
            let params = VelocityParams::new(dim, gamma, n, t_end, amplitude, seed);
            let cfg = params.config()?;
            session.config(&cfg)?;
            let report = preset_velocity_relaxation(&params)?;
            session.diagnostics(&report.records, &cfg.diagnostics)?;
            let cols: Vec<String> = std::iter::once("t".to_string())
                .chain(params.alpha_list.iter().map(|a| format!("u_H{a}")))
                .collect();
            let rows: Vec<Vec<f64>> = report
                .table
                .iter()
                .map(|(t, v)| std::iter::once(*t).chain(v.iter().copied()).collect())
                .collect();
            write_table_csv(session.path("velocity.csv"), &cols, &rows)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for (a, (r, f)) in params.alpha_list.iter().zip(report.ratios.iter().zip(&report.decreasing_fraction)) {
                println!("‖u(T)‖_H{a}/‖u(0)‖_H{a} = {r:.6e}, decreasing fraction = {f:.3}");
            }
            let summary = json!({
                "alpha_list": params.alpha_list,
                "ratios": report.ratios,
                "decreasing_fraction": report.decreasing_fraction,
                "warnings": report.warnings,
            });
            session.json("summary.json", &summary)?;
            session.finish()?;
        }
        Preset::Helicity {
            out,
            n,
            gamma,
            t_end,
            scale,
            eta,
            seed,
        } => {
            let mut session = Session::open(&out.out, "preset helicity")?;
            let params = HelicityParams::new(n, gamma, t_end, scale, eta, seed);
            let cfg = params.config()?;
            session.config(&cfg)?;
            let report = preset_helicity(&params)?;
            session.diagnostics(&report.records, &cfg.diagnostics)?;
            let rows: Vec<Vec<f64>> = report.series.iter().map(|s| vec![s.0, s.1]).collect();
            write_table_csv(session.path("helicity.csv"), &["t".into(), "helicity".into()], &rows)?;
            println!(
                "relative helicity drift = {:.3e}, ‖u(0)‖_L2 = {:.3e}, steps = {}",
                report.drift, report.u0_l2, report.outcome.steps
            );
            let summary = json!({"drift": report.drift, "u0_l2": report.u0_l2, "steps": report.outcome.steps});
            session.json("summary.json", &summary)?;
            session.finish()?;
        }
    }
    Ok(())
}

fn cmd_lagrange(config: &Path, m: usize, dt: f64, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = parse_config(config)?;
    let mut session = out.map(|d| Session::open(d, "lagrange-check")).transpose()?;
    let report = lagrange_check(&cfg, m, dt)?;
    println!("t                  {}", report.t);
    println!("particles          {}^{}", report.m, cfg.grid.dim());
    println!("cauchy_residual    {:.6e}", report.cauchy_residual);
    println!("max_det_error      {:.6e}", report.max_det_error);
    println!("max_inverse_error  {:.6e}", report.max_inverse_error);
    println!("smallness          {:.6e}", report.smallness);
    match report.neumann_error {
        Some(e) => println!("neumann_error      {e:.6e}"),
        None => println!("neumann_error      refused (smallness surrogate > 1/2)"),
    }
    if let Some(s) = session.as_mut() {
        s.config(&cfg)?;
        let value = json!({
            "t": report.t,
            "m": report.m,
            "dt": report.dt,
            "cauchy_residual": report.cauchy_residual,
            "max_det_error": report.max_det_error,
            "max_inverse_error": report.max_inverse_error,
            "smallness": report.smallness,
            "neumann_error": report.neumann_error,
        });
        s.json("lagrange.json", &value)?;
    }
    if let Some(s) = session {
        s.finish()?;
    }
    Ok(())
}

fn cmd_norms(snapshot: &Path, period: f64, out: Option<&Path>) -> Result<(), CliError> {
    let snap = read_snapshot(snapshot)?;
    let session = out.map(|d| Session::open(d, "norms")).transpose()?;
    let header = ["field", "lp_2", "lp_4", "lp_inf", "H1", "B0_inf_1", "B1_2_2"];
    println!(
        "# t = {}, gamma = {}, shape = {:?}, period = {period}",
        snap.time, snap.gamma, snap.shape
    );
    println!("{}", header.join("\t"));
    let mut rows = Vec::new();
    for i in 0..snap.fields.len() {
        let f = snap.scalar(i, period)?;
        let row = vec![
            i as f64,
            lp_norm(&f, 2.0)?,
            lp_norm(&f, 4.0)?,
            lp_norm(&f, f64::INFINITY)?,
            sobolev_norm(&f, 1.0, false),
            besov_norm(&f, 0.0, f64::INFINITY, 1.0)?,
            besov_norm(&f, 1.0, 2.0, 2.0)?,
        ];
        let text: Vec<String> = std::iter::once(i.to_string())
            .chain(row[1..].iter().map(|v| format!("{v:.10e}")))
            .collect();
        println!("{}", text.join("\t"));
        rows.push(row);
    }
    if let Some(mut s) = session {
        let cols: Vec<String> = header.iter().map(|h| h.to_string()).collect();
        write_table_csv(s.path("norms.csv"), &cols, &rows)?;
        s.finish()?;
    }
    Ok(())
}

fn cmd_oracle(op: &str, dim: usize, n: usize, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let ops: Vec<OracleOp> = if op == "all" {
        OracleOp::ALL.to_vec()
    } else {
        vec![op.parse().map_err(|e: String| CliError::new("usage", e))?]
    };
    if !(2..=3).contains(&dim) || n < 8 || !n.is_power_of_two() || n > 16 {
        return Err(CliError::new("usage", "oracle needs dim ∈ {2, 3} and n ∈ {8, 16}"));
    }
    let mut session = out.map(|d| Session::open(d, "oracle")).transpose()?;
    let mut results = Vec::new();
    let mut failed = Vec::new();
    for op in ops {
        let err = compare(op, dim, n, seed);
        let pass = err <= ORACLE_TOLERANCE;
        println!("{:<18} d={dim} n={n} max_error={err:.3e} {}", op.name(), if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(op.name());
        }
        results.push(json!({"op": op.name(), "max_error": err, "pass": pass}));
    }
    if let Some(mut s) = session.take() {
        s.json("oracle.json", &json!({"dim": dim, "n": n, "seed": seed, "results": results}))?;
        s.finish()?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(
            "oracle",
            format!("{} exceeded {ORACLE_TOLERANCE:e}", failed.join(", ")),
        ))
    }
}

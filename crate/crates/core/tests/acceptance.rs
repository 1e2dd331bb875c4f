//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test --release --test acceptance`.

use std::f64::consts::PI;
use std::time::Instant;

use mre_core::analysis::{besov_norm, besov_norm_fd, log_interp_check, lp_decompose, DiagnosticsRecord};
use mre_core::io::{read_snapshot, write_diagnostics_csv, write_snapshot, Snapshot};
use mre_core::lagrangian::*;
use mre_core::oracle::{compare, OracleOp, Torus};
use mre_core::relaxation::*;
use mre_core::solver::*;
use mre_core::spectral::{fractional_laplacian, leray_project, Grid, SpectralScalar, SpectralVector};

type Outcome = Result<(bool, String), String>;

/// Energy and divergence bookkeeping over every run of the suite.
#[derive(Default)]
struct Ledger {
    runs: Vec<(String, f64, f64, usize)>,
}

impl Ledger {
    fn add(&mut self, name: &str, records: &[DiagnosticsRecord], outcome: &RunOutcome) {
        let mut violations = 0;
        for w in records.windows(2) {
            if w[1].energy > w[0].energy * (1.0 + 1e-12) {
                violations += 1;
            }
        }
        let div = records
            .iter()
            .map(|r| r.div_b_residual)
            .fold(outcome.max_div_residual, f64::max);
        self.runs.push((name.to_string(), outcome.max_energy_increase, div, violations));
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn run_logged(ledger: &mut Ledger, name: &str, cfg: &SimConfig) -> Result<(Vec<DiagnosticsRecord>, RunOutcome), String> {
    let mut log = RecordLog::default();
    let out = run_simulation(cfg, &mut [&mut log]).map_err(err)?;
    ledger.add(name, &log.records, &out);
    Ok((log.records, out))
}

fn energy_equality(ledger: &mut Ledger) -> Outcome {
    let g = Grid::new(2, 64).map_err(err)?;
    let mut cfg = SimConfig::new(g, 2.0, 5.0, InitialData::RandomBandlimited { kmax: 8, amplitude: 10.0 });
    cfg.seed = 42;
    let (records, _) = run_logged(ledger, "energy", &cfg)?;
    let e0 = records[0].energy;
    let res = records.iter().map(|r| r.energy_residual.abs()).fold(0.0, f64::max) / e0;
    let mut fixed = Vec::new();
    for dt in [0.05, 0.025, 0.0125] {
        let mut c = cfg.clone();
        c.dt_fixed = Some(dt);
        let (records, _) = run_logged(ledger, &format!("energy dt={dt}"), &c)?;
        fixed.push(records.last().expect("records").energy_residual.abs() / e0);
    }
    let ratios = [fixed[0] / fixed[1], fixed[1] / fixed[2]];
    let pass = res <= 1e-6 && ratios.iter().all(|r| (12.0..=20.0).contains(r));
    Ok((
        pass,
        format!(
            "max |residual|/E0 = {res:.3e}; fixed-dt residuals {:.3e}, {:.3e}, {:.3e}; halving ratios {:.2}, {:.2}",
            fixed[0], fixed[1], fixed[2], ratios[0], ratios[1]
        ),
    ))
}

fn steady_states(ledger: &mut Ledger) -> Outcome {
    let g = Grid::new(2, 32).map_err(err)?;
    let recipes = [
        InitialData::Coefficients {
            mean: vec![1.0, 0.0],
            modes: vec![],
        },
        InitialData::Shear {
            amplitude: 1.0,
            wavenumber: 1,
            mean: 0.0,
        },
    ];
    let mut worst_u = 0.0f64;
    let mut worst_drift = 0.0f64;
    for gamma in [0.0, 2.0, 3.0] {
        for recipe in &recipes {
            let mut cfg = SimConfig::new(g, gamma, 1.0, recipe.clone());
            cfg.output_every = 0.1;
            let b0 = build_initial_field(g, recipe, 0).map_err(err)?;
            let mut log = RecordLog::default();
            let out = run_from(&cfg, b0.clone(), &mut [&mut log]).map_err(err)?;
            ledger.add(&format!("steady {} γ={gamma}", recipe.name()), &log.records, &out);
            worst_u = log.records.iter().map(|r| r.u_linf).fold(worst_u, f64::max);
            worst_drift = worst_drift.max(out.state.b.max_abs_diff(&b0));
        }
    }
    Ok((
        worst_u <= 1e-12 && worst_drift <= 1e-10,
        format!("max ‖u‖∞ = {worst_u:.3e}, max ‖B(1) − B0‖∞ = {worst_drift:.3e}"),
    ))
}

fn bfv(ledger: &mut Ledger) -> Outcome {
    let p = BfvParams::new(0.01, 64, 10.0, 1);
    let r = preset_bfv_stability(&p).map_err(err)?;
    ledger.add("bfv", &r.records, &r.outcome);
    let fit = r.fit.as_ref().map_err(err)?;
    let dev = r.max_deviation();
    let p0 = r.max_p0_b2();
    let pass = (0.5..=1.2).contains(&fit.rate) && fit.r2 >= 0.95 && dev <= p.eta * (1.0 + 1e-12) && p0 <= 1e-10;
    Ok((
        pass,
        format!(
            "rate = {:.4} on [{}, {}], r² = {:.5}, max ‖B − e1‖ = {dev:.6e}, max ‖P0 B2‖∞ = {p0:.3e}",
            fit.rate, fit.window[0], fit.window[1], fit.r2
        ),
    ))
}

fn rearrangement(ledger: &mut Ledger) -> Outcome {
    let p = BfvParams::new(0.01, 64, 40.0, 1);
    let r = preset_rearrangement(&p).map_err(err)?;
    ledger.add("rearrangement", &r.bfv.records, &r.bfv.outcome);
    let drift = r.max_drift_until(p.t_end / 2.0);
    Ok((
        r.error <= 0.05 && drift <= 0.02,
        format!("relative L2 error = {:.3e}, level-set drift up to T/2 = {drift:.3e}", r.error),
    ))
}

fn velocity(ledger: &mut Ledger) -> Outcome {
    let p = VelocityParams::new(2, 2.5, 64, 20.0, 20.0, 7);
    let r = preset_velocity_relaxation(&p).map_err(err)?;
    ledger.add("velocity", &r.records, &r.outcome);
    let i = p
        .alpha_list
        .iter()
        .position(|a| *a == 1.0)
        .ok_or("alpha = 1 not tracked")?;
    let ratio = r.ratios[i];
    Ok((ratio <= 0.1, format!("‖u(T)‖_H1 / ‖u(0)‖_H1 = {ratio:.4e}")))
}

fn helicity(ledger: &mut Ledger) -> Outcome {
    let mut drifts = Vec::new();
    for cfl in [0.5, 0.25] {
        let mut p = HelicityParams::new(32, 3.0, 1.0, 100.0, 30.0, 5);
        p.cfl = cfl;
        let r = preset_helicity(&p).map_err(err)?;
        ledger.add(&format!("helicity cfl={cfl}"), &r.records, &r.outcome);
        drifts.push(r.drift);
    }
    Ok((
        drifts[0] <= 1e-3 && drifts[1] < drifts[0],
        format!("relative drift {:.3e} (cfl 0.5), {:.3e} (cfl 0.25)", drifts[0], drifts[1]),
    ))
}

fn operators() -> Outcome {
    let mut worst = 0.0f64;
    for dim in [2, 3] {
        for seed in 0..3 {
            for op in OracleOp::ALL {
                worst = worst.max(compare(op, dim, 8, seed));
            }
        }
    }
    let g = Grid::new(3, 8).map_err(err)?;
    let t = Torus::new(3, 8);
    let mut leray = 0.0f64;
    let mut group = 0.0f64;
    for seed in 0..10 {
        let comps: Vec<Vec<f64>> = (0..3).map(|a| mre_core::oracle::random_samples(&t, 31 * seed + a)).collect();
        let v = SpectralVector::from_samples(g, &comps).map_err(err)?;
        let p = leray_project(&v);
        let q = v.axpy(-1.0, &p);
        leray = leray
            .max(leray_project(&p).max_abs_diff(&p))
            .max(p.inner(&q).abs() / (1.0 + v.norm_sq()));
        let f = v.component(0).map_modes(|k, c| if k.iter().all(|x| *x == 0) { c * 0.0 } else { c });
        let (a, b) = (0.3 + 0.1 * seed as f64, -0.7);
        let lhs = fractional_laplacian(&fractional_laplacian(&f, a), b);
        let rhs = fractional_laplacian(&f, a + b);
        group = group.max(lhs.max_abs_diff(&rhs) / rhs.max_abs_coeff().max(1.0));
    }
    Ok((
        worst <= 1e-12 && leray <= 1e-12 && group <= 1e-12,
        format!("oracle max error {worst:.3e}; Leray defect {leray:.3e}; Λ group law {group:.3e}"),
    ))
}

fn random_scalar(n: usize, kmax: u32, seed: u64) -> SpectralScalar {
    random_solenoidal(Grid::new(2, n).expect("grid"), kmax, seed, false).component(0).clone()
}

fn analysis() -> Outcome {
    let mut rec = 0.0f64;
    for seed in 0..20 {
        let f = random_scalar(32, 1 + (seed % 12) as u32, seed);
        let lp = lp_decompose(&f);
        let back = lp.reconstruct().ok_or("empty decomposition")?;
        rec = rec.max(back.max_abs_diff(&f));
    }
    let g = Grid::new(2, 32).map_err(err)?;
    let mut fields: Vec<SpectralScalar> = (1..=8)
        .map(|k| SpectralScalar::from_fn(g, move |x| (2.0 * PI * k as f64 * x[0]).cos()))
        .collect();
    fields.extend((0..5).map(|s| random_scalar(32, 8, 500 + s)));
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for f in &fields {
        let r = besov_norm_fd(f, 0.5, 2.0, 2.0).map_err(err)? / besov_norm(f, 0.5, 2.0, 2.0).map_err(err)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let mut worst_log = 0.0f64;
    for seed in 0..50 {
        let f = random_scalar(32, 1 + (seed % 10) as u32, 1000 + seed);
        worst_log = worst_log.max(log_interp_check(&f, 0.5, 0.5, 2.0).map_err(err)?.ratio());
    }
    Ok((
        rec <= 1e-12 && lo >= 0.1 && hi <= 10.0 && worst_log <= 100.0,
        format!(
            "LP reconstruction {rec:.3e}; fd/LP Besov ratio in [{lo:.3}, {hi:.3}]; max log-interpolation ratio {worst_log:.3}"
        ),
    ))
}

fn lagrangian() -> Outcome {
    let g = Grid::new(2, 64).map_err(err)?;
    let shear = |amp: f64| SpectralVector::from_fn(g, move |x| vec![amp * (2.0 * PI * x[1]).sin(), 0.0]);

    let t = 0.05;
    let (flow, hist) = integrate_flow_map(&mut FrozenVelocity(shear(1.0)), t, 0.01, 16).map_err(err)?;
    let series = neumann_m(&hist).map_err(err)?;
    let mut closed = 0.0f64;
    for i in 0..flow.len() {
        let y = flow.y[i];
        let c = 2.0 * PI * t * (2.0 * PI * y[1]).cos();
        closed = closed
            .max((flow.x[i][0] - y[0] - t * (2.0 * PI * y[1]).sin()).abs())
            .max((flow.grad_x[i][0][1] - c).abs())
            .max((flow.m_inv[i][0][1] + c).abs())
            .max((series[i][0][1] + c).abs());
    }

    let mut cfg = SimConfig::new(g, 2.0, 1.0, InitialData::RandomBandlimited { kmax: 8, amplitude: 5.0 });
    cfg.seed = 3;
    let report = lagrange_check(&cfg, 16, 0.02).map_err(err)?;
    let neumann = report.neumann_error.ok_or("smallness surrogate violated")?;

    let rel = |a: &[f64], b: &[f64]| {
        let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        d / b.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let f = SpectralScalar::from_fn(g, |x| {
        (2.0 * PI * x[0]).cos() + 0.5 * (2.0 * PI * (x[0] + 2.0 * x[1])).sin() + 0.3 * (4.0 * PI * x[1]).cos()
    });
    let id = FlowMap::identity(2, 64, 1.0);
    let lag = lagrangian_frac_laplacian(&f.to_samples(), &id, 0.4, 3).map_err(err)?;
    let identity_err = rel(&lag, &fractional_laplacian(&f, 0.4).to_samples());

    let eps = 0.02;
    let (flow, _) = integrate_flow_map(&mut FrozenVelocity(shear(eps)), 1.0, 0.05, 64).map_err(err)?;
    let ev = FourierEvaluator::scalar(&f);
    let fy: Vec<f64> = flow.y.iter().map(|y| ev.value(y)[0]).collect();
    let lag = lagrangian_frac_laplacian(&fy, &flow, 0.4, 3).map_err(err)?;
    let oracle = eulerian_pullback(&f, |x| [x[0] - eps * (2.0 * PI * x[1]).sin(), x[1], 0.0], &flow, 0.4);
    let shear_err = rel(&lag, &oracle);

    let det = report.max_det_error.max(flow.max_det_error());
    Ok((
        closed <= 1e-10
            && neumann <= 1e-6
            && report.cauchy_residual <= 1e-4
            && identity_err <= 0.02
            && shear_err <= 0.05
            && det <= 1e-6,
        format!(
            "shear closed form {closed:.3e}; Neumann {neumann:.3e}; Cauchy {:.3e}; Λ^0.8 identity {:.2}%, pullback {:.2}%; max |det − 1| {det:.3e}",
            report.cauchy_residual,
            100.0 * identity_err,
            100.0 * shear_err
        ),
    ))
}

fn determinism(ledger: &mut Ledger) -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let g = Grid::new(2, 32).map_err(err)?;
    let mut cfg = SimConfig::new(g, 2.0, 1.0, InitialData::RandomBandlimited { kmax: 6, amplitude: 3.0 });
    cfg.seed = 2024;
    let mut csv = Vec::new();
    let mut snap_ok = true;
    for i in 0..2 {
        let (records, out) = run_logged(ledger, &format!("determinism {i}"), &cfg)?;
        let path = dir.path().join(format!("d{i}.csv"));
        write_diagnostics_csv(&records, &cfg.diagnostics, &path).map_err(err)?;
        csv.push(std::fs::read(&path).map_err(err)?);
        let snap = Snapshot::from_vector(&out.state.b, out.state.t, cfg.gamma);
        let spath = dir.path().join(format!("s{i}.mref"));
        write_snapshot(&spath, &snap).map_err(err)?;
        let back = read_snapshot(&spath).map_err(err)?;
        let bits = |s: &Snapshot| s.fields.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
        snap_ok &= back == snap && bits(&back) == bits(&snap);
    }
    let same = csv[0] == csv[1];
    Ok((
        same && snap_ok,
        format!("CSV byte-identical: {same}; snapshot round trip bit-exact: {snap_ok}"),
    ))
}

struct Summary {
    lines: Vec<(usize, bool, String)>,
}

impl Summary {
    fn report(&mut self, id: usize, title: &str, start: Instant, outcome: Outcome) {
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        let tag = if pass { "PASS" } else { "FAIL" };
        let line = format!("{tag} [{id:>2}] {title}: {detail} ({secs:.1} s)");
        eprintln!("{line}");
        self.lines.push((id, pass, line));
    }
}

fn main() {
    let mut summary = Summary { lines: Vec::new() };
    let mut ledger = Ledger::default();

    let t = Instant::now();
    let o = energy_equality(&mut ledger);
    summary.report(1, "energy equality", t, o);

    let t = Instant::now();
    let o = steady_states(&mut ledger);
    summary.report(3, "steady states", t, o);

    let t = Instant::now();
    let o = bfv(&mut ledger);
    summary.report(5, "stability near e1", t, o);

    let t = Instant::now();
    let o = rearrangement(&mut ledger);
    summary.report(6, "rearrangement limit", t, o);

    let t = Instant::now();
    let o = velocity(&mut ledger);
    summary.report(7, "velocity relaxation", t, o);

    let t = Instant::now();
    let o = helicity(&mut ledger);
    summary.report(8, "helicity drift", t, o);

    let t = Instant::now();
    summary.report(9, "operator oracles", t, operators());

    let t = Instant::now();
    summary.report(10, "Littlewood-Paley and Besov", t, analysis());

    let t = Instant::now();
    summary.report(11, "Lagrangian suite", t, lagrangian());

    let t = Instant::now();
    let o = determinism(&mut ledger);
    summary.report(12, "determinism and round trips", t, o);

    let t = Instant::now();
    let increase = ledger.runs.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let violations: usize = ledger.runs.iter().map(|r| r.3).sum();
    let o = Ok((
        increase <= 1e-12 && violations == 0,
        format!(
            "{} runs, {violations} output-sample violations, largest per-step relative increase {increase:.3e}",
            ledger.runs.len()
        ),
    ));
    summary.report(2, "energy monotonicity", t, o);

    let t = Instant::now();
    let div = ledger.runs.iter().map(|r| r.2).fold(0.0, f64::max);
    let o = Ok((div <= 1e-12, format!("{} runs, max divB residual {div:.3e}", ledger.runs.len())));
    summary.report(4, "divergence constraint", t, o);

    summary.lines.sort_by_key(|l| l.0);
    println!();
    for (_, _, line) in &summary.lines {
        println!("{line}");
    }
    let failures = summary.lines.iter().filter(|l| !l.1).count();
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

use std::f64::consts::PI;

use mre_core::lagrangian::*;
use mre_core::solver::{random_solenoidal, InitialData, SimConfig};
use mre_core::spectral::{fractional_laplacian, Grid, SpectralScalar, SpectralVector};

fn rel_max(a: &[f64], b: &[f64]) -> f64 {
    let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    d / b.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn test_function(g: Grid) -> SpectralScalar {
    SpectralScalar::from_fn(g, |x| {
        (2.0 * PI * x[0]).cos() + 0.5 * (2.0 * PI * (x[0] + 2.0 * x[1])).sin() + 0.3 * (4.0 * PI * x[1]).cos()
    })
}

fn shear(g: Grid, amp: f64) -> SpectralVector {
    SpectralVector::from_fn(g, |x| vec![amp * (2.0 * PI * x[1]).sin(), 0.0])
}

#[test]
fn shear_flow_matches_closed_form() {
    let g = Grid::new(2, 32).unwrap();
    for (t, dt) in [(0.03, 0.01), (0.5, 0.05), (2.0, 0.1)] {
        let (flow, hist) = integrate_flow_map(&mut FrozenVelocity(shear(g, 1.0)), t, dt, 16).unwrap();
        for i in 0..flow.len() {
            let y = flow.y[i];
            let c = 2.0 * PI * t * (2.0 * PI * y[1]).cos();
            assert!((flow.x[i][0] - y[0] - t * (2.0 * PI * y[1]).sin()).abs() <= 1e-10);
            assert!((flow.x[i][1] - y[1]).abs() <= 1e-14);
            assert!((flow.grad_x[i][0][1] - c).abs() <= 1e-10);
            assert!((flow.m_inv[i][0][1] + c).abs() <= 1e-10);
        }
        assert!(flow.max_det_error() <= 1e-12);
        if hist.smallness() <= 0.5 {
            let series = neumann_m(&hist).unwrap();
            for (s, m) in series.iter().zip(&flow.m_inv) {
                assert!((s[0][1] - m[0][1]).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn neumann_series_agrees_with_inversion_for_generic_flow() {
    let g = Grid::new(2, 32).unwrap();
    for seed in 0..3 {
        let v = random_solenoidal(g, 4, seed, false).scale(0.005);
        let (flow, hist) = integrate_flow_map(&mut FrozenVelocity(v), 1.0, 0.05, 16).unwrap();
        assert!(hist.smallness() <= 0.5);
        let series = neumann_m(&hist).unwrap();
        let err = series
            .iter()
            .zip(&flow.m_inv)
            .map(|(a, b)| {
                let mut d = *a;
                for i in 0..3 {
                    for j in 0..3 {
                        d[i][j] -= b[i][j];
                    }
                }
                frobenius(&d)
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "seed {seed}: {err:e}");
        assert!(flow.max_det_error() <= 1e-6);
        assert!(flow.max_inverse_error() <= 1e-8);
    }
}

#[test]
fn steady_shear_satisfies_cauchy_formula() {
    let g = Grid::new(2, 32).unwrap();
    let cfg = SimConfig::new(
        g,
        2.0,
        1.0,
        InitialData::Shear {
            amplitude: 1.0,
            wavenumber: 1,
            mean: 0.0,
        },
    );
    let r = lagrange_check(&cfg, 16, 0.05).unwrap();
    assert!(r.cauchy_residual <= 1e-8, "{r:?}");
    assert!(r.max_det_error <= 1e-12);
}

#[test]
fn generic_run_satisfies_cauchy_formula() {
    let g = Grid::new(2, 64).unwrap();
    let mut cfg = SimConfig::new(g, 2.0, 1.0, InitialData::RandomBandlimited { kmax: 8, amplitude: 5.0 });
    cfg.seed = 3;
    let r = lagrange_check(&cfg, 16, 0.02).unwrap();
    assert!(r.cauchy_residual <= 1e-4, "{r:?}");
    assert!(r.max_det_error <= 1e-6);
    assert!(r.max_inverse_error <= 1e-8);
    assert!(r.neumann_error.unwrap() <= 1e-6);
}

#[test]
fn three_dimensional_flow_preserves_volume() {
    let g = Grid::new(3, 16).unwrap();
    let v = random_solenoidal(g, 3, 11, false).scale(0.05);
    let (flow, _) = integrate_flow_map(&mut FrozenVelocity(v), 1.0, 0.05, 8).unwrap();
    assert!(flow.max_det_error() <= 1e-6);
    assert!(flow.max_inverse_error() <= 1e-8);
}

#[test]
fn identity_flow_matches_spectral_operator() {
    let g = Grid::new(2, 64).unwrap();
    let f = test_function(g);
    let flow = FlowMap::identity(2, 64, 1.0);
    let lag = lagrangian_frac_laplacian(&f.to_samples(), &flow, 0.4, 3).unwrap();
    let spec = fractional_laplacian(&f, 0.4).to_samples();
    let err = rel_max(&lag, &spec);
    assert!(err <= 0.02, "{err}");
}

#[test]
fn small_shear_matches_pullback() {
    let g = Grid::new(2, 64).unwrap();
    let f = test_function(g);
    let eps = 0.02;
    let (flow, hist) = integrate_flow_map(&mut FrozenVelocity(shear(g, eps)), 1.0, 0.05, 64).unwrap();
    assert!(hist.smallness() <= 0.5);
    let ev = FourierEvaluator::scalar(&f);
    let fy: Vec<f64> = flow.y.iter().map(|y| ev.value(y)[0]).collect();
    let lag = lagrangian_frac_laplacian(&fy, &flow, 0.4, 3).unwrap();
    let oracle = eulerian_pullback(&f, |x| [x[0] - eps * (2.0 * PI * x[1]).sin(), x[1], 0.0], &flow, 0.4);
    let err = rel_max(&lag, &oracle);
    assert!(err <= 0.05, "{err}");
}

#[test]
fn operator_difference_constant_is_stable() {
    let g = Grid::new(2, 32).unwrap();
    let f = test_function(g);
    let ev = FourierEvaluator::scalar(&f);
    let grad_linf = |v: &SpectralVector| {
        let e = FourierEvaluator::vector(v);
        (0..g.len())
            .map(|p| frobenius(&e.value_and_gradient(&g.coordinate(p)).1))
            .fold(0.0, f64::max)
    };
    let ks: Vec<f64> = (0..10u64)
        .map(|pair| {
            let v1 = random_solenoidal(g, 2, 100 + 2 * pair, false).scale(0.01);
            let v2 = random_solenoidal(g, 2, 101 + 2 * pair, false).scale(0.01);
            let (fl1, _) = integrate_flow_map(&mut FrozenVelocity(v1.clone()), 1.0, 0.05, 16).unwrap();
            let (fl2, _) = integrate_flow_map(&mut FrozenVelocity(v2.clone()), 1.0, 0.05, 16).unwrap();
            let fy: Vec<f64> = fl1.y.iter().map(|y| ev.value(y)[0]).collect();
            let a = lagrangian_frac_laplacian(&fy, &fl1, 0.4, 3).unwrap();
            let b = lagrangian_frac_laplacian(&fy, &fl2, 0.4, 3).unwrap();
            let rms = |v: &mut dyn Iterator<Item = f64>, n: usize| (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt();
            let diff = rms(&mut a.iter().zip(&b).map(|(x, y)| x - y), a.len());
            let fnorm = rms(&mut fy.iter().copied(), fy.len());
            diff / (fnorm * grad_linf(&v1.axpy(-1.0, &v2)))
        })
        .collect();
    let hi = ks.iter().copied().fold(0.0, f64::max);
    let lo = ks.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(lo > 0.0 && hi / lo <= 4.0, "{ks:?}");
}

#[test]
fn rejects_degenerate_requests() {
    let g = Grid::new(2, 8).unwrap();
    assert!(matches!(
        integrate_flow_map(&mut FrozenVelocity(shear(g, 1.0)), 1.0, 0.1, 16),
        Err(LagrangianError::Particles { .. })
    ));
    assert!(matches!(
        integrate_flow_map(&mut FrozenVelocity(shear(g, 1.0)), 1.0, -0.1, 4),
        Err(LagrangianError::Step(_))
    ));
}

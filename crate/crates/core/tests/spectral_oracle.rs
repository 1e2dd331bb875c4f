use std::f64::consts::PI;

use mre_core::analysis::helicity;
use mre_core::oracle::{self, compare, OracleOp, Torus};
use mre_core::solver::{build_initial_field, compute_pressure, compute_velocity, random_solenoidal, InitialData};
use mre_core::spectral::{fractional_laplacian, leray_project, Grid, SpectralScalar, SpectralVector};
use proptest::prelude::*;

#[test]
fn every_operator_matches_dft_reference() {
    for dim in [2, 3] {
        for seed in [0, 1] {
            for op in OracleOp::ALL {
                let err = compare(op, dim, 8, seed);
                assert!(err <= 1e-12, "{op} d={dim} seed={seed}: {err:e}");
            }
        }
    }
    for op in [OracleOp::Derivative, OracleOp::Leray, OracleOp::Velocity] {
        assert!(compare(op, 2, 16, 4) <= 1e-12);
    }
}

fn crossed_cosines(n: usize) -> SpectralVector {
    let g = Grid::new(2, n).unwrap();
    SpectralVector::from_fn(g, |x| vec![(2.0 * PI * x[1]).cos(), (2.0 * PI * x[0]).cos()])
}

#[test]
fn crossed_cosines_are_pure_pressure() {
    // div(B⊗B) = −∇(sin 2πx₁ sin 2πx₂): the velocity vanishes and the
    // pressure is the potential.
    let b = crossed_cosines(8);
    let u = compute_velocity(&b, 2.0);
    assert!(u.to_samples().iter().flatten().all(|v| v.abs() < 1e-13));
    let p = compute_pressure(&b, 2.0);
    let g = *b.grid();
    for (flat, v) in p.to_samples().iter().enumerate() {
        let x = g.coordinate(flat);
        assert!((v - (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin()).abs() < 1e-13);
    }
    let t = Torus::new(2, 8);
    let reference = oracle::pressure(&t, &b.to_samples());
    for (a, r) in p.to_samples().iter().zip(&reference) {
        assert!((a - r).abs() < 1e-13);
    }
}

#[test]
fn frozen_velocity_and_pressure() {
    // B = (cos 2πx₂, cos 2πx₁) + ½ ∇^⊥(sin 2πx₁ sin 4πx₂ / 2π), γ = 2, n = 8.
    let g = Grid::new(2, 8).unwrap();
    let b = SpectralVector::from_fn(g, |x| {
        vec![
            (2.0 * PI * x[1]).cos() - (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).cos(),
            (2.0 * PI * x[0]).cos() + 0.5 * (2.0 * PI * x[0]).cos() * (4.0 * PI * x[1]).sin(),
        ]
    });
    let u = compute_velocity(&b, 2.0).to_samples();
    let p = compute_pressure(&b, 2.0).to_samples();
    let frozen = [
        (9, -2.20469473664452000e-4, -2.51965112759371601e-4, 1.25000000000001665e-1),
        (21, 0.0, 3.56332479709166490e-4, -1.88388347648318577e0),
        (42, 0.0, 3.56332479709170502e-4, -7.07106781186545574e-1),
    ];
    for (flat, u1, u2, pf) in frozen {
        assert!((u[0][flat] - u1).abs() < 1e-15, "u1 at {flat}");
        assert!((u[1][flat] - u2).abs() < 1e-15, "u2 at {flat}");
        assert!((p[flat] - pf).abs() < 1e-12, "p at {flat}");
    }
    let u_l2sq: f64 = u.iter().flatten().map(|v| v * v).sum::<f64>() / 64.0;
    assert!((u_l2sq - 1.27468823736683806e-7).abs() < 1e-18);
}

#[test]
fn abc_helicity_matches_closed_form() {
    // Beltrami: curl B = 2πB, so A = B/2π and H = ‖B‖²/2π = 3/2π.
    let g = Grid::new(3, 16).unwrap();
    let recipe = InitialData::Abc {
        a: 1.0,
        b: 1.0,
        c: 1.0,
        wavenumber: 1,
        scale: 1.0,
        eta: 0.0,
        kmax: 4,
    };
    let b = build_initial_field(g, &recipe, 0).unwrap();
    assert!((helicity(&b).unwrap() - 3.0 / (2.0 * PI)).abs() < 1e-13);
}

fn random_vector(dim: usize, n: usize, seed: u64) -> SpectralVector {
    let t = Torus::new(dim, n);
    let g = Grid::new(dim, n).unwrap();
    let samples: Vec<Vec<f64>> = (0..dim).map(|a| oracle::random_samples(&t, seed * 7 + a as u64)).collect();
    SpectralVector::from_samples(g, &samples).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_idempotent_and_orthogonal(seed in 0u64..10_000, dim in 2usize..=3) {
        let v = random_vector(dim, 8, seed);
        let p = leray_project(&v);
        let pp = leray_project(&p);
        prop_assert!(pp.max_abs_diff(&p) < 1e-13);
        prop_assert!(p.divergence_residual() < 1e-12);
        let q = v.axpy(-1.0, &p);
        prop_assert!(p.inner(&q).abs() < 1e-12 * (1.0 + v.norm_sq()));
    }

    #[test]
    fn lambda_group_law(seed in 0u64..10_000, a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let t = Torus::new(2, 8);
        let f = SpectralScalar::from_samples(Grid::new(2, 8).unwrap(), &oracle::random_samples(&t, seed)).unwrap();
        let f0 = f.map_modes(|k, c| if k.iter().all(|v| *v == 0) { c * 0.0 } else { c });
        let lhs = fractional_laplacian(&fractional_laplacian(&f0, a), b);
        let rhs = fractional_laplacian(&f0, a + b);
        let scale = rhs.max_abs_coeff().max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * scale);
    }

    #[test]
    fn parseval(seed in 0u64..10_000) {
        let v = random_solenoidal(Grid::new(2, 16).unwrap(), 5, seed, false).scale(3.0);
        let mean_sq: f64 = v.to_samples().iter().flatten().map(|x| x * x).sum::<f64>() / 256.0;
        prop_assert!((mean_sq - v.norm_sq()).abs() < 1e-12 * v.norm_sq());
    }
}

//! Initial magnetic field recipes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::InitialData;
use super::SolverError;
use crate::spectral::{leray_project, Grid, SpectralScalar, SpectralVector};

/// Seeded random solenoidal field supported on `1 ≤ |k| ≤ kmax` (Euclidean),
/// zero mean, normalized to `‖v‖_{L²} = 1`. With `skip_zero_k1` the modes
/// with `k₁ = 0` are left empty. Returns the zero field if no mode qualifies.
pub fn random_solenoidal(grid: Grid, kmax: u32, seed: u64, skip_zero_k1: bool) -> SpectralVector {
    let d = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax2 = (kmax as i64).pow(2);
    let mut comps: Vec<SpectralScalar> = (0..d).map(|_| SpectralScalar::zeros(grid)).collect();
    for flat in 0..grid.len() {
        let k = grid.mode(flat);
        let k2 = Grid::k_sq(&k);
        if k2 == 0 || k2 > kmax2 || !grid.in_dealias_band(&k) || grid.is_nyquist(&k) {
            continue;
        }
        if skip_zero_k1 && k[0] == 0 {
            continue;
        }
        for c in comps.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            c.coeffs_mut()[flat] = Complex64::new(re, im);
        }
    }
    for c in comps.iter_mut() {
        c.symmetrize();
    }
    let v = leray_project(&SpectralVector::new(comps).expect("d components"));
    let norm = v.norm_sq().sqrt();
    if norm == 0.0 {
        return SpectralVector::zeros(grid);
    }
    v.scale(1.0 / norm).with_flags(true, true)
}

fn finalize(b: SpectralVector, mean: &[f64]) -> SpectralVector {
    let mut comps = b.truncated().into_components();
    for (a, c) in comps.iter_mut().enumerate() {
        c.coeffs_mut()[0] = Complex64::new(mean.get(a).copied().unwrap_or(0.0), 0.0);
        c.symmetrize();
    }
    let projected = leray_project(&SpectralVector::new(comps).expect("d components"));
    let zero_mean = mean.iter().all(|&m| m == 0.0);
    projected.with_flags(true, zero_mean)
}

/// Builds the initial field for `recipe` on `grid`.
pub fn build_initial_field(
    grid: Grid,
    recipe: &InitialData,
    seed: u64,
) -> Result<SpectralVector, SolverError> {
    let d = grid.dim();
    let l = grid.period();
    let field = match recipe {
        InitialData::E1PlusPerturbation { eta, kmax } => {
            let pert = random_solenoidal(grid, *kmax, seed, true).scale(*eta);
            let mut mean = vec![0.0; d];
            mean[0] = 1.0;
            finalize(pert, &mean)
        }
        InitialData::RandomBandlimited { kmax, amplitude } => {
            let v = random_solenoidal(grid, *kmax, seed, false).scale(*amplitude);
            finalize(v, &vec![0.0; d])
        }
        InitialData::Shear {
            amplitude,
            wavenumber,
            mean,
        } => {
            let (amp, k) = (*amplitude, *wavenumber as f64);
            let v = SpectralVector::from_fn(grid, |x| {
                let mut out = vec![0.0; d];
                out[0] = amp * (2.0 * PI * k * x[1] / l).sin();
                out
            });
            let mut m = vec![0.0; d];
            m[0] = *mean;
            finalize(v, &m)
        }
        InitialData::Abc {
            a,
            b,
            c,
            wavenumber,
            scale,
            eta,
            kmax,
        } => {
            if d != 3 {
                return Err(SolverError::InvalidConfig(
                    "initial_data.recipe abc requires dim = 3".into(),
                ));
            }
            let (a, b, c, s) = (*a, *b, *c, *scale);
            let w = 2.0 * PI * *wavenumber as f64 / l;
            let abc = SpectralVector::from_fn(grid, |x| {
                vec![
                    s * (a * (w * x[2]).sin() + c * (w * x[1]).cos()),
                    s * (b * (w * x[0]).sin() + a * (w * x[2]).cos()),
                    s * (c * (w * x[1]).sin() + b * (w * x[0]).cos()),
                ]
            });
            let pert = random_solenoidal(grid, *kmax, seed, false);
            finalize(abc.axpy(*eta, &pert), &[0.0; 3])
        }
        InitialData::Coefficients { mean, modes } => {
            let mut comps: Vec<SpectralScalar> = (0..d).map(|_| SpectralScalar::zeros(grid)).collect();
            for m in modes {
                if m.k.len() != d || m.value.len() != d {
                    return Err(SolverError::InvalidConfig(format!(
                        "initial_data.modes entries need k and value of length {d}"
                    )));
                }
                let neg: Vec<i64> = m.k.iter().map(|v| -v).collect();
                for (a, c) in comps.iter_mut().enumerate() {
                    let z = Complex64::new(m.value[a][0], m.value[a][1]);
                    c.set_coeff(&m.k, z);
                    c.set_coeff(&neg, z.conj());
                }
            }
            let v = SpectralVector::new(comps).expect("d components");
            finalize(v, mean)
        }
    };
    Ok(field)
}

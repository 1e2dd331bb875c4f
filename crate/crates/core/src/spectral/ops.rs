//! Exact spectral operators.
//!
//! Derivatives drop modes whose differentiated axis sits on the Nyquist index
//! `n/2`; the Leray projector drops every mode with a Nyquist component. Both
//! keep real fields real. Dealiased fields never carry Nyquist content.

use num_complex::Complex64;

use super::field::{SpectralError, SpectralScalar, SpectralVector};
use super::grid::{Grid, MAX_DIM};

/// `∂_axis f`: multiplies `f̂_k` by `2πi k_axis / period`.
pub fn derivative(f: &SpectralScalar, axis: usize) -> SpectralScalar {
    let grid = *f.grid();
    assert!(axis < grid.dim(), "axis {axis} out of range");
    let scale = grid.wave_scale();
    let half = (grid.n() / 2) as i64;
    f.map_modes(|k, c| {
        if k[axis] == half {
            Complex64::default()
        } else {
            c * Complex64::new(0.0, scale * k[axis] as f64)
        }
    })
}

pub fn gradient(f: &SpectralScalar) -> SpectralVector {
    let comps = (0..f.grid().dim()).map(|a| derivative(f, a)).collect();
    SpectralVector::new(comps).expect("gradient has d components")
}

pub fn divergence(v: &SpectralVector) -> SpectralScalar {
    let mut out = derivative(v.component(0), 0);
    for a in 1..v.dim() {
        out = &out + &derivative(v.component(a), a);
    }
    out
}

/// Scalar curl `∂₁v² − ∂₂v¹` of a planar field.
pub fn curl_2d(v: &SpectralVector) -> Result<SpectralScalar, SpectralError> {
    if v.dim() != 2 {
        return Err(SpectralError::Dimension {
            expected: 2,
            found: v.dim(),
        });
    }
    Ok(&derivative(v.component(1), 0) - &derivative(v.component(0), 1))
}

/// Vector curl of a three-dimensional field.
pub fn curl_3d(v: &SpectralVector) -> Result<SpectralVector, SpectralError> {
    if v.dim() != 3 {
        return Err(SpectralError::Dimension {
            expected: 3,
            found: v.dim(),
        });
    }
    let d = |c: usize, a: usize| derivative(v.component(c), a);
    let comps = vec![
        &d(2, 1) - &d(1, 2),
        &d(0, 2) - &d(2, 0),
        &d(1, 0) - &d(0, 1),
    ];
    Ok(SpectralVector::new(comps)?.with_flags(true, true))
}

/// Curl in either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Curl {
    Scalar(SpectralScalar),
    Vector(SpectralVector),
}

pub fn curl(v: &SpectralVector) -> Curl {
    match v.dim() {
        2 => Curl::Scalar(curl_2d(v).expect("dimension checked")),
        _ => Curl::Vector(curl_3d(v).expect("dimension checked")),
    }
}

/// Symbol `(2π|k|/period)^{2s}` of `Λ^{2s}` with the mean-mode convention:
/// the zero mode is kept for `s = 0` and annihilated otherwise.
#[inline]
pub fn frac_symbol(grid: &Grid, k: &[i64; MAX_DIM], s: f64) -> f64 {
    let k2 = Grid::k_sq(k);
    if k2 == 0 {
        return if s == 0.0 { 1.0 } else { 0.0 };
    }
    if s == 0.0 {
        return 1.0;
    }
    let scale = grid.wave_scale();
    (scale * scale * k2 as f64).powf(s)
}

/// `Λ^{2s} f = (−Δ)^s f`.
pub fn fractional_laplacian(f: &SpectralScalar, s: f64) -> SpectralScalar {
    let grid = *f.grid();
    f.map_modes(|k, c| c * frac_symbol(&grid, k, s))
}

pub fn fractional_laplacian_vector(v: &SpectralVector, s: f64) -> SpectralVector {
    let out = v.map_components(|c| fractional_laplacian(c, s));
    let zero_mean = v.is_zero_mean() || s != 0.0;
    out.with_flags(v.is_divergence_free(), zero_mean)
}

/// `Δ^{-1} f` on the zero-mean subspace (mean annihilated).
pub fn inverse_laplacian(f: &SpectralScalar) -> SpectralScalar {
    fractional_laplacian(f, -1.0).scale(-1.0)
}

/// Leray projection `v̂_k ↦ v̂_k − k (k·v̂_k)/|k|²` for `k ≠ 0`.
pub fn leray_project(v: &SpectralVector) -> SpectralVector {
    let grid = *v.grid();
    let d = grid.dim();
    let mut comps: Vec<Vec<Complex64>> = v.components().iter().map(|c| c.coeffs().to_vec()).collect();
    for flat in 1..grid.len() {
        let k = grid.mode(flat);
        if grid.is_nyquist(&k) {
            for c in comps.iter_mut() {
                c[flat] = Complex64::default();
            }
            continue;
        }
        let k2 = Grid::k_sq(&k) as f64;
        let mut dot = Complex64::default();
        for a in 0..d {
            dot += comps[a][flat] * k[a] as f64;
        }
        if dot == Complex64::default() {
            continue;
        }
        let factor = dot / k2;
        for a in 0..d {
            comps[a][flat] -= factor * k[a] as f64;
        }
    }
    let components = comps
        .into_iter()
        .map(|c| SpectralScalar::from_coeffs(grid, c).expect("length preserved"))
        .collect();
    let zero_mean = v.is_zero_mean();
    SpectralVector::new(components)
        .expect("component count preserved")
        .with_flags(true, zero_mean)
}

/// Row-major real samples of the dealias-truncated field.
pub(crate) fn truncated_samples(f: &SpectralScalar) -> Vec<f64> {
    f.truncated().to_samples()
}

/// Forward transform of real samples, truncated to the dealias band and
/// symmetrized.
pub(crate) fn band_limited_from_samples(grid: Grid, samples: &[f64]) -> SpectralScalar {
    let mut out = SpectralScalar::from_samples(grid, samples)
        .expect("sample count matches grid")
        .truncated();
    out.symmetrize();
    out
}

/// Dealiased product: both factors truncated to the dealias band, multiplied
/// pointwise, and the result truncated again.
pub fn dealiased_product(
    f: &SpectralScalar,
    g: &SpectralScalar,
) -> Result<SpectralScalar, SpectralError> {
    if !f.grid().same_shape(g.grid()) {
        return Err(SpectralError::GridMismatch);
    }
    let a = truncated_samples(f);
    let b = truncated_samples(g);
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(band_limited_from_samples(*f.grid(), &prod))
}

/// `div(B⊗B)`, component `i = Σ_j ∂_j(B^i B^j)`.
pub fn tensor_divergence(b: &SpectralVector) -> SpectralVector {
    let grid = *b.grid();
    let d = grid.dim();
    let samples: Vec<Vec<f64>> = b.components().iter().map(truncated_samples).collect();
    let mut products: Vec<Vec<SpectralScalar>> = vec![Vec::with_capacity(d); d];
    for i in 0..d {
        for j in 0..d {
            if j < i {
                let prev = products[j][i].clone();
                products[i].push(prev);
            } else {
                let prod: Vec<f64> = samples[i].iter().zip(&samples[j]).map(|(x, y)| x * y).collect();
                products[i].push(band_limited_from_samples(grid, &prod));
            }
        }
    }
    let comps = (0..d)
        .map(|i| {
            let mut acc = derivative(&products[i][0], 0);
            for j in 1..d {
                acc = &acc + &derivative(&products[i][j], j);
            }
            acc
        })
        .collect();
    SpectralVector::new(comps)
        .expect("d components")
        .with_flags(false, true)
}

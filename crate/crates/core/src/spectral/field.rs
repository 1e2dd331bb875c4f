use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use super::fft;
use super::grid::{Grid, MAX_DIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("expected {expected} values, got {found}")]
    Length { expected: usize, found: usize },
    #[error("operation requires dimension {expected}, field has dimension {found}")]
    Dimension { expected: usize, found: usize },
    #[error("vector field needs {expected} components, got {found}")]
    Components { expected: usize, found: usize },
}

/// Real periodic scalar field held as its full complex Fourier spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    /// Field equal to `value` everywhere.
    pub fn constant(grid: Grid, value: f64) -> Self {
        let mut out = Self::zeros(grid);
        out.coeffs[0] = Complex64::new(value, 0.0);
        out
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::Length {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Forward transform of `n^d` row-major real samples.
    pub fn from_samples(grid: Grid, samples: &[f64]) -> Result<Self, SpectralError> {
        if samples.len() != grid.len() {
            return Err(SpectralError::Length {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        Ok(Self {
            grid,
            coeffs: fft::forward_real(&grid, samples),
        })
    }

    /// Samples `f` at every grid point and transforms.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.len())
            .map(|i| f(&grid.coordinate(i)[..grid.dim()]))
            .collect();
        Self {
            grid,
            coeffs: fft::forward_real(&grid, &samples),
        }
    }

    /// Inverse transform to row-major real samples.
    pub fn to_samples(&self) -> Vec<f64> {
        fft::inverse_real(&self.grid, &self.coeffs)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of integer wavenumber `k`.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs[self.grid.flat_of_mode(k)]
    }

    pub fn set_coeff(&mut self, k: &[i64], value: Complex64) {
        let flat = self.grid.flat_of_mode(k);
        self.coeffs[flat] = value;
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Applies `f(k, c)` to every stored coefficient.
    pub fn map_modes(&self, f: impl Fn(&[i64; MAX_DIM], Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, &c)| f(&self.grid.mode(flat), c))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Zeroes every coefficient outside the dealias band.
    pub fn truncated(&self) -> Self {
        let grid = self.grid;
        self.map_modes(|k, c| {
            if grid.in_dealias_band(k) {
                c
            } else {
                Complex64::default()
            }
        })
    }

    /// Enforces `f̂_{−k} = conj(f̂_k)` by averaging each conjugate pair.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        for flat in 0..self.coeffs.len() {
            let conj = g.conjugate_flat(flat);
            if conj < flat {
                continue;
            }
            if conj == flat {
                self.coeffs[flat].im = 0.0;
                continue;
            }
            let avg = (self.coeffs[flat] + self.coeffs[conj].conj()) * 0.5;
            self.coeffs[flat] = avg;
            self.coeffs[conj] = avg.conj();
        }
    }

    pub fn symmetrized(mut self) -> Self {
        self.symmetrize();
        self
    }

    /// Largest violation of Hermitian symmetry, `max_k |f̂_{−k} − conj(f̂_k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|flat| (self.coeffs[self.grid.conjugate_flat(flat)] - self.coeffs[flat].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ_k |f̂_k|²`, the mean of `f²` over the torus.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Normalized `L²` inner product `Σ_k Re(f̂_k conj(ĝ_k))`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self + factor · other`.
    pub fn axpy(&self, factor: f64, other: &Self) -> Self {
        debug_assert!(self.grid.same_shape(&other.grid));
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * factor)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &SpectralScalar {
    type Output = SpectralScalar;
    fn add(self, rhs: Self) -> SpectralScalar {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralScalar {
    type Output = SpectralScalar;
    fn sub(self, rhs: Self) -> SpectralScalar {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralScalar {
    type Output = SpectralScalar;
    fn mul(self, rhs: f64) -> SpectralScalar {
        self.scale(rhs)
    }
}

impl Neg for &SpectralScalar {
    type Output = SpectralScalar;
    fn neg(self) -> SpectralScalar {
        self.scale(-1.0)
    }
}

/// Vector field with `d` spectral components on one grid.
///
/// The flags record properties that the producing operation guarantees; they
/// are cleared by any operation that does not.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    components: Vec<SpectralScalar>,
    divergence_free: bool,
    zero_mean: bool,
}

impl SpectralVector {
    pub fn new(components: Vec<SpectralScalar>) -> Result<Self, SpectralError> {
        let first = components.first().ok_or(SpectralError::Components {
            expected: 2,
            found: 0,
        })?;
        let grid = *first.grid();
        if components.len() != grid.dim() {
            return Err(SpectralError::Components {
                expected: grid.dim(),
                found: components.len(),
            });
        }
        if components.iter().any(|c| !c.grid().same_shape(&grid)) {
            return Err(SpectralError::GridMismatch);
        }
        Ok(Self {
            components,
            divergence_free: false,
            zero_mean: false,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            components: (0..grid.dim()).map(|_| SpectralScalar::zeros(grid)).collect(),
            divergence_free: true,
            zero_mean: true,
        }
    }

    /// Constant vector field.
    pub fn constant(grid: Grid, value: &[f64]) -> Self {
        let components = (0..grid.dim())
            .map(|a| SpectralScalar::constant(grid, value.get(a).copied().unwrap_or(0.0)))
            .collect();
        Self {
            components,
            divergence_free: true,
            zero_mean: value.iter().all(|&v| v == 0.0),
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let d = grid.dim();
        let mut samples = vec![Vec::with_capacity(grid.len()); d];
        for i in 0..grid.len() {
            let v = f(&grid.coordinate(i)[..d]);
            for a in 0..d {
                samples[a].push(v[a]);
            }
        }
        let components = samples
            .iter()
            .map(|s| SpectralScalar::from_samples(grid, s).expect("sample count matches grid"))
            .collect();
        Self {
            components,
            divergence_free: false,
            zero_mean: false,
        }
    }

    pub fn from_samples(grid: Grid, samples: &[Vec<f64>]) -> Result<Self, SpectralError> {
        let comps = samples
            .iter()
            .map(|s| SpectralScalar::from_samples(grid, s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(comps)
    }

    pub fn to_samples(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| c.to_samples()).collect()
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SpectralScalar] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &SpectralScalar {
        &self.components[axis]
    }

    pub fn into_components(self) -> Vec<SpectralScalar> {
        self.components
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    /// Sets the divergence-free flag after verifying the spectral certificate.
    pub fn certify_divergence_free(mut self, tol: f64) -> Self {
        self.divergence_free = self.divergence_residual() <= tol;
        self
    }

    /// Sets the zero-mean flag after verifying `v̂_0 = 0`.
    pub fn certify_zero_mean(mut self) -> Self {
        self.zero_mean = self.components.iter().all(|c| c.coeffs()[0].norm() == 0.0);
        self
    }

    pub(crate) fn with_flags(mut self, divergence_free: bool, zero_mean: bool) -> Self {
        self.divergence_free = divergence_free;
        self.zero_mean = zero_mean;
        self
    }

    /// `max_k |2πi k·v̂_k| / max_k |v̂_k|` (zero for the zero field).
    pub fn divergence_residual(&self) -> f64 {
        let grid = *self.grid();
        let scale = grid.wave_scale();
        let mut max_div = 0.0f64;
        let mut max_coeff = 0.0f64;
        for flat in 0..grid.len() {
            let k = grid.mode(flat);
            let mut div = Complex64::default();
            for (a, comp) in self.components.iter().enumerate() {
                let c = comp.coeffs()[flat];
                div += c * (k[a] as f64);
                max_coeff = max_coeff.max(c.norm());
            }
            max_div = max_div.max(div.norm() * scale);
        }
        if max_coeff == 0.0 {
            0.0
        } else {
            max_div / max_coeff
        }
    }

    /// Mean value per component.
    pub fn mean(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mean()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sq()).sum()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    pub fn map_components(&self, f: impl Fn(&SpectralScalar) -> SpectralScalar) -> Self {
        Self {
            components: self.components.iter().map(f).collect(),
            divergence_free: false,
            zero_mean: false,
        }
    }

    pub fn symmetrize(&mut self) {
        for c in &mut self.components {
            c.symmetrize();
        }
    }

    pub fn truncated(&self) -> Self {
        Self {
            components: self.components.iter().map(|c| c.truncated()).collect(),
            divergence_free: self.divergence_free,
            zero_mean: self.zero_mean,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            components: self.components.iter().map(|c| c.scale(factor)).collect(),
            divergence_free: self.divergence_free,
            zero_mean: self.zero_mean,
        }
    }

    /// `self + factor · other`; flags survive when both operands carry them.
    pub fn axpy(&self, factor: f64, other: &Self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.axpy(factor, b))
                .collect(),
            divergence_free: self.divergence_free && other.divergence_free,
            zero_mean: self.zero_mean && other.zero_mean,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.max_abs_coeff())
            .fold(0.0, f64::max)
    }

    /// Pointwise Euclidean magnitude on the sample grid.
    pub fn magnitude_samples(&self) -> Vec<f64> {
        let samples = self.to_samples();
        let len = self.grid().len();
        (0..len)
            .map(|i| samples.iter().map(|s| s[i] * s[i]).sum::<f64>().sqrt())
            .collect()
    }
}

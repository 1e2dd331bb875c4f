use num_complex::Complex64;

use crate::spectral::{derivative, inverse_laplacian, SpectralScalar, SpectralVector};

use super::RelaxationError;

/// Planar stream function `φ = φ_per + slope·x + offset` with `∇^⊥φ = B`,
/// `∇^⊥ = (−∂₂, ∂₁)`. Only the periodic part lives on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamFunction {
    /// Zero-mean periodic part `Δ^{−1}(∂₁B² − ∂₂B¹)`.
    pub periodic: SpectralScalar,
    /// `(mean B², −mean B¹)`.
    pub slope: [f64; 2],
    /// Additive gauge constant.
    pub offset: f64,
}

impl StreamFunction {
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// Value of the affine part at `x`.
    pub fn affine(&self, x: &[f64]) -> f64 {
        self.slope[0] * x[0] + self.slope[1] * x[1] + self.offset
    }

    /// Samples of the full stream function on the grid of one fundamental
    /// domain `[0, L)²`, row-major.
    pub fn samples(&self) -> Vec<f64> {
        let grid = *self.periodic.grid();
        self.periodic
            .to_samples()
            .into_iter()
            .enumerate()
            .map(|(flat, v)| v + self.affine(&grid.coordinate(flat)))
            .collect()
    }

    /// Row means of [`samples`](Self::samples) over `x₁`, i.e. `P₀φ` at
    /// `x₂ = j·h`, `j = 0..n`.
    pub fn horizontal_average(&self) -> Vec<f64> {
        let grid = *self.periodic.grid();
        let n = grid.n();
        let h = grid.spacing();
        let p0 = project_p0(&self.periodic).to_samples();
        let x1_mean = 0.5 * (n - 1) as f64 * h;
        (0..n)
            .map(|j| p0[j] + self.slope[0] * x1_mean + self.slope[1] * j as f64 * h + self.offset)
            .collect()
    }

    /// `∇^⊥φ` rebuilt spectrally (the affine part contributes the mean).
    pub fn perp_gradient(&self) -> SpectralVector {
        let mut b1 = derivative(&self.periodic, 1).scale(-1.0);
        let mut b2 = derivative(&self.periodic, 0);
        b1.coeffs_mut()[0] = Complex64::new(-self.slope[1], 0.0);
        b2.coeffs_mut()[0] = Complex64::new(self.slope[0], 0.0);
        SpectralVector::new(vec![b1, b2]).expect("two components")
    }
}

pub fn stream_function(b: &SpectralVector) -> Result<StreamFunction, RelaxationError> {
    if b.dim() != 2 {
        return Err(RelaxationError::Dimension(b.dim()));
    }
    let source = &derivative(b.component(1), 0) - &derivative(b.component(0), 1);
    let mean = b.mean();
    Ok(StreamFunction {
        periodic: inverse_laplacian(&source),
        slope: [mean[1], -mean[0]],
        offset: 0.0,
    })
}

/// `P₀`: keeps the `k₁ = 0` modes (the `x₁`-average).
pub fn project_p0(f: &SpectralScalar) -> SpectralScalar {
    f.map_modes(|k, c| if k[0] == 0 { c } else { Complex64::default() })
}

/// `P⊥ = I − P₀`.
pub fn project_perp(f: &SpectralScalar) -> SpectralScalar {
    f.map_modes(|k, c| if k[0] == 0 { Complex64::default() } else { c })
}

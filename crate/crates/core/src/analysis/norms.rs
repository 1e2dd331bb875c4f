use crate::spectral::ops::frac_symbol;
use crate::spectral::{SpectralScalar, SpectralVector};

use super::AnalysisError;

/// Fields whose pointwise magnitude and spectral components can be queried
/// uniformly for scalars and vectors.
pub trait FieldNorms {
    /// `|f|` (Euclidean magnitude for vectors) on the sample grid.
    fn magnitude(&self) -> Vec<f64>;
    fn spectral_components(&self) -> Vec<&SpectralScalar>;
}

impl FieldNorms for SpectralScalar {
    fn magnitude(&self) -> Vec<f64> {
        self.to_samples().into_iter().map(f64::abs).collect()
    }

    fn spectral_components(&self) -> Vec<&SpectralScalar> {
        vec![self]
    }
}

impl FieldNorms for SpectralVector {
    fn magnitude(&self) -> Vec<f64> {
        self.magnitude_samples()
    }

    fn spectral_components(&self) -> Vec<&SpectralScalar> {
        self.components().iter().collect()
    }
}

/// Rectangle-rule `L^p` norm of nonnegative samples over the normalized
/// torus measure; `p = ∞` gives the sample maximum, a lower bound of the
/// true supremum.
pub fn lp_norm_samples(values: &[f64], p: f64) -> Result<f64, AnalysisError> {
    if !(p >= 1.0) {
        return Err(AnalysisError::Exponent(p));
    }
    if values.is_empty() {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let mean = values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / values.len() as f64;
    Ok(mean.powf(1.0 / p))
}

pub fn lp_norm<F: FieldNorms + ?Sized>(f: &F, p: f64) -> Result<f64, AnalysisError> {
    if !(p >= 1.0) {
        return Err(AnalysisError::Exponent(p));
    }
    lp_norm_samples(&f.magnitude(), p)
}

/// `H^s` norm from the spectrum: homogeneous
/// `(Σ_{k≠0} (2π|k|/period)^{2s} |f̂_k|²)^{1/2}`; the inhomogeneous variant
/// adds `|f̂_0|²`.
pub fn sobolev_norm<F: FieldNorms + ?Sized>(f: &F, s: f64, homogeneous: bool) -> f64 {
    let mut total = 0.0;
    for comp in f.spectral_components() {
        let grid = *comp.grid();
        for (flat, c) in comp.coeffs().iter().enumerate() {
            if flat == 0 {
                if !homogeneous {
                    total += c.norm_sqr();
                }
                continue;
            }
            let k = grid.mode(flat);
            total += frac_symbol(&grid, &k, s) * c.norm_sqr();
        }
    }
    total.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn constant_one_has_unit_norms() {
        let g = Grid::new(2, 16).unwrap();
        let f = SpectralScalar::constant(g, 1.0);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((lp_norm(&f, p).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(sobolev_norm(&f, 2.0, true), 0.0);
        assert!((sobolev_norm(&f, 2.0, false) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_norms() {
        let g = Grid::new(2, 8).unwrap();
        let f = SpectralScalar::from_fn(g, |x| (2.0 * PI * x[0]).cos());
        assert!((lp_norm(&f, 2.0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!((sobolev_norm(&f, 0.0, true) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((sobolev_norm(&f, 1.0, true) - 2.0 * PI * FRAC_1_SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn rejects_small_exponent() {
        let g = Grid::new(2, 8).unwrap();
        let f = SpectralScalar::zeros(g);
        assert_eq!(lp_norm(&f, 0.5), Err(AnalysisError::Exponent(0.5)));
        assert!(lp_norm(&f, f64::NAN).is_err());
    }
}

use crate::spectral::{curl, curl_3d, inverse_laplacian, Curl, SpectralVector};

use super::AnalysisError;

/// Number of λ levels used for level-set distributions.
pub const LEVELSET_LEVELS: usize = 32;

/// Magnetic helicity `∫ A·B` with `A = curl (−Δ)^{−1} B` in the zero-mean
/// gauge (normalized measure).
pub fn helicity(b: &SpectralVector) -> Result<f64, AnalysisError> {
    if b.dim() != 3 {
        return Err(AnalysisError::Dimension {
            expected: 3,
            found: b.dim(),
        });
    }
    let psi = b.map_components(|c| inverse_laplacian(c).scale(-1.0));
    let a = curl_3d(&psi).expect("dimension checked");
    Ok(a.inner(b))
}

/// `‖∇×B‖_{L²}`.
pub fn current_l2(b: &SpectralVector) -> f64 {
    match curl(b) {
        Curl::Scalar(j) => j.norm_sq().sqrt(),
        Curl::Vector(j) => j.norm_sq().sqrt(),
    }
}

/// `μ(λ)`: fraction of samples with `|φ| > λ`, for each `λ`.
pub fn levelset_distribution(phi: &[f64], levels: &[f64]) -> Vec<f64> {
    if phi.is_empty() {
        return vec![0.0; levels.len()];
    }
    let mut abs: Vec<f64> = phi.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.total_cmp(b));
    let total = abs.len() as f64;
    levels
        .iter()
        .map(|&lambda| {
            let at_most = abs.partition_point(|&v| v <= lambda);
            (abs.len() - at_most) as f64 / total
        })
        .collect()
}

/// `count` evenly spaced levels from 0 to `max_abs` inclusive.
pub fn levelset_grid(max_abs: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| max_abs * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

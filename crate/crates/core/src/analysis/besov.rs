use crate::spectral::SpectralScalar;

use super::littlewood_paley::lp_decompose;
use super::norms::lp_norm_samples;
use super::AnalysisError;

fn check_exponent(p: f64) -> Result<(), AnalysisError> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(AnalysisError::Exponent(p))
    }
}

fn sequence_norm(values: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.fold(0.0, |acc, v| acc + v.powf(r)).powf(1.0 / r)
    }
}

/// `‖f‖_{Ḃ^s_{p,r}} = ‖(2^{js} ‖Δ̇_j f‖_{L^p})_j‖_{ℓ^r}`.
pub fn besov_norm(f: &SpectralScalar, s: f64, p: f64, r: f64) -> Result<f64, AnalysisError> {
    check_exponent(p)?;
    check_exponent(r)?;
    let lp = lp_decompose(f);
    let terms = lp
        .blocks
        .iter()
        .map(|(j, block)| {
            let samples: Vec<f64> = block.to_samples();
            lp_norm_samples(&samples, p).map(|n| 2f64.powf(*j as f64 * s) * n)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sequence_norm(terms.into_iter(), r))
}

/// Finite-difference Besov norm
/// `‖ ‖f(·+z) − f‖_{L^p} / |z|^s ‖_{L^r(dz/|z|^d)}`, summed over the exact
/// periodic grid shifts `z ≠ 0` of one fundamental domain with cell weight
/// `h^d` and torus distance `|z|`. Lengths are measured in units of `L/2π`,
/// the scale on which the dyadic blocks see integer wavenumbers; the
/// measure `dz/|z|^d` is unaffected.
pub fn besov_norm_fd(f: &SpectralScalar, s: f64, p: f64, r: f64) -> Result<f64, AnalysisError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(AnalysisError::Smoothness(s));
    }
    check_exponent(p)?;
    check_exponent(r)?;
    let grid = *f.grid();
    let d = grid.dim();
    let n = grid.n();
    let h = grid.spacing() * grid.wave_scale();
    let samples = f.to_samples();
    let len = grid.len();
    let cell = h.powi(d as i32);

    let mut shifted = vec![0.0; len];
    let mut diff = vec![0.0; len];
    let mut terms = Vec::with_capacity(len - 1);
    for shift_flat in 1..len {
        let shift = grid.unravel(shift_flat);
        let mut dist2 = 0.0;
        for &sa in shift.iter().take(d) {
            let w = sa.min(n - sa) as f64 * h;
            dist2 += w * w;
        }
        let dist = dist2.sqrt();
        for (pt, out) in shifted.iter_mut().enumerate() {
            let idx = grid.unravel(pt);
            let mut src = [0usize; 3];
            for a in 0..d {
                src[a] = (idx[a] + shift[a]) % n;
            }
            *out = samples[grid.ravel(&src[..d])];
        }
        for ((o, a), b) in diff.iter_mut().zip(&shifted).zip(&samples) {
            *o = a - b;
        }
        let norm = lp_norm_samples(&diff, p)?;
        let value = norm / dist.powf(s);
        terms.push((value, dist));
    }
    if r.is_infinite() {
        return Ok(terms.into_iter().map(|(v, _)| v).fold(0.0, f64::max));
    }
    let sum: f64 = terms
        .into_iter()
        .map(|(v, dist)| v.powf(r) * cell / dist.powi(d as i32))
        .sum();
    Ok(sum.powf(1.0 / r))
}

/// Terms of the logarithmic interpolation inequality
/// `‖f‖_{Ḃ^s_{p,1}} ≤ C ‖f‖_{Ḃ^s_{p,∞}} (1 + log((‖f‖_{Ḃ^{s−θ}_{p,∞}} + ‖f‖_{Ḃ^{s+θ}_{p,∞}}) / ‖f‖_{Ḃ^s_{p,∞}}))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogInterpolation {
    /// `‖f‖_{Ḃ^s_{p,1}}`.
    pub lhs: f64,
    /// `‖f‖_{Ḃ^s_{p,∞}}`.
    pub besov_inf: f64,
    /// Argument of the logarithm.
    pub log_argument: f64,
    /// The full bracket multiplying `C`.
    pub rhs_factor: f64,
}

impl LogInterpolation {
    /// `lhs / rhs_factor`, the smallest admissible `C` for this field.
    pub fn ratio(&self) -> f64 {
        if self.rhs_factor == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs_factor
        }
    }
}

pub fn log_interp_check(
    f: &SpectralScalar,
    s: f64,
    theta: f64,
    p: f64,
) -> Result<LogInterpolation, AnalysisError> {
    if !(theta > 0.0) {
        return Err(AnalysisError::Theta(theta));
    }
    let lhs = besov_norm(f, s, p, 1.0)?;
    let b0 = besov_norm(f, s, p, f64::INFINITY)?;
    if b0 == 0.0 {
        return Ok(LogInterpolation {
            lhs: 0.0,
            besov_inf: 0.0,
            log_argument: 0.0,
            rhs_factor: 0.0,
        });
    }
    let lo = besov_norm(f, s - theta, p, f64::INFINITY)?;
    let hi = besov_norm(f, s + theta, p, f64::INFINITY)?;
    let arg = (lo + hi) / b0;
    Ok(LogInterpolation {
        lhs,
        besov_inf: b0,
        log_argument: arg,
        rhs_factor: b0 * (1.0 + arg.ln()),
    })
}

use statrs::function::gamma::gamma;

use crate::spectral::{fractional_laplacian, SpectralScalar};

use super::eval::FourierEvaluator;
use super::flow::FlowMap;
use super::LagrangianError;

/// `c_{d,σ} = 4^σ Γ(d/2+σ) / (π^{d/2} |Γ(−σ)|)`, the constant for which
/// `p.v.∫(f(x) − f(z)) c/|x−z|^{d+2σ} dz` has symbol `|ξ|^{2σ}`.
pub fn kernel_constant(d: usize, sigma: f64) -> f64 {
    let half_d = d as f64 / 2.0;
    4f64.powf(sigma) * gamma(half_d + sigma) / (std::f64::consts::PI.powf(half_d) * gamma(-sigma).abs())
}

fn shell_sum(d: usize, exponent: f64, lo: i64, hi: i64) -> f64 {
    // Σ |p|^{−exponent} over integer p with lo < |p|_∞ ≤ hi.
    let mut total = 0.0;
    let mut idx = vec![-hi; d];
    loop {
        let inf = idx.iter().map(|v| v.abs()).max().unwrap_or(0);
        if inf > lo {
            let r2: i64 = idx.iter().map(|v| v * v).sum();
            total += (r2 as f64).powf(-exponent / 2.0);
        }
        let mut a = 0;
        loop {
            if a == d {
                return total;
            }
            idx[a] += 1;
            if idx[a] <= hi {
                break;
            }
            idx[a] = -hi;
            a += 1;
        }
    }
}

/// `Σ_{|p|_∞ > J} |p|^{−d−2σ}`: exact shells up to `R` and `2R`, then a
/// geometric extrapolation of the `R^{−2σ}` remainder.
pub fn lattice_tail(d: usize, sigma: f64, images: usize) -> f64 {
    let exponent = d as f64 + 2.0 * sigma;
    let r = match d {
        1 => 20000,
        2 => 400,
        _ => 40,
    };
    let j = images as i64;
    let a = shell_sum(d, exponent, j, r);
    let b = a + shell_sum(d, exponent, r, 2 * r);
    let q = 2f64.powf(-2.0 * sigma);
    b + (b - a) * q / (1.0 - q)
}

/// Principal-value lattice quadrature of
/// `∫_{R^d} (f(y) − f(z)) K^σ(X(y) − X(z)) dz` on the particle grid, with
/// periodic images `|p|_∞ ≤ images`, the `z = y` cell removed, and the far
/// images replaced by `(f(y) − mean f)·c·L^{−2σ}·Σ_{|p|_∞>J}|p|^{−d−2σ}`.
pub fn lagrangian_frac_laplacian(
    f: &[f64],
    flow: &FlowMap,
    sigma: f64,
    images: usize,
) -> Result<Vec<f64>, LagrangianError> {
    if !(sigma > 0.0 && sigma <= 0.5) {
        return Err(LagrangianError::Sigma(sigma));
    }
    if f.len() != flow.len() {
        return Err(LagrangianError::Length {
            expected: flow.len(),
            found: f.len(),
        });
    }
    let d = flow.dim;
    let strain = flow.max_strain();
    if strain > 0.5 {
        log::warn!("flow strain {strain:.3} exceeds 1/2; kernel comparability degraded");
    }
    let l = flow.period;
    let c = kernel_constant(d, sigma);
    let cell = (l / flow.m as f64).powi(d as i32);
    let power = -(d as f64 + 2.0 * sigma) / 2.0;
    let tail = c * l.powf(-2.0 * sigma) * lattice_tail(d, sigma, images);
    let mean = f.iter().sum::<f64>() / f.len() as f64;

    let j = images as i64;
    let side = 2 * j + 1;
    let shifts: Vec<[f64; 3]> = (0..side.pow(d as u32))
        .map(|mut s| {
            let mut out = [0.0; 3];
            for a in 0..d {
                out[a] = ((s % side) - j) as f64 * l;
                s /= side;
            }
            out
        })
        .collect();
    let zero_shift = shifts.iter().position(|s| s.iter().all(|v| *v == 0.0)).expect("J ≥ 0");

    let out = (0..flow.len())
        .map(|i| {
            let xi = flow.x[i];
            let fi = f[i];
            let mut acc = 0.0;
            for (zj, (xj, fj)) in flow.x.iter().zip(f).enumerate() {
                let df = fi - fj;
                if df == 0.0 {
                    continue;
                }
                let base = [xi[0] - xj[0], xi[1] - xj[1], xi[2] - xj[2]];
                let mut k_sum = 0.0;
                for (si, s) in shifts.iter().enumerate() {
                    if zj == i && si == zero_shift {
                        continue;
                    }
                    let mut r2 = 0.0;
                    for a in 0..d {
                        let w = base[a] - s[a];
                        r2 += w * w;
                    }
                    k_sum += r2.powf(power);
                }
                acc += df * k_sum;
            }
            c * cell * acc + (fi - mean) * tail
        })
        .collect();
    Ok(out)
}

/// Eulerian oracle `(Λ^{2σ}(f∘Y))(X(y))`: `f∘Y` is sampled on the grid of
/// `f`, transformed, multiplied by the spectral symbol and summed at the
/// particle positions.
pub fn eulerian_pullback(
    f: &SpectralScalar,
    inverse_map: impl Fn(&[f64; 3]) -> [f64; 3],
    flow: &FlowMap,
    sigma: f64,
) -> Vec<f64> {
    let grid = *f.grid();
    let ev = FourierEvaluator::scalar(f);
    let samples: Vec<f64> = (0..grid.len())
        .map(|flat| ev.value(&inverse_map(&grid.coordinate(flat)))[0])
        .collect();
    let pulled = SpectralScalar::from_samples(grid, &samples).expect("grid-sized samples");
    let lf = FourierEvaluator::scalar(&fractional_laplacian(&pulled, sigma));
    flow.x.iter().map(|x| lf.value(x)[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::frac_symbol;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn kernel_constant_reference_values() {
        // d = 1, σ = 1/2: 1/π.
        assert!((kernel_constant(1, 0.5) - 1.0 / PI).abs() < 1e-14);
        // d = 3, σ = 1/2: 1/π².
        assert!((kernel_constant(3, 0.5) - 1.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn tail_decreases_with_images() {
        let t3 = lattice_tail(2, 0.4, 3);
        let t6 = lattice_tail(2, 0.4, 6);
        assert!(t3 > t6 && t6 > 0.0);
        let direct = shell_sum(2, 2.8, 3, 6);
        assert!((t3 - t6 - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn constants_and_linearity() {
        let flow = FlowMap::identity(2, 8, 1.0);
        let ones = vec![2.5; 64];
        assert!(lagrangian_frac_laplacian(&ones, &flow, 0.4, 1).unwrap().iter().all(|v| *v == 0.0));
        let a: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..64).map(|i| (i as f64 * 0.11).cos()).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + 3.0 * y).collect();
        let la = lagrangian_frac_laplacian(&a, &flow, 0.4, 1).unwrap();
        let lb = lagrangian_frac_laplacian(&b, &flow, 0.4, 1).unwrap();
        let ls = lagrangian_frac_laplacian(&sum, &flow, 0.4, 1).unwrap();
        for i in 0..64 {
            assert!((ls[i] - la[i] - 3.0 * lb[i]).abs() < 1e-10 * (1.0 + ls[i].abs()));
        }
    }

    #[test]
    fn rejects_bad_sigma() {
        let flow = FlowMap::identity(2, 4, 1.0);
        assert!(matches!(
            lagrangian_frac_laplacian(&[0.0; 16], &flow, 0.6, 1),
            Err(LagrangianError::Sigma(_))
        ));
    }

    #[test]
    fn truncation_close_to_wider_lattice() {
        let g = Grid::new(2, 16).unwrap();
        let flow = FlowMap::identity(2, 16, 1.0);
        let s = SpectralScalar::from_fn(g, |x| (2.0 * PI * x[0]).cos());
        let f = s.to_samples();
        let a = lagrangian_frac_laplacian(&f, &flow, 0.4, 3).unwrap();
        let b = lagrangian_frac_laplacian(&f, &flow, 0.4, 6).unwrap();
        let scale = frac_symbol(&g, &[1, 0, 0], 0.4);
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 5e-3 * scale, "{diff}");
    }
}

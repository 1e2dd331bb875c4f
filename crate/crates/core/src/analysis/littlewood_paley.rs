//! Homogeneous periodic Littlewood–Paley blocks.
//!
//! The dyadic bump is `φ(ξ) = χ(|ξ|/2) − χ(|ξ|)` where `χ` is a smooth radial
//! cutoff equal to one on `|ξ| ≤ 3/4` and vanishing for `|ξ| ≥ 4/3`, built
//! from the `exp(−1/t)` smooth step. Then `supp φ ⊂ {3/4 ≤ |ξ| ≤ 8/3}` and the
//! sum `Σ_j φ(2^{−j}ξ)` telescopes to one for every `ξ ≠ 0`. Blocks act on
//! the unscaled integer wavenumber `|k|`.

use crate::spectral::SpectralScalar;

pub const ANNULUS_INNER: f64 = 3.0 / 4.0;
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;
const CUTOFF_INNER: f64 = 3.0 / 4.0;
const CUTOFF_OUTER: f64 = 4.0 / 3.0;
/// Modes below this fraction of the largest coefficient do not cause a block
/// to be materialized (transform round-off would otherwise populate every j).
const ROUNDOFF_FLOOR: f64 = 1e-15;

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Radial cutoff `χ(r)`.
pub fn cutoff(r: f64) -> f64 {
    smooth_step((CUTOFF_OUTER - r) / (CUTOFF_OUTER - CUTOFF_INNER))
}

/// Dyadic bump `φ(r) = χ(r/2) − χ(r)`.
pub fn bump(r: f64) -> f64 {
    if !(ANNULUS_INNER..=ANNULUS_OUTER).contains(&r) {
        return 0.0;
    }
    cutoff(r / 2.0) - cutoff(r)
}

/// Block weight `φ(2^{−j}|k|)`.
pub fn block_weight(j: i32, k_norm: f64) -> f64 {
    bump(k_norm * 2f64.powi(-j))
}

/// Block indices `j` whose annulus can meet `|k|`.
pub fn blocks_for(k_norm: f64) -> impl Iterator<Item = i32> {
    let lo = (k_norm * 3.0 / 8.0).log2().floor() as i32;
    let hi = (k_norm * 4.0 / 3.0).log2().ceil() as i32;
    (lo..=hi).filter(move |&j| block_weight(j, k_norm) != 0.0)
}

/// Littlewood–Paley blocks `Δ̇_j f` for the indices that carry content.
#[derive(Debug, Clone)]
pub struct LPDecomposition {
    pub blocks: Vec<(i32, SpectralScalar)>,
}

impl LPDecomposition {
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `Σ_j Δ̇_j f`, which equals `f − mean(f)`.
    pub fn reconstruct(&self) -> Option<SpectralScalar> {
        let mut iter = self.blocks.iter();
        let (_, first) = iter.next()?;
        Some(iter.fold(first.clone(), |acc, (_, b)| &acc + b))
    }

    pub fn block(&self, j: i32) -> Option<&SpectralScalar> {
        self.blocks.iter().find(|(i, _)| *i == j).map(|(_, b)| b)
    }
}

pub fn lp_decompose(f: &SpectralScalar) -> LPDecomposition {
    let grid = *f.grid();
    let floor = ROUNDOFF_FLOOR * f.coeffs()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut present: Vec<i32> = Vec::new();
    for (flat, c) in f.coeffs().iter().enumerate().skip(1) {
        if c.norm() <= floor {
            continue;
        }
        let k = grid.mode(flat);
        let kn = (crate::spectral::Grid::k_sq(&k) as f64).sqrt();
        for j in blocks_for(kn) {
            if !present.contains(&j) {
                present.push(j);
            }
        }
    }
    present.sort_unstable();
    let blocks = present
        .into_iter()
        .map(|j| {
            let block = f.map_modes(|k, c| {
                let k2 = crate::spectral::Grid::k_sq(k);
                if k2 == 0 {
                    return num_complex::Complex64::default();
                }
                c * block_weight(j, (k2 as f64).sqrt())
            });
            (j, block)
        })
        .collect();
    LPDecomposition { blocks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn partition_of_unity() {
        for i in 1..2000 {
            let r = i as f64 * 0.01;
            let total: f64 = blocks_for(r).map(|j| block_weight(j, r)).sum();
            assert!((total - 1.0).abs() < 1e-14, "r = {r}: {total}");
        }
    }

    #[test]
    fn bump_support() {
        assert_eq!(bump(0.74), 0.0);
        assert_eq!(bump(2.7), 0.0);
        assert!(bump(1.0) > 0.0 && bump(2.0) > 0.0);
    }

    #[test]
    fn unit_mode_lives_in_two_blocks() {
        let g = Grid::new(2, 16).unwrap();
        let f = SpectralScalar::from_fn(g, |x| (2.0 * PI * x[0]).cos());
        let lp = lp_decompose(&f);
        let js: Vec<i32> = lp.blocks.iter().map(|(j, _)| *j).collect();
        assert_eq!(js, vec![-1, 0]);
        let w: f64 = [-1, 0].iter().map(|&j| block_weight(j, 1.0)).sum();
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_gives_empty_decomposition() {
        let g = Grid::new(2, 16).unwrap();
        let lp = lp_decompose(&SpectralScalar::constant(g, 2.0));
        assert!(lp.is_empty());
        assert!(lp.reconstruct().is_none());
    }
}

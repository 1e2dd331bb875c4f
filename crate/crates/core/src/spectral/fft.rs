//! Multi-dimensional FFT over the row-major layout described in [`super::grid`].
//!
//! Forward transforms are normalized by `1/n^d` so that the zero mode equals
//! the sample mean; inverse transforms are unnormalized synthesis.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Plans>> = RefCell::new(HashMap::new());
}

fn with_plan<R>(n: usize, inverse: bool, f: impl FnOnce(&dyn Fft<f64>) -> R) -> R {
    PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        let plans = map.entry(n).or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            }
        });
        if inverse {
            f(plans.inverse.as_ref())
        } else {
            f(plans.forward.as_ref())
        }
    })
}

fn transform_axes(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let d = grid.dim();
    assert_eq!(data.len(), grid.len());
    with_plan(n, inverse, |fft| {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // Last axis is contiguous: rustfft handles the batch directly.
        fft.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::default(); n];
        for axis in 0..d - 1 {
            let stride = n.pow((d - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[start + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[start + j * stride] = *v;
                    }
                }
            }
        }
    });
}

/// In-place forward transform with `1/n^d` normalization.
pub fn forward_in_place(grid: &Grid, data: &mut [Complex64]) {
    transform_axes(grid, data, false);
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// In-place inverse transform (synthesis, no normalization).
pub fn inverse_in_place(grid: &Grid, data: &mut [Complex64]) {
    transform_axes(grid, data, true);
}

/// Forward transform of real samples.
pub fn forward_real(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward_in_place(grid, &mut data);
    data
}

/// Inverse transform keeping the real part.
pub fn inverse_real(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    inverse_in_place(grid, &mut data);
    data.into_iter().map(|c| c.re).collect()
}

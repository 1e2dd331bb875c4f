//! The constitutive law `B ↦ u`, pressure recovery and the induction
//! right-hand side.

use crate::spectral::ops::{band_limited_from_samples, frac_symbol, truncated_samples};
use crate::spectral::{
    derivative, divergence, fractional_laplacian, fractional_laplacian_vector, inverse_laplacian,
    leray_project, tensor_divergence, Grid, SpectralScalar, SpectralVector,
};

/// `u = Λ^{−2γ} P div(B⊗B)`.
pub fn compute_velocity(b: &SpectralVector, gamma: f64) -> SpectralVector {
    let forcing = leray_project(&tensor_divergence(b));
    fractional_laplacian_vector(&forcing, -gamma).with_flags(true, true)
}

/// Zero-mean pressure `P = −Δ^{−1} div div(B⊗B)`, so that
/// `(−Δ)^γ u = B·∇B + ∇P`.
pub fn compute_pressure(b: &SpectralVector, _gamma: f64) -> SpectralScalar {
    let div_div = divergence(&tensor_divergence(b));
    inverse_laplacian(&div_div).scale(-1.0)
}

/// `‖(−Δ)^γ u − B·∇B − ∇P‖_{L²}` for the velocity and pressure computed from `B`.
pub fn pressure_residual(b: &SpectralVector, gamma: f64) -> f64 {
    let u = compute_velocity(b, gamma);
    let p = compute_pressure(b, gamma);
    let force = tensor_divergence(b);
    (0..b.dim())
        .map(|a| {
            let lhs = fractional_laplacian(u.component(a), gamma);
            let r = &(&lhs - force.component(a)) - &derivative(&p, a);
            r.norm_sq()
        })
        .sum::<f64>()
        .sqrt()
}

/// `‖u‖²_{Ḣ^γ} = Σ_{k≠0} (2π|k|/period)^{2γ} |û_k|²`.
pub fn dissipation_rate(u: &SpectralVector, gamma: f64) -> f64 {
    let grid = *u.grid();
    let mut total = 0.0;
    for flat in 1..grid.len() {
        let k = grid.mode(flat);
        let w = frac_symbol(&grid, &k, gamma);
        let m: f64 = u.components().iter().map(|c| c.coeffs()[flat].norm_sqr()).sum();
        total += w * m;
    }
    total
}

/// One evaluation of the augmented right-hand side.
#[derive(Debug, Clone)]
pub struct RhsEval {
    /// `P[B·∇u − u·∇B]`.
    pub db: SpectralVector,
    /// `‖u‖²_{Ḣ^γ}`, the rate of the dissipation integral.
    pub dissipation: f64,
    /// `max |u|` over the sample grid.
    pub u_linf: f64,
    /// `max |∇u|_F` over the sample grid.
    pub grad_u_linf: f64,
    /// `max |B|` over the sample grid of the truncated field.
    pub b_linf: f64,
}

/// Right-hand side `P[B·∇u − u·∇B]` of the induction equation.
pub fn rhs(b: &SpectralVector, gamma: f64) -> SpectralVector {
    evaluate(b, gamma).db
}

pub(crate) fn evaluate(b: &SpectralVector, gamma: f64) -> RhsEval {
    let grid = *b.grid();
    let d = grid.dim();
    let bt = b.truncated();
    let b_samples: Vec<Vec<f64>> = bt.components().iter().map(|c| c.to_samples()).collect();

    let u = velocity_from_samples(grid, &b_samples, gamma);
    let dissipation = dissipation_rate(&u, gamma);

    let u_samples: Vec<Vec<f64>> = u.components().iter().map(truncated_samples).collect();
    let grad_u: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|i| (0..d).map(|j| derivative(u.component(i), j).to_samples()).collect())
        .collect();
    let grad_b: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|i| (0..d).map(|j| derivative(bt.component(i), j).to_samples()).collect())
        .collect();

    let len = grid.len();
    let mut u_linf = 0.0f64;
    let mut grad_u_linf = 0.0f64;
    let mut b_linf = 0.0f64;
    for p in 0..len {
        let mut s = 0.0;
        let mut g = 0.0;
        let mut m = 0.0;
        for i in 0..d {
            m += b_samples[i][p] * b_samples[i][p];
            s += u_samples[i][p] * u_samples[i][p];
            for j in 0..d {
                g += grad_u[i][j][p] * grad_u[i][j][p];
            }
        }
        u_linf = u_linf.max(s.sqrt());
        grad_u_linf = grad_u_linf.max(g.sqrt());
        b_linf = b_linf.max(m.sqrt());
    }

    let comps: Vec<SpectralScalar> = (0..d)
        .map(|i| {
            let mut out = vec![0.0; len];
            for (p, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..d {
                    acc += b_samples[j][p] * grad_u[i][j][p] - u_samples[j][p] * grad_b[i][j][p];
                }
                *o = acc;
            }
            band_limited_from_samples(grid, &out)
        })
        .collect();
    let db = leray_project(&SpectralVector::new(comps).expect("d components"));
    RhsEval {
        db,
        dissipation,
        u_linf,
        grad_u_linf,
        b_linf,
    }
}

fn velocity_from_samples(grid: Grid, b_samples: &[Vec<f64>], gamma: f64) -> SpectralVector {
    let d = grid.dim();
    let mut products: Vec<Vec<Option<SpectralScalar>>> = vec![vec![None; d]; d];
    for i in 0..d {
        for j in i..d {
            let prod: Vec<f64> = b_samples[i].iter().zip(&b_samples[j]).map(|(x, y)| x * y).collect();
            products[i][j] = Some(band_limited_from_samples(grid, &prod));
        }
    }
    let entry = |i: usize, j: usize| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        products[a][b].as_ref().expect("upper triangle filled")
    };
    let comps = (0..d)
        .map(|i| {
            let mut acc = derivative(entry(i, 0), 0);
            for j in 1..d {
                acc = &acc + &derivative(entry(i, j), j);
            }
            acc
        })
        .collect();
    let forcing = leray_project(&SpectralVector::new(comps).expect("d components"));
    fractional_laplacian_vector(&forcing, -gamma).with_flags(true, true)
}

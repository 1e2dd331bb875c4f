//! Brute-force reference operators built on the direct `O(N²)` discrete
//! Fourier transform of real samples, independent of the FFT path.
//! Intended for `n ≤ 16`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::solver::{compute_pressure, compute_velocity};
use crate::spectral::{self, Grid, SpectralScalar, SpectralVector};

/// Shape of the sample arrays handled by the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
}

impl Torus {
    pub fn new(dim: usize, n: usize) -> Self {
        Self { dim, n, period: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rem % self.n;
            rem /= self.n;
        }
        idx
    }

    /// Integer wavenumbers at storage position `flat`; index `n/2` maps to `+n/2`.
    pub fn mode(&self, flat: usize) -> Vec<i64> {
        let n = self.n as i64;
        self.index(flat)
            .into_iter()
            .map(|j| {
                let j = j as i64;
                if j <= n / 2 {
                    j
                } else {
                    j - n
                }
            })
            .collect()
    }

    fn nyquist(&self, k: &[i64], axis: usize) -> bool {
        self.n.is_multiple_of(2) && k[axis] == (self.n / 2) as i64
    }

    fn in_band(&self, k: &[i64]) -> bool {
        k.iter().all(|v| 3 * v.unsigned_abs() as usize <= self.n)
    }

    fn wave(&self) -> f64 {
        2.0 * PI / self.period
    }
}

/// `f̂_k = n^{−d} Σ_x f(x) e^{−2πi k·x/L}`, summed term by term.
pub fn dft(t: &Torus, samples: &[f64]) -> Vec<Complex64> {
    let n = t.n as f64;
    let norm = n.powi(t.dim as i32);
    (0..t.len())
        .map(|kf| {
            let k = t.index(kf);
            let mut acc = Complex64::default();
            for (xf, &v) in samples.iter().enumerate() {
                let x = t.index(xf);
                let phase: f64 = k.iter().zip(&x).map(|(a, b)| (a * b) as f64).sum();
                acc += v * Complex64::from_polar(1.0, -2.0 * PI * phase / n);
            }
            acc / norm
        })
        .collect()
}

/// Real part of `Σ_k f̂_k e^{2πi k·x/L}`.
pub fn idft(t: &Torus, coeffs: &[Complex64]) -> Vec<f64> {
    let n = t.n as f64;
    (0..t.len())
        .map(|xf| {
            let x = t.index(xf);
            let mut acc = 0.0;
            for (kf, c) in coeffs.iter().enumerate() {
                let k = t.index(kf);
                let phase: f64 = k.iter().zip(&x).map(|(a, b)| (a * b) as f64).sum();
                acc += (c * Complex64::from_polar(1.0, 2.0 * PI * phase / n)).re;
            }
            acc
        })
        .collect()
}

fn apply(t: &Torus, f: &[f64], symbol: impl Fn(&[i64]) -> Complex64) -> Vec<f64> {
    let mut c = dft(t, f);
    for (kf, z) in c.iter_mut().enumerate() {
        *z *= symbol(&t.mode(kf));
    }
    idft(t, &c)
}

/// `∂_axis f`, zero on the Nyquist plane of that axis.
pub fn derivative(t: &Torus, f: &[f64], axis: usize) -> Vec<f64> {
    apply(t, f, |k| {
        if t.nyquist(k, axis) {
            Complex64::default()
        } else {
            Complex64::new(0.0, t.wave() * k[axis] as f64)
        }
    })
}

fn symbol_pow(t: &Torus, k: &[i64], s: f64) -> f64 {
    let k2: i64 = k.iter().map(|v| v * v).sum();
    match (k2, s == 0.0) {
        (_, true) => 1.0,
        (0, false) => 0.0,
        _ => (t.wave().powi(2) * k2 as f64).powf(s),
    }
}

/// `(−Δ)^s f`, mean removed for `s ≠ 0`.
pub fn frac_laplacian(t: &Torus, f: &[f64], s: f64) -> Vec<f64> {
    apply(t, f, |k| Complex64::new(symbol_pow(t, k, s), 0.0))
}

/// Leray projection; modes with any Nyquist component are dropped.
pub fn leray(t: &Torus, v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let hats: Vec<Vec<Complex64>> = v.iter().map(|c| dft(t, c)).collect();
    let mut out = hats.clone();
    for kf in 1..t.len() {
        let k = t.mode(kf);
        if (0..t.dim).any(|a| t.nyquist(&k, a)) {
            for c in out.iter_mut() {
                c[kf] = Complex64::default();
            }
            continue;
        }
        let k2: f64 = k.iter().map(|v| (v * v) as f64).sum();
        let dot: Complex64 = (0..t.dim).map(|a| hats[a][kf] * k[a] as f64).sum();
        for a in 0..t.dim {
            out[a][kf] = hats[a][kf] - dot * k[a] as f64 / k2;
        }
    }
    out.iter().map(|c| idft(t, c)).collect()
}

/// Projection onto `max |k_a| ≤ n/3`.
pub fn dealias(t: &Torus, f: &[f64]) -> Vec<f64> {
    apply(t, f, |k| if t.in_band(k) { Complex64::new(1.0, 0.0) } else { Complex64::default() })
}

/// Truncate both factors, multiply pointwise, truncate the product.
pub fn product(t: &Torus, f: &[f64], g: &[f64]) -> Vec<f64> {
    let a = dealias(t, f);
    let b = dealias(t, g);
    let p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    dealias(t, &p)
}

/// `(div(B⊗B))_i = Σ_j ∂_j(B^i B^j)`.
pub fn tensor_divergence(t: &Torus, b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..t.dim)
        .map(|i| {
            let mut acc = vec![0.0; t.len()];
            for j in 0..t.dim {
                let dj = derivative(t, &product(t, &b[i], &b[j]), j);
                acc.iter_mut().zip(dj).for_each(|(s, v)| *s += v);
            }
            acc
        })
        .collect()
}

/// `u = (−Δ)^{−γ} P div(B⊗B)`.
pub fn velocity(t: &Torus, b: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    leray(t, &tensor_divergence(t, b))
        .iter()
        .map(|c| frac_laplacian(t, c, -gamma))
        .collect()
}

/// `P = −Δ^{−1} div div(B⊗B)`.
pub fn pressure(t: &Torus, b: &[Vec<f64>]) -> Vec<f64> {
    let force = tensor_divergence(t, b);
    let mut div = vec![0.0; t.len()];
    for (a, c) in force.iter().enumerate() {
        div.iter_mut().zip(derivative(t, c, a)).for_each(|(s, v)| *s += v);
    }
    // −Δ^{−1} = (−Δ)^{−1}
    frac_laplacian(t, &div, -1.0)
}

/// Operators covered by [`compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOp {
    Fft,
    Derivative,
    FracLaplacian,
    Leray,
    Product,
    TensorDivergence,
    Velocity,
    Pressure,
}

impl OracleOp {
    pub const ALL: [OracleOp; 8] = [
        OracleOp::Fft,
        OracleOp::Derivative,
        OracleOp::FracLaplacian,
        OracleOp::Leray,
        OracleOp::Product,
        OracleOp::TensorDivergence,
        OracleOp::Velocity,
        OracleOp::Pressure,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OracleOp::Fft => "fft",
            OracleOp::Derivative => "derivative",
            OracleOp::FracLaplacian => "frac_laplacian",
            OracleOp::Leray => "leray",
            OracleOp::Product => "product",
            OracleOp::TensorDivergence => "tensor_divergence",
            OracleOp::Velocity => "velocity",
            OracleOp::Pressure => "pressure",
        }
    }
}

impl fmt::Display for OracleOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown oracle op {s:?}"))
    }
}

/// Seeded uniform samples in `[−1, 1]`.
pub fn random_samples(t: &Torus, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..t.len()).map(|_| rng.random_range(-1.0..1.0)).collect()
}

// Max error, relative to the reference scale once that exceeds one.
fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

fn max_diff_vec(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| max_diff(x, y)).fold(0.0, f64::max)
}

/// Max sample error between the library operator and the brute-force
/// reference on seeded random data (full spectrum, Nyquist included),
/// divided by `max(1, max |reference|)`.
pub fn compare(op: OracleOp, dim: usize, n: usize, seed: u64) -> f64 {
    let t = Torus::new(dim, n);
    let grid = Grid::new(dim, n).expect("valid oracle grid");
    let scalar = |s: u64| random_samples(&t, s);
    let vector = |s: u64| -> Vec<Vec<f64>> { (0..dim).map(|a| scalar(s + 1 + a as u64)).collect() };
    let field = |v: &[f64]| SpectralScalar::from_samples(grid, v).expect("sample count");
    let vfield = |v: &[Vec<f64>]| SpectralVector::from_samples(grid, v).expect("sample count");
    match op {
        OracleOp::Fft => {
            let f = scalar(seed);
            let lib = field(&f);
            let reference = dft(&t, &f);
            lib.coeffs()
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).norm())
                .fold(max_diff(&lib.to_samples(), &f), f64::max)
        }
        OracleOp::Derivative => {
            let f = scalar(seed);
            (0..dim)
                .map(|a| max_diff(&spectral::derivative(&field(&f), a).to_samples(), &derivative(&t, &f, a)))
                .fold(0.0, f64::max)
        }
        OracleOp::FracLaplacian => {
            let f = scalar(seed);
            [-1.0, -0.5, 0.0, 0.4, 1.0, 2.5]
                .into_iter()
                .map(|s| {
                    max_diff(
                        &spectral::fractional_laplacian(&field(&f), s).to_samples(),
                        &frac_laplacian(&t, &f, s),
                    )
                })
                .fold(0.0, f64::max)
        }
        OracleOp::Leray => {
            let v = vector(seed);
            max_diff_vec(&spectral::leray_project(&vfield(&v)).to_samples(), &leray(&t, &v))
        }
        OracleOp::Product => {
            let (f, g) = (scalar(seed), scalar(seed + 100));
            let lib = spectral::dealiased_product(&field(&f), &field(&g)).expect("same grid");
            max_diff(&lib.to_samples(), &product(&t, &f, &g))
        }
        OracleOp::TensorDivergence => {
            let b = vector(seed);
            max_diff_vec(&spectral::tensor_divergence(&vfield(&b)).to_samples(), &tensor_divergence(&t, &b))
        }
        OracleOp::Velocity => {
            let b = vector(seed);
            [0.0, 1.0, 2.0, 2.5]
                .into_iter()
                .map(|g| max_diff_vec(&compute_velocity(&vfield(&b), g).to_samples(), &velocity(&t, &b, g)))
                .fold(0.0, f64::max)
        }
        OracleOp::Pressure => {
            let b = vector(seed);
            max_diff(&compute_pressure(&vfield(&b), 2.0).to_samples(), &pressure(&t, &b))
        }
    }
}

use num_complex::Complex64;

use crate::spectral::{Grid, SpectralScalar, SpectralVector, MAX_DIM};

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_vec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (0..3).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

pub fn mat_add(a: &Mat3, b: &Mat3, scale: f64) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += scale * b[i][j];
        }
    }
    out
}

pub fn det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Inverse by the adjugate; `None` when singular.
pub fn inverse(a: &Mat3) -> Option<Mat3> {
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / d;
        }
    }
    Some(out)
}

/// Frobenius norm.
pub fn frobenius(a: &Mat3) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Direct Fourier summation of a band-limited field at arbitrary points.
/// Nyquist modes are skipped (they have no unambiguous off-grid extension).
#[derive(Debug, Clone)]
pub struct FourierEvaluator {
    dim: usize,
    wave: f64,
    kmax: i64,
    modes: Vec<([i64; MAX_DIM], Vec<Complex64>)>,
    ncomp: usize,
}

impl FourierEvaluator {
    fn build(grid: Grid, comps: &[&SpectralScalar]) -> Self {
        let mut modes = Vec::new();
        let mut kmax = 0;
        for flat in 0..grid.len() {
            let k = grid.mode(flat);
            if grid.is_nyquist(&k) {
                continue;
            }
            let c: Vec<Complex64> = comps.iter().map(|f| f.coeffs()[flat]).collect();
            if c.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            kmax = k.iter().fold(kmax, |m, v| m.max(v.abs()));
            modes.push((k, c));
        }
        Self {
            dim: grid.dim(),
            wave: grid.wave_scale(),
            kmax,
            modes,
            ncomp: comps.len(),
        }
    }

    pub fn scalar(f: &SpectralScalar) -> Self {
        Self::build(*f.grid(), &[f])
    }

    pub fn vector(v: &SpectralVector) -> Self {
        let comps: Vec<&SpectralScalar> = v.components().iter().collect();
        Self::build(*v.grid(), &comps)
    }

    fn phases(&self, x: &[f64; 3]) -> Vec<Vec<Complex64>> {
        let width = (2 * self.kmax + 1) as usize;
        (0..self.dim)
            .map(|a| {
                let base = Complex64::from_polar(1.0, self.wave * x[a]);
                let mut row = vec![Complex64::new(1.0, 0.0); width];
                let mid = self.kmax as usize;
                for j in 1..=mid {
                    row[mid + j] = row[mid + j - 1] * base;
                    row[mid - j] = row[mid + j].conj();
                }
                row
            })
            .collect()
    }

    fn phase(&self, table: &[Vec<Complex64>], k: &[i64; MAX_DIM]) -> Complex64 {
        let mut p = Complex64::new(1.0, 0.0);
        for (a, row) in table.iter().enumerate() {
            p *= row[(k[a] + self.kmax) as usize];
        }
        p
    }

    /// Component values at `x` (entries beyond the component count are zero).
    pub fn value(&self, x: &[f64; 3]) -> [f64; 3] {
        let table = self.phases(x);
        let mut out = [0.0; 3];
        for (k, c) in &self.modes {
            let p = self.phase(&table, k);
            for (o, z) in out.iter_mut().zip(c) {
                *o += (z * p).re;
            }
        }
        out
    }

    /// Values and Jacobian `J[i][j] = ∂_j f_i` at `x`.
    pub fn value_and_gradient(&self, x: &[f64; 3]) -> ([f64; 3], Mat3) {
        let table = self.phases(x);
        let mut val = [0.0; 3];
        let mut jac = [[0.0; 3]; 3];
        for (k, c) in &self.modes {
            let p = self.phase(&table, k);
            for (i, z) in c.iter().enumerate().take(self.ncomp) {
                let zp = z * p;
                val[i] += zp.re;
                for j in 0..self.dim {
                    // Re(i·w·k_j·zp) = −w·k_j·Im(zp)
                    jac[i][j] -= self.wave * k[j] as f64 * zp.im;
                }
            }
        }
        (val, jac)
    }
}

//! Torus discretization metadata.
//!
//! Layout conventions used by every module in the crate:
//!
//! * Real-space samples are stored row-major with axis 0 (x₁) slowest and the
//!   last axis fastest. Sample `(i₀, …, i_{d−1})` sits at `x_a = i_a · h`,
//!   `h = period / n`.
//! * Fourier coefficients use the same row-major layout in natural FFT order:
//!   index `j` on an axis carries integer wavenumber `j` for `j ≤ n/2` and
//!   `j − n` otherwise, so retained wavenumbers lie in `[−n/2+1, n/2]`.
//! * A coefficient `f̂_k` multiplies `exp(2πi k·x / period)`.

use thiserror::Error;

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("dimension must be 2 or 3, got {0}")]
    Dimension(usize),
    #[error("points per axis must be a power of two and at least 8, got {0}")]
    Resolution(usize),
    #[error("period must be finite and positive, got {0}")]
    Period(f64),
    #[error("dealias fraction {0}/{1} must lie in (0, 1]")]
    Dealias(u32, u32),
}

/// Uniform grid on the torus `[0, period)^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    period: f64,
    dealias_num: u32,
    dealias_den: u32,
}

impl Grid {
    /// Unit-period grid with the 2/3 dealiasing rule.
    pub fn new(dim: usize, n: usize) -> Result<Self, GridError> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(GridError::Dimension(dim));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(GridError::Resolution(n));
        }
        Ok(Self {
            dim,
            n,
            period: 1.0,
            dealias_num: 2,
            dealias_den: 3,
        })
    }

    pub fn with_period(mut self, period: f64) -> Result<Self, GridError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(GridError::Period(period));
        }
        self.period = period;
        Ok(self)
    }

    pub fn with_dealias(mut self, num: u32, den: u32) -> Result<Self, GridError> {
        if den == 0 || num == 0 || num > den {
            return Err(GridError::Dealias(num, den));
        }
        self.dealias_num = num;
        self.dealias_den = den;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dealias_fraction(&self) -> (u32, u32) {
        (self.dealias_num, self.dealias_den)
    }

    /// Grid spacing `h = period / n`.
    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Total number of samples (and of stored coefficients), `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical wavenumber scale `2π / period`.
    pub fn wave_scale(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.period
    }

    /// Integer wavenumber carried by storage index `j` on one axis.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Storage index on one axis for integer wavenumber `k`.
    #[inline]
    pub fn index_of_wavenumber(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Multi-index of flat position `flat`; unused trailing axes are zero.
    #[inline]
    pub fn unravel(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rem % self.n;
            rem /= self.n;
        }
        idx
    }

    #[inline]
    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.dim)
            .fold(0usize, |acc, &i| acc * self.n + i)
    }

    /// Integer wavenumber vector stored at flat coefficient position `flat`.
    #[inline]
    pub fn mode(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut k = [0i64; MAX_DIM];
        for a in 0..self.dim {
            k[a] = self.wavenumber(idx[a]);
        }
        k
    }

    /// Flat coefficient position of wavenumber `k` (entries beyond `dim` ignored).
    pub fn flat_of_mode(&self, k: &[i64]) -> usize {
        let mut flat = 0usize;
        for &ka in k.iter().take(self.dim) {
            flat = flat * self.n + self.index_of_wavenumber(ka);
        }
        flat
    }

    /// Flat position of `−k` for the mode stored at `flat`.
    #[inline]
    pub fn conjugate_flat(&self, flat: usize) -> usize {
        let idx = self.unravel(flat);
        let mut out = 0usize;
        for &i in idx.iter().take(self.dim) {
            out = out * self.n + (self.n - i) % self.n;
        }
        out
    }

    /// True when `max_a |k_a| ≤ (num/den)·(n/2)`.
    #[inline]
    pub fn in_dealias_band(&self, k: &[i64; MAX_DIM]) -> bool {
        let kmax = k.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        // |k| ≤ num·n / (2·den), compared in integers.
        2 * kmax * self.dealias_den as u64 <= self.dealias_num as u64 * self.n as u64
    }

    /// Largest retained integer wavenumber per axis after dealiasing.
    pub fn dealias_kmax(&self) -> i64 {
        (self.dealias_num as u64 * self.n as u64 / (2 * self.dealias_den as u64)) as i64
    }

    /// Squared integer wavenumber magnitude `|k|²`.
    #[inline]
    pub fn k_sq(k: &[i64; MAX_DIM]) -> i64 {
        k.iter().map(|v| v * v).sum()
    }

    /// Physical coordinate of the sample at flat position `flat`.
    pub fn coordinate(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = idx[a] as f64 * h;
        }
        x
    }

    /// Whether any axis of the mode sits on the Nyquist index `n/2`.
    #[inline]
    pub fn is_nyquist(&self, k: &[i64; MAX_DIM]) -> bool {
        let half = (self.n / 2) as i64;
        k.iter().take(self.dim).any(|&v| v == half)
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && self.period == other.period
            && self.dealias_num * other.dealias_den == other.dealias_num * self.dealias_den
    }
}

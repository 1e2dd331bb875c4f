use crate::analysis::levelset_distribution;

/// Vertical decreasing rearrangement of `|φ₀|` on an `n`-point `x₂` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangementProfile {
    /// `x₂ = i·L/n`.
    pub x2_grid: Vec<f64>,
    /// `φ^∞(x₂)`, nonincreasing.
    pub phi_inf: Vec<f64>,
    /// `B^∞ = (−φ̇^∞(x₂), 0)`, first component only.
    pub b_inf: Vec<f64>,
}

impl RearrangementProfile {
    pub fn is_nonincreasing(&self) -> bool {
        self.phi_inf.windows(2).all(|w| w[1] <= w[0])
    }

    /// `max_λ | |{φ^∞ > λ}| − |{|φ₀| > λ}| |` over `levels`.
    pub fn equimeasurability_defect(&self, phi0: &[f64], levels: &[f64]) -> f64 {
        let mine = levelset_distribution(&self.phi_inf, levels);
        let theirs = levelset_distribution(phi0, levels);
        mine.iter()
            .zip(&theirs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Discrete layer-cake rearrangement of `n × n` samples of `φ₀` on a torus of
/// side `period`.
///
/// The `n²` values of `|φ₀|` are sorted in descending order and split into
/// `n` consecutive blocks of `n`; `φ^∞(i·L/n)` is the mean of block `i`.
/// Every block carries measure `1/n`, so the profile is equimeasurable with
/// `|φ₀|` up to one block. `B^∞` uses central differences inside and
/// one-sided differences at the two ends.
pub fn decreasing_rearrangement(phi0: &[f64], n: usize, period: f64) -> RearrangementProfile {
    assert_eq!(phi0.len(), n * n, "expected n² samples");
    let mut sorted: Vec<f64> = phi0.iter().map(|v| v.abs()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let phi_inf: Vec<f64> = sorted
        .chunks(n)
        .map(|block| block.iter().sum::<f64>() / n as f64)
        .collect();
    let h = period / n as f64;
    let x2_grid = (0..n).map(|i| i as f64 * h).collect();
    let b_inf = (0..n)
        .map(|i| {
            let slope = if n == 1 {
                0.0
            } else if i == 0 {
                (phi_inf[1] - phi_inf[0]) / h
            } else if i == n - 1 {
                (phi_inf[n - 1] - phi_inf[n - 2]) / h
            } else {
                (phi_inf[i + 1] - phi_inf[i - 1]) / (2.0 * h)
            };
            -slope
        })
        .collect();
    RearrangementProfile {
        x2_grid,
        phi_inf,
        b_inf,
    }
}

use super::RelaxationError;

/// Exponential fit `value ≈ A e^{−rate·t}` on a time window.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub window: [f64; 2],
    /// Decay rate, i.e. minus the least-squares slope of `log(value)`.
    pub rate: f64,
    /// Coefficient of determination of the log-linear fit, clamped to `[0, 1]`.
    pub r2: f64,
    /// The points inside the window that entered the fit.
    pub series: Vec<(f64, f64)>,
}

pub fn decay_fit(series: &[(f64, f64)], window: [f64; 2]) -> Result<DecayFit, RelaxationError> {
    let [ta, tb] = window;
    let tol = 1e-9 * ta.abs().max(tb.abs()).max(1.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(t, _)| *t >= ta - tol && *t <= tb + tol)
        .collect();
    if let Some(&(t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(RelaxationError::NonPositive { t, value: v });
    }
    if pts.len() < 2 {
        return Err(RelaxationError::TooFewPoints(pts.len()));
    }
    if pts.iter().all(|p| p.1 == pts[0].1) {
        return Ok(DecayFit {
            window,
            rate: 0.0,
            r2: 1.0,
            series: pts,
        });
    }
    let m = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, v) in &pts {
        let dt = t - mean_t;
        let dy = v.ln() - mean_y;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(RelaxationError::TooFewPoints(1));
    }
    let slope = sty / stt;
    let ss_res = (syy - slope * sty).max(0.0);
    let r2 = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        window,
        rate: -slope,
        r2,
        series: pts,
    })
}

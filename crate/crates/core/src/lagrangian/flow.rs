use crate::solver::{compute_velocity, rk4_step, SolverState};
use crate::spectral::SpectralVector;

use super::eval::{det, frobenius, inverse, mat_add, mat_mul, mat_vec, FourierEvaluator, Mat3, IDENTITY};
use super::LagrangianError;

/// Velocity as a function of time.
pub trait VelocityProvider {
    fn velocity(&mut self, t: f64) -> Result<SpectralVector, LagrangianError>;
}

/// Time-independent velocity.
#[derive(Debug, Clone)]
pub struct FrozenVelocity(pub SpectralVector);

impl VelocityProvider for FrozenVelocity {
    fn velocity(&mut self, _t: f64) -> Result<SpectralVector, LagrangianError> {
        Ok(self.0.clone())
    }
}

/// Velocity of a live solver run, advanced with RK4 steps of size `substep`.
/// Requests must be nondecreasing multiples of `substep`.
#[derive(Debug, Clone)]
pub struct SolverVelocity {
    state: SolverState,
    gamma: f64,
    substep: f64,
    cached: Option<(f64, SpectralVector)>,
}

impl SolverVelocity {
    pub fn new(b0: SpectralVector, gamma: f64, substep: f64) -> Self {
        Self {
            state: SolverState::new(b0),
            gamma,
            substep,
            cached: None,
        }
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }
}

impl VelocityProvider for SolverVelocity {
    fn velocity(&mut self, t: f64) -> Result<SpectralVector, LagrangianError> {
        let tol = 1e-9 * self.substep;
        if let Some((tc, u)) = &self.cached {
            if (tc - t).abs() <= tol {
                return Ok(u.clone());
            }
        }
        if t < self.state.t - tol {
            return Err(LagrangianError::Provider(format!(
                "velocity requested at t = {t} after the run reached {}",
                self.state.t
            )));
        }
        while self.state.t < t - tol {
            let target = self.state.t + self.substep;
            let mut next = rk4_step(&self.state, self.substep, self.gamma)?;
            next.t = target;
            self.state = next;
        }
        if (self.state.t - t).abs() > tol {
            return Err(LagrangianError::Provider(format!(
                "t = {t} is not on the substep grid (run at {})",
                self.state.t
            )));
        }
        let u = compute_velocity(&self.state.b, self.gamma);
        self.cached = Some((t, u.clone()));
        Ok(u)
    }
}

/// Particle trajectories `X(t, y)` on a uniform particle grid with Jacobians.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMap {
    pub dim: usize,
    pub m: usize,
    pub period: f64,
    pub t: f64,
    /// Particle labels `y = i·L/m`, row-major (unused trailing axes zero).
    pub y: Vec<[f64; 3]>,
    /// Unwrapped positions.
    pub x: Vec<[f64; 3]>,
    /// `∇_y X`, identity-padded beyond `dim`.
    pub grad_x: Vec<Mat3>,
    /// `(∇_y X)^{−1}`.
    pub m_inv: Vec<Mat3>,
}

impl FlowMap {
    pub fn identity(dim: usize, m: usize, period: f64) -> Self {
        let count = m.pow(dim as u32);
        let h = period / m as f64;
        let y: Vec<[f64; 3]> = (0..count)
            .map(|p| {
                let mut rem = p;
                let mut out = [0.0; 3];
                for a in (0..dim).rev() {
                    out[a] = (rem % m) as f64 * h;
                    rem /= m;
                }
                out
            })
            .collect();
        Self {
            dim,
            m,
            period,
            t: 0.0,
            x: y.clone(),
            y,
            grad_x: vec![IDENTITY; count],
            m_inv: vec![IDENTITY; count],
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `max |det ∇_yX − 1|`.
    pub fn max_det_error(&self) -> f64 {
        self.grad_x.iter().map(|g| (det(g) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max ‖M·∇_yX − Id‖_F`.
    pub fn max_inverse_error(&self) -> f64 {
        self.grad_x
            .iter()
            .zip(&self.m_inv)
            .map(|(g, m)| frobenius(&mat_add(&mat_mul(m, g), &IDENTITY, -1.0)))
            .fold(0.0, f64::max)
    }

    /// `max ‖∇_yX − Id‖_F`.
    pub fn max_strain(&self) -> f64 {
        self.grad_x
            .iter()
            .map(|g| frobenius(&mat_add(g, &IDENTITY, -1.0)))
            .fold(0.0, f64::max)
    }
}

/// Per-step record of `∇_y u(τ, y) = ∇_x u(X)·∇_yX` averaged with the RK4
/// weights, so that `Σ dt·G = ∇_yX(t) − Id` holds exactly for the integrator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradientHistory {
    pub steps: Vec<(f64, Vec<Mat3>)>,
}

impl GradientHistory {
    /// `D(y) = ∫₀ᵗ ∇_y u dτ` per particle.
    pub fn integrated(&self) -> Vec<Mat3> {
        let count = self.steps.first().map_or(0, |s| s.1.len());
        let mut out = vec![[[0.0; 3]; 3]; count];
        for (dt, g) in &self.steps {
            for (o, gi) in out.iter_mut().zip(g) {
                *o = mat_add(o, gi, *dt);
            }
        }
        out
    }

    /// Smallness surrogate `∫ ‖∇_y u‖_{L^∞} dτ` (Frobenius norm, max over particles).
    pub fn smallness(&self) -> f64 {
        self.steps
            .iter()
            .map(|(dt, g)| dt * g.iter().map(frobenius).fold(0.0, f64::max))
            .sum()
    }
}

fn pad(dim: usize, j: Mat3) -> Mat3 {
    let mut out = j;
    for a in dim..3 {
        out[a] = [0.0; 3];
        for row in out.iter_mut() {
            row[a] = 0.0;
        }
    }
    out
}

/// RK4 integration of `dX/dt = u(t, X)`, `d∇_yX/dt = ∇u(X)·∇_yX` from 0 to
/// `t_end` with step `dt`, on an `m^d` particle grid.
pub fn integrate_flow_map(
    provider: &mut dyn VelocityProvider,
    t_end: f64,
    dt: f64,
    m: usize,
) -> Result<(FlowMap, GradientHistory), LagrangianError> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0) {
        return Err(LagrangianError::Step(dt));
    }
    let u0 = provider.velocity(0.0)?;
    let grid = *u0.grid();
    let dim = grid.dim();
    if m == 0 || m > grid.n() {
        return Err(LagrangianError::Particles { m, n: grid.n() });
    }
    let mut flow = FlowMap::identity(dim, m, grid.period());
    let mut history = GradientHistory::default();
    let steps = (t_end / dt).round() as usize;
    let steps = if (steps as f64 * dt - t_end).abs() <= 1e-9 * dt { steps } else { steps + 1 };
    let mut current = Some(u0);
    for s in 0..steps {
        let t = s as f64 * dt;
        let h = (t_end - t).min(dt);
        let ev0 = FourierEvaluator::vector(&current.take().map_or_else(|| provider.velocity(t), Ok)?);
        let ev_half = FourierEvaluator::vector(&provider.velocity(t + 0.5 * h)?);
        let u_end = provider.velocity(t + h)?;
        let ev1 = FourierEvaluator::vector(&u_end);
        current = Some(u_end);

        let mut grads = Vec::with_capacity(flow.len());
        for p in 0..flow.len() {
            let x0 = flow.x[p];
            let g0 = flow.grad_x[p];
            let slope = |ev: &FourierEvaluator, x: &[f64; 3], g: &Mat3| {
                let (v, j) = ev.value_and_gradient(x);
                (v, mat_mul(&pad(dim, j), g))
            };
            let shift = |x: &[f64; 3], v: &[f64; 3], c: f64| [x[0] + c * v[0], x[1] + c * v[1], x[2] + c * v[2]];
            let (k1, q1) = slope(&ev0, &x0, &g0);
            let (k2, q2) = slope(&ev_half, &shift(&x0, &k1, 0.5 * h), &mat_add(&g0, &q1, 0.5 * h));
            let (k3, q3) = slope(&ev_half, &shift(&x0, &k2, 0.5 * h), &mat_add(&g0, &q2, 0.5 * h));
            let (k4, q4) = slope(&ev1, &shift(&x0, &k3, h), &mat_add(&g0, &q3, h));
            let mut x1 = x0;
            for a in 0..3 {
                x1[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            }
            let mut gmean = mat_add(&q1, &q2, 2.0);
            gmean = mat_add(&gmean, &q3, 2.0);
            gmean = mat_add(&gmean, &q4, 1.0);
            for row in gmean.iter_mut() {
                for v in row.iter_mut() {
                    *v /= 6.0;
                }
            }
            flow.x[p] = x1;
            flow.grad_x[p] = mat_add(&g0, &gmean, h);
            grads.push(gmean);
        }
        history.steps.push((h, grads));
        flow.t = t + h;
        let err = flow.max_det_error();
        if err > 1e-3 {
            return Err(LagrangianError::Degenerate { t: flow.t, det_error: err });
        }
    }
    for (mi, g) in flow.m_inv.iter_mut().zip(&flow.grad_x) {
        *mi = inverse(g).ok_or(LagrangianError::Degenerate {
            t: flow.t,
            det_error: (det(g) - 1.0).abs(),
        })?;
    }
    Ok((flow, history))
}

/// Neumann series `Σ_j (−D)^j` with `D = ∫₀ᵗ ∇_y u dτ`, truncated once the
/// largest term drops below `10⁻¹²`. Refuses when the smallness surrogate
/// exceeds `1/2`.
pub fn neumann_m(history: &GradientHistory) -> Result<Vec<Mat3>, LagrangianError> {
    let small = history.smallness();
    if small > 0.5 {
        return Err(LagrangianError::Smallness(small));
    }
    let d = history.integrated();
    let minus_d: Vec<Mat3> = d
        .iter()
        .map(|m| mat_add(&[[0.0; 3]; 3], m, -1.0))
        .collect();
    let mut sum = vec![IDENTITY; d.len()];
    let mut term = vec![IDENTITY; d.len()];
    for _ in 0..200 {
        let mut largest = 0.0f64;
        for ((t, s), md) in term.iter_mut().zip(sum.iter_mut()).zip(&minus_d) {
            *t = mat_mul(t, md);
            *s = mat_add(s, t, 1.0);
            largest = largest.max(frobenius(t));
        }
        if largest < 1e-12 {
            break;
        }
    }
    Ok(sum)
}

/// `max_y |B(t, X(t,y)) − ∇_yX(t,y)·B₀(y)|` with both fields evaluated by
/// Fourier summation.
pub fn cauchy_check(b_t: &SpectralVector, flow: &FlowMap, b0: &SpectralVector) -> f64 {
    let ev_t = FourierEvaluator::vector(b_t);
    let ev_0 = FourierEvaluator::vector(b0);
    flow.x
        .iter()
        .zip(&flow.y)
        .zip(&flow.grad_x)
        .map(|((x, y), g)| {
            let lhs = ev_t.value(x);
            let rhs = mat_vec(g, &ev_0.value(y));
            (0..flow.dim).map(|a| (lhs[a] - rhs[a]).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    fn shear(g: Grid, amp: f64) -> SpectralVector {
        SpectralVector::from_fn(g, |x| vec![amp * (2.0 * PI * x[1]).sin(), 0.0])
    }

    #[test]
    fn constant_velocity_translates() {
        let g = Grid::new(2, 16).unwrap();
        let mut p = FrozenVelocity(SpectralVector::constant(g, &[1.0, 0.0]));
        let (flow, _) = integrate_flow_map(&mut p, 0.5, 0.1, 8).unwrap();
        for (x, y) in flow.x.iter().zip(&flow.y) {
            assert!((x[0] - y[0] - 0.5).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-15);
        }
        assert!(flow.max_strain() < 1e-14);
    }

    #[test]
    fn zero_velocity_is_identity() {
        let g = Grid::new(2, 16).unwrap();
        let mut p = FrozenVelocity(SpectralVector::zeros(g));
        let (flow, hist) = integrate_flow_map(&mut p, 1.0, 0.25, 8).unwrap();
        assert_eq!(flow.x, flow.y);
        for m in neumann_m(&hist).unwrap() {
            assert_eq!(m, IDENTITY);
        }
    }

    #[test]
    fn shear_closed_form() {
        let g = Grid::new(2, 16).unwrap();
        let t = 0.05;
        let mut p = FrozenVelocity(shear(g, 1.0));
        let (flow, hist) = integrate_flow_map(&mut p, t, 0.01, 16).unwrap();
        let series = neumann_m(&hist).unwrap();
        for i in 0..flow.len() {
            let y = flow.y[i];
            let c = 2.0 * PI * t * (2.0 * PI * y[1]).cos();
            assert!((flow.x[i][0] - y[0] - t * (2.0 * PI * y[1]).sin()).abs() < 1e-10);
            assert!((flow.grad_x[i][0][1] - c).abs() < 1e-10);
            assert!((flow.m_inv[i][0][1] + c).abs() < 1e-10);
            assert!((series[i][0][1] + c).abs() < 1e-10);
        }
        assert!(flow.max_det_error() < 1e-12);
    }

    #[test]
    fn neumann_refuses_large_strain() {
        let g = Grid::new(2, 16).unwrap();
        let mut p = FrozenVelocity(shear(g, 1.0));
        let (_, hist) = integrate_flow_map(&mut p, 0.2, 0.05, 4).unwrap();
        assert!(matches!(neumann_m(&hist), Err(LagrangianError::Smallness(_))));
    }

    #[test]
    fn cauchy_at_time_zero_is_exact() {
        let g = Grid::new(2, 16).unwrap();
        let b = shear(g, 1.0);
        let flow = FlowMap::identity(2, 8, 1.0);
        assert_eq!(cauchy_check(&b, &flow, &b), 0.0);
    }

    #[test]
    fn solver_provider_rejects_off_grid_times() {
        let g = Grid::new(2, 8).unwrap();
        let mut p = SolverVelocity::new(shear(g, 1.0), 2.0, 0.1);
        assert!(p.velocity(0.2).is_ok());
        assert!(p.velocity(0.25).is_err());
        assert!(p.velocity(0.1).is_err());
    }
}

//! Direct integration of the toy model and its time-local approximation.

use super::{correlation_samples, ToyMethod, ToyModelProblem, ToyModelSolution};
use crate::bath::gamma_time_dependent_series;
use crate::error::{Error, Result};
use crate::C64;

/// Allowed relative change of `f(T)` when the step is halved.
pub const HALVING_TOL: f64 = 1e-4;

/// History of the interaction-picture amplitude on a uniform grid.
///
/// The memory integral `F_n = ∫₀^{t_n} K̃(t_n − s) f̃(s) ds` uses the composite
/// trapezoid rule over the whole history, and `f̃` is advanced with the
/// trapezoid rule in time. The `s = t_n` end point makes each step implicit in
/// `f̃_n`, which is solved exactly since the equation is linear.
#[derive(Clone, Debug)]
pub struct VolterraState {
    pub dt: f64,
    /// `f̃(k dt)` for every step taken so far.
    pub history: Vec<C64>,
    kernel: Vec<C64>,
    last_memory: C64,
}

impl VolterraState {
    /// `kernel[k] = K̃(k dt)`, which bounds the number of steps.
    pub fn new(f0: C64, kernel: Vec<C64>, dt: f64) -> Self {
        Self { dt, history: vec![f0], kernel, last_memory: C64::new(0.0, 0.0) }
    }

    pub fn steps(&self) -> usize {
        self.history.len() - 1
    }

    pub fn step(&mut self) -> Result<C64> {
        let n = self.history.len();
        if n >= self.kernel.len() {
            return Err(Error::InvalidArgument(format!("kernel tabulated for {} steps only", self.kernel.len() - 1)));
        }
        let k = &self.kernel;
        let h = &self.history;
        let dt = self.dt;
        let mut known = k[n] * h[0] * 0.5;
        for j in 1..n {
            known += k[n - j] * h[j];
        }
        known *= dt;
        let lhs = C64::new(1.0, 0.0) - k[0] * (0.25 * dt * dt);
        let f_new = (h[n - 1] + (self.last_memory + known) * (0.5 * dt)) / lhs;
        self.last_memory = known + k[0] * f_new * (0.5 * dt);
        self.history.push(f_new);
        Ok(f_new)
    }
}

/// `K̃(τ) = −G(τ) e^{iω0τ}` at `k dt`.
fn kernel_samples(p: &ToyModelProblem, dt: f64, n: usize) -> Result<Vec<C64>> {
    let g = correlation_samples(&p.j, dt, n)?;
    Ok(g.iter().enumerate().map(|(k, v)| -v * C64::from_polar(1.0, p.omega0 * k as f64 * dt)).collect())
}

fn run(p: &ToyModelProblem, f0: C64, kernel: Vec<C64>, dt: f64, steps: usize) -> Result<Vec<C64>> {
    let mut st = VolterraState::new(f0, kernel, dt);
    for _ in 0..steps {
        st.step()?;
    }
    Ok(st
        .history
        .iter()
        .enumerate()
        .map(|(k, z)| z * C64::from_polar(1.0, -p.omega0 * k as f64 * dt))
        .collect())
}

fn check_grid(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("need dt > 0 and T >= 0, got dt = {dt}, T = {t_end}")));
    }
    Ok((t_end / dt).round() as usize)
}

/// Single run at step `dt`, second-order accurate.
pub fn volterra_fixed_step(p: &ToyModelProblem, f0: C64, t_end: f64, dt: f64) -> Result<ToyModelSolution> {
    let steps = check_grid(t_end, dt)?;
    let f = run(p, f0, kernel_samples(p, dt, steps + 1)?, dt, steps)?;
    let times = (0..=steps).map(|k| k as f64 * dt).collect();
    ToyModelSolution::assemble(p, times, f, ToyMethod::Volterra)
}

/// Runs at `dt` and `dt/2`, rejects the step if the two differ at T by more
/// than [`HALVING_TOL`] relative, and returns the Richardson combination
/// `(4 f_{dt/2} − f_dt)/3` on the coarse grid.
pub fn volterra_solve(p: &ToyModelProblem, f0: C64, t_end: f64, dt: f64) -> Result<ToyModelSolution> {
    let steps = check_grid(t_end, dt)?;
    let fine_kernel = kernel_samples(p, 0.5 * dt, 2 * steps + 1)?;
    let coarse_kernel: Vec<C64> = fine_kernel.iter().step_by(2).copied().collect();
    let coarse = run(p, f0, coarse_kernel, dt, steps)?;
    let fine = run(p, f0, fine_kernel, 0.5 * dt, 2 * steps)?;

    let (a, b) = (coarse[steps], fine[2 * steps]);
    let scale = b.norm().max(1e-6 * f0.norm());
    let change = (a - b).norm() / scale.max(f64::MIN_POSITIVE);
    if change > HALVING_TOL {
        // Second order: the change shrinks by four per halving.
        let factor = (change / HALVING_TOL).sqrt().ceil().max(2.0);
        return Err(Error::StepSize(format!(
            "halving dt = {dt} changed f(T) by {change:.3e} relative; try dt <= {:.3e}",
            dt / factor
        )));
    }
    let f: Vec<C64> = (0..=steps).map(|k| (fine[2 * k] * 4.0 - coarse[k]) / 3.0).collect();
    let times = (0..=steps).map(|k| k as f64 * dt).collect();
    ToyModelSolution::assemble(p, times, f, ToyMethod::Volterra)
}

/// `f̃(t) = f0 exp(∫₀ᵗ Δ(s) ds)` with `Δ(t) = ∫₀ᵗ K̃(s) ds = −Γ(ω0, t)`.
pub fn time_local_solve(p: &ToyModelProblem, f0: C64, t_end: f64, dt: f64) -> Result<ToyModelSolution> {
    let steps = check_grid(t_end, dt)?;
    let gamma = gamma_time_dependent_series(&p.j, p.omega0, 0.5 * dt, 2 * steps + 1)?;
    let mut acc = C64::new(0.0, 0.0);
    let mut f = Vec::with_capacity(steps + 1);
    f.push(f0);
    for k in 1..=steps {
        acc -= (gamma[2 * k - 2] + gamma[2 * k - 1] * 4.0 + gamma[2 * k]) * (dt / 6.0);
        let t = k as f64 * dt;
        f.push(f0 * acc.exp() * C64::from_polar(1.0, -p.omega0 * t));
    }
    let times = (0..=steps).map(|k| k as f64 * dt).collect();
    ToyModelSolution::assemble(p, times, f, ToyMethod::TimeLocal)
}

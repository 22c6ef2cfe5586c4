//! Bath correlation function `G(t) = ∫ dω/2π J(ω) e^{−iωt}` and its
//! half-Fourier transform at finite time.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::spectral::SpectralDensity;
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::C64;

/// Maximum phase span `ω t` across one quadrature panel.
const MAX_PANEL_PHASE: f64 = 15.0;
/// Gauss-Legendre order per panel.
const PANEL_ORDER: usize = 20;
/// Steps between exact phase resynchronisation in grid sweeps.
const RESYNC: usize = 64;

/// `G(t)` sampled on a uniform grid `t_k = k t_max/(n − 1)`, t ≥ 0 only.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationFunction {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
}

/// Weighted frequency nodes: `G(t) ≈ Σ_k c_k e^{−iω_k t}`.
#[derive(Clone, Debug)]
pub struct FrequencyGrid {
    pub nodes: Vec<f64>,
    /// `w_k J(ω_k) / 2π`.
    pub weights: Vec<f64>,
}

impl FrequencyGrid {
    /// Build a grid that integrates `J(ω) e^{−iωt}` accurately for
    /// `0 ≤ t ≤ t_max`.
    pub fn new(j: &SpectralDensity, t_max: f64) -> Result<Self> {
        Self::with_extra_breaks(j, t_max, &[])
    }

    pub fn with_extra_breaks(j: &SpectralDensity, t_max: f64, extra: &[f64]) -> Result<Self> {
        let (a, b) = j.support();
        if !(b > a) {
            return Ok(Self { nodes: Vec::new(), weights: Vec::new() });
        }
        let mut breaks = j.breakpoints();
        breaks.extend(j.jump_points());
        breaks.extend_from_slice(extra);
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 4000 };
        let panels = quad::adaptive_intervals(|w| j.evaluate(w), a, b, &breaks, opts)
            .or_else(|_| {
                let loose = QuadOptions { rel_tol: 1e-10, max_intervals: 20000, ..opts };
                quad::adaptive_intervals(|w| j.evaluate(w), a, b, &breaks, loose)
            })?;
        let h_max = if t_max > 0.0 { MAX_PANEL_PHASE / t_max } else { f64::INFINITY };
        let (gx, gw) = quad::gauss_legendre(PANEL_ORDER);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (p, q) in panels {
            let m = ((q - p) / h_max).ceil().max(1.0) as usize;
            let h = (q - p) / m as f64;
            for s in 0..m {
                let lo = p + s as f64 * h;
                for (x, w) in gx.iter().zip(&gw) {
                    let om = lo + 0.5 * h * (x + 1.0);
                    let jv = j.evaluate(om);
                    if jv != 0.0 {
                        nodes.push(om);
                        weights.push(0.5 * h * w * jv / (2.0 * PI));
                    }
                }
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `G(t)` at a single time.
    pub fn eval(&self, t: f64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (w, c) in self.nodes.iter().zip(&self.weights) {
            let ph = w * t;
            s += C64::new(c * ph.cos(), -c * ph.sin());
        }
        s
    }

    /// `Σ_k c_k f(ω_k)` for a general weight function.
    pub fn sum<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(w, c)| f(*w) * *c).sum()
    }

    /// `G(k dt)` for `k = 0..n`, by phase recurrence with periodic resync.
    pub fn eval_uniform(&self, dt: f64, n: usize) -> Vec<C64> {
        let chunk = 256;
        let partial: Vec<Vec<C64>> = self
            .nodes
            .par_chunks(chunk)
            .zip(self.weights.par_chunks(chunk))
            .map(|(ws, cs)| {
                let mut out = vec![C64::new(0.0, 0.0); n];
                let step: Vec<C64> = ws.iter().map(|w| C64::from_polar(1.0, -w * dt)).collect();
                let mut ph: Vec<C64> = cs.iter().map(|c| C64::new(*c, 0.0)).collect();
                for (k, o) in out.iter_mut().enumerate() {
                    if k % RESYNC == 0 {
                        let t = k as f64 * dt;
                        for ((p, w), c) in ph.iter_mut().zip(ws).zip(cs) {
                            *p = C64::from_polar(*c, -w * t);
                        }
                    }
                    let mut s = C64::new(0.0, 0.0);
                    for (p, z) in ph.iter_mut().zip(&step) {
                        s += *p;
                        *p *= z;
                    }
                    *o = s;
                }
                out
            })
            .collect();
        let mut total = vec![C64::new(0.0, 0.0); n];
        for part in partial {
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        total
    }
}

impl SpectralDensity {
    /// Closed-form `G(t)` where one exists.
    pub fn correlation_closed_form(&self, t: f64) -> Option<C64> {
        use SpectralDensity::*;
        match self {
            Flat { level, cutoff } => {
                let v = if t == 0.0 { level * cutoff / PI } else { level * (cutoff * t).sin() / (PI * t) };
                Some(C64::new(v, 0.0))
            }
            OhmicCutoff { eta, alpha, cutoff } => {
                let z = C64::new(1.0 / cutoff, t);
                Some(z.powf(-(alpha + 1.0)) * (eta * quad::gamma_fn(alpha + 1.0)))
            }
            PhotonicBandEdge { eta, omega_plus, cutoff } => {
                let z = C64::new(1.0 / cutoff, t);
                let g = z.powf(-1.5) * (eta * quad::gamma_fn(1.5));
                Some(g * C64::from_polar(1.0, -omega_plus * t))
            }
            _ => None,
        }
    }
}

/// `G(t)` on `n_samples` uniformly spaced times in `[0, t_max]`.
pub fn correlation_function(j: &SpectralDensity, t_max: f64, n_samples: usize) -> Result<CorrelationFunction> {
    if !(t_max > 0.0) || n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "correlation grid needs t_max > 0 and n_samples >= 2, got {t_max}, {n_samples}"
        )));
    }
    let dt = t_max / (n_samples - 1) as f64;
    let times: Vec<f64> = (0..n_samples).map(|k| k as f64 * dt).collect();
    let values = if j.correlation_closed_form(0.0).is_some() {
        times.iter().map(|&t| j.correlation_closed_form(t).unwrap()).collect()
    } else {
        FrequencyGrid::new(j, t_max)
            .map_err(|e| match e {
                Error::Quadrature { error, .. } => Error::Quadrature {
                    context: format!("correlation function up to t = {t_max}"),
                    error,
                },
                other => other,
            })?
            .eval_uniform(dt, n_samples)
    };
    Ok(CorrelationFunction { times, values })
}

/// `(e^{ix} − 1)/(ix)`, stable at small x.
fn phi(x: f64) -> C64 {
    if x.abs() < 1e-4 {
        C64::new(1.0 - x * x / 6.0, 0.5 * x - x * x * x / 24.0)
    } else {
        C64::new(x.sin() / x, (1.0 - x.cos()) / x)
    }
}

/// `Γ(Ω, t) = ∫₀^t G(s) e^{iΩs} ds`.
pub fn gamma_time_dependent(j: &SpectralDensity, omega: f64, t: f64) -> Result<C64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let grid = FrequencyGrid::with_extra_breaks(j, t, &[omega])?;
    Ok(grid.sum(|w| phi((omega - w) * t) * t))
}

/// Cumulative `Γ(Ω, k dt)` for `k = 0..n`, by Simpson's rule on each step with
/// a midpoint evaluation of `G`.
pub fn gamma_time_dependent_series(j: &SpectralDensity, omega: f64, dt: f64, n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let half = 0.5 * dt;
    let m = 2 * n - 1;
    let g: Vec<C64> = if j.correlation_closed_form(0.0).is_some() {
        (0..m).map(|k| j.correlation_closed_form(k as f64 * half).unwrap()).collect()
    } else {
        FrequencyGrid::new(j, (m - 1) as f64 * half)?.eval_uniform(half, m)
    };
    let h: Vec<C64> = g
        .iter()
        .enumerate()
        .map(|(k, v)| v * C64::from_polar(1.0, omega * k as f64 * half))
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut acc = C64::new(0.0, 0.0);
    out.push(acc);
    for k in 1..n {
        acc += (h[2 * k - 2] + h[2 * k - 1] * 4.0 + h[2 * k]) * (dt / 6.0);
        out.push(acc);
    }
    Ok(out)
}

/// `∫₀^t g(s) e^{iΩs} ds` for an arbitrary kernel given in the time domain.
pub fn half_fourier_of_kernel<F: Fn(f64) -> C64>(g: F, omega: f64, t: f64) -> Result<C64> {
    if t <= 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let period = if omega != 0.0 { 2.0 * PI / omega.abs() } else { t };
    let pieces = ((t / period).ceil() as usize).clamp(1, 100_000);
    let breaks: Vec<f64> = (1..pieces).map(|k| t * k as f64 / pieces as f64).collect();
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4 * pieces + 4000 };
    let (v, _) = quad::integrate(|s| g(s) * C64::from_polar(1.0, omega * s), 0.0, t, &breaks, opts)?;
    Ok(v)
}

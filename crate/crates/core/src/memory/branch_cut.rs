//! Exact toy-model solution as a frequency integral over the support.

use rayon::prelude::*;
use std::f64::consts::PI;

use super::{find_poles, markov_parameters, ToyMethod, ToyModelProblem, ToyModelSolution};
use crate::bath::{FrequencyGrid, HilbertTransform};
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::C64;

/// Largest phase `ω t_max` accumulated across one panel.
const PANEL_PHASE: f64 = 10.0;
const PANEL_ORDER: usize = 20;

/// `f(t) = f0 [Σ_p Z_p e^{−iω_p t} + ∫ dω/2π e^{−iωt} J / ((ω − ω0 − R)² + J²/4)]`.
pub fn branch_cut_solve(p: &ToyModelProblem, f0: C64, times: &[f64]) -> Result<ToyModelSolution> {
    let h = HilbertTransform::new(&p.j);
    let (lo, hi) = p.j.support();
    let (omega_tilde, tau_r) = markov_parameters(p)?;
    let poles = find_poles(p)?;

    let filter = |w: f64| -> f64 {
        let jv = p.j.evaluate(w);
        if jv == 0.0 {
            return 0.0;
        }
        match h.value(w) {
            Ok(r) => {
                let d = w - p.omega0 - r;
                jv / (d * d + 0.25 * jv * jv) / (2.0 * PI)
            }
            Err(_) => f64::NAN,
        }
    };

    let (nodes, weights) = if hi > lo {
        // Force refinement on a geometric ladder around the resonance.
        let mut breaks = p.j.breakpoints();
        breaks.extend(p.j.jump_points());
        let half_width = if tau_r.is_finite() { 1.0 / tau_r } else { 0.0 };
        if half_width > 0.0 {
            let mut s = half_width;
            while s < hi - lo {
                for x in [omega_tilde - s, omega_tilde + s] {
                    if x > lo && x < hi {
                        breaks.push(x);
                    }
                }
                s *= 2.0;
            }
            if omega_tilde > lo && omega_tilde < hi {
                breaks.push(omega_tilde);
            }
        }
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 20000 };
        let panels = quad::adaptive_intervals(filter, lo, hi, &breaks, opts).map_err(|e| Error::Quadrature {
            context: format!(
                "branch-cut filter near resonance at {omega_tilde} with half width {half_width:.3e}: {e}"
            ),
            error: f64::NAN,
        })?;
        let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let h_max = if t_max > 0.0 { PANEL_PHASE / t_max } else { f64::INFINITY };
        let (gx, gw) = quad::gauss_legendre(PANEL_ORDER);
        // The filter is smooth on every adaptive panel, so it is sampled
        // exactly at Chebyshev points once and interpolated on the finer
        // sub-panels that resolve the oscillation.
        let samples: Vec<Vec<f64>> = panels
            .par_iter()
            .map(|&(a, b)| chebyshev_points(a, b).into_iter().map(filter).collect())
            .collect();
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature { context: "branch-cut filter evaluation".into(), error: f64::NAN });
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (&(a, b), vals) in panels.iter().zip(&samples) {
            if vals.iter().all(|v| *v == 0.0) {
                continue;
            }
            let m = ((b - a) / h_max).ceil().max(1.0) as usize;
            let step = (b - a) / m as f64;
            for s in 0..m {
                let left = a + s as f64 * step;
                for (x, w) in gx.iter().zip(&gw) {
                    let om = left + 0.5 * step * (x + 1.0);
                    let v = if m == 1 { filter(om) } else { chebyshev_interpolate(a, b, vals, om) };
                    if v != 0.0 {
                        nodes.push(om);
                        weights.push(0.5 * step * w * v);
                    }
                }
            }
        }
        (nodes, weights)
    } else {
        (Vec::new(), Vec::new())
    };

    let cut_weight: f64 = weights.iter().sum();
    let pole_part = |t: f64| -> C64 { poles.iter().map(|q| C64::from_polar(q.residue, -q.omega * t)).sum() };
    let f: Vec<C64> = if let Some(dt) = uniform_step(times) {
        let grid = FrequencyGrid { nodes, weights };
        let cut = grid.eval_uniform(dt, times.len());
        times.iter().zip(cut).map(|(&t, c)| f0 * (c + pole_part(t))).collect()
    } else {
        times
            .par_iter()
            .map(|&t| {
                let mut s = pole_part(t);
                for (x, w) in nodes.iter().zip(&weights) {
                    s += C64::from_polar(*w, -x * t);
                }
                f0 * s
            })
            .collect()
    };

    let mut sol = ToyModelSolution::assemble(p, times.to_vec(), f, ToyMethod::BranchCut)?;
    sol.pole_weight_deficit = Some(1.0 - cut_weight - poles.iter().map(|q| q.residue).sum::<f64>());
    Ok(sol)
}

const CHEB_ORDER: usize = 48;

/// Chebyshev points of the second kind on [a, b].
fn chebyshev_points(a: f64, b: f64) -> Vec<f64> {
    (0..=CHEB_ORDER)
        .map(|j| {
            let x = (PI * j as f64 / CHEB_ORDER as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * x
        })
        .collect()
}

/// Barycentric interpolation through [`chebyshev_points`].
fn chebyshev_interpolate(a: f64, b: f64, vals: &[f64], w: f64) -> f64 {
    let x = (2.0 * w - a - b) / (b - a);
    let (mut num, mut den) = (0.0, 0.0);
    for (j, v) in vals.iter().enumerate() {
        let xj = (PI * j as f64 / CHEB_ORDER as f64).cos();
        let d = x - xj;
        if d == 0.0 {
            return *v;
        }
        let mut c = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == CHEB_ORDER {
            c *= 0.5;
        }
        num += c * v / d;
        den += c / d;
    }
    num / den
}

/// Step of a grid `t_k = k dt` starting at zero.
fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.len() < 3 || times[0] != 0.0 {
        return None;
    }
    let dt = times[1];
    let ok = times.iter().enumerate().all(|(k, t)| (t - k as f64 * dt).abs() <= 1e-12 * t.abs().max(dt));
    (ok && dt > 0.0).then_some(dt)
}

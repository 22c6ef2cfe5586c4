//! Exact single-excitation dynamics of a two-level atom coupled to a finite
//! set of bosonic modes.

use serde::Serialize;
use std::f64::consts::PI;

use crate::bath::SpectralDensity;
use crate::error::{Error, Result};
use crate::qops::{self, SpectralDecomposition};
use crate::C64;

/// Allowed drift of `|f|² + Σ|f_k|²` from one.
const NORM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct WignerWeisskopf {
    pub times: Vec<f64>,
    /// Excited-state amplitude.
    pub f: Vec<C64>,
    /// Largest deviation of the total norm from one.
    pub norm_error: f64,
    /// `2π/δω` for a uniform mode grid, infinite otherwise.
    pub recurrence_time: f64,
}

/// Midpoint grid of `n` modes on `[lo, hi]` (the support when `None`), with
/// `g_k² = J(ω_k) δω / 2π`. Returned as `(g_k, ω_k)`.
pub fn discretize_modes(j: &SpectralDensity, n: usize, range: Option<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let (lo, hi) = range.unwrap_or_else(|| j.support());
    if !(hi > lo) {
        return Err(Error::InvalidArgument(format!("empty mode range [{lo}, {hi}]")));
    }
    let dw = (hi - lo) / n as f64;
    Ok((0..n)
        .map(|k| {
            let w = lo + (k as f64 + 0.5) * dw;
            ((j.evaluate(w) * dw / (2.0 * PI)).sqrt(), w)
        })
        .collect())
}

/// `H = ω0 |e,0⟩⟨e,0| + Σ ω_k |g,1_k⟩⟨g,1_k| + Σ g_k (|e,0⟩⟨g,1_k| + h.c.)`,
/// diagonalised once; `f(t) = Σ_m |v_{0m}|² e^{−iE_m t}` from `|e,0⟩`.
pub fn wigner_weisskopf_oracle(omega0: f64, modes: &[(f64, f64)], t_end: f64, dt: f64) -> Result<WignerWeisskopf> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument("need dt > 0 and T >= 0".into()));
    }
    let n = modes.len() + 1;
    let mut h = qops::zeros(n, n);
    h[(0, 0)] = C64::new(omega0, 0.0);
    for (k, &(g, w)) in modes.iter().enumerate() {
        h[(k + 1, k + 1)] = C64::new(w, 0.0);
        h[(0, k + 1)] = C64::new(g, 0.0);
        h[(k + 1, 0)] = C64::new(g, 0.0);
    }
    let SpectralDecomposition { eigenvalues, eigenvectors } = qops::eig_hermitian_matrix(&h)?;
    let weights: Vec<f64> = (0..n).map(|m| eigenvectors[(0, m)].norm_sqr()).collect();

    let steps = (t_end / dt).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let f: Vec<C64> = times
        .iter()
        .map(|&t| weights.iter().zip(&eigenvalues).map(|(w, e)| C64::from_polar(*w, -e * t)).sum())
        .collect();

    // Norm of the evolved state, checked on a sample of times.
    let mut norm_error = (weights.iter().sum::<f64>() - 1.0).abs();
    let stride = (steps / 16).max(1);
    for &t in times.iter().step_by(stride) {
        let mut total = 0.0;
        for r in 0..n {
            let mut amp = C64::new(0.0, 0.0);
            for m in 0..n {
                amp += eigenvectors[(r, m)] * eigenvectors[(0, m)].conj() * C64::from_polar(1.0, -eigenvalues[m] * t);
            }
            total += amp.norm_sqr();
        }
        norm_error = norm_error.max((total - 1.0).abs());
    }
    if norm_error > NORM_TOL {
        return Err(Error::StepSize(format!("single-excitation norm drifted by {norm_error:.3e}")));
    }

    let recurrence_time = uniform_spacing(modes).map_or(f64::INFINITY, |dw| 2.0 * PI / dw);
    Ok(WignerWeisskopf { times, f, norm_error, recurrence_time })
}

fn uniform_spacing(modes: &[(f64, f64)]) -> Option<f64> {
    if modes.len() < 2 {
        return None;
    }
    let dw = modes[1].1 - modes[0].1;
    let ok = modes.windows(2).all(|w| ((w[1].1 - w[0].1) - dw).abs() <= 1e-9 * dw.abs());
    (ok && dw != 0.0).then_some(dw.abs())
}

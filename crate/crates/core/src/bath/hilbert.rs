//! Principal-value Hilbert transform `R(ω) = P∫ dε/2π J(ε)/(ω − ε)`.
//!
//! Smooth points use the subtraction form
//! `∫ (J(ε) − J(ω))/(ω − ε) dε + J(ω) ln|(ω − a)/(b − ω)|`, whose integrand is
//! regular at ε = ω. Tabulated densities are integrated exactly, segment by
//! segment.

use serde::Serialize;
use std::f64::consts::PI;

use super::spectral::SpectralDensity;
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// Relative offset used to form one-sided limits at a jump of `J`.
const JUMP_OFFSET: f64 = 1e-9;

/// Hilbert transform at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HilbertValue {
    pub value: f64,
    /// `J` jumps exactly at ω; `value` is then the mean of `left` and `right`.
    pub discontinuous: bool,
    pub left: f64,
    pub right: f64,
}

/// Precomputed support data for repeated evaluation on one density.
#[derive(Clone, Debug)]
pub struct HilbertTransform<'a> {
    j: &'a SpectralDensity,
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    jumps: Vec<f64>,
    abs_tol: f64,
}

impl<'a> HilbertTransform<'a> {
    pub fn new(j: &'a SpectralDensity) -> Self {
        let (lo, hi) = j.support();
        let mut breaks = j.breakpoints();
        let jumps = j.jump_points();
        breaks.extend(jumps.iter().copied());
        let scale = j.peak_estimate();
        Self { j, lo, hi, breaks, jumps, abs_tol: (1e-15 * scale).max(1e-300) }
    }

    fn width(&self) -> f64 {
        (self.hi - self.lo).max(f64::MIN_POSITIVE)
    }

    /// `R(ω)`, with jump handling.
    pub fn eval(&self, omega: f64) -> Result<HilbertValue> {
        if !omega.is_finite() {
            return Err(Error::InvalidArgument(format!("Hilbert transform at non-finite omega {omega}")));
        }
        if self.jumps.contains(&omega) {
            let d = JUMP_OFFSET * self.width().max(omega.abs());
            let left = self.regular(omega - d)?;
            let right = self.regular(omega + d)?;
            return Ok(HilbertValue { value: 0.5 * (left + right), discontinuous: true, left, right });
        }
        let v = self.regular(omega)?;
        Ok(HilbertValue { value: v, discontinuous: false, left: v, right: v })
    }

    /// `R(ω)` as a plain number.
    pub fn value(&self, omega: f64) -> Result<f64> {
        Ok(self.eval(omega)?.value)
    }

    fn regular(&self, omega: f64) -> Result<f64> {
        if let SpectralDensity::Tabulated { omega: xs, values, .. } = self.j {
            return Ok(tabulated_pv(xs, values, omega));
        }
        let (a, b) = (self.lo, self.hi);
        if !(b > a) {
            return Ok(0.0);
        }
        let jw = self.j.evaluate(omega);
        let j = self.j;
        let f = |e: f64| {
            let den = omega - e;
            if den == 0.0 {
                0.0
            } else {
                (j.evaluate(e) - jw) / den
            }
        };
        let mut breaks = self.breaks.clone();
        breaks.push(omega);
        let opts = QuadOptions { abs_tol: self.abs_tol, rel_tol: 1e-12, max_intervals: 4000 };
        let (integral, _) = quad::integrate(f, a, b, &breaks, opts).or_else(|_| {
            quad::integrate(f, a, b, &breaks, QuadOptions { rel_tol: 1e-9, max_intervals: 20000, ..opts })
        })?;
        let log_term = if jw == 0.0 { 0.0 } else { jw * ((omega - a) / (b - omega)).abs().ln() };
        Ok((integral + log_term) / (2.0 * PI))
    }

    /// `R'(ω) = −∫ dε/2π J(ε)/(ω − ε)²`, valid where `J` vanishes near ω.
    pub fn derivative_in_gap(&self, omega: f64) -> Result<f64> {
        if self.j.evaluate(omega) != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Hilbert derivative by direct quadrature needs J({omega}) = 0"
            )));
        }
        let j = self.j;
        let f = |e: f64| {
            let d = omega - e;
            if d == 0.0 {
                0.0
            } else {
                j.evaluate(e) / (d * d)
            }
        };
        let opts = QuadOptions { abs_tol: self.abs_tol, rel_tol: 1e-11, max_intervals: 8000 };
        let (v, _) = quad::integrate(f, self.lo, self.hi, &self.breaks, opts)?;
        Ok(-v / (2.0 * PI))
    }
}

/// Exact principal value of the piecewise-linear interpolant.
fn tabulated_pv(xs: &[f64], ys: &[f64], omega: f64) -> f64 {
    let mut sum = 0.0;
    let ln_abs = |x: f64| if x == 0.0 { 0.0 } else { x.abs().ln() };
    for k in 0..xs.len() - 1 {
        let (x0, x1) = (xs[k], xs[k + 1]);
        let s = (ys[k + 1] - ys[k]) / (x1 - x0);
        let j_at = ys[k] + s * (omega - x0);
        // ∫ J/(ω−ε) over the segment; log singularities at a node cancel
        // between neighbours because the interpolant is continuous.
        sum += j_at * (ln_abs(omega - x0) - ln_abs(omega - x1)) - s * (x1 - x0);
    }
    sum / (2.0 * PI)
}

/// `R(ω)` for a single evaluation.
pub fn hilbert_transform(j: &SpectralDensity, omega: f64) -> Result<HilbertValue> {
    HilbertTransform::new(j).eval(omega)
}

//! Two-block model of the error made by dropping population-coherence
//! couplings.
//!
//! `d/dt (x₁, x₂) = [[R₁₁, g], [g*, R₁₂]] (x₁, x₂)` is compared with its
//! `g = 0` limit, starting from `(1, 0)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::C64;

/// Deviation target defining the crossover time.
pub const CROSSOVER_DEVIATION: f64 = 0.5;

#[derive(Clone, Debug, Serialize)]
pub struct RwaProbe {
    pub times: Vec<f64>,
    /// `|x(t) − x_RWA(t)| / |x_RWA(t)|`.
    pub deviation: Vec<f64>,
    /// Exact eigenvalue continuously connected to `R₁₁`.
    pub lambda_plus: C64,
    /// Exact eigenvalue continuously connected to `R₁₂`.
    pub lambda_minus: C64,
    /// `λ₊ − R₁₁`.
    pub shift: C64,
    /// `|g|²/ΔΩ` with `ΔΩ = R₁₁ − R₁₂`.
    pub perturbative_shift: C64,
    /// First time the deviation reaches [`CROSSOVER_DEVIATION`], if it does on the grid.
    pub crossover_time: Option<f64>,
    /// `|ΔΩ|/|g|²`.
    pub predicted_crossover: f64,
}

fn csqrt_branch(z: C64, reference: C64) -> C64 {
    let s = z.sqrt();
    if (s - reference).norm() <= (-s - reference).norm() {
        s
    } else {
        -s
    }
}

/// Exact solution from `(1, 0)` at time t.
fn exact(r11: C64, r12: C64, g: C64, t: f64) -> (C64, C64) {
    if g == C64::new(0.0, 0.0) {
        return ((r11 * t).exp(), C64::new(0.0, 0.0));
    }
    let m = (r11 + r12) * 0.5;
    let h = (r11 - r12) * 0.5;
    let s = (h * h + g.norm_sqr()).sqrt();
    let e = (m * t).exp();
    let (ch, sh_over_s) = if s.norm() * t < 1e-8 {
        (C64::new(1.0, 0.0), C64::new(t, 0.0))
    } else {
        ((s * t).cosh(), (s * t).sinh() / s)
    };
    // e^{Rt} = e^{mt}[cosh(st) I + sinh(st)/s (R − m I)], first column.
    (e * (ch + sh_over_s * h), e * sh_over_s * g.conj())
}

fn deviation_at(r11: C64, r12: C64, g: C64, t: f64) -> f64 {
    let (x1, x2) = exact(r11, r12, g, t);
    let rwa = (r11 * t).exp();
    ((x1 - rwa).norm_sqr() + x2.norm_sqr()).sqrt() / rwa.norm()
}

pub fn rwa_deviation_probe(r11: C64, r12: C64, g: C64, times: &[f64]) -> Result<RwaProbe> {
    let delta = r11 - r12;
    if delta.norm() == 0.0 {
        return Err(Error::InvalidArgument("two-block probe needs R11 != R12".into()));
    }
    let m = (r11 + r12) * 0.5;
    let h = delta * 0.5;
    let s = csqrt_branch(h * h + g.norm_sqr(), h);
    let lambda_plus = m + s;
    let lambda_minus = m - s;
    let deviation: Vec<f64> = times.iter().map(|&t| deviation_at(r11, r12, g, t)).collect();

    let crossover_time = times
        .windows(2)
        .zip(deviation.windows(2))
        .find(|(_, d)| d[0] < CROSSOVER_DEVIATION && d[1] >= CROSSOVER_DEVIATION)
        .map(|(t, _)| {
            let (mut a, mut b) = (t[0], t[1]);
            for _ in 0..100 {
                let c = 0.5 * (a + b);
                if deviation_at(r11, r12, g, c) < CROSSOVER_DEVIATION {
                    a = c;
                } else {
                    b = c;
                }
            }
            0.5 * (a + b)
        })
        .or_else(|| deviation.first().filter(|&&d| d >= CROSSOVER_DEVIATION).map(|_| times[0]));

    Ok(RwaProbe {
        times: times.to_vec(),
        deviation,
        lambda_plus,
        lambda_minus,
        shift: lambda_plus - r11,
        perturbative_shift: g.norm_sqr() / delta,
        crossover_time,
        predicted_crossover: if g.norm() > 0.0 { delta.norm() / g.norm_sqr() } else { f64::INFINITY },
    })
}

//! Spectral-density families and their analytic metadata.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// `ln(1e12)`: decay factor at which semi-infinite supports are truncated.
const TRUNCATION_LOG: f64 = 27.631_021_115_928_547;

/// Leading behaviour `J(ω) ≈ c (ω − edge)^exponent` just above the lower edge
/// of the support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowFrequencyLaw {
    pub coefficient: f64,
    pub exponent: f64,
    #[serde(default)]
    pub edge: f64,
}

/// A bath noise-power function `J(ω)`.
///
/// Coupling strengths are folded into the amplitude, so `J` directly sets the
/// rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpectralDensity {
    /// `J₀` on `[−Λ, Λ]`.
    Flat { level: f64, cutoff: f64 },
    /// `2πη ω^α e^{−ω/Λ}` for ω > 0.
    OhmicCutoff { eta: f64, alpha: f64, cutoff: f64 },
    /// Zero-temperature `base` dressed with Bose occupation.
    BosonicThermal { base: Box<SpectralDensity>, temperature: f64 },
    /// `¼ ρ(ω)[1 − F(ω)]` with a parabolic band of half-width `W`.
    FermionicBand { rho_max: f64, half_bandwidth: f64, temperature: f64 },
    /// Particle-hole continuum seen by a Kondo impurity spin.
    KondoParticleHole { jk: f64, rho_f: f64, half_bandwidth: f64, mu: f64, temperature: f64 },
    /// `2πη √(ω − ω₊) e^{−(ω−ω₊)/Λ}` above the band edge.
    PhotonicBandEdge { eta: f64, omega_plus: f64, cutoff: f64 },
    /// Linear interpolation of sorted samples, zero outside.
    Tabulated {
        omega: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        low_frequency: Option<LowFrequencyLaw>,
    },
}

/// Numerically safe Fermi function `1/(e^{βx} + 1)`; `beta = ∞` gives a step
/// with value ½ at the origin.
pub fn fermi(x: f64, beta: f64) -> f64 {
    if beta.is_infinite() {
        return if x < 0.0 {
            1.0
        } else if x > 0.0 {
            0.0
        } else {
            0.5
        };
    }
    let y = beta * x;
    if y > 0.0 {
        let e = (-y).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + y.exp())
    }
}

fn beta_of(temperature: f64) -> f64 {
    if temperature == 0.0 {
        f64::INFINITY
    } else {
        1.0 / temperature
    }
}

/// Point beyond the peak of `x^α e^{−x/Λ}` where it has fallen by 1e12.
fn decay_cutoff(alpha: f64, lambda: f64) -> f64 {
    if alpha == 0.0 {
        return TRUNCATION_LOG * lambda;
    }
    let peak = alpha * lambda;
    let log_peak = alpha * peak.ln() - alpha;
    let g = |x: f64| alpha * x.ln() - x / lambda - log_peak + TRUNCATION_LOG;
    let mut hi = peak + lambda * TRUNCATION_LOG;
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    quad::brent(g, peak, hi, 1e-12 * hi).unwrap_or(hi)
}

impl SpectralDensity {
    pub fn flat(level: f64, cutoff: f64) -> Result<Self> {
        let j = SpectralDensity::Flat { level, cutoff };
        j.validate()?;
        Ok(j)
    }

    pub fn ohmic(eta: f64, alpha: f64, cutoff: f64) -> Result<Self> {
        let j = SpectralDensity::OhmicCutoff { eta, alpha, cutoff };
        j.validate()?;
        Ok(j)
    }

    pub fn bosonic_thermal(base: SpectralDensity, temperature: f64) -> Result<Self> {
        let j = SpectralDensity::BosonicThermal { base: Box::new(base), temperature };
        j.validate()?;
        Ok(j)
    }

    pub fn fermionic_band(rho_max: f64, half_bandwidth: f64, temperature: f64) -> Result<Self> {
        let j = SpectralDensity::FermionicBand { rho_max, half_bandwidth, temperature };
        j.validate()?;
        Ok(j)
    }

    pub fn kondo(jk: f64, rho_f: f64, half_bandwidth: f64, mu: f64, temperature: f64) -> Result<Self> {
        let j = SpectralDensity::KondoParticleHole { jk, rho_f, half_bandwidth, mu, temperature };
        j.validate()?;
        Ok(j)
    }

    pub fn photonic(eta: f64, omega_plus: f64, cutoff: f64) -> Result<Self> {
        let j = SpectralDensity::PhotonicBandEdge { eta, omega_plus, cutoff };
        j.validate()?;
        Ok(j)
    }

    pub fn tabulated(omega: Vec<f64>, values: Vec<f64>, low_frequency: Option<LowFrequencyLaw>) -> Result<Self> {
        let j = SpectralDensity::Tabulated { omega, values, low_frequency };
        j.validate()?;
        Ok(j)
    }

    /// Parse two-column text (`ω J`), whitespace or comma separated, with `#`
    /// comment lines.
    pub fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut omega = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::InvalidSpectralDensity(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    Error::InvalidSpectralDensity(format!("line {}: cannot parse '{s}': {e}", lineno + 1))
                })
            };
            omega.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        Ok((omega, values))
    }

    /// Check parameter ranges and tabulated data.
    pub fn validate(&self) -> Result<()> {
        use SpectralDensity::*;
        let bad = |msg: String| Err(Error::InvalidSpectralDensity(msg));
        let finite_nonneg = |name: &str, x: f64| -> Result<()> {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpectralDensity(format!("{name} must be finite and >= 0, got {x}")))
            }
        };
        let finite_pos = |name: &str, x: f64| -> Result<()> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpectralDensity(format!("{name} must be finite and > 0, got {x}")))
            }
        };
        match self {
            Flat { level, cutoff } => {
                finite_nonneg("level", *level)?;
                finite_pos("cutoff", *cutoff)
            }
            OhmicCutoff { eta, alpha, cutoff } => {
                finite_nonneg("eta", *eta)?;
                finite_nonneg("alpha", *alpha)?;
                finite_pos("cutoff", *cutoff)
            }
            BosonicThermal { base, temperature } => {
                finite_nonneg("temperature", *temperature)?;
                match base.as_ref() {
                    OhmicCutoff { .. } | PhotonicBandEdge { .. } => {}
                    Tabulated { omega, .. } if omega.first().is_some_and(|&w| w >= 0.0) => {}
                    _ => {
                        return bad("bosonic thermal base must vanish for negative frequencies".into());
                    }
                }
                base.validate()
            }
            FermionicBand { rho_max, half_bandwidth, temperature } => {
                finite_nonneg("rho_max", *rho_max)?;
                finite_pos("half_bandwidth", *half_bandwidth)?;
                finite_nonneg("temperature", *temperature)
            }
            KondoParticleHole { jk, rho_f, half_bandwidth, mu, temperature } => {
                if !jk.is_finite() {
                    return bad(format!("jk must be finite, got {jk}"));
                }
                finite_nonneg("rho_f", *rho_f)?;
                finite_pos("half_bandwidth", *half_bandwidth)?;
                finite_nonneg("temperature", *temperature)?;
                if !(mu.abs() < *half_bandwidth) {
                    return bad(format!("chemical potential {mu} must lie inside the band"));
                }
                Ok(())
            }
            PhotonicBandEdge { eta, omega_plus, cutoff } => {
                finite_nonneg("eta", *eta)?;
                if !omega_plus.is_finite() {
                    return bad("omega_plus must be finite".into());
                }
                finite_pos("cutoff", *cutoff)
            }
            Tabulated { omega, values, low_frequency } => {
                if omega.len() != values.len() {
                    return bad(format!("{} abscissae but {} values", omega.len(), values.len()));
                }
                if omega.len() < 2 {
                    return bad("tabulated density needs at least two samples".into());
                }
                if let Some(i) = omega.windows(2).position(|w| !(w[1] > w[0])) {
                    return bad(format!(
                        "abscissae not strictly increasing at index {}: {} then {}",
                        i + 1,
                        omega[i],
                        omega[i + 1]
                    ));
                }
                if omega.iter().any(|x| !x.is_finite()) {
                    return bad("non-finite abscissa".into());
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return bad(format!("tabulated value {v} is negative or non-finite"));
                }
                if let Some(law) = low_frequency {
                    if !(law.coefficient.is_finite() && law.exponent >= 0.0) {
                        return bad("invalid low-frequency law".into());
                    }
                }
                Ok(())
            }
        }
    }

    /// `J(ω)`. Exactly zero outside the support; the mean of the one-sided
    /// limits at a jump.
    pub fn evaluate(&self, omega: f64) -> f64 {
        use SpectralDensity::*;
        match self {
            Flat { level, cutoff } => {
                let a = omega.abs();
                if a < *cutoff {
                    *level
                } else if a == *cutoff {
                    0.5 * level
                } else {
                    0.0
                }
            }
            OhmicCutoff { eta, alpha, cutoff } => {
                if omega > 0.0 {
                    2.0 * PI * eta * omega.powf(*alpha) * (-omega / cutoff).exp()
                } else if omega == 0.0 && *alpha == 0.0 {
                    PI * eta
                } else {
                    0.0
                }
            }
            BosonicThermal { base, temperature } => {
                let beta = beta_of(*temperature);
                if beta.is_infinite() {
                    return if omega >= 0.0 { base.evaluate(omega) } else { 0.0 };
                }
                if omega == 0.0 {
                    return match base.low_frequency_law() {
                        Some(law) if law.edge == 0.0 && law.exponent == 1.0 => law.coefficient * temperature,
                        Some(law) if law.edge == 0.0 && law.exponent > 1.0 => 0.0,
                        Some(law) if law.edge > 0.0 => 0.0,
                        _ => f64::INFINITY,
                    };
                }
                let x = beta * omega.abs();
                if omega > 0.0 {
                    // ρ(ω)[1 + B(ω)] = ρ(ω) / (1 − e^{−βω})
                    base.evaluate(omega) / (-(-x).exp_m1())
                } else {
                    base.evaluate(-omega) / x.exp_m1()
                }
            }
            FermionicBand { rho_max, half_bandwidth, temperature } => {
                let w = *half_bandwidth;
                if omega.abs() > w {
                    return 0.0;
                }
                let rho = rho_max * (1.0 - (omega / w).powi(2));
                0.25 * rho * fermi(-omega, beta_of(*temperature))
            }
            KondoParticleHole { jk, rho_f, half_bandwidth, mu, temperature } => {
                kondo_j(*jk, *rho_f, *half_bandwidth, *mu, *temperature, omega)
            }
            PhotonicBandEdge { eta, omega_plus, cutoff } => {
                let x = omega - omega_plus;
                if x > 0.0 {
                    2.0 * PI * eta * x.sqrt() * (-x / cutoff).exp()
                } else {
                    0.0
                }
            }
            Tabulated { omega: xs, values, .. } => {
                let n = xs.len();
                if omega < xs[0] || omega > xs[n - 1] {
                    return 0.0;
                }
                if omega == xs[0] {
                    return 0.5 * values[0];
                }
                if omega == xs[n - 1] {
                    return 0.5 * values[n - 1];
                }
                let k = xs.partition_point(|&x| x <= omega) - 1;
                let t = (omega - xs[k]) / (xs[k + 1] - xs[k]);
                values[k] + t * (values[k + 1] - values[k])
            }
        }
    }

    /// Finite interval outside of which `J` is zero or negligible (below 1e-12
    /// of its peak).
    pub fn support(&self) -> (f64, f64) {
        use SpectralDensity::*;
        match self {
            Flat { cutoff, .. } => (-cutoff, *cutoff),
            OhmicCutoff { alpha, cutoff, .. } => (0.0, decay_cutoff(*alpha, *cutoff)),
            BosonicThermal { base, temperature } => {
                let (a, b) = base.support();
                if *temperature == 0.0 {
                    (a, b)
                } else {
                    (-b, b)
                }
            }
            FermionicBand { half_bandwidth, temperature, .. } => {
                if *temperature == 0.0 {
                    (0.0, *half_bandwidth)
                } else {
                    (-half_bandwidth, *half_bandwidth)
                }
            }
            KondoParticleHole { half_bandwidth, temperature, .. } => {
                if *temperature == 0.0 {
                    (0.0, 2.0 * half_bandwidth)
                } else {
                    (-2.0 * half_bandwidth, 2.0 * half_bandwidth)
                }
            }
            PhotonicBandEdge { omega_plus, cutoff, .. } => (*omega_plus, omega_plus + decay_cutoff(0.5, *cutoff)),
            Tabulated { omega, .. } => (omega[0], omega[omega.len() - 1]),
        }
    }

    /// Interior points where `J` has a kink or jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        use SpectralDensity::*;
        let (a, b) = self.support();
        let mut pts = match self {
            BosonicThermal { base, temperature } => {
                let mut p = base.breakpoints();
                if *temperature > 0.0 {
                    p.push(0.0);
                    let neg: Vec<f64> = p.iter().map(|x| -x).collect();
                    p.extend(neg);
                }
                p
            }
            FermionicBand { .. } => vec![0.0],
            KondoParticleHole { half_bandwidth, mu, .. } => {
                let w = *half_bandwidth;
                let p = [0.0, w - mu, w + mu];
                p.iter().flat_map(|&x| [x, -x]).collect()
            }
            Tabulated { omega, .. } => omega.clone(),
            _ => Vec::new(),
        };
        pts.retain(|&x| x > a && x < b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Points where `J` is discontinuous.
    pub fn jump_points(&self) -> Vec<f64> {
        use SpectralDensity::*;
        match self {
            Flat { level, cutoff } if *level > 0.0 => vec![-cutoff, *cutoff],
            OhmicCutoff { eta, alpha, .. } if *alpha == 0.0 && *eta > 0.0 => vec![0.0],
            BosonicThermal { base, temperature } if *temperature == 0.0 => base.jump_points(),
            FermionicBand { rho_max, temperature, .. } if *temperature == 0.0 && *rho_max > 0.0 => vec![0.0],
            Tabulated { omega, values, .. } => {
                let mut p = Vec::new();
                if values[0] > 0.0 {
                    p.push(omega[0]);
                }
                if values[values.len() - 1] > 0.0 {
                    p.push(omega[omega.len() - 1]);
                }
                p
            }
            _ => Vec::new(),
        }
    }

    pub fn is_jump(&self, omega: f64) -> bool {
        self.jump_points().contains(&omega)
    }

    /// One-sided limit `J(ω⁺)`.
    pub fn evaluate_right(&self, omega: f64) -> f64 {
        if self.is_jump(omega) {
            let (a, b) = self.support();
            self.evaluate(omega + 1e-13 * (b - a).max(omega.abs()))
        } else {
            self.evaluate(omega)
        }
    }

    /// One-sided limit `J(ω⁻)`.
    pub fn evaluate_left(&self, omega: f64) -> f64 {
        if self.is_jump(omega) {
            let (a, b) = self.support();
            self.evaluate(omega - 1e-13 * (b - a).max(omega.abs()))
        } else {
            self.evaluate(omega)
        }
    }

    /// Frequency intervals on which `J` vanishes identically; unbounded ends
    /// are infinite.
    pub fn zero_intervals(&self) -> Vec<(f64, f64)> {
        use SpectralDensity::*;
        let inf = f64::INFINITY;
        match self {
            Flat { cutoff, .. } => vec![(-inf, -cutoff), (*cutoff, inf)],
            OhmicCutoff { .. } => vec![(-inf, 0.0)],
            PhotonicBandEdge { omega_plus, .. } => vec![(-inf, *omega_plus)],
            BosonicThermal { base, temperature } => {
                if *temperature == 0.0 {
                    base.zero_intervals()
                } else {
                    Vec::new()
                }
            }
            FermionicBand { half_bandwidth: w, temperature, .. } => {
                if *temperature == 0.0 {
                    vec![(-inf, 0.0), (*w, inf)]
                } else {
                    vec![(-inf, -w), (*w, inf)]
                }
            }
            KondoParticleHole { half_bandwidth: w, temperature, .. } => {
                if *temperature == 0.0 {
                    vec![(-inf, 0.0), (2.0 * w, inf)]
                } else {
                    vec![(-inf, -2.0 * w), (2.0 * w, inf)]
                }
            }
            Tabulated { omega, .. } => vec![(-inf, omega[0]), (omega[omega.len() - 1], inf)],
        }
    }

    /// Behaviour of `J` just above the lower edge of its support, when known.
    pub fn low_frequency_law(&self) -> Option<LowFrequencyLaw> {
        use SpectralDensity::*;
        match self {
            Flat { level, cutoff } => Some(LowFrequencyLaw { coefficient: *level, exponent: 0.0, edge: -cutoff }),
            OhmicCutoff { eta, alpha, .. } => {
                Some(LowFrequencyLaw { coefficient: 2.0 * PI * eta, exponent: *alpha, edge: 0.0 })
            }
            PhotonicBandEdge { eta, omega_plus, .. } => {
                Some(LowFrequencyLaw { coefficient: 2.0 * PI * eta, exponent: 0.5, edge: *omega_plus })
            }
            BosonicThermal { base, temperature } if *temperature == 0.0 => base.low_frequency_law(),
            FermionicBand { rho_max, temperature, .. } if *temperature == 0.0 => {
                Some(LowFrequencyLaw { coefficient: 0.25 * rho_max, exponent: 0.0, edge: 0.0 })
            }
            KondoParticleHole { jk, rho_f, half_bandwidth, mu, temperature } if *temperature == 0.0 => {
                let rho_mu = rho_f * (1.0 - (mu / half_bandwidth).powi(2));
                Some(LowFrequencyLaw { coefficient: PI * jk * jk * rho_mu * rho_mu, exponent: 1.0, edge: 0.0 })
            }
            Tabulated { low_frequency, .. } => *low_frequency,
            _ => None,
        }
    }

    /// Same family with the amplitude multiplied by `s`.
    pub fn scaled(&self, s: f64) -> SpectralDensity {
        use SpectralDensity::*;
        match self.clone() {
            Flat { level, cutoff } => Flat { level: level * s, cutoff },
            OhmicCutoff { eta, alpha, cutoff } => OhmicCutoff { eta: eta * s, alpha, cutoff },
            BosonicThermal { base, temperature } => BosonicThermal { base: Box::new(base.scaled(s)), temperature },
            FermionicBand { rho_max, half_bandwidth, temperature } => {
                FermionicBand { rho_max: rho_max * s, half_bandwidth, temperature }
            }
            KondoParticleHole { jk, rho_f, half_bandwidth, mu, temperature } => {
                KondoParticleHole { jk: jk * s.sqrt(), rho_f, half_bandwidth, mu, temperature }
            }
            PhotonicBandEdge { eta, omega_plus, cutoff } => PhotonicBandEdge { eta: eta * s, omega_plus, cutoff },
            Tabulated { omega, values, low_frequency } => Tabulated {
                omega,
                values: values.into_iter().map(|v| v * s).collect(),
                low_frequency: low_frequency.map(|l| LowFrequencyLaw { coefficient: l.coefficient * s, ..l }),
            },
        }
    }

    /// Largest value of `J` on a dense sample of the support.
    pub fn peak_estimate(&self) -> f64 {
        let (a, b) = self.support();
        let n = 2000;
        (0..=n)
            .map(|k| self.evaluate(a + (b - a) * k as f64 / n as f64))
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// `∫ J dω` over the support.
    pub fn total_weight(&self) -> Result<f64> {
        let (a, b) = self.support();
        let (v, _) = quad::integrate(|w| self.evaluate(w), a, b, &self.breakpoints(), QuadOptions::default())?;
        Ok(v)
    }
}

/// Kondo particle-hole density at frequency ω.
fn kondo_j(jk: f64, rho_f: f64, w: f64, mu: f64, temperature: f64, omega: f64) -> f64 {
    let rho = |e: f64| if e.abs() < w { rho_f * (1.0 - (e / w).powi(2)) } else { 0.0 };
    let beta = beta_of(temperature);
    let mut lo = (-w).max(-w - omega);
    let mut hi = w.min(w - omega);
    if beta.is_infinite() {
        // Occupied initial state below μ, empty final state above μ.
        lo = lo.max(mu - omega);
        hi = hi.min(mu);
    }
    if !(hi > lo) {
        return 0.0;
    }
    let f = |e: f64| rho(e) * rho(e + omega) * fermi(e - mu, beta) * fermi(mu - e - omega, beta);
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 2000 };
    let v = quad::integrate(f, lo, hi, &[mu, mu - omega], opts).map(|x| x.0).unwrap_or_else(|_| {
        // Fall back to a looser target rather than failing a pointwise evaluation.
        let loose = QuadOptions { rel_tol: 1e-9, ..opts };
        quad::integrate(f, lo, hi, &[mu, mu - omega], loose).map(|x| x.0).unwrap_or(f64::NAN)
    });
    PI * jk * jk * v
}

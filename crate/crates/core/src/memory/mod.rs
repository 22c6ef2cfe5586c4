//! Non-Markovian dynamics: the scalar memory-kernel toy model, the matrix
//! Born equation and an exact single-excitation oracle.
//!
//! The toy model is `f'(t) = −iω0 f(t) + ∫₀ᵗ K(t − s) f(s) ds` with
//! `K(t) = −G(t) = −∫ dω/2π J(ω) e^{−iωt}`.

mod born;
mod branch_cut;
mod oracle;
mod volterra;

pub use born::{born_solve, BornOptions, DEFAULT_HISTORY_CAP};
pub use branch_cut::branch_cut_solve;
pub use oracle::{discretize_modes, wigner_weisskopf_oracle, WignerWeisskopf};
pub use volterra::{time_local_solve, volterra_fixed_step, volterra_solve, VolterraState, HALVING_TOL};

use serde::Serialize;

use crate::bath::{gamma_coefficient, FrequencyGrid, HilbertTransform, SpectralDensity};
use crate::error::{Error, Result};
use crate::quad::{self, gamma_fn};
use crate::C64;

/// Scalar memory-kernel problem.
#[derive(Clone, Debug)]
pub struct ToyModelProblem {
    pub omega0: f64,
    pub j: SpectralDensity,
}

impl ToyModelProblem {
    pub fn new(omega0: f64, j: SpectralDensity) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::InvalidArgument(format!("omega0 must be finite, got {omega0}")));
        }
        j.validate()?;
        Ok(Self { omega0, j })
    }

    /// `K(0) = −G(0)`.
    pub fn kernel_at_zero(&self) -> Result<C64> {
        Ok(-C64::new(self.j.total_weight()? / (2.0 * std::f64::consts::PI), 0.0))
    }

    /// Largest frequency the time grid has to resolve.
    pub fn frequency_scale(&self) -> f64 {
        self.omega0.abs().max(bath_scale(&self.j))
    }

    /// Step satisfying `dt ≤ 0.05 / max(|ω0|, bath scale)`.
    pub fn suggested_dt(&self) -> f64 {
        0.05 / self.frequency_scale().max(f64::MIN_POSITIVE)
    }
}

/// Characteristic bandwidth parameter of a density.
pub(crate) fn bath_scale(j: &SpectralDensity) -> f64 {
    use SpectralDensity::*;
    match j {
        Flat { cutoff, .. } => *cutoff,
        OhmicCutoff { cutoff, .. } => *cutoff,
        PhotonicBandEdge { omega_plus, cutoff, .. } => omega_plus.abs() + cutoff,
        FermionicBand { half_bandwidth, temperature, .. } => half_bandwidth.max(*temperature),
        KondoParticleHole { half_bandwidth, temperature, .. } => (2.0 * half_bandwidth).max(*temperature),
        BosonicThermal { base, temperature } => bath_scale(base).max(*temperature),
        Tabulated { omega, .. } => omega.iter().fold(0.0, |m, w| m.max(w.abs())),
    }
}

/// `G(k dt)` for `k = 0..n`.
pub(crate) fn correlation_samples(j: &SpectralDensity, dt: f64, n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if j.correlation_closed_form(0.0).is_some() {
        return Ok((0..n).map(|k| j.correlation_closed_form(k as f64 * dt).unwrap()).collect());
    }
    Ok(FrequencyGrid::new(j, (n - 1) as f64 * dt)?.eval_uniform(dt, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ToyMethod {
    Volterra,
    TimeLocal,
    Markov,
    BranchCut,
    Asymptotic,
}

/// Real solution of `ω = ω0 + R(ω)` inside a gap of `J`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Pole {
    pub omega: f64,
    /// `[1 − R'(ω_p)]⁻¹`.
    pub residue: f64,
    /// `|ω_p − ω0 − R(ω_p)|`.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToyModelSolution {
    pub times: Vec<f64>,
    pub f: Vec<C64>,
    pub method: ToyMethod,
    /// `ω0 + R(ω0)`.
    pub omega_tilde: f64,
    /// `2/J(ω0)`, infinite in a gap.
    pub tau_r: f64,
    pub t_nm: Option<f64>,
    pub poles: Vec<Pole>,
    /// `1 − Σ Z_p − (branch-cut weight at t = 0)`, branch-cut runs only.
    pub pole_weight_deficit: Option<f64>,
}

impl ToyModelSolution {
    pub(crate) fn assemble(p: &ToyModelProblem, times: Vec<f64>, f: Vec<C64>, method: ToyMethod) -> Result<Self> {
        let m = markov_parameters(p)?;
        Ok(Self {
            times,
            f,
            method,
            omega_tilde: m.0,
            tau_r: m.1,
            t_nm: t_nm(p).ok().flatten(),
            poles: find_poles(p)?,
            pole_weight_deficit: None,
        })
    }

    /// `|f|²` column.
    pub fn populations(&self) -> Vec<f64> {
        self.f.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Amplitudes in the frame rotating at ω0.
    pub fn interaction_picture(&self, omega0: f64) -> Vec<C64> {
        self.times.iter().zip(&self.f).map(|(t, z)| z * C64::from_polar(1.0, omega0 * t)).collect()
    }
}

/// `(ω̃0, τ_R)`.
pub(crate) fn markov_parameters(p: &ToyModelProblem) -> Result<(f64, f64)> {
    let g = gamma_coefficient(&p.j, p.omega0)?;
    let tau_r = if g.gamma > 0.0 { 2.0 / g.gamma } else { f64::INFINITY };
    Ok((p.omega0 + g.lamb, tau_r))
}

/// `f_M(t) = f0 exp(−iω̃0 t − t/τ_R)`.
pub fn markov_solution(p: &ToyModelProblem, f0: C64, times: &[f64]) -> Result<ToyModelSolution> {
    let (w, tau_r) = markov_parameters(p)?;
    let rate = if tau_r.is_finite() { 1.0 / tau_r } else { 0.0 };
    let f = times.iter().map(|&t| f0 * C64::new(-rate * t, -w * t).exp()).collect();
    ToyModelSolution::assemble(p, times.to_vec(), f, ToyMethod::Markov)
}

/// Bound-state poles in the zero set of `J`.
pub fn find_poles(p: &ToyModelProblem) -> Result<Vec<Pole>> {
    let h = HilbertTransform::new(&p.j);
    let (lo, hi) = p.j.support();
    let width = (hi - lo).max(1.0);
    let edge_eps = 1e-9 * width;
    let far = 4.0 * (p.omega0.abs() + lo.abs() + hi.abs() + width);
    let resid = |w: f64| -> Result<f64> { Ok(w - p.omega0 - h.value(w)?) };

    let mut poles = Vec::new();
    for (a, b) in p.j.zero_intervals() {
        let a = if a.is_finite() { a + edge_eps } else { b - far };
        let b = if b.is_finite() { b - edge_eps } else { a + far };
        if !(b > a) {
            continue;
        }
        // Sample for sign changes; R is monotone inside a gap so one root per
        // gap is typical, but the scan does not rely on it.
        let n = 64;
        let xs: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        let vals = xs.iter().map(|&x| resid(x)).collect::<Result<Vec<f64>>>()?;
        for k in 0..n {
            if vals[k] == 0.0 || vals[k].signum() != vals[k + 1].signum() {
                let root = quad::brent(|w| resid(w).unwrap_or(f64::NAN), xs[k], xs[k + 1], 1e-14 * width)
                    .map_err(|e| Error::RootFinding(format!("pole in gap ({a}, {b}): {e}")))?;
                if p.j.evaluate(root) != 0.0 {
                    continue;
                }
                let dr = h.derivative_in_gap(root)?;
                let residual = resid(root)?.abs();
                if residual > 1e-9 * width {
                    return Err(Error::RootFinding(format!(
                        "pole at {root} has residual {residual:.3e}"
                    )));
                }
                poles.push(Pole { omega: root, residue: 1.0 / (1.0 - dr), residual });
            }
        }
    }
    poles.dedup_by(|x, y| (x.omega - y.omega).abs() <= 1e-12 * width);
    Ok(poles)
}

/// Leading algebraic term from the lower edge `a` of the support, where
/// `J ≈ c (ω − a)^α`:
/// `f0 c Γ(α+1) e^{−iat} / [2π (it)^{α+1} (a − ω0 − R(a))²]`.
pub fn asymptotic_tail(p: &ToyModelProblem, f0: C64, t: f64) -> Result<C64> {
    let (c, alpha, a, denom) = tail_parameters(p)?;
    Ok(tail_value(f0, c, alpha, a, denom, t))
}

fn tail_parameters(p: &ToyModelProblem) -> Result<(f64, f64, f64, f64)> {
    let law = p.j.low_frequency_law().ok_or(Error::MissingLowFrequencyLaw)?;
    let r_edge = HilbertTransform::new(&p.j).value(law.edge)?;
    let denom = law.edge - p.omega0 - r_edge;
    Ok((law.coefficient, law.exponent, law.edge, denom * denom))
}

fn tail_value(f0: C64, c: f64, alpha: f64, a: f64, denom: f64, t: f64) -> C64 {
    let it = C64::new(0.0, t).powf(alpha + 1.0);
    f0 * c * gamma_fn(alpha + 1.0) * C64::from_polar(1.0, -a * t) / (it * 2.0 * std::f64::consts::PI * denom)
}

/// Asymptotic-tail samples tagged as a solution.
pub fn asymptotic_solution(p: &ToyModelProblem, f0: C64, times: &[f64]) -> Result<ToyModelSolution> {
    let (c, alpha, a, denom) = tail_parameters(p)?;
    let f = times
        .iter()
        .map(|&t| if t > 0.0 { tail_value(f0, c, alpha, a, denom, t) } else { C64::new(f64::NAN, f64::NAN) })
        .collect();
    ToyModelSolution::assemble(p, times.to_vec(), f, ToyMethod::Asymptotic)
}

/// Late crossing of `|f_M(t)| = |tail(t)|`. `None` when the Markov
/// exponential never rises above the tail; infinite when there is no decay.
pub fn t_nm(p: &ToyModelProblem) -> Result<Option<f64>> {
    let (_, tau_r) = markov_parameters(p)?;
    if !tau_r.is_finite() {
        return Ok(Some(f64::INFINITY));
    }
    let (c, alpha, a, denom) = tail_parameters(p)?;
    let one = C64::new(1.0, 0.0);
    // log(|f_M| / |tail|), maximal at t = (α + 1) τ_R.
    let log_ratio = |t: f64| -t / tau_r - tail_value(one, c, alpha, a, denom, t).norm().ln();
    let t_peak = (alpha + 1.0) * tau_r;
    if log_ratio(t_peak) <= 0.0 {
        return Ok(None);
    }
    let mut lo = t_peak;
    let mut hi = 2.0 * t_peak;
    while log_ratio(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::RootFinding("t_NM bracket diverged".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if log_ratio(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

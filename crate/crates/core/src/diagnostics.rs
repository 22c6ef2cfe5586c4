//! Timescale hierarchy of a system-bath model and the three-part verdict on
//! whether a Lindblad description is justified.
//!
//! All times are in the inverse units of the Hamiltonian. The coupling
//! strength is folded into `J`, so the weak-coupling parameter is the proxy
//! `|G(0)|^{1/2} τ_B`: `|G(0)|^{1/2}` plays the role of the coupling
//! frequency λ and `τ_B` is the threshold correlation time.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write;

use crate::bath::{BathCoupling, SpectralDensity};
use crate::eigenops::{bohr_frequencies, default_degeneracy_tol, BohrFrequencySet};
use crate::error::{Error, Result};
use crate::master::format_float;
use crate::memory::{self, ToyModelProblem};
use crate::qops::{self, CMat, HermitianOperator, SpectralDecomposition};
use crate::C64;

/// Rule parameters. The defaults are artifact choices standing in for "≪".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub born_pass: f64,
    pub born_marginal: f64,
    /// Upper bound on `min(τ_B, τ_H)/τ_R`.
    pub markov_pass: f64,
    /// Upper bound on the probing-window variation of `J`.
    pub window_pass: f64,
    /// Factor by which both Markov bounds are relaxed for a marginal verdict.
    pub markov_relax: f64,
    /// Lower bound on off-diagonal `ΔΩ τ_R`.
    pub rwa_pass: f64,
    pub rwa_marginal: f64,
    /// Probing window is `Ω ± window_factor/τ_R`.
    pub window_factor: f64,
    /// `τ_B` threshold: first time with `|G(t)| < fraction·|G(0)|`.
    pub tau_b_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            born_pass: 0.1,
            born_marginal: 0.3,
            markov_pass: 0.1,
            window_pass: 0.2,
            markov_relax: 3.0,
            rwa_pass: 10.0,
            rwa_marginal: 3.0,
            window_factor: 2.0,
            tau_b_fraction: 0.01,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = [
            self.born_pass,
            self.born_marginal,
            self.markov_pass,
            self.window_pass,
            self.markov_relax,
            self.rwa_pass,
            self.rwa_marginal,
            self.window_factor,
            self.tau_b_fraction,
        ]
        .iter()
        .all(|x| x.is_finite() && *x > 0.0);
        if !ok || self.born_marginal < self.born_pass || self.rwa_marginal > self.rwa_pass || self.markov_relax < 1.0 {
            return Err(Error::InvalidArgument(format!("inconsistent diagnostic thresholds {self:?}")));
        }
        if self.tau_b_fraction >= 1.0 {
            return Err(Error::InvalidArgument("tau_b_fraction must be below 1".into()));
        }
        Ok(())
    }
}

/// `τ_B = ∫ t|G| dt / ∫ |G| dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauBIntegral {
    Finite(f64),
    /// Still growing under domain doubling; last estimate and the domain used.
    Divergent { last_estimate: f64, t_max: f64 },
    /// The bath has no correlations at all.
    Zero,
}

impl TauBIntegral {
    pub fn is_divergent(&self) -> bool {
        matches!(self, TauBIntegral::Divergent { .. })
    }

    fn to_json(self) -> Value {
        match self {
            TauBIntegral::Finite(v) => json!({ "status": "finite", "value": v }),
            TauBIntegral::Divergent { last_estimate, t_max } => {
                json!({ "status": "divergent", "last_estimate": last_estimate, "t_max": t_max })
            }
            TauBIntegral::Zero => json!({ "status": "zero", "value": 0.0 }),
        }
    }
}

/// Per-transition timescales.
#[derive(Clone, Debug)]
pub struct Transition {
    pub omega: f64,
    /// `J(Ω)` of the most strongly coupled bath.
    pub rate: f64,
    /// `2/J(Ω)`, infinite when `J(Ω) = 0`.
    pub tau_r: f64,
    /// `1/|Ω|`.
    pub tau_h: f64,
    /// `max |J − J(Ω)|/J(Ω)` over the probing window.
    pub window_variation: f64,
    pub t_nm: Option<f64>,
    /// `min_{Ω' ≠ Ω} |Ω − Ω'| τ_R`.
    pub nearest_secularity: f64,
}

#[derive(Clone, Debug)]
pub struct TimescaleReport {
    pub tau_b_integral: TauBIntegral,
    pub tau_b_threshold: f64,
    /// `1/max|Ω|` over active transitions.
    pub tau_h: f64,
    pub transitions: Vec<Transition>,
    /// `|G(0)|`.
    pub g0: f64,
    pub coupling_parameter: f64,
    /// `|Ω_i − Ω_j| min(τ_R,i, τ_R,j)`, zero on the diagonal.
    pub secularity: Vec<Vec<f64>>,
    /// `min |ΔΩ| τ_R²` over pairs with `ΔΩ τ_R` below the RWA pass bound.
    pub t_rwa: f64,
    pub t_nm: Option<f64>,
    /// Median of `|ΔΩ| τ_R` over adjacent `Ω > 0` transitions; the typical spacing
    /// where the smallest gap is an outlier.
    pub median_gap_secularity: Option<f64>,
    pub thresholds: Thresholds,
}

/// Densities whose largest value at each frequency bounds the rates.
fn effective_densities(coupling: &BathCoupling) -> Result<Vec<SpectralDensity>> {
    Ok(match coupling {
        BathCoupling::Shared { density, weights } => {
            let top = qops::eig_hermitian_matrix(&qops::hermitian_part(weights))?
                .eigenvalues
                .last()
                .copied()
                .unwrap_or(0.0)
                .max(0.0);
            vec![density.scaled(top)]
        }
        BathCoupling::Independent(js) => js.clone(),
    })
}

/// Bohr frequencies carrying a nonzero matrix element of some coupling
/// operator (operators given in the eigenbasis).
pub fn active_transitions(bohr: &BohrFrequencySet, couplings: &[CMat]) -> Vec<f64> {
    let scales: Vec<f64> = couplings.iter().map(qops::max_abs).collect();
    bohr.frequencies
        .iter()
        .zip(&bohr.level_pairs)
        .filter(|(_, pairs)| {
            couplings
                .iter()
                .zip(&scales)
                .any(|(a, s)| pairs.iter().any(|&(m, n)| a[(m, n)].norm() > 1e-12 * s))
        })
        .map(|(w, _)| *w)
        .collect()
}

const TAU_B_DOUBLINGS: usize = 7;

/// Smallest `s ∈ [0, 1]` with `|a + s(b − a)| = c`, given `|a| ≥ c > |b|`.
/// Interpolating `G` rather than `|G|` keeps nearby zeros of `G` harmless.
fn crossing(a: C64, b: C64, c: f64) -> f64 {
    let d = b - a;
    let (qa, qb, qc) = (d.norm_sqr(), 2.0 * (a.conj() * d).re, a.norm_sqr() - c * c);
    if qa == 0.0 {
        return 1.0;
    }
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    let s = (-qb - disc) / (2.0 * qa);
    s.clamp(0.0, 1.0)
}

fn tau_b(j: &SpectralDensity, fraction: f64) -> Result<(TauBIntegral, f64, f64)> {
    let scale = memory::bath_scale(j).max(f64::MIN_POSITIVE);
    let dt = 0.05 / scale;
    let t0 = 10.0 / scale;
    let per = (t0 / dt).round() as usize;
    let n = per * (1 << TAU_B_DOUBLINGS) + 1;
    let g = memory::correlation_samples(j, dt, n)?;
    let g0 = g[0].norm();
    if g0 == 0.0 {
        return Ok((TauBIntegral::Zero, 0.0, 0.0));
    }
    let mag: Vec<f64> = g.iter().map(|z| z.norm()).collect();

    let mut threshold = f64::INFINITY;
    for k in 1..n {
        if mag[k] < fraction * g0 {
            threshold = (k as f64 - 1.0 + crossing(g[k - 1], g[k], fraction * g0)) * dt;
            break;
        }
    }

    // Trapezoid partial sums of |G| and t|G| at t0 2^k.
    let (mut i1, mut i2) = (0.0, 0.0);
    let mut marks = Vec::new();
    let mut next = per;
    for k in 1..n {
        let (ta, tb) = ((k - 1) as f64 * dt, k as f64 * dt);
        i1 += 0.5 * dt * (mag[k - 1] + mag[k]);
        i2 += 0.5 * dt * (ta * mag[k - 1] + tb * mag[k]);
        if k == next {
            marks.push((tb, i1, i2));
            next *= 2;
        }
    }
    let incr: Vec<f64> = marks.windows(2).map(|w| w[1].2 - w[0].2).collect();
    let growing = incr.windows(2).rev().take(2).all(|w| w[0] > 0.0 && w[1] / w[0] > 0.7);
    let &(t_max, i1, i2) = marks.last().unwrap();
    let integral = if growing {
        TauBIntegral::Divergent { last_estimate: i2 / i1, t_max }
    } else {
        TauBIntegral::Finite(i2 / i1)
    };
    Ok((integral, threshold, g0))
}

fn window_variation(js: &[SpectralDensity], omega: f64, rate: f64, half_width: f64) -> f64 {
    let j_max = |w: f64| js.iter().map(|j| j.evaluate(w)).fold(0.0, f64::max);
    let (lo, hi) = (omega - half_width, omega + half_width);
    let mut pts: Vec<f64> = (0..=400).map(|k| lo + (hi - lo) * k as f64 / 400.0).collect();
    let mut one_sided = Vec::new();
    for j in js {
        for b in j.breakpoints().into_iter().chain(j.jump_points()) {
            if b > lo && b < hi {
                pts.push(b);
                one_sided.push(j.evaluate_left(b));
                one_sided.push(j.evaluate_right(b));
            }
        }
    }
    let vals = pts.iter().map(|&w| j_max(w)).chain(one_sided);
    if rate == 0.0 {
        return if vals.into_iter().all(|v| v == 0.0) { 0.0 } else { f64::INFINITY };
    }
    vals.map(|v| (v - rate).abs() / rate).fold(0.0, f64::max)
}

/// Timescales for `H_S` (through its decomposition and Bohr set) and coupling
/// operators given in the eigenbasis.
pub fn timescales(
    bohr: &BohrFrequencySet,
    couplings: &[CMat],
    coupling: &BathCoupling,
    thresholds: &Thresholds,
) -> Result<TimescaleReport> {
    thresholds.validate()?;
    if couplings.len() != coupling.n_labels() {
        return Err(Error::DimensionMismatch(format!(
            "{} coupling operators but the bath has {} labels",
            couplings.len(),
            coupling.n_labels()
        )));
    }
    let js = effective_densities(coupling)?;
    let omegas = active_transitions(bohr, couplings);

    // Correlation time from the density with the largest correlation weight.
    let mut best: Option<(TauBIntegral, f64, f64)> = None;
    for j in &js {
        let t = tau_b(j, thresholds.tau_b_fraction)?;
        if best.as_ref().map_or(true, |b| t.2 > b.2) {
            best = Some(t);
        }
    }
    let (tau_b_integral, tau_b_threshold, g0) = best.unwrap_or((TauBIntegral::Zero, 0.0, 0.0));

    let scale = js.iter().map(memory::bath_scale).fold(0.0, f64::max).max(1.0);
    let mut transitions: Vec<Transition> = omegas
        .iter()
        .map(|&omega| {
            let rate = js.iter().map(|j| j.evaluate_right(omega)).fold(0.0, f64::max);
            let tau_r = if rate > 0.0 { 2.0 / rate } else { f64::INFINITY };
            let half = if tau_r.is_finite() { thresholds.window_factor / tau_r } else { 1e-6 * scale };
            let t_nm = if omega > 0.0 && tau_r.is_finite() {
                js.iter()
                    .max_by(|a, b| a.evaluate_right(omega).total_cmp(&b.evaluate_right(omega)))
                    .and_then(|j| ToyModelProblem::new(omega, j.clone()).ok())
                    .and_then(|p| memory::t_nm(&p).ok().flatten())
            } else {
                None
            };
            Transition {
                omega,
                rate,
                tau_r,
                tau_h: if omega == 0.0 { f64::INFINITY } else { 1.0 / omega.abs() },
                window_variation: window_variation(&js, omega, rate, half),
                t_nm,
                nearest_secularity: f64::INFINITY,
            }
        })
        .collect();

    let n = transitions.len();
    let mut secularity = vec![vec![0.0; n]; n];
    let mut t_rwa = f64::INFINITY;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let dw = (transitions[a].omega - transitions[b].omega).abs();
            let tr = transitions[a].tau_r.min(transitions[b].tau_r);
            let s = if tr.is_infinite() { f64::INFINITY } else { dw * tr };
            secularity[a][b] = s;
            if s < thresholds.rwa_pass && s > 0.0 {
                t_rwa = t_rwa.min(dw * tr * tr);
            }
        }
    }
    for (a, t) in transitions.iter_mut().enumerate() {
        t.nearest_secularity = (0..n).filter(|&b| b != a).map(|b| secularity[a][b]).fold(f64::INFINITY, f64::min);
    }
    // Transitions are sorted by frequency, so neighbours in the list are level
    // gaps; the emission side alone avoids the gap straddling Ω = 0.
    let mut gaps: Vec<f64> = (1..n)
        .filter(|&a| transitions[a - 1].omega > 0.0)
        .map(|a| secularity[a - 1][a])
        .filter(|x| x.is_finite())
        .collect();
    gaps.sort_by(f64::total_cmp);
    let median_gap_secularity = (!gaps.is_empty()).then(|| {
        let m = gaps.len();
        if m % 2 == 1 {
            gaps[m / 2]
        } else {
            0.5 * (gaps[m / 2 - 1] + gaps[m / 2])
        }
    });

    let w_max = omegas.iter().map(|w| w.abs()).fold(0.0, f64::max);
    let t_nm = transitions.iter().filter_map(|t| t.t_nm).reduce(f64::min);
    Ok(TimescaleReport {
        tau_b_integral,
        tau_b_threshold,
        tau_h: if w_max > 0.0 { 1.0 / w_max } else { f64::INFINITY },
        transitions,
        g0,
        coupling_parameter: g0.sqrt() * tau_b_threshold,
        secularity,
        t_rwa,
        t_nm,
        median_gap_secularity,
        thresholds: thresholds.clone(),
    })
}

/// [`timescales`] from an `H_S` and coupling operators in the original basis.
pub fn timescales_for(
    h_s: &HermitianOperator,
    couplings: &[HermitianOperator],
    coupling: &BathCoupling,
    degeneracy_tol: Option<f64>,
    thresholds: &Thresholds,
) -> Result<TimescaleReport> {
    let spec: SpectralDecomposition = qops::eig_hermitian(h_s)?;
    let tol = degeneracy_tol.unwrap_or_else(|| default_degeneracy_tol(&spec));
    let bohr = bohr_frequencies(&spec, tol)?;
    let ops: Vec<CMat> = couplings.iter().map(|a| spec.to_eigenbasis(a.matrix())).collect();
    timescales(&bohr, &ops, coupling, thresholds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Pass,
    Marginal,
    Fail,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Pass => "pass",
            Level::Marginal => "marginal",
            Level::Fail => "fail",
        }
    }
}

/// One verdict with the rule that fired and the report fields behind it.
#[derive(Clone, Debug)]
pub struct Check {
    pub level: Level,
    pub rule: String,
    pub evidence: Vec<(&'static str, f64)>,
    pub advice: &'static str,
}

#[derive(Clone, Debug)]
pub struct ValidityVerdict {
    pub born: Check,
    pub markov: Check,
    pub rwa: Check,
}

impl ValidityVerdict {
    pub fn worst(&self) -> Level {
        self.born.level.max(self.markov.level).max(self.rwa.level)
    }

    /// 0 all pass, 1 any marginal, 2 any fail.
    pub fn exit_code(&self) -> i32 {
        match self.worst() {
            Level::Pass => 0,
            Level::Marginal => 1,
            Level::Fail => 2,
        }
    }
}

const BORN_ADVICE: &str = "weak coupling: the bath must forget the system faster than the coupling can build \
correlations, otherwise higher orders or an exact treatment of the environment are needed";
const MARKOV_ADVICE: &str = "short memory: J must look flat across the probing window of every transition and the \
bath memory must be short against relaxation; otherwise solve the memory-kernel (Born) equation";
const RWA_ADVICE: &str = "secular limit: distinct Bohr frequencies must be resolved within the relaxation time; \
otherwise keep the Redfield terms or use a partial-secular / coarse-grained scheme";

fn grade(pass: bool, marginal: bool) -> Level {
    if pass {
        Level::Pass
    } else if marginal {
        Level::Marginal
    } else {
        Level::Fail
    }
}

pub fn verdict(r: &TimescaleReport) -> ValidityVerdict {
    let th = &r.thresholds;
    let c = r.coupling_parameter;
    let born = Check {
        level: grade(c < th.born_pass, c < th.born_marginal),
        rule: format!("coupling_parameter < {} pass, < {} marginal", th.born_pass, th.born_marginal),
        evidence: vec![("coupling_parameter", c), ("g0", r.g0), ("tau_b_threshold", r.tau_b_threshold)],
        advice: BORN_ADVICE,
    };

    let tau_r_min = r.transitions.iter().map(|t| t.tau_r).fold(f64::INFINITY, f64::min);
    let memory = r.tau_b_threshold.min(r.tau_h);
    let ratio = if tau_r_min.is_infinite() { 0.0 } else { memory / tau_r_min };
    let window = r.transitions.iter().map(|t| t.window_variation).fold(0.0, f64::max);
    let k = th.markov_relax;
    let mut markov = Check {
        level: grade(
            ratio < th.markov_pass && window < th.window_pass,
            ratio < k * th.markov_pass && window < k * th.window_pass,
        ),
        rule: format!(
            "min(tau_b_threshold, tau_h)/tau_r < {} and window_variation < {} pass, each x{} marginal",
            th.markov_pass, th.window_pass, k
        ),
        evidence: vec![
            ("min(tau_b_threshold, tau_h)/tau_r", ratio),
            ("window_variation", window),
            ("tau_r", tau_r_min),
            ("tau_h", r.tau_h),
        ],
        advice: MARKOV_ADVICE,
    };
    if r.tau_b_integral.is_divergent() && r.tau_h.is_infinite() {
        markov.level = Level::Fail;
        markov.rule = "tau_b_integral divergent with no intrinsic dynamics (tau_h infinite)".into();
        if let TauBIntegral::Divergent { last_estimate, .. } = r.tau_b_integral {
            markov.evidence.push(("tau_b_integral.last_estimate", last_estimate));
        }
    }

    let off: Vec<f64> = r
        .secularity
        .iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().filter(move |(b, _)| *b != a).map(|(_, s)| *s))
        .filter(|&s| s != 0.0)
        .collect();
    let s_min = off.iter().copied().fold(f64::INFINITY, f64::min);
    let mut evidence = vec![("secularity.min_offdiagonal", s_min), ("t_rwa", r.t_rwa)];
    if let Some(m) = r.median_gap_secularity {
        evidence.push(("median_gap_secularity", m));
    }
    let rwa = Check {
        level: grade(s_min > th.rwa_pass, s_min > th.rwa_marginal),
        rule: format!(
            "off-diagonal secularity exactly 0 or > {} pass, > {} marginal",
            th.rwa_pass, th.rwa_marginal
        ),
        evidence,
        advice: RWA_ADVICE,
    };
    ValidityVerdict { born, markov, rwa }
}

pub(crate) fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn check_json(c: &Check) -> Value {
    let evidence: serde_json::Map<String, Value> = c.evidence.iter().map(|(k, v)| (k.to_string(), num(*v))).collect();
    json!({ "verdict": c.level.as_str(), "rule": c.rule, "evidence": evidence, "advice": c.advice })
}

/// Structured report. Infinite values appear as the string `"inf"`.
pub fn report_json(r: &TimescaleReport, v: &ValidityVerdict) -> Value {
    let transitions: Vec<Value> = r
        .transitions
        .iter()
        .map(|t| {
            json!({
                "omega": t.omega,
                "rate": t.rate,
                "tau_r": num(t.tau_r),
                "tau_h": num(t.tau_h),
                "window_variation": num(t.window_variation),
                "t_nm": t.t_nm.map_or(Value::Null, num),
                "nearest_secularity": num(t.nearest_secularity),
            })
        })
        .collect();
    let secularity: Vec<Vec<Value>> = r.secularity.iter().map(|row| row.iter().map(|x| num(*x)).collect()).collect();
    json!({
        "timescales": {
            "tau_b_integral": r.tau_b_integral.to_json(),
            "tau_b_threshold": num(r.tau_b_threshold),
            "tau_h": num(r.tau_h),
            "g0": r.g0,
            "coupling_parameter": num(r.coupling_parameter),
            "coupling_parameter_definition": "sqrt(|G(0)|) * tau_b_threshold",
            "t_rwa": num(r.t_rwa),
            "t_nm": r.t_nm.map_or(Value::Null, num),
            "median_gap_secularity": r.median_gap_secularity.map_or(Value::Null, num),
            "transitions": transitions,
            "secularity": secularity,
        },
        "thresholds": serde_json::to_value(&r.thresholds).unwrap_or(Value::Null),
        "verdict": {
            "born": check_json(&v.born),
            "markov": check_json(&v.markov),
            "rwa": check_json(&v.rwa),
            "overall": v.worst().as_str(),
        },
    })
}

fn fmt_time(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format_float(x)
    }
}

/// Human-readable table: one row per approximation.
pub fn report_table(r: &TimescaleReport, v: &ValidityVerdict) -> String {
    let th = &r.thresholds;
    let mut out = String::new();
    let tau_b_int = match r.tau_b_integral {
        TauBIntegral::Finite(x) => format_float(x),
        TauBIntegral::Divergent { last_estimate, t_max } => {
            format!("divergent (estimate {} at t = {})", format_float(last_estimate), format_float(t_max))
        }
        TauBIntegral::Zero => "0".into(),
    };
    let _ = writeln!(out, "timescales");
    let _ = writeln!(out, "  tau_B (integral)   {tau_b_int}");
    let _ = writeln!(out, "  tau_B (threshold)  {}", fmt_time(r.tau_b_threshold));
    let _ = writeln!(out, "  tau_H              {}", fmt_time(r.tau_h));
    let _ = writeln!(out, "  coupling parameter {}", fmt_time(r.coupling_parameter));
    let _ = writeln!(out, "  t_RWA              {}", fmt_time(r.t_rwa));
    let _ = writeln!(out, "  t_NM               {}", r.t_nm.map_or("n/a".into(), fmt_time));
    let _ = writeln!(out, "  transitions        omega, tau_R, window variation");
    for t in &r.transitions {
        let _ = writeln!(
            out,
            "    {}, {}, {}",
            format_float(t.omega),
            fmt_time(t.tau_r),
            fmt_time(t.window_variation)
        );
    }
    let _ = writeln!(
        out,
        "thresholds: born {} / {}, markov {} and window {} (x{} marginal), rwa {} / {}, window = omega +- {}/tau_R",
        th.born_pass, th.born_marginal, th.markov_pass, th.window_pass, th.markov_relax, th.rwa_pass, th.rwa_marginal,
        th.window_factor
    );
    let _ = writeln!(out, "{:<8} | {:<8} | {}", "approx", "verdict", "evidence");
    for (name, c) in [("born", &v.born), ("markov", &v.markov), ("rwa", &v.rwa)] {
        let ev: Vec<String> = c.evidence.iter().map(|(k, x)| format!("{k} = {}", fmt_time(*x))).collect();
        let _ = writeln!(out, "{:<8} | {:<8} | {}", name, c.level.as_str(), ev.join(", "));
        let _ = writeln!(out, "{:<8} | {:<8} | rule: {}", "", "", c.rule);
    }
    let _ = writeln!(out, "overall: {}", v.worst().as_str());
    out
}

//! `spectral`, `toy`, `solve` and `diagnose`.

use rayon::prelude::*;
use std::fmt::Write;

use super::config::{BackendConfig, InitialState, SolverKind};
use super::fits::{linear_fit, quadratic_onset};
use super::{finish, num, CaseStudyResult, Headline, Loaded, Output};
use crate::bath::SpectralDensity;
use crate::diagnostics::{report_json, report_table, timescales_for, verdict};
use crate::error::{Error, Result};
use crate::master::{
    format_float, generator_json, propagate, redfield_time_dependent, spectrum, steady_state, trajectory_csv,
    Backend, OpenSystem, Trajectory,
};
use crate::memory::{
    asymptotic_solution, born_solve, branch_cut_solve, find_poles, markov_solution, t_nm, time_local_solve,
    volterra_solve, BornOptions, ToyModelProblem,
};
use crate::qops::{self, DensityMatrix};
use crate::C64;

pub fn cmd_spectral(cfg: &Loaded, out: &mut Output) -> Result<CaseStudyResult> {
    let bath = cfg.config.bath()?;
    let run = &cfg.config.run;
    if run.points < 2 || !(run.omega_max > run.omega_min) {
        return Err(Error::Config("run: need points >= 2 and omega_max > omega_min".into()));
    }
    let temps = if run.temperatures.is_empty() { vec![bath.temperature()] } else { run.temperatures.clone() };
    let densities: Vec<SpectralDensity> =
        temps.iter().map(|&t| bath.density_at(t, &cfg.base_dir)).collect::<Result<_>>()?;
    let step = (run.omega_max - run.omega_min) / (run.points - 1) as f64;
    let omegas: Vec<f64> = (0..run.points).map(|k| run.omega_min + k as f64 * step).collect();
    let columns: Vec<Vec<f64>> =
        densities.par_iter().map(|j| omegas.iter().map(|&w| j.evaluate(w)).collect()).collect();

    let mut csv = String::from("omega");
    for t in &temps {
        let _ = write!(csv, ",J(T={})", format_float(*t));
    }
    csv.push('\n');
    for (k, w) in omegas.iter().enumerate() {
        csv.push_str(&format_float(*w));
        for c in &columns {
            let _ = write!(csv, ",{}", format_float(c[k]));
        }
        csv.push('\n');
    }
    out.write("spectral.csv", &csv)?;

    let mut res = CaseStudyResult::new("spectral");
    for (t, j) in temps.iter().zip(&densities) {
        res.values.push((format!("J(0+) at T={}", format_float(*t)), j.evaluate_right(0.0)));
        res.values.push((format!("J(0-) at T={}", format_float(*t)), j.evaluate_left(0.0)));
    }
    finish(res, out, "spectral_summary.json")
}

/// Regime checks of the scalar memory-kernel model.
pub struct ToyRegimes {
    pub quadratic: f64,
    pub rate: f64,
    pub late_slope: f64,
    pub t_nm: Option<f64>,
    pub tau_r: f64,
}

/// Short-time, mid-window and late-time fits for `f(0) = 1`. The mid window
/// starts at `3/Λ` and ends at `min(5τ_R, t_NM/2)`.
pub fn toy_regimes(p: &ToyModelProblem, dt: f64) -> Result<ToyRegimes> {
    let one = C64::new(1.0, 0.0);
    let k0 = p.kernel_at_zero()?.norm();
    let t_fit = 0.1 / k0.sqrt();
    let short = volterra_solve(p, one, t_fit, t_fit / 200.0)?;
    let ys: Vec<f64> = short.interaction_picture(p.omega0).iter().map(|f| 1.0 - f.norm()).collect();
    let quadratic = quadratic_onset(&short.times[1..], &ys[1..]);

    let m = markov_solution(p, one, &[0.0])?;
    let tnm = t_nm(p)?;
    let t_end = match tnm {
        Some(t) if t.is_finite() => (5.0 * m.tau_r).min(0.5 * t),
        _ => 5.0 * m.tau_r,
    };
    let start = 3.0 / p.frequency_scale();
    let mid = volterra_solve(p, one, t_end, dt)?;
    let (xs, ls): (Vec<f64>, Vec<f64>) =
        mid.times.iter().zip(&mid.f).filter(|(t, _)| **t >= start).map(|(t, f)| (*t, f.norm().ln())).unzip();
    let rate = -linear_fit(&xs, &ls).slope;

    let late_slope = match tnm {
        Some(t) if t.is_finite() => {
            let late: Vec<f64> = (0..40).map(|k| 10.0 * t * (1.0 + k as f64 / 40.0)).collect();
            let bc = branch_cut_solve(p, one, &late)?;
            let lx: Vec<f64> = late.iter().map(|t| t.ln()).collect();
            let ly: Vec<f64> = bc.f.iter().map(|f| f.norm().ln()).collect();
            linear_fit(&lx, &ly).slope
        }
        _ => f64::NAN,
    };
    Ok(ToyRegimes { quadratic, rate, late_slope, t_nm: tnm, tau_r: m.tau_r })
}

fn toy_density(cfg: &Loaded) -> Result<SpectralDensity> {
    match &cfg.config.bath {
        Some(b) => b.density(&cfg.base_dir),
        None => SpectralDensity::ohmic(0.05, 1.0, 1.0),
    }
}

pub fn cmd_toy(cfg: &Loaded, out: &mut Output) -> Result<CaseStudyResult> {
    let toy = &cfg.config.toy;
    let p = ToyModelProblem::new(toy.omega0, toy_density(cfg)?)?;
    let dt = toy.dt.unwrap_or(0.01 / p.frequency_scale().max(1.0));
    let reg = toy_regimes(&p, dt)?;
    let one = C64::new(1.0, 0.0);

    let t_end = toy.t_end.unwrap_or_else(|| match reg.t_nm {
        Some(t) if t.is_finite() => 1.5 * t,
        _ => 5.0 * reg.tau_r.min(1e4),
    });
    // The Volterra column stops where the mid-window fit ends.
    let t_vol = match reg.t_nm {
        Some(t) if t.is_finite() => (5.0 * reg.tau_r).min(0.5 * t).min(t_end),
        _ => t_end.min(5.0 * reg.tau_r),
    };
    let stride = ((0.1 / dt).round() as usize).max(1);
    let vol = volterra_solve(&p, one, t_vol, dt)?;
    let n_out = (t_end / (stride as f64 * dt)).floor() as usize;
    let times: Vec<f64> = (0..=n_out).map(|k| (k * stride) as f64 * dt).collect();
    let local = time_local_solve(&p, one, t_end, dt)?;
    let markov = markov_solution(&p, one, &times)?;
    let bc = branch_cut_solve(&p, one, &times)?;
    let asym = asymptotic_solution(&p, one, &times)?;

    let mut csv = String::from("t,volterra,time_local,markov,branch_cut,asymptotic\n");
    for (k, t) in times.iter().enumerate() {
        let i = k * stride;
        let cell = |v: Option<&C64>| v.map_or(String::new(), |f| format_float(f.norm()));
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            format_float(*t),
            cell(vol.f.get(i)),
            cell(local.f.get(i)),
            format_float(markov.f[k].norm()),
            format_float(bc.f[k].norm()),
            if *t > 0.0 { format_float(asym.f[k].norm()) } else { String::new() },
        );
    }
    out.write("toy_overlay.csv", &csv)?;

    let k0 = p.kernel_at_zero()?.norm();
    let j0 = p.j.evaluate(p.omega0);
    let mut res = CaseStudyResult::new("toy");
    res.headlines.push(Headline::relative("quadratic coefficient / (|K(0)|/2)", reg.quadratic, 0.5 * k0, 0.02));
    if j0 > 0.0 {
        res.headlines.push(Headline::relative("mid-window rate / (J(omega0)/2)", reg.rate, 0.5 * j0, 0.05));
    }
    if reg.late_slope.is_finite() {
        res.headlines.push(Headline::absolute("late log-log slope of |f|", reg.late_slope, -2.0, 0.1));
    }
    res.values.push(("tau_R".into(), reg.tau_r));
    res.values.push(("t_NM".into(), reg.t_nm.unwrap_or(f64::NAN)));
    res.values.push(("omega_tilde".into(), markov.omega_tilde));
    for (k, pole) in find_poles(&p)?.iter().enumerate() {
        res.values.push((format!("pole {k} omega"), pole.omega));
        res.values.push((format!("pole {k} residue"), pole.residue));
    }
    finish(res, out, "toy_summary.json")
}

fn backend(b: BackendConfig) -> Backend {
    match b {
        BackendConfig::Auto => Backend::Auto,
        BackendConfig::Spectral => Backend::Spectral,
        BackendConfig::Stepper => Backend::Stepper,
    }
}

fn initial_state(kind: InitialState, d: usize) -> Result<DensityMatrix> {
    let basis = |k: usize| -> Vec<C64> { (0..d).map(|i| if i == k { qops::ONE } else { qops::ZERO }).collect() };
    match kind {
        InitialState::Ground => DensityMatrix::pure(&basis(0)),
        InitialState::Excited => DensityMatrix::pure(&basis(d - 1)),
        InitialState::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(d)),
    }
}

pub fn cmd_solve(cfg: &Loaded, out: &mut Output) -> Result<CaseStudyResult> {
    let run = &cfg.config.run;
    if !(run.dt > 0.0) || !(run.t_end >= 0.0) {
        return Err(Error::Config("run: need dt > 0 and t_end >= 0".into()));
    }
    let (h, ops, coupling) = cfg.config.model(&cfg.base_dir)?;
    let sys = OpenSystem::new(&h, &ops, coupling, run.degeneracy_tol)?;
    let d = sys.dim();
    let rho0 = initial_state(run.initial, d)?;
    let steps = (run.t_end / run.dt).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * run.dt).collect();

    let mut res = CaseStudyResult::new("solve");
    let traj: Trajectory = match run.solver {
        SolverKind::Lindblad | SolverKind::Redfield => {
            let g = if run.solver == SolverKind::Lindblad { sys.lindblad()? } else { sys.redfield()? };
            out.write_json("generator.json", &generator_json(&g))?;
            let sp = spectrum(&g)?;
            res.values.push(("max Re lambda".into(), sp.max_real()));
            res.values.push(("trace residual".into(), g.trace_residual()));
            match steady_state(&g) {
                Ok(ss) => {
                    res.values.push(("steady-state null dimension".into(), ss.null_dim as f64));
                    res.values.push(("steady-state min eigenvalue".into(), ss.min_eigenvalue));
                    for i in 0..d {
                        res.values.push((format!("steady-state population {i}"), ss.state.matrix()[(i, i)].re));
                    }
                }
                Err(e) => res.values.push((format!("steady state unavailable: {e}"), f64::NAN)),
            }
            propagate(&g, &rho0, &times, backend(run.backend))?
        }
        SolverKind::RedfieldTimeDependent => {
            redfield_time_dependent(&sys.spec, &sys.eigs, &sys.coupling, &rho0, run.t_end, run.dt)?
        }
        SolverKind::Born => born_solve(&sys.spec, &sys.eigs, &sys.coupling, &rho0, run.t_end, run.dt, BornOptions::default())?,
    };
    // States are exported in the eigenbasis of H_S, ascending energy.
    out.write("trajectory.csv", &trajectory_csv(&traj))?;
    res.values.push(("max trace error".into(), traj.max_trace_error()));
    res.values.push(("min eigenvalue along trajectory".into(), traj.min_positivity()));
    for (k, e) in sys.spec.eigenvalues.iter().enumerate() {
        res.values.push((format!("energy {k}"), *e));
    }
    finish(res, out, "solve_summary.json")
}

/// Writes `report.json` and `report.txt`; returns the table and exit code.
pub fn cmd_diagnose(cfg: &Loaded, out: &mut Output) -> Result<(String, i32)> {
    let (h, ops, coupling) = cfg.config.model(&cfg.base_dir)?;
    let report = timescales_for(&h, &ops, &coupling, cfg.config.run.degeneracy_tol, &cfg.config.diagnostics)?;
    let v = verdict(&report);
    let table = report_table(&report, &v);
    let mut j = report_json(&report, &v);
    j["exit_code"] = num(v.exit_code() as f64);
    out.write_json("report.json", &j)?;
    out.write("report.txt", &table)?;
    Ok((table, v.exit_code()))
}

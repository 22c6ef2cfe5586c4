//! Time evolution under a generator.

use rayon::prelude::*;
use serde::Serialize;

use super::ode::{dopri5, OdeOptions};
use super::spectrum::spectrum;
use super::{redfield_with, GeneratorMatrix};
use crate::bath::{gamma_time_dependent_series, BathCoupling};
use crate::eigenops::EigenoperatorSet;
use crate::error::{Error, Result};
use crate::qops::{self, DensityMatrix, SpectralDecomposition};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Expansion in the bi-orthogonal eigenbasis.
    Spectral,
    /// Adaptive Dormand-Prince stepping.
    Stepper,
    /// Spectral, falling back to the stepper for near-defective generators.
    Auto,
}

/// Density matrices along a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Smallest eigenvalue of the Hermitian part at each time.
    pub positivity_min: Vec<f64>,
    pub backend: Backend,
    pub note: Option<String>,
}

impl Trajectory {
    pub fn from_vectors(times: Vec<f64>, vecs: Vec<Vec<C64>>, d: usize, backend: Backend) -> Result<Self> {
        let states: Vec<DensityMatrix> =
            vecs.iter().map(|v| DensityMatrix::unchecked(qops::unvec(v, d))).collect();
        let positivity_min = states
            .iter()
            .map(|s| qops::min_eigenvalue_of(s.matrix()))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { times, states, positivity_min, backend, note: None })
    }

    pub fn max_trace_error(&self) -> f64 {
        self.states.iter().map(|s| (qops::trace(s.matrix()) - 1.0).norm()).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.states.iter().map(|s| qops::hermiticity_residual(s.matrix())).fold(0.0, f64::max)
    }

    pub fn min_positivity(&self) -> f64 {
        self.positivity_min.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Time series of a single matrix element.
    pub fn element(&self, i: usize, j: usize) -> Vec<C64> {
        self.states.iter().map(|s| s.matrix()[(i, j)]).collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be ascending and start at t >= 0".into()));
    }
    Ok(())
}

fn propagate_spectral(g: &GeneratorMatrix, rho0: &[C64], times: &[f64]) -> Result<Vec<Vec<C64>>> {
    let sp = spectrum(g)?;
    let n = rho0.len();
    let c = qops::matvec(&sp.left, rho0);
    Ok(times
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                return rho0.to_vec();
            }
            let coef: Vec<C64> = c.iter().zip(&sp.eigenvalues).map(|(ci, l)| ci * (l * t).exp()).collect();
            let mut v = vec![C64::new(0.0, 0.0); n];
            for (k, ck) in coef.iter().enumerate() {
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi += sp.right[(i, k)] * ck;
                }
            }
            v
        })
        .collect())
}

fn propagate_stepper(g: &GeneratorMatrix, rho0: &[C64], times: &[f64]) -> Result<Vec<Vec<C64>>> {
    let n = rho0.len();
    let m = &g.matrix;
    let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| {
        dy.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (j, yj) in y.iter().enumerate() {
            for (i, d) in dy.iter_mut().enumerate().take(n) {
                *d += m[(i, j)] * yj;
            }
        }
    };
    dopri5(rhs, 0.0, rho0, times, OdeOptions::default())
}

/// Evolve `ρ0` (in the same basis as the generator) to each time.
pub fn propagate(g: &GeneratorMatrix, rho0: &DensityMatrix, times: &[f64], backend: Backend) -> Result<Trajectory> {
    check_times(times)?;
    if rho0.dim() != g.dim {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {} but generator acts on d = {}",
            rho0.dim(),
            g.dim
        )));
    }
    let v0 = qops::vec_of(rho0.matrix());
    let (vecs, used, note) = match backend {
        Backend::Spectral => (propagate_spectral(g, &v0, times)?, Backend::Spectral, None),
        Backend::Stepper => (propagate_stepper(g, &v0, times)?, Backend::Stepper, None),
        Backend::Auto => match propagate_spectral(g, &v0, times) {
            Ok(v) => (v, Backend::Spectral, None),
            Err(Error::NearDefective { cond }) => (
                propagate_stepper(g, &v0, times)?,
                Backend::Stepper,
                Some(format!("spectral backend unavailable (eigenvector condition {cond:.3e})")),
            ),
            Err(e) => return Err(e),
        },
    };
    let mut traj = Trajectory::from_vectors(times.to_vec(), vecs, g.dim, used)?;
    traj.note = note;
    Ok(traj)
}

/// Redfield evolution with the finite-time coefficients `Γ(Ω, t)`, rebuilt at
/// every half step of a fixed-step RK4 scheme on `[0, t_end]`.
pub fn redfield_time_dependent(
    spec: &SpectralDecomposition,
    eigs: &[EigenoperatorSet],
    coupling: &BathCoupling,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument("need dt > 0 and t_end >= 0".into()));
    }
    let steps = (t_end / dt).round() as usize;
    let d = spec.dim();
    let mut omegas: Vec<f64> = eigs.iter().flat_map(|e| e.frequencies()).collect();
    omegas.sort_by(f64::total_cmp);
    omegas.dedup();

    // Γ_j(Ω, k dt/2) for every distinct density j.
    let densities = coupling.densities();
    let series: Vec<Vec<Vec<C64>>> = omegas
        .iter()
        .map(|&w| {
            densities
                .iter()
                .map(|j| gamma_time_dependent_series(j, w, 0.5 * dt, 2 * steps + 1))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let generator_at = |half_index: usize| -> Result<GeneratorMatrix> {
        redfield_with(spec, eigs, |omega, b, a| {
            let wi = omegas.iter().position(|&w| w == omega).unwrap();
            Ok(match coupling {
                BathCoupling::Shared { weights, .. } => series[wi][0][half_index] * weights[(b, a)],
                BathCoupling::Independent(_) => {
                    if a == b {
                        series[wi][a][half_index]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }
            })
        })
    };

    let mut v = qops::vec_of(rho0.matrix());
    let mut vecs = vec![v.clone()];
    let mut times = vec![0.0];
    let mut g0 = generator_at(0)?;
    for k in 0..steps {
        let gm = generator_at(2 * k + 1)?;
        let g1 = generator_at(2 * k + 2)?;
        let k1 = g0.apply(&v);
        let y2: Vec<C64> = v.iter().zip(&k1).map(|(a, b)| a + b * (0.5 * dt)).collect();
        let k2 = gm.apply(&y2);
        let y3: Vec<C64> = v.iter().zip(&k2).map(|(a, b)| a + b * (0.5 * dt)).collect();
        let k3 = gm.apply(&y3);
        let y4: Vec<C64> = v.iter().zip(&k3).map(|(a, b)| a + b * dt).collect();
        let k4 = g1.apply(&y4);
        for i in 0..v.len() {
            v[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        vecs.push(v.clone());
        times.push((k + 1) as f64 * dt);
        g0 = g1;
    }
    Trajectory::from_vectors(times, vecs, d, Backend::Stepper)
}

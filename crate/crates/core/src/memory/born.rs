//! Matrix-valued Born equation with the full memory of the bath.
//!
//! In the interaction picture with respect to `H_S`,
//! `dρ̃/dt = −Σ_αβ ∫₀ᵗ ds G_αβ(t − s) [A_α(t), A_β(s) ρ̃(s)] + h.c.`,
//! discretised exactly as the scalar toy model: trapezoid over the history
//! and trapezoid in time, with the `s = t` end point treated implicitly.

use faer::linalg::solvers::Solve;
use faer::Mat;

use super::correlation_samples;
use crate::bath::BathCoupling;
use crate::eigenops::EigenoperatorSet;
use crate::error::{Error, Result};
use crate::master::{superop, Backend, Trajectory};
use crate::qops::{self, CMat, DensityMatrix, SpectralDecomposition};
use crate::C64;

/// Default bound on stored history steps.
pub const DEFAULT_HISTORY_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug)]
pub struct BornOptions {
    pub history_cap: usize,
}

impl Default for BornOptions {
    fn default() -> Self {
        Self { history_cap: DEFAULT_HISTORY_CAP }
    }
}

/// `X ↦ X_mn e^{i(ε_m − ε_n)t}`, the map to the interaction picture.
fn rotate(x: &CMat, energies: &[f64], t: f64) -> CMat {
    let d = energies.len();
    CMat::from_fn(d, d, |m, n| x[(m, n)] * C64::from_polar(1.0, (energies[m] - energies[n]) * t))
}

/// Evolve `ρ0` (eigenbasis of `H_S`) on `[0, T]` with step `dt`; returned states
/// are in the Schrödinger picture and the same basis.
pub fn born_solve(
    spec: &SpectralDecomposition,
    eigs: &[EigenoperatorSet],
    coupling: &BathCoupling,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    opts: BornOptions,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument("need dt > 0 and t_end >= 0".into()));
    }
    let d = spec.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch(format!("state is {}x{} but H_S has d = {d}", rho0.dim(), rho0.dim())));
    }
    let labels = eigs.len();
    if coupling.n_labels() != labels {
        return Err(Error::DimensionMismatch(format!(
            "{labels} coupling operators but the bath has {} labels",
            coupling.n_labels()
        )));
    }
    let steps = (t_end / dt).round() as usize;
    if steps + 1 > opts.history_cap {
        return Err(Error::HistoryCap { steps: steps + 1, cap: opts.history_cap });
    }

    let energies = &spec.eigenvalues;
    let ops: Vec<CMat> = eigs.iter().map(|e| e.sum()).collect();
    // Kernel per label and the operator it multiplies:
    // Σ_β G_αβ A_β = g_α Σ_β w_αβ A_β for a shared density, g_α A_α otherwise.
    let (kernels, partners): (Vec<Vec<C64>>, Vec<CMat>) = match coupling {
        BathCoupling::Shared { density, weights } => {
            let g = correlation_samples(density, dt, steps + 1)?;
            let partners = (0..labels)
                .map(|a| {
                    let mut m = qops::zeros(d, d);
                    for (b, ob) in ops.iter().enumerate() {
                        m += qops::scale(ob, weights[(a, b)]);
                    }
                    m
                })
                .collect();
            (vec![g; labels], partners)
        }
        BathCoupling::Independent(js) => {
            let ks = js.iter().map(|j| correlation_samples(j, dt, steps + 1)).collect::<Result<Vec<_>>>()?;
            (ks, ops.clone())
        }
    };
    let active: Vec<bool> = (0..labels).map(|a| kernels[a].iter().any(|z| z.norm() > 0.0)).collect();

    // Memory term −Σ_α [A_α(t), Y_α] + h.c.
    let memory = |a_t: &[CMat], y: &[CMat]| -> CMat {
        let mut m = qops::zeros(d, d);
        for a in 0..labels {
            if active[a] {
                m -= &a_t[a] * &y[a] - &y[a] * &a_t[a];
            }
        }
        &m + &qops::dagger(&m)
    };

    let mut rho_tilde = rho0.matrix().clone();
    // z[α] holds vec[(Σ_β w_αβ A_β)(t_j) ρ̃_j] for every past step j.
    let mut z: Vec<Vec<C64>> = vec![Vec::with_capacity((steps + 1) * d * d); labels];
    let ops_at = |t: f64| -> (Vec<CMat>, Vec<CMat>) {
        (
            ops.iter().map(|o| rotate(o, energies, t)).collect(),
            partners.iter().map(|o| rotate(o, energies, t)).collect(),
        )
    };
    {
        let (_, p0) = ops_at(0.0);
        for a in 0..labels {
            z[a].extend(qops::vec_of(&(&p0[a] * &rho_tilde)));
        }
    }
    let mut states = vec![rho0.matrix().clone()];
    let mut times = vec![0.0];
    let mut last_memory = qops::zeros(d, d);

    for n in 1..=steps {
        let t = n as f64 * dt;
        let (a_t, p_t) = ops_at(t);
        // Known history part, s = 0 with weight one half.
        let nn = d * d;
        let y: Vec<CMat> = (0..labels)
            .map(|a| {
                let mut acc = vec![C64::new(0.0, 0.0); nn];
                if active[a] {
                    let k = &kernels[a];
                    let hist = &z[a];
                    let w0 = k[n] * (0.5 * dt);
                    for (s, h) in acc.iter_mut().zip(&hist[..nn]) {
                        *s += h * w0;
                    }
                    for j in 1..n {
                        let w = k[n - j] * dt;
                        for (s, h) in acc.iter_mut().zip(&hist[j * nn..(j + 1) * nn]) {
                            *s += h * w;
                        }
                    }
                }
                qops::unvec(&acc, d)
            })
            .collect();
        let known = memory(&a_t, &y);

        // Implicit endpoint: X ↦ −Σ_α (A B X − B X A + X B† A − A X B†) with
        // B = (dt/2) g_α(0) P_α(t), valid for Hermitian X.
        let mut lin = qops::zeros(nn, nn);
        for a in 0..labels {
            if !active[a] {
                continue;
            }
            let b = qops::scale(&p_t[a], kernels[a][0] * (0.5 * dt));
            let b_dag = qops::dagger(&b);
            let one = C64::new(1.0, 0.0);
            superop::add_left(&mut lin, &(&a_t[a] * &b), -one);
            superop::add_sandwich(&mut lin, &b, &a_t[a], one);
            superop::add_right(&mut lin, &(&b_dag * &a_t[a]), -one);
            superop::add_sandwich(&mut lin, &a_t[a], &b_dag, one);
        }
        // (I − dt/2 L) vec ρ̃_n = vec[ρ̃_{n−1} + dt/2 (F_{n−1} + known)].
        let mut sys = Mat::<C64>::identity(nn, nn);
        for c in 0..nn {
            for r in 0..nn {
                sys[(r, c)] -= lin[(r, c)] * (0.5 * dt);
            }
        }
        let rhs_m = &rho_tilde + &qops::scale(&(&last_memory + &known), C64::new(0.5 * dt, 0.0));
        let rhs_v = qops::vec_of(&rhs_m);
        let rhs = Mat::<C64>::from_fn(nn, 1, |i, _| rhs_v[i]);
        let x = sys.partial_piv_lu().solve(&rhs);
        let v: Vec<C64> = (0..nn).map(|i| x[(i, 0)]).collect();
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        rho_tilde = qops::hermitian_part(&qops::unvec(&v, d));

        let lin_part = qops::unvec(&qops::matvec(&lin, &qops::vec_of(&rho_tilde)), d);
        last_memory = &known + &lin_part;
        for a in 0..labels {
            z[a].extend(qops::vec_of(&(&p_t[a] * &rho_tilde)));
        }
        states.push(rotate(&rho_tilde, energies, -t));
        times.push(t);
    }

    let vecs = states.iter().map(qops::vec_of).collect();
    let mut traj = Trajectory::from_vectors(times, vecs, d, Backend::Stepper)?;
    traj.note = Some(format!("Born equation, full history, dt = {dt}"));
    Ok(traj)
}

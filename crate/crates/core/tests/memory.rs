use qbath::bath::SpectralDensity;
use qbath::memory::*;
use qbath::C64;
use std::f64::consts::PI;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn ohmic_reference() -> ToyModelProblem {
    ToyModelProblem::new(0.7, SpectralDensity::ohmic(0.05, 1.0, 1.0).unwrap()).unwrap()
}

fn log_linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn zero_kernel_is_free_evolution() {
    let p = ToyModelProblem::new(1.3, SpectralDensity::flat(0.0, 1.0).unwrap()).unwrap();
    let f0 = C64::new(0.6, 0.8);
    let sol = volterra_solve(&p, f0, 10.0, 0.01).unwrap();
    for (t, f) in sol.times.iter().zip(&sol.f) {
        let exact = f0 * C64::from_polar(1.0, -1.3 * t);
        assert!((f - exact).norm() < 1e-12);
    }
    assert!(sol.tau_r.is_infinite());
}

#[test]
fn short_time_quadratic_onset() {
    let p = ohmic_reference();
    let k0 = p.kernel_at_zero().unwrap().norm();
    assert!((k0 - 0.05).abs() < 1e-10);
    let t_max = 0.1 / k0.sqrt();
    let sol = volterra_solve(&p, one(), t_max, t_max / 200.0).unwrap();
    let ft = sol.interaction_picture(p.omega0);
    // 1 − |f̃| ≈ a t² + b t⁴
    let (mut s22, mut s24, mut s44, mut s2y, mut s4y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, f) in sol.times.iter().zip(&ft).skip(1) {
        let y = 1.0 - f.norm();
        let (x2, x4) = (t * t, t.powi(4));
        s22 += x2 * x2;
        s24 += x2 * x4;
        s44 += x4 * x4;
        s2y += x2 * y;
        s4y += x4 * y;
    }
    let det = s22 * s44 - s24 * s24;
    let a = (s2y * s44 - s4y * s24) / det;
    println!("quadratic coefficient {a}, expected {}", 0.5 * k0);
    assert!((a / (0.5 * k0) - 1.0).abs() < 0.02);
}

#[test]
fn ohmic_reference_regimes() {
    let p = ohmic_reference();
    let j0 = p.j.evaluate(0.7);
    let t_nm = t_nm(&p).unwrap().unwrap();
    let m = markov_solution(&p, one(), &[0.0]).unwrap();
    println!("J(w0) = {j0}, tau_R = {}, t_NM = {t_nm}, w~ = {}", m.tau_r, m.omega_tilde);
    let dt = 0.2 * p.suggested_dt();
    let t_end = (5.0 * m.tau_r).min(0.5 * t_nm);
    let sol = volterra_solve(&p, one(), t_end, dt).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        sol.times.iter().zip(&sol.f).filter(|(t, _)| **t >= 3.0).map(|(t, f)| (*t, f.norm().ln())).unzip();
    let rate = -log_linear_slope(&xs, &ys);
    println!("mid-window rate {rate}, J/2 = {}", 0.5 * j0);
    assert!((rate / (0.5 * j0) - 1.0).abs() < 0.05);

    let late: Vec<f64> = (0..40).map(|k| 10.0 * t_nm * (1.0 + k as f64 / 40.0)).collect();
    let bc = branch_cut_solve(&p, one(), &late).unwrap();
    let lx: Vec<f64> = late.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = bc.f.iter().map(|f| f.norm().ln()).collect();
    let slope = log_linear_slope(&lx, &ly);
    let tail = asymptotic_tail(&p, one(), late[0]).unwrap();
    println!("late slope {slope}, bc {} tail {}", bc.f[0].norm(), tail.norm());
    assert!((slope + 2.0).abs() < 0.1);
    assert!((bc.f[0].norm() / tail.norm() - 1.0).abs() < 0.05);
}

#[test]
fn volterra_and_branch_cut_agree() {
    let p = ohmic_reference();
    let vol = volterra_solve(&p, one(), 160.0, 0.01).unwrap();
    let bc = branch_cut_solve(&p, one(), &vol.times).unwrap();
    assert!(bc.pole_weight_deficit.unwrap().abs() < 1e-10);
    for (a, b) in vol.f.iter().zip(&bc.f) {
        if b.norm() > 1e-4 {
            assert!((a - b).norm() / b.norm() < 1e-6);
        }
    }
}

#[test]
fn oracle_agrees_before_aliasing_floor() {
    // The uniform mode grid is periodic in time; images of the t^-2 kernel
    // tail limit the oracle to about 1e-5 absolute before recurrence.
    let p = ohmic_reference();
    let vol = volterra_solve(&p, one(), 100.0, 0.01).unwrap();
    let modes = discretize_modes(&p.j, 400, Some((0.0, 10.0))).unwrap();
    let ww = wigner_weisskopf_oracle(p.omega0, &modes, 100.0, 0.01).unwrap();
    assert!(ww.norm_error < 1e-10);
    assert!((ww.recurrence_time - 2.0 * PI / 0.025).abs() < 1e-9);
    for (a, b) in vol.f.iter().zip(&ww.f) {
        if a.norm() > 1e-2 {
            assert!((a - b).norm() / a.norm() < 1e-3);
        }
        assert!((a - b).norm() < 2e-4, "{}", (a - b).norm());
    }
}

#[test]
fn weak_ohmic_has_no_poles() {
    assert!(find_poles(&ohmic_reference()).unwrap().is_empty());
}

#[test]
fn photonic_in_gap_bound_state() {
    let j = SpectralDensity::photonic(0.1, 1.0, 2.0).unwrap();
    let p = ToyModelProblem::new(0.7, j).unwrap();
    let poles = find_poles(&p).unwrap();
    assert_eq!(poles.len(), 1);
    let z = poles[0].residue;
    println!("pole {:?}", poles[0]);
    assert!(z > 0.0 && z < 1.0);
    assert!(poles[0].residual <= 1e-9);
}

#[test]
fn vacuum_rabi_oscillation() {
    let g = 0.3;
    let ww = wigner_weisskopf_oracle(1.0, &[(g, 1.0)], 20.0, 0.01).unwrap();
    for (t, f) in ww.times.iter().zip(&ww.f) {
        assert!((f.norm_sqr() - (g * t).cos().powi(2)).abs() < 1e-10);
    }
    let free = wigner_weisskopf_oracle(1.0, &[(0.0, 1.0), (0.0, 2.0)], 5.0, 0.1).unwrap();
    assert!(free.f.iter().all(|f| (f.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn mode_couplings_follow_density() {
    let j = SpectralDensity::ohmic(0.05, 1.0, 1.0).unwrap();
    let modes = discretize_modes(&j, 10, Some((0.0, 1.0))).unwrap();
    for (g, w) in modes {
        assert!((g * g - j.evaluate(w) * 0.1 / (2.0 * PI)).abs() < 1e-15);
    }
}

mod born {
    use super::*;
    use qbath::bath::BathCoupling;
    use qbath::eigenops::{bohr_frequencies, decompose_all, default_degeneracy_tol};
    use qbath::qops::{self, pauli, DensityMatrix, HermitianOperator, SpectralDecomposition};

    fn setup(energies: &[f64], ops: &[qbath::CMat]) -> (SpectralDecomposition, Vec<qbath::eigenops::EigenoperatorSet>) {
        let spec = SpectralDecomposition::from_diagonal(energies);
        let bohr = bohr_frequencies(&spec, default_degeneracy_tol(&spec)).unwrap();
        let ops: Vec<HermitianOperator> = ops.iter().map(|m| HermitianOperator::new(m.clone()).unwrap()).collect();
        let eigs = decompose_all(&ops, &spec, &bohr).unwrap();
        (spec, eigs)
    }

    fn spin(m: qbath::CMat) -> qbath::CMat {
        qops::scale(&m, C64::new(0.5, 0.0))
    }

    #[test]
    fn scalar_reduction_matches_toy_model() {
        let delta = 0.7;
        let (spec, eigs) = setup(&[0.0, delta], &[pauli::x(), pauli::y()]);
        // Σ w_αβ A_α ⊗ A_β = σ+ ⊗ σ− with σ+ = |e⟩⟨g|.
        let q = C64::new(0.25, 0.0);
        let qi = C64::new(0.0, 0.25);
        let w = qops::from_rows(&[vec![q, qi], vec![-qi, q]]).unwrap();
        let j = SpectralDensity::ohmic(0.05, 1.0, 1.0).unwrap();
        let coupling = BathCoupling::Shared { density: j.clone(), weights: w };
        let s = (0.5f64).sqrt();
        let rho0 = DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
        let dt = 0.02;
        let traj = born_solve(&spec, &eigs, &coupling, &rho0, 40.0, dt, BornOptions::default()).unwrap();
        let toy = volterra_fixed_step(&ToyModelProblem::new(delta, j).unwrap(), C64::new(0.5, 0.0), 40.0, dt).unwrap();
        for (rho, f) in traj.element(1, 0).iter().zip(&toy.f) {
            assert!((rho - f).norm() < 1e-12, "{rho} vs {f}");
        }
    }

    #[test]
    fn zero_kernel_gives_unitary_evolution() {
        let (spec, eigs) = setup(&[-0.5, 0.5], &[pauli::x()]);
        let coupling = BathCoupling::single(SpectralDensity::flat(0.0, 1.0).unwrap());
        let rho0 = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let traj = born_solve(&spec, &eigs, &coupling, &rho0, 5.0, 0.05, BornOptions::default()).unwrap();
        for (t, r) in traj.times.iter().zip(&traj.states) {
            let expect = rho0.matrix()[(1, 0)] * C64::from_polar(1.0, -t);
            assert!((r.matrix()[(1, 0)] - expect).norm() < 1e-13);
            assert!((r.matrix()[(1, 1)].re - 0.64).abs() < 1e-13);
        }
    }

    #[test]
    fn history_cap_is_enforced() {
        let (spec, eigs) = setup(&[0.0, 1.0], &[pauli::x()]);
        let coupling = BathCoupling::single(SpectralDensity::ohmic(0.01, 1.0, 1.0).unwrap());
        let rho0 = DensityMatrix::maximally_mixed(2);
        let err = born_solve(&spec, &eigs, &coupling, &rho0, 10.0, 0.1, BornOptions { history_cap: 50 }).unwrap_err();
        assert!(matches!(err, qbath::Error::HistoryCap { steps: 101, cap: 50 }));
    }

    #[test]
    fn lindblad_fixed_point_is_not_born_fixed_point() {
        // Zero-temperature two-level atom: the Lindblad steady state is the
        // ground state, which the Born equation immediately moves away from.
        let (spec, eigs) = setup(&[0.0, 1.0], &[pauli::x()]);
        let coupling = BathCoupling::single(SpectralDensity::ohmic(0.01, 1.0, 1.0).unwrap());
        let rho0 = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let traj = born_solve(&spec, &eigs, &coupling, &rho0, 2.0, 0.01, BornOptions::default()).unwrap();
        let moved = qops::max_abs(&qops::sub(traj.states[20].matrix(), rho0.matrix()));
        assert!(moved > 1e-5, "{moved}");
    }

    #[test]
    fn kondo_zero_temperature_relaxes_slowly() {
        let (spec, eigs) = setup(&[0.0, 0.0], &[spin(pauli::x()), spin(pauli::y()), spin(pauli::z())]);
        let j = SpectralDensity::kondo(0.1, 1.0, 1.0, 0.0, 0.0).unwrap();
        let coupling = BathCoupling::Shared { density: j, weights: qops::identity(3) };
        let rho0 = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let traj = born_solve(&spec, &eigs, &coupling, &rho0, 100.0, 0.05, BornOptions::default()).unwrap();
        let sz: Vec<f64> = traj.states.iter().map(|r| 0.5 * (r.matrix()[(0, 0)] - r.matrix()[(1, 1)]).re).collect();
        let n = sz.len();
        println!("Sz: {} {} {} {}", sz[0], sz[n / 10], sz[n / 2], sz[n - 1]);
        assert!(sz[n - 1] < sz[n / 10] && sz[n / 10] < 0.5);
        assert!(sz[n - 1] > 0.0);
        assert!(traj.max_trace_error() < 1e-12);
    }
}

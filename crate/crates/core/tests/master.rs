use qbath::bath::{gamma_coefficient, BathCoupling, GammaBlock, GammaMatrix, SpectralDensity};
use qbath::eigenops::{bohr_frequencies, decompose_all};
use qbath::master::*;
use qbath::qops::{self, pauli, CMat, DensityMatrix, HermitianOperator, SpectralDecomposition};
use qbath::C64;

fn herm(m: CMat) -> HermitianOperator {
    HermitianOperator::new(m).unwrap()
}

fn sorted_eigs(g: &GeneratorMatrix) -> Vec<C64> {
    let mut ev = spectrum(g).unwrap().eigenvalues;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

fn expect(state: &CMat, op: &CMat) -> f64 {
    qops::trace(&(state * op)).re
}

/// `H = Δ/2 σz` with `σ−` at rate γ, in the computational basis.
fn amplitude_damping(delta: f64, gamma: f64) -> LindbladModel {
    let h = herm(qops::scale(&pauli::z(), qops::cr(0.5 * delta)));
    let zero = herm(qops::zeros(2, 2));
    LindbladModel::new(h, zero, vec![Jump { operator: pauli::minus(), rate: gamma, omega: delta }]).unwrap()
}

#[test]
fn pure_hamiltonian_spectrum() {
    let delta = 1.3;
    let m = LindbladModel::new(
        herm(qops::scale(&pauli::z(), qops::cr(0.5 * delta))),
        herm(qops::zeros(2, 2)),
        vec![],
    )
    .unwrap();
    let ev = sorted_eigs(&vectorize(&m));
    let mut im: Vec<f64> = ev.iter().map(|z| z.im).collect();
    im.sort_by(f64::total_cmp);
    for (a, b) in im.iter().zip([-delta, 0.0, 0.0, delta]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(ev.iter().all(|z| z.re.abs() < 1e-12));
}

#[test]
fn amplitude_damping_spectrum_and_decay() {
    let (gamma, delta) = (0.2, 1.0);
    let g = vectorize(&amplitude_damping(0.0, gamma));
    let ev = sorted_eigs(&g);
    for (z, want) in ev.iter().zip([-gamma, -0.5 * gamma, -0.5 * gamma, 0.0]) {
        assert!((z - C64::new(want, 0.0)).norm() < 1e-10, "{z} vs {want}");
    }

    let g = vectorize(&amplitude_damping(delta, gamma));
    assert!(g.trace_residual() < 1e-12);
    let ev = sorted_eigs(&g);
    let want = [C64::new(-gamma, 0.0), C64::new(-0.5 * gamma, -delta), C64::new(-0.5 * gamma, delta), C64::new(0.0, 0.0)];
    for (z, w) in ev.iter().zip(want) {
        assert!((z - w).norm() < 1e-10, "{z} vs {w}");
    }

    let excited = DensityMatrix::pure(&[qops::ONE, qops::ZERO]).unwrap();
    let times: Vec<f64> = (0..=40).map(|k| 0.5 * k as f64).collect();
    for backend in [Backend::Spectral, Backend::Stepper] {
        let tr = propagate(&g, &excited, &times, backend).unwrap();
        assert_eq!(tr.states[0].matrix(), excited.matrix());
        for (t, p) in tr.times.iter().zip(tr.element(0, 0)) {
            assert!((p.re - (-gamma * t).exp()).abs() < 1e-9);
        }
        assert!(tr.max_trace_error() < 1e-9);
    }
    for t in [0.0, 0.5, 3.0, 20.0] {
        let c = choi_psd_check(&g, t).unwrap();
        assert!(c >= -1e-12, "Choi min {c} at t = {t}");
    }
    assert!(choi_psd_check(&g, 0.0).unwrap().abs() < 1e-12);
}

#[test]
fn pure_dephasing_keeps_populations() {
    let gamma = 0.3;
    let h = herm(qops::scale(&pauli::z(), qops::cr(0.5)));
    let m = LindbladModel::new(h, herm(qops::zeros(2, 2)), vec![Jump { operator: pauli::z(), rate: gamma, omega: 0.0 }])
        .unwrap();
    let g = vectorize(&m);
    let psi = [qops::cr(0.6f64.sqrt()), qops::c(0.0, 0.4f64.sqrt())];
    let rho0 = DensityMatrix::pure(&psi).unwrap();
    let times: Vec<f64> = (0..=20).map(|k| k as f64).collect();
    let tr = propagate(&g, &rho0, &times, Backend::Spectral).unwrap();
    let c0 = rho0.matrix()[(0, 1)].norm();
    for (k, st) in tr.states.iter().enumerate() {
        assert!((st.matrix()[(0, 0)].re - 0.6).abs() < 1e-12);
        let want = c0 * (-2.0 * gamma * times[k]).exp();
        assert!((st.matrix()[(0, 1)].norm() - want).abs() < 1e-10);
    }
}

#[test]
fn gibbs_state_is_stationary() {
    let delta = 1.0;
    let h = herm(qops::scale(&pauli::z(), qops::cr(0.5 * delta)));
    for beta in [0.5, 1.0, 2.0] {
        let j = SpectralDensity::bosonic_thermal(SpectralDensity::ohmic(0.02, 1.0, 5.0).unwrap(), 1.0 / beta).unwrap();
        let sys = OpenSystem::new(&h, &[herm(pauli::x())], BathCoupling::single(j), None).unwrap();
        let g = sys.lindblad().unwrap();
        let ss = steady_state(&g).unwrap();
        let rho = ss.state.matrix();
        // eigenbasis: index 0 is the ground state
        let ratio = rho[(1, 1)].re / rho[(0, 0)].re;
        assert!((ratio - (-beta * delta).exp()).abs() < 1e-10, "beta {beta}: {ratio}");
        let gibbs = qops::diag_real(&[1.0, (-beta * delta).exp()]);
        let r = g.apply(&qops::vec_of(&gibbs)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(r <= 1e-8 * qops::max_abs(&g.matrix));
    }
}

#[test]
fn lamb_shift_two_level_structure() {
    let delta = 0.8;
    let h = herm(qops::scale(&pauli::z(), qops::cr(0.5 * delta)));
    let j = SpectralDensity::bosonic_thermal(SpectralDensity::ohmic(0.05, 1.0, 2.0).unwrap(), 0.5).unwrap();
    let sys = OpenSystem::new(&h, &[herm(pauli::x())], BathCoupling::single(j.clone()), None).unwrap();
    let h_ls = assemble_lamb_shift(&sys.spec, &sys.eigs, &sys.gamma).unwrap();
    let m = h_ls.matrix();
    let s_plus = gamma_coefficient(&j, delta).unwrap().lamb;
    let s_minus = gamma_coefficient(&j, -delta).unwrap().lamb;
    assert!(m[(0, 1)].norm() < 1e-14);
    assert!((m[(1, 1)].re - s_plus).abs() < 1e-12);
    assert!((m[(0, 0)].re - s_minus).abs() < 1e-12);
    assert!(((m[(1, 1)] - m[(0, 0)]).re - (s_plus - s_minus)).abs() < 1e-12);
}

#[test]
fn zero_temperature_two_level_has_single_emission_channel() {
    let delta = 1.0;
    let h = herm(qops::scale(&pauli::z(), qops::cr(0.5 * delta)));
    let j = SpectralDensity::ohmic(0.05, 1.0, 5.0).unwrap();
    let sys = OpenSystem::new(&h, &[herm(pauli::x())], BathCoupling::single(j.clone()), None).unwrap();
    let model = sys.lindblad_model().unwrap();
    assert_eq!(model.jumps.len(), 1);
    let jump = &model.jumps[0];
    assert_eq!(jump.omega, delta);
    assert!((jump.rate - j.evaluate(delta)).abs() < 1e-14);
    // lowers the excited level (index 1) to the ground level (index 0)
    let op = &jump.operator;
    assert!((op[(0, 1)].norm() - 1.0).abs() < 1e-14);
    assert!(op[(0, 0)].norm() + op[(1, 0)].norm() + op[(1, 1)].norm() < 1e-14);
}

#[test]
fn kondo_generator_structure() {
    let s: Vec<HermitianOperator> =
        [pauli::x(), pauli::y(), pauli::z()].iter().map(|p| herm(qops::scale(p, qops::cr(0.5)))).collect();
    let h = herm(qops::zeros(2, 2));
    let j = SpectralDensity::kondo(0.1, 1.0, 1.0, 0.0, 0.2).unwrap();
    let sys = OpenSystem::new(&h, &s, BathCoupling::Shared { density: j.clone(), weights: qops::identity(3) }, None)
        .unwrap();
    let model = sys.lindblad_model().unwrap();
    assert_eq!(model.jumps.len(), 3);
    let rate = j.evaluate_right(0.0);
    for jp in &model.jumps {
        assert!((jp.rate - rate).abs() < 1e-12 * rate);
    }
    // H_LS is a multiple of the identity.
    let m = model.h_ls.matrix();
    assert!(m[(0, 1)].norm() < 1e-14 && (m[(0, 0)] - m[(1, 1)]).norm() < 1e-14);

    // Single Bohr frequency: Redfield and Lindblad coincide.
    let lind = sys.lindblad().unwrap();
    let red = sys.redfield().unwrap();
    assert!(qops::max_abs(&qops::sub(&lind.matrix, &red.matrix)) < 1e-12);

    let ss = steady_state(&lind).unwrap();
    assert!(qops::max_abs(&qops::sub(ss.state.matrix(), &qops::scale(&qops::identity(2), qops::cr(0.5)))) < 1e-10);

    // ⟨S_z⟩ = ½ e^{−γ t}, coherences at the same rate.
    let up = DensityMatrix::pure(&[qops::ONE, qops::ZERO]).unwrap();
    let times: Vec<f64> = (0..=10).map(|k| 10.0 * k as f64).collect();
    let tr = propagate(&lind, &up, &times, Backend::Spectral).unwrap();
    for (t, st) in times.iter().zip(&tr.states) {
        let sz = expect(st.matrix(), &qops::scale(&pauli::z(), qops::cr(0.5)));
        assert!((sz - 0.5 * (-rate * t).exp()).abs() < 1e-10);
    }
    let plus = DensityMatrix::pure(&[qops::cr(0.5f64.sqrt()), qops::cr(0.5f64.sqrt())]).unwrap();
    let tr = propagate(&lind, &plus, &times, Backend::Spectral).unwrap();
    for (t, st) in times.iter().zip(&tr.states) {
        assert!((st.matrix()[(0, 1)].norm() - 0.5 * (-rate * t).exp()).abs() < 1e-10);
    }
}

#[test]
fn flat_rates_merge_into_single_jump() {
    let spec = SpectralDecomposition::from_diagonal(&[0.0, 1.0, 2.5]);
    let a = herm(qops::from_rows(&[
        vec![qops::cr(0.3), qops::c(0.5, 0.2), qops::cr(-0.4)],
        vec![qops::c(0.5, -0.2), qops::cr(-0.1), qops::c(0.0, 0.7)],
        vec![qops::cr(-0.4), qops::c(0.0, -0.7), qops::cr(0.2)],
    ])
    .unwrap());
    let bohr = bohr_frequencies(&spec, 0.0).unwrap();
    let eigs = decompose_all(&[a.clone()], &spec, &bohr).unwrap();
    let (gamma, s) = (0.3, 0.1);
    let blocks = bohr
        .frequencies
        .iter()
        .map(|&omega| GammaBlock {
            omega,
            gamma: qops::diag_real(&[gamma]),
            lamb: qops::diag_real(&[s]),
            rates: vec![gamma],
            vectors: qops::identity(1),
            discontinuous: false,
        })
        .collect();
    let red = assemble_redfield(&spec, &eigs, &GammaMatrix { blocks }).unwrap();

    // −i[H + S A², ρ] + γ(AρA − ½{A², ρ})
    let am = a.matrix();
    let a2 = am * am;
    let h = &spec.diagonal() + &qops::scale(&a2, qops::cr(s));
    let mut want = qops::zeros(9, 9);
    superop::add_left(&mut want, &h, qops::c(0.0, -1.0));
    superop::add_right(&mut want, &h, qops::c(0.0, 1.0));
    superop::add_sandwich(&mut want, am, am, qops::cr(gamma));
    superop::add_left(&mut want, &a2, qops::cr(-0.5 * gamma));
    superop::add_right(&mut want, &a2, qops::cr(-0.5 * gamma));
    assert!(qops::max_abs(&qops::sub(&red.matrix, &want)) < 1e-13);
}

#[test]
fn stale_jump_steady_state() {
    let (delta, h, gamma) = (1.0, 0.3, 0.05);
    let hm = &qops::scale(&pauli::z(), qops::cr(0.5 * delta)) + &qops::scale(&pauli::x(), qops::cr(0.5 * h));
    let m = LindbladModel::new(
        herm(hm),
        herm(qops::zeros(2, 2)),
        vec![Jump { operator: pauli::minus(), rate: gamma, omega: delta }],
    )
    .unwrap();
    let ss = steady_state(&vectorize(&m)).unwrap();
    let sz = expect(ss.state.matrix(), &pauli::z());
    let d2 = 4.0 * delta * delta + gamma * gamma;
    let want = -d2 / (d2 + 2.0 * h * h);
    assert!((sz - want).abs() < 1e-8, "{sz} vs {want}");
    let exact = -delta / (delta * delta + h * h).sqrt();
    assert!((sz - exact).abs() > 5e-4);
}

#[test]
fn rebuilt_jumps_relax_to_ground_state() {
    let (delta, h, gamma) = (1.0f64, 0.3f64, 0.05);
    let hm = herm(&qops::scale(&pauli::z(), qops::cr(0.5 * delta)) + &qops::scale(&pauli::x(), qops::cr(0.5 * h)));
    let split = (delta * delta + h * h).sqrt();
    let unit = SpectralDensity::ohmic(1.0, 1.0, 10.0).unwrap();
    let j = SpectralDensity::ohmic(gamma / unit.evaluate(split), 1.0, 10.0).unwrap();
    let sys = OpenSystem::new(&hm, &[herm(pauli::x())], BathCoupling::single(j), None).unwrap();
    let ss = steady_state(&sys.lindblad().unwrap()).unwrap();
    let rho = sys.spec.to_original(ss.state.matrix());
    let sz = expect(&rho, &pauli::z());
    assert!((sz + delta / split).abs() < 1e-3, "{sz}");
}

#[test]
fn redfield_spectrum_reported_for_v_system() {
    let spec = SpectralDecomposition::from_diagonal(&[0.0, 1.0, 1.02]);
    let a = herm(qops::from_rows(&[
        vec![qops::ZERO, qops::ONE, qops::ONE],
        vec![qops::ONE, qops::ZERO, qops::ZERO],
        vec![qops::ONE, qops::ZERO, qops::ZERO],
    ])
    .unwrap());
    let bohr = bohr_frequencies(&spec, 0.0).unwrap();
    let eigs = decompose_all(&[a], &spec, &bohr).unwrap();
    let j = SpectralDensity::ohmic(0.02, 1.0, 5.0).unwrap();
    let gamma = qbath::bath::gamma_matrix(&BathCoupling::single(j), &bohr.frequencies).unwrap();
    let red = assemble_redfield(&spec, &eigs, &gamma).unwrap();
    let lind = vectorize(&assemble_lindblad(&spec, &eigs, &gamma).unwrap());
    assert!(qops::max_abs(&qops::sub(&red.matrix, &lind.matrix)) > 1e-4);
    assert!(red.trace_residual() < 1e-12);
    let sp = spectrum(&red).unwrap();
    assert!(sp.biorthogonality_residual < 1e-8);
    assert!(spectrum(&lind).unwrap().max_real() <= 1e-10);
}

#[test]
fn rwa_probe_without_coupling_is_exact() {
    let times: Vec<f64> = (0..50).map(|k| k as f64).collect();
    let p = rwa_deviation_probe(C64::new(-0.1, 1.0), C64::new(-0.2, -1.0), C64::new(0.0, 0.0), &times).unwrap();
    assert!(p.deviation.iter().all(|&d| d == 0.0));
    assert!(p.crossover_time.is_none());
}

#[test]
fn trajectory_csv_round_trip() {
    let g = vectorize(&amplitude_damping(1.0, 0.1));
    let rho0 = DensityMatrix::pure(&[qops::cr(0.6), qops::c(0.0, 0.8)]).unwrap();
    let times: Vec<f64> = (0..=7).map(|k| 0.37 * k as f64).collect();
    let tr = propagate(&g, &rho0, &times, Backend::Spectral).unwrap();
    let csv = trajectory_csv(&tr);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,re(rho_00),re(rho_01),re(rho_10),re(rho_11),im(rho_00),im(rho_01),im(rho_10),im(rho_11),min_eig"
    );
    for (k, line) in lines.enumerate() {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[0], tr.times[k]);
        let m = tr.states[k].matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((v[1 + 2 * i + j] - m[(i, j)].re).abs() <= 1e-12);
                assert!((v[5 + 2 * i + j] - m[(i, j)].im).abs() <= 1e-12);
            }
        }
        assert_eq!(v[9], tr.positivity_min[k]);
    }
}

#[test]
fn generator_json_layout() {
    let g = vectorize(&amplitude_damping(1.0, 0.1));
    let v = generator_json(&g);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["kind"], "lindblad");
    assert_eq!(v["entries"].as_array().unwrap().len(), 16);
}

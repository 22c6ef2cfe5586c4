mod common;

use proptest::prelude::*;
use qbath::bath::{gamma_matrix, hilbert_transform, BathCoupling, SpectralDensity};
use qbath::master::*;
use qbath::memory::{volterra_fixed_step, ToyModelProblem};
use qbath::qops::{self, DensityMatrix};
use qbath::C64;

fn generator_invariants(seed: u64, d: usize) {
    let mut rng = common::rng(seed);
    let model = common::random_lindblad(&mut rng, d);
    let g = vectorize(&model);
    assert!(g.trace_residual() <= 1e-10);

    let sp = spectrum(&g).unwrap();
    assert!(sp.max_real() <= 1e-10, "max Re λ = {}", sp.max_real());
    assert!(!sp.null_indices(1e-8 * qops::max_abs(&g.matrix)).is_empty());
    assert!(sp.biorthogonality_residual <= 1e-8);

    let rho0 = common::random_state(&mut rng, d);
    let times = [0.0, 0.3, 1.0, 2.5];
    let a = propagate(&g, &rho0, &times, Backend::Spectral).unwrap();
    let b = propagate(&g, &rho0, &times, Backend::Stepper).unwrap();
    for tr in [&a, &b] {
        assert!(tr.max_trace_error() <= 1e-9);
        assert!(tr.max_hermiticity_error() <= 1e-9);
    }
    for (x, y) in a.states.iter().zip(&b.states) {
        let diff = common::trace_norm_diff(x.matrix(), y.matrix());
        assert!(diff <= 1e-8 * qops::trace_norm(y.matrix()), "spectral vs stepper {diff:.3e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lindblad_generator_invariants(seed in any::<u64>(), d in 2usize..=6) {
        generator_invariants(seed, d);
    }

    #[test]
    fn lindblad_maps_are_completely_positive(seed in any::<u64>(), d in 2usize..=3, t in 0.0f64..5.0) {
        let mut rng = common::rng(seed);
        let g = vectorize(&common::random_lindblad(&mut rng, d));
        prop_assert!(choi_psd_check(&g, t).unwrap() >= -1e-9);
    }

    #[test]
    fn redfield_is_trace_preserving(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = common::rng(seed);
        let h = common::random_nondegenerate_hamiltonian(&mut rng, d);
        let a = common::random_hermitian(&mut rng, d);
        let j = SpectralDensity::bosonic_thermal(SpectralDensity::ohmic(0.01, 1.0, 4.0).unwrap(), 0.7).unwrap();
        let sys = OpenSystem::new(&h, &[a], BathCoupling::single(j), None).unwrap();
        let red = sys.redfield().unwrap();
        prop_assert!(red.trace_residual() <= 1e-10);
        let rho0 = common::random_state(&mut rng, d);
        let tr = propagate(&red, &rho0, &[0.0, 1.0, 4.0], Backend::Auto).unwrap();
        prop_assert!(tr.max_trace_error() <= 1e-9);
        prop_assert!(tr.max_hermiticity_error() <= 1e-9);
    }

    #[test]
    fn thermal_detailed_balance(w in 0.01f64..3.0, temp in 0.1f64..3.0) {
        let bos = SpectralDensity::bosonic_thermal(SpectralDensity::ohmic(0.05, 1.0, 5.0).unwrap(), temp).unwrap();
        let fer = SpectralDensity::fermionic_band(1.0, 4.0, temp).unwrap();
        for j in [bos, fer] {
            let (pos, neg) = (j.evaluate(w), j.evaluate(-w));
            prop_assert!(pos >= 0.0 && neg >= 0.0);
            prop_assert!((neg - (-w / temp).exp() * pos).abs() <= 1e-8 * pos.max(1e-300));
        }
    }

    #[test]
    fn shared_rate_matrices_are_psd(seed in any::<u64>(), n in 1usize..=3, w in -2.0f64..2.0) {
        let mut rng = common::rng(seed);
        let m = common::random_matrix(&mut rng, n);
        let weights = &m * qops::dagger(&m);
        let j = SpectralDensity::bosonic_thermal(SpectralDensity::ohmic(0.05, 1.0, 2.0).unwrap(), 0.5).unwrap();
        let g = gamma_matrix(&BathCoupling::Shared { density: j, weights }, &[w]).unwrap();
        prop_assert!(g.blocks[0].rates.iter().all(|&r| r >= 0.0));
    }

    #[test]
    fn flat_hilbert_transform_is_odd(w in 0.0f64..3.0) {
        let j = SpectralDensity::flat(0.4, 2.0).unwrap();
        let a = hilbert_transform(&j, w).unwrap().value;
        let b = hilbert_transform(&j, -w).unwrap().value;
        prop_assert!((a + b).abs() <= 1e-10 * a.abs().max(1e-12));
    }

    #[test]
    fn toy_model_is_contractive(eta in 0.005f64..0.05, w0 in 0.2f64..1.5) {
        let p = ToyModelProblem::new(w0, SpectralDensity::ohmic(eta, 1.0, 1.0).unwrap()).unwrap();
        let sol = volterra_fixed_step(&p, C64::new(1.0, 0.0), 20.0, 0.02).unwrap();
        prop_assert!(sol.f.iter().all(|z| z.norm() <= 1.0 + 1e-6));
    }
}

#[test]
fn hermitian_states_stay_hermitian_under_random_generators() {
    for seed in 0..5 {
        let mut rng = common::rng(seed);
        let g = vectorize(&common::random_lindblad(&mut rng, 3));
        let rho0 = common::random_state(&mut rng, 3);
        let tr = propagate(&g, &rho0, &[0.0, 0.5, 2.0], Backend::Stepper).unwrap();
        assert!(tr.max_hermiticity_error() <= 1e-9);
        let _ = DensityMatrix::new(tr.states[2].matrix().clone()).unwrap();
    }
}

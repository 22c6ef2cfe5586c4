mod common;

use proptest::prelude::*;
use qbath::eigenops::*;
use qbath::qops::{self, pauli, HermitianOperator, SpectralDecomposition};
use qbath::{Error, C64};

fn herm(m: qbath::CMat) -> HermitianOperator {
    HermitianOperator::new(m).unwrap()
}

#[test]
fn two_level_frequencies() {
    let spec = SpectralDecomposition::from_diagonal(&[-0.35, 0.35]);
    let b = bohr_frequencies(&spec, 0.0).unwrap();
    assert_eq!(b.frequencies, vec![-0.7, 0.0, 0.7]);
    assert_eq!(b.level_pairs[2], vec![(0, 1)]);
    assert_eq!(b.positive(), vec![0.7]);
}

#[test]
fn degenerate_doublet_shares_zero_frequency() {
    let spec = SpectralDecomposition::from_diagonal(&[0.0, 1.0, 1.0]);
    let b = bohr_frequencies(&spec, 0.0).unwrap();
    assert_eq!(b.frequencies, vec![-1.0, 0.0, 1.0]);
    let zero = &b.level_pairs[1];
    assert_eq!(zero.len(), 5);
    assert!(zero.contains(&(1, 2)) && zero.contains(&(2, 1)));
}

/// Transitive clustering of all pairwise differences, written from scratch.
fn brute_force_clusters(e: &[f64], tol: f64) -> Vec<f64> {
    let mut diffs: Vec<f64> = e.iter().flat_map(|a| e.iter().map(move |b| b - a)).collect();
    diffs.sort_by(f64::total_cmp);
    let mut groups: Vec<Vec<f64>> = vec![vec![diffs[0]]];
    for x in diffs.into_iter().skip(1) {
        if x - groups.last().unwrap().last().unwrap() <= tol {
            groups.last_mut().unwrap().push(x);
        } else {
            groups.push(vec![x]);
        }
    }
    groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect()
}

#[test]
fn near_degenerate_transitions_merge() {
    let e = [0.0, 1.0, 2.05];
    let spec = SpectralDecomposition::from_diagonal(&e);
    let b = bohr_frequencies(&spec, 0.2).unwrap();
    let want = brute_force_clusters(&e, 0.2);
    assert_eq!(b.len(), 5);
    for (x, y) in b.frequencies.iter().zip(&want) {
        assert!((x - y).abs() < 1e-14);
    }
    assert!((b.frequencies[3] - 1.025).abs() < 1e-14);
}

#[test]
fn ambiguous_clustering_is_an_error() {
    let spec = SpectralDecomposition::from_diagonal(&[0.0, 1.0, 1.3]);
    match bohr_frequencies(&spec, 0.2) {
        Err(Error::AmbiguousClustering { .. }) => {}
        other => panic!("expected ambiguity error, got {other:?}"),
    }
    assert!(bohr_frequencies(&spec, -1.0).is_err());
}

#[test]
fn sigma_x_splits_into_ladder_operators() {
    let delta = 1.0;
    let h = herm(qops::scale(&pauli::z(), qops::cr(0.5 * delta)));
    let spec = qops::eig_hermitian(&h).unwrap();
    let bohr = bohr_frequencies(&spec, default_degeneracy_tol(&spec)).unwrap();
    let e = decompose(&herm(pauli::x()), &spec, &bohr, 0).unwrap();
    assert_eq!(e.frequencies(), vec![-delta, delta]);
    // eigenbasis order is (ground, excited)
    let lower = e.get(delta);
    assert!((lower[(0, 1)].norm() - 1.0).abs() < 1e-14);
    assert!(lower[(1, 0)].norm() < 1e-14);
    assert!(qops::max_abs(&qops::sub(&e.get(-delta), &qops::dagger(&lower))) < 1e-14);
    assert_eq!(qops::max_abs(&e.get(0.0)), 0.0);
}

#[test]
fn conserved_operator_has_only_zero_frequency() {
    let h = herm(qops::scale(&pauli::z(), qops::cr(0.5)));
    let spec = qops::eig_hermitian(&h).unwrap();
    let bohr = bohr_frequencies(&spec, 0.0).unwrap();
    let e = decompose(&herm(pauli::z()), &spec, &bohr, 0).unwrap();
    assert_eq!(e.frequencies(), vec![0.0]);
    assert!(qops::max_abs(&qops::sub(&e.get(0.0), &spec.to_eigenbasis(&pauli::z()))) < 1e-14);
}

#[test]
fn dimension_mismatch_is_rejected() {
    let spec = SpectralDecomposition::from_diagonal(&[0.0, 1.0, 2.0]);
    let bohr = bohr_frequencies(&spec, 0.0).unwrap();
    assert!(matches!(decompose(&herm(pauli::x()), &spec, &bohr, 0), Err(Error::DimensionMismatch(_))));
}

fn check_identities(seed: u64, d: usize) {
    let mut rng = common::rng(seed);
    let h = common::random_nondegenerate_hamiltonian(&mut rng, d);
    let a = common::random_hermitian(&mut rng, d);
    let spec = qops::eig_hermitian(&h).unwrap();
    let tol = default_degeneracy_tol(&spec);
    let bohr = bohr_frequencies(&spec, tol).unwrap();
    let e = decompose(&a, &spec, &bohr, 0).unwrap();
    let at = spec.to_eigenbasis(a.matrix());
    let norm = qops::max_abs(&at);

    assert!(qops::max_abs(&qops::sub(&e.sum(), &at)) <= 1e-12 * norm);
    let hd = spec.diagonal();
    for (w, m) in &e.entries {
        let r = &qops::commutator(&hd, m).unwrap() + &qops::scale(m, qops::cr(*w));
        let bound = (tol * qops::max_abs(m)).max(1e-10 * qops::max_abs(&hd));
        assert!(qops::max_abs(&r) <= bound);
        let back = qops::dagger(&e.get(-w));
        assert!(qops::max_abs(&qops::sub(m, &back)) <= 1e-12 * norm);
    }
    // A(t) = e^{iHt} A e^{−iHt} = Σ_Ω e^{−iΩt} 𝒜(Ω)
    for k in 0..50 {
        let t = 0.37 * k as f64 - 3.0;
        let u = qbath::CMat::from_fn(d, d, |i, j| if i == j { C64::from_polar(1.0, spec.eigenvalues[i] * t) } else { qops::ZERO });
        let direct = &(&u * &at) * &qops::dagger(&u);
        assert!(qops::max_abs(&qops::sub(&direct, &e.heisenberg(t))) <= 1e-9 * norm);
    }
}

#[test]
fn random_five_level_identities() {
    check_identities(5, 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenoperator_identities(seed in any::<u64>(), d in 2usize..=8) {
        check_identities(seed, d);
    }

    #[test]
    fn bohr_set_is_symmetric(levels in proptest::collection::vec(-3.0f64..3.0, 1..7)) {
        let spec = SpectralDecomposition::from_diagonal(&levels);
        let b = bohr_frequencies(&spec, 0.0).unwrap();
        let n = b.len();
        for i in 0..n {
            prop_assert_eq!(b.frequencies[i], -b.frequencies[n - 1 - i]);
        }
        prop_assert!(b.frequencies.windows(2).all(|w| w[1] > w[0]));
        let total: usize = b.level_pairs.iter().map(|p| p.len()).sum();
        prop_assert_eq!(total, levels.len() * levels.len());
    }
}

#[test]
fn heisenberg_phase_convention() {
    let spec = SpectralDecomposition::from_diagonal(&[0.0, 2.0]);
    let bohr = bohr_frequencies(&spec, 0.0).unwrap();
    let e = decompose(&herm(pauli::x()), &spec, &bohr, 0).unwrap();
    let t = 0.3;
    // ⟨0|A(t)|1⟩ = e^{i(ε0 − ε1)t}
    let want = C64::from_polar(1.0, -2.0 * t);
    assert!((e.heisenberg(t)[(0, 1)] - want).norm() < 1e-14);
}

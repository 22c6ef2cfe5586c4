//! Random operators and models shared by the integration tests.
#![allow(dead_code)]

use qbath::master::{Jump, LindbladModel};
use qbath::qops::{self, CMat, DensityMatrix, HermitianOperator};
use qbath::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, d: usize) -> CMat {
    CMat::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut StdRng, d: usize) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&random_matrix(rng, d)).unwrap()
}

/// Random mixed state `M M† / Tr(M M†)`.
pub fn random_state(rng: &mut StdRng, d: usize) -> DensityMatrix {
    let m = random_matrix(rng, d);
    let p = &m * qops::dagger(&m);
    let tr = qops::trace(&p);
    DensityMatrix::new(qops::hermitian_part(&qops::scale(&p, tr.inv()))).unwrap()
}

/// Random Hamiltonian, a commuting Lamb shift `c H²` and 1..=3 jumps.
pub fn random_lindblad(rng: &mut StdRng, d: usize) -> LindbladModel {
    let h = random_hermitian(rng, d);
    let h2 = h.matrix() * h.matrix();
    let h_ls = HermitianOperator::from_hermitian_part(&qops::scale(&h2, qops::cr(rng.gen_range(-0.1..0.1)))).unwrap();
    let n = rng.gen_range(1..=3);
    let jumps = (0..n)
        .map(|_| Jump { operator: random_matrix(rng, d), rate: rng.gen_range(0.05..1.0), omega: 0.0 })
        .collect();
    LindbladModel::new(h, h_ls, jumps).unwrap()
}

/// Eigenvalues with spacing bounded below, so that clustering at the default
/// tolerance is unambiguous.
pub fn random_nondegenerate_hamiltonian(rng: &mut StdRng, d: usize) -> HermitianOperator {
    let mut e: Vec<f64> = Vec::with_capacity(d);
    let mut x = rng.gen_range(-1.0..0.0);
    for _ in 0..d {
        e.push(x);
        x += rng.gen_range(0.1..1.0);
    }
    let u = unitary(rng, d);
    HermitianOperator::from_hermitian_part(&(&u * qops::diag_real(&e) * qops::dagger(&u))).unwrap()
}

/// Haar-ish unitary from the eigenvectors of a random Hermitian matrix.
pub fn unitary(rng: &mut StdRng, d: usize) -> CMat {
    qops::eig_hermitian(&random_hermitian(rng, d)).unwrap().eigenvectors
}

pub fn trace_norm_diff(a: &CMat, b: &CMat) -> f64 {
    qops::trace_norm(&qops::sub(a, b))
}

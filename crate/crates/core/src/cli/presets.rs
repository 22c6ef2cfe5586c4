//! Named systems and coupling operators.

use crate::error::{Error, Result};
use crate::qops::{self, pauli, CMat, HermitianOperator};

/// `½Δσ_z`.
pub fn two_level(delta: f64) -> HermitianOperator {
    HermitianOperator::from_diag(&[0.5 * delta, -0.5 * delta])
}

/// Ground state at zero and two excited levels `Δ₁`, `Δ₂`.
pub fn v_system(delta1: f64, delta2: f64) -> HermitianOperator {
    HermitianOperator::from_diag(&[0.0, delta1, delta2])
}

/// Vacuum (index 0) plus the single-particle sector of a periodic ring of `L`
/// sites: `offset − 2 hopping cos k` in momentum space.
pub fn lattice_1d(sites: usize, hopping: f64, offset: f64) -> Result<HermitianOperator> {
    if sites < 2 {
        return Err(Error::InvalidArgument(format!("lattice needs at least 2 sites, got {sites}")));
    }
    let d = sites + 1;
    let mut h = qops::zeros(d, d);
    for j in 0..sites {
        h[(j + 1, j + 1)] = qops::cr(offset);
        let k = (j + 1) % sites;
        if k != j {
            h[(j + 1, k + 1)] -= qops::cr(hopping);
            h[(k + 1, j + 1)] -= qops::cr(hopping);
        }
    }
    HermitianOperator::new(h)
}

pub fn sigma_x() -> Vec<HermitianOperator> {
    vec![HermitianOperator::new(pauli::x()).unwrap()]
}

/// `σ_x`, `σ_y` with weights `¼[[1, i], [−i, 1]]`, which is the bath coupling
/// `σ_+ B + σ_− B†` written in Hermitian components.
pub fn sigma_pm() -> (Vec<HermitianOperator>, CMat) {
    let ops = vec![HermitianOperator::new(pauli::x()).unwrap(), HermitianOperator::new(pauli::y()).unwrap()];
    let w = qops::from_rows(&[vec![qops::cr(0.25), qops::c(0.0, 0.25)], vec![qops::c(0.0, -0.25), qops::cr(0.25)]])
        .unwrap();
    (ops, w)
}

/// `S_α = σ_α/2`.
pub fn spin_vector() -> Vec<HermitianOperator> {
    [pauli::x(), pauli::y(), pauli::z()]
        .iter()
        .map(|p| HermitianOperator::new(qops::scale(p, qops::cr(0.5))).unwrap())
        .collect()
}

/// `Σ_k (|0⟩⟨k| + h.c.)`: every excited level decays to the ground level
/// through one bath.
pub fn ground_dipole(d: usize) -> Vec<HermitianOperator> {
    let mut a = qops::zeros(d, d);
    for k in 1..d {
        a[(0, k)] = qops::ONE;
        a[(k, 0)] = qops::ONE;
    }
    vec![HermitianOperator::new(a).unwrap()]
}

/// `|0⟩⟨j| + h.c.` for every site `j` of [`lattice_1d`]; with independent
/// baths this is loss without momentum conservation.
pub fn site_loss(sites: usize) -> Vec<HermitianOperator> {
    (1..=sites)
        .map(|j| {
            let mut a = qops::zeros(sites + 1, sites + 1);
            a[(0, j)] = qops::ONE;
            a[(j, 0)] = qops::ONE;
            HermitianOperator::new(a).unwrap()
        })
        .collect()
}

//! End-to-end assembly from an `H_S`, coupling operators and a bath.

use super::{assemble_lindblad, assemble_redfield, vectorize, GeneratorMatrix, LindbladModel};
use crate::bath::{gamma_matrix, BathCoupling, GammaMatrix};
use crate::eigenops::{bohr_frequencies, decompose_all, default_degeneracy_tol, BohrFrequencySet, EigenoperatorSet};
use crate::error::Result;
use crate::qops::{self, HermitianOperator, SpectralDecomposition};

/// Everything the generators are built from, in the eigenbasis of `H_S`.
#[derive(Clone, Debug)]
pub struct OpenSystem {
    pub spec: SpectralDecomposition,
    pub bohr: BohrFrequencySet,
    pub eigs: Vec<EigenoperatorSet>,
    pub coupling: BathCoupling,
    pub gamma: GammaMatrix,
}

impl OpenSystem {
    /// `degeneracy_tol = None` uses [`default_degeneracy_tol`].
    pub fn new(
        h_s: &HermitianOperator,
        couplings: &[HermitianOperator],
        coupling: BathCoupling,
        degeneracy_tol: Option<f64>,
    ) -> Result<Self> {
        let spec = qops::eig_hermitian(h_s)?;
        let tol = degeneracy_tol.unwrap_or_else(|| default_degeneracy_tol(&spec));
        let bohr = bohr_frequencies(&spec, tol)?;
        let eigs = decompose_all(couplings, &spec, &bohr)?;
        let gamma = gamma_matrix(&coupling, &bohr.frequencies)?;
        Ok(Self { spec, bohr, eigs, coupling, gamma })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn lindblad_model(&self) -> Result<LindbladModel> {
        assemble_lindblad(&self.spec, &self.eigs, &self.gamma)
    }

    pub fn lindblad(&self) -> Result<GeneratorMatrix> {
        Ok(vectorize(&self.lindblad_model()?))
    }

    pub fn redfield(&self) -> Result<GeneratorMatrix> {
        assemble_redfield(&self.spec, &self.eigs, &self.gamma)
    }
}

//! Lindblad and Redfield generators, their spectra, propagation and steady
//! states.
//!
//! All operators handed to the assembly routines live in the eigenbasis of
//! `H_S` (as produced by [`crate::eigenops`]). Superoperators act on
//! column-stacked density matrices.

mod export;
mod ode;
mod probe;
mod propagate;
mod spectrum;
mod system;
pub mod superop;

pub use export::{format_float, generator_json, trajectory_csv};
pub use ode::{dopri5, OdeOptions};
pub use probe::{rwa_deviation_probe, RwaProbe};
pub use propagate::{propagate, redfield_time_dependent, Backend, Trajectory};
pub use spectrum::{choi_psd_check, spectrum, steady_state, GeneratorSpectrum, SteadyState};
pub use system::OpenSystem;

use serde::Serialize;

use crate::bath::GammaMatrix;
use crate::eigenops::EigenoperatorSet;
use crate::error::{Error, Result};
use crate::qops::{self, CMat, HermitianOperator, SpectralDecomposition};
use crate::C64;

/// Rates below this fraction of the largest rate are dropped.
pub const RATE_PRUNE_REL: f64 = 1e-12;
/// Relative tolerance on `[H_S, H_LS]`.
pub const LAMB_COMMUTATOR_TOL: f64 = 1e-9;

/// One dissipative channel.
#[derive(Clone, Debug)]
pub struct Jump {
    pub operator: CMat,
    pub rate: f64,
    pub omega: f64,
}

/// Hamiltonian, Lamb shift and jump operators of a Lindblad equation.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub h_s: HermitianOperator,
    pub h_ls: HermitianOperator,
    pub jumps: Vec<Jump>,
}

impl LindbladModel {
    pub fn new(h_s: HermitianOperator, h_ls: HermitianOperator, jumps: Vec<Jump>) -> Result<Self> {
        let d = h_s.dim();
        if h_ls.dim() != d || jumps.iter().any(|j| j.operator.nrows() != d || j.operator.ncols() != d) {
            return Err(Error::DimensionMismatch(format!("Lindblad model pieces must all be {d}x{d}")));
        }
        if let Some(j) = jumps.iter().find(|j| !(j.rate >= 0.0) || !j.rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("jump rate {} must be finite and >= 0", j.rate)));
        }
        check_lamb_commutes(h_s.matrix(), h_ls.matrix())?;
        Ok(Self { h_s, h_ls, jumps })
    }

    pub fn dim(&self) -> usize {
        self.h_s.dim()
    }

    /// `H_S + H_LS`.
    pub fn hamiltonian(&self) -> CMat {
        qops::add(self.h_s.matrix(), self.h_ls.matrix())
    }
}

fn check_lamb_commutes(h: &CMat, h_ls: &CMat) -> Result<()> {
    let comm = qops::commutator(h, h_ls)?;
    let residual = qops::max_abs(&comm);
    let tol = LAMB_COMMUTATOR_TOL * qops::max_abs(h).max(1.0) * qops::max_abs(h_ls);
    if residual > tol {
        return Err(Error::LambShiftCommutator { residual });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Lindblad,
    Redfield,
}

/// Superoperator `L` with `d vec(ρ)/dt = L vec(ρ)`.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    pub dim: usize,
    pub kind: GeneratorKind,
    pub matrix: CMat,
}

impl GeneratorMatrix {
    pub fn from_matrix(dim: usize, kind: GeneratorKind, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "generator must be {0}x{0} for d = {dim}",
                dim * dim
            )));
        }
        qops::check_finite(&matrix)?;
        Ok(Self { dim, kind, matrix })
    }

    /// `L vec(ρ)`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        qops::matvec(&self.matrix, v)
    }

    /// `max_col |vec(I)† L|`; zero for a trace-preserving generator.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dim;
        (0..d * d)
            .map(|c| (0..d).map(|i| self.matrix[(i + d * i, c)]).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }
}

fn coherent_part(h: &CMat) -> CMat {
    let d = h.nrows();
    let mut out = qops::zeros(d * d, d * d);
    superop::add_left(&mut out, h, C64::new(0.0, -1.0));
    superop::add_right(&mut out, h, C64::new(0.0, 1.0));
    out
}

/// Column-stacked generator of a Lindblad model.
pub fn vectorize(model: &LindbladModel) -> GeneratorMatrix {
    let d = model.dim();
    let mut out = coherent_part(&model.hamiltonian());
    for j in &model.jumps {
        let l = &j.operator;
        let ld = qops::dagger(l);
        let ldl = &ld * l;
        superop::add_sandwich(&mut out, l, &ld, qops::cr(j.rate));
        superop::add_left(&mut out, &ldl, qops::cr(-0.5 * j.rate));
        superop::add_right(&mut out, &ldl, qops::cr(-0.5 * j.rate));
    }
    GeneratorMatrix { dim: d, kind: GeneratorKind::Lindblad, matrix: out }
}

fn check_labels(eigs: &[EigenoperatorSet], gamma: &GammaMatrix) -> Result<()> {
    if gamma.n_labels() != eigs.len() && !gamma.blocks.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} coupling operators but rate matrices of size {}",
            eigs.len(),
            gamma.n_labels()
        )));
    }
    Ok(())
}

/// All frequencies carrying a nonzero eigenoperator, ascending.
fn active_frequencies(eigs: &[EigenoperatorSet]) -> Vec<f64> {
    let mut w: Vec<f64> = eigs.iter().flat_map(|e| e.frequencies()).collect();
    w.sort_by(f64::total_cmp);
    w.dedup();
    w
}

fn block_for<'a>(gamma: &'a GammaMatrix, omega: f64) -> Result<&'a crate::bath::GammaBlock> {
    gamma
        .block(omega)
        .ok_or_else(|| Error::InvalidArgument(format!("no rate matrix supplied for Bohr frequency {omega}")))
}

/// `H_LS = Σ_Ω Σ_αβ S_αβ(Ω) 𝒜_α†(Ω) 𝒜_β(Ω)`.
pub fn assemble_lamb_shift(
    spec: &SpectralDecomposition,
    eigs: &[EigenoperatorSet],
    gamma: &GammaMatrix,
) -> Result<HermitianOperator> {
    check_labels(eigs, gamma)?;
    let d = spec.dim();
    let mut h = qops::zeros(d, d);
    for omega in active_frequencies(eigs) {
        let block = block_for(gamma, omega)?;
        let ops: Vec<CMat> = eigs.iter().map(|e| e.get(omega)).collect();
        for (a, oa) in ops.iter().enumerate() {
            let oa_dag = qops::dagger(oa);
            for (b, ob) in ops.iter().enumerate() {
                let s = block.lamb[(a, b)];
                if s != C64::new(0.0, 0.0) {
                    h += qops::scale(&(&oa_dag * ob), s);
                }
            }
        }
    }
    let h = qops::hermitian_part(&h);
    check_lamb_commutes(&spec.diagonal(), &h)?;
    HermitianOperator::new(h)
}

/// Jumps `L_a(Ω) = Σ_β conj(u_βa) 𝒜_β(Ω)` with rates given by the eigenvalues
/// of `γ(Ω)`.
pub fn assemble_lindblad(
    spec: &SpectralDecomposition,
    eigs: &[EigenoperatorSet],
    gamma: &GammaMatrix,
) -> Result<LindbladModel> {
    check_labels(eigs, gamma)?;
    let h_ls = assemble_lamb_shift(spec, eigs, gamma)?;
    let d = spec.dim();
    let mut jumps = Vec::new();
    for omega in active_frequencies(eigs) {
        let block = block_for(gamma, omega)?;
        let ops: Vec<CMat> = eigs.iter().map(|e| e.get(omega)).collect();
        for (a, &rate) in block.rates.iter().enumerate() {
            let mut l = qops::zeros(d, d);
            for (b, ob) in ops.iter().enumerate() {
                l += qops::scale(ob, block.vectors[(b, a)].conj());
            }
            if qops::max_abs(&l) > 0.0 {
                jumps.push(Jump { operator: l, rate, omega });
            }
        }
    }
    let max_rate = jumps.iter().map(|j| j.rate).fold(0.0, f64::max);
    jumps.retain(|j| j.rate > RATE_PRUNE_REL * max_rate && j.rate > 0.0);
    LindbladModel::new(HermitianOperator::from_diag(&spec.eigenvalues), h_ls, jumps)
}

/// Redfield generator keeping all cross-frequency terms:
/// `Σ Γ_βα(Ω)[𝒜_α(Ω) ρ A_β − A_β 𝒜_α(Ω) ρ] + h.c.`
pub fn assemble_redfield(
    spec: &SpectralDecomposition,
    eigs: &[EigenoperatorSet],
    gamma: &GammaMatrix,
) -> Result<GeneratorMatrix> {
    check_labels(eigs, gamma)?;
    let coeff = |omega: f64, b: usize, a: usize| -> Result<C64> { Ok(block_for(gamma, omega)?.half_fourier(b, a)) };
    redfield_with(spec, eigs, coeff)
}

/// Redfield assembly with an arbitrary coefficient source `Γ(Ω, β, α)`.
pub(crate) fn redfield_with<F>(spec: &SpectralDecomposition, eigs: &[EigenoperatorSet], coeff: F) -> Result<GeneratorMatrix>
where
    F: Fn(f64, usize, usize) -> Result<C64>,
{
    let d = spec.dim();
    let mut out = coherent_part(&spec.diagonal());
    let full: Vec<CMat> = eigs.iter().map(|e| e.sum()).collect();
    for omega in active_frequencies(eigs) {
        for (a, ea) in eigs.iter().enumerate() {
            let op = ea.get(omega);
            if qops::max_abs(&op) == 0.0 {
                continue;
            }
            let op_dag = qops::dagger(&op);
            for (b, ab) in full.iter().enumerate() {
                let g = coeff(omega, b, a)?;
                if g == C64::new(0.0, 0.0) {
                    continue;
                }
                superop::add_sandwich(&mut out, &op, ab, g);
                superop::add_left(&mut out, &(ab * &op), -g);
                superop::add_sandwich(&mut out, ab, &op_dag, g.conj());
                superop::add_right(&mut out, &(&op_dag * ab), -g.conj());
            }
        }
    }
    GeneratorMatrix::from_matrix(d, GeneratorKind::Redfield, out)
}

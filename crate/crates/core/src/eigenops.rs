//! Bohr frequencies of a system Hamiltonian and the eigenoperator split of
//! coupling operators.
//!
//! The eigenoperator for frequency Ω collects the matrix elements of `A`
//! between levels `m` and `n` with `ε_n − ε_m = Ω`:
//! `𝒜(Ω) = Σ |m⟩⟨m|A|n⟩⟨n|`, so that `[H_S, 𝒜(Ω)] = −Ω 𝒜(Ω)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qops::{self, CMat, HermitianOperator, SpectralDecomposition};

/// Relative scale of the default degeneracy tolerance.
pub const DEFAULT_DEGENERACY_REL: f64 = 1e-9;

/// Default clustering tolerance: a tiny fraction of the spectral range.
pub fn default_degeneracy_tol(spec: &SpectralDecomposition) -> f64 {
    let e = &spec.eigenvalues;
    match (e.first(), e.last()) {
        (Some(lo), Some(hi)) => DEFAULT_DEGENERACY_REL * (hi - lo),
        _ => 0.0,
    }
}

/// Clustered transition frequencies with the level pairs behind each one.
#[derive(Clone, Debug, Serialize)]
pub struct BohrFrequencySet {
    pub frequencies: Vec<f64>,
    pub degeneracy_tol: f64,
    /// For each frequency, the `(m, n)` pairs with `ε_n − ε_m ≈ Ω`.
    pub level_pairs: Vec<Vec<(usize, usize)>>,
}

impl BohrFrequencySet {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Index of the cluster containing `omega`, if any.
    pub fn index_of(&self, omega: f64) -> Option<usize> {
        let tol = self.degeneracy_tol.max(1e-14 * (1.0 + omega.abs()));
        self.frequencies.iter().position(|&w| (w - omega).abs() <= tol)
    }

    /// Strictly positive frequencies, ascending.
    pub fn positive(&self) -> Vec<f64> {
        self.frequencies.iter().copied().filter(|&w| w > 0.0).collect()
    }
}

/// Cluster all pairwise level differences.
pub fn bohr_frequencies(spec: &SpectralDecomposition, degeneracy_tol: f64) -> Result<BohrFrequencySet> {
    if !(degeneracy_tol >= 0.0) || !degeneracy_tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "degeneracy tolerance must be finite and non-negative, got {degeneracy_tol}"
        )));
    }
    let e = &spec.eigenvalues;
    let d = e.len();
    let mut diffs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            diffs.push((e[n] - e[m], m, n));
        }
    }
    diffs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    // Transitive single-linkage clustering on the sorted list.
    let mut clusters: Vec<Vec<(f64, usize, usize)>> = Vec::new();
    for item in diffs {
        match clusters.last_mut() {
            Some(last) if item.0 - last.last().unwrap().0 <= degeneracy_tol => last.push(item),
            _ => clusters.push(vec![item]),
        }
    }

    let mut reps: Vec<f64> = clusters
        .iter()
        .map(|c| c.iter().map(|x| x.0).sum::<f64>() / c.len() as f64)
        .collect();
    // The multiset of differences is exactly symmetric, so the clusters are too;
    // symmetrize the representatives so negation holds bitwise.
    let k = reps.len();
    for i in 0..k / 2 {
        let r = 0.5 * (reps[k - 1 - i] - reps[i]);
        reps[i] = -r;
        reps[k - 1 - i] = r;
    }
    if k % 2 == 1 {
        reps[k / 2] = 0.0;
    }

    if degeneracy_tol > 0.0 {
        for w in reps.windows(2) {
            if degeneracy_tol > 0.5 * (w[1] - w[0]) {
                return Err(Error::AmbiguousClustering { a: w[0], b: w[1], tol: degeneracy_tol });
            }
        }
    }

    let level_pairs = clusters
        .into_iter()
        .map(|c| c.into_iter().map(|(_, m, n)| (m, n)).collect())
        .collect();
    Ok(BohrFrequencySet { frequencies: reps, degeneracy_tol, level_pairs })
}

/// Eigenoperators of one coupling operator, in the eigenbasis of `H_S`.
#[derive(Clone, Debug)]
pub struct EigenoperatorSet {
    pub coupling_index: usize,
    /// `(Ω, 𝒜(Ω))`, ascending in Ω. Blocks that vanish identically are omitted.
    pub entries: Vec<(f64, CMat)>,
    dim: usize,
}

impl EigenoperatorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `𝒜(Ω)`, or the zero matrix when no transition at Ω carries weight.
    pub fn get(&self, omega: f64) -> CMat {
        self.entries
            .iter()
            .find(|(w, _)| *w == omega)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| qops::zeros(self.dim, self.dim))
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.entries.iter().map(|(w, _)| *w).collect()
    }

    /// `Σ_Ω 𝒜(Ω)`, which reproduces the coupling operator in the eigenbasis.
    pub fn sum(&self) -> CMat {
        let mut out = qops::zeros(self.dim, self.dim);
        for (_, m) in &self.entries {
            out += m;
        }
        out
    }

    /// `Σ_Ω e^{−iΩt} 𝒜(Ω)`, the interaction-picture coupling operator.
    pub fn heisenberg(&self, t: f64) -> CMat {
        let mut out = qops::zeros(self.dim, self.dim);
        for (w, m) in &self.entries {
            let ph = qops::c((w * t).cos(), -(w * t).sin());
            out += qops::scale(m, ph);
        }
        out
    }
}

/// Split `a` (given in the original basis) into eigenoperators.
pub fn decompose(
    a: &HermitianOperator,
    spec: &SpectralDecomposition,
    bohr: &BohrFrequencySet,
    coupling_index: usize,
) -> Result<EigenoperatorSet> {
    let d = spec.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "coupling operator is {}x{} but H_S has dimension {d}",
            a.dim(),
            a.dim()
        )));
    }
    if let Some(&(m, n)) = bohr.level_pairs.iter().flatten().find(|&&(m, n)| m >= d || n >= d) {
        return Err(Error::DimensionMismatch(format!(
            "Bohr set refers to level pair ({m}, {n}) outside dimension {d}"
        )));
    }
    let at = spec.to_eigenbasis(a.matrix());
    let scale = qops::max_abs(&at);
    let mut entries = Vec::new();
    for (omega, pairs) in bohr.frequencies.iter().zip(&bohr.level_pairs) {
        let mut block = qops::zeros(d, d);
        for &(m, n) in pairs {
            block[(m, n)] = at[(m, n)];
        }
        if qops::max_abs(&block) > 1e-14 * scale {
            entries.push((*omega, block));
        }
    }
    Ok(EigenoperatorSet { coupling_index, entries, dim: d })
}

/// Decompose several coupling operators against the same `H_S`.
pub fn decompose_all(
    couplings: &[HermitianOperator],
    spec: &SpectralDecomposition,
    bohr: &BohrFrequencySet,
) -> Result<Vec<EigenoperatorSet>> {
    couplings
        .iter()
        .enumerate()
        .map(|(i, a)| decompose(a, spec, bohr, i))
        .collect()
}

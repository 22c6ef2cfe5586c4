//! Bi-orthogonal spectra, stationary states and complete-positivity checks.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;
use serde::Serialize;

use super::{GeneratorKind, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::qops::{self, CMat, DensityMatrix};
use crate::C64;

/// Eigenvector condition number beyond which a generator counts as defective.
pub const MAX_EIGVEC_CONDITION: f64 = 1e8;
/// Tolerance on `max Re λ` and on the null eigenvalue for Lindblad generators.
pub const LINDBLAD_SPECTRAL_TOL: f64 = 1e-10;
/// Eigenvalues this close to zero (times the generator scale) are null.
pub const NULL_TOL: f64 = 1e-8;

/// `L = Σ_μ λ_μ |r_μ⟩⟨l_μ|` with `⟨l_μ|r_ν⟩ = δ_μν`.
#[derive(Clone, Debug)]
pub struct GeneratorSpectrum {
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors as columns.
    pub right: CMat,
    /// Left eigenvectors as rows.
    pub left: CMat,
    pub biorthogonality_residual: f64,
    pub condition: f64,
}

impl GeneratorSpectrum {
    pub fn max_real(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Indices of eigenvalues within `tol` of zero.
    pub fn null_indices(&self, tol: f64) -> Vec<usize> {
        (0..self.eigenvalues.len()).filter(|&i| self.eigenvalues[i].norm() <= tol).collect()
    }
}

fn generator_scale(g: &GeneratorMatrix) -> f64 {
    qops::max_abs(&g.matrix).max(1.0)
}

/// Diagonalize the generator and build the dual basis.
pub fn spectrum(g: &GeneratorMatrix) -> Result<GeneratorSpectrum> {
    let n = g.matrix.nrows();
    let evd = g.matrix.eigen().map_err(|e| Error::Eigensolver {
        dim: n,
        norm: qops::max_abs(&g.matrix),
        message: format!("{e:?}"),
    })?;
    let s = evd.S();
    let eigenvalues: Vec<C64> = (0..n).map(|i| s.column_vector()[i]).collect();
    let u = evd.U();
    let mut right = Mat::from_fn(n, n, |i, j| u[(i, j)]);
    for j in 0..n {
        let norm: f64 = (0..n).map(|i| right[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                right[(i, j)] /= norm;
            }
        }
    }
    let sv = right.singular_values().map_err(|e| Error::Eigensolver {
        dim: n,
        norm: 1.0,
        message: format!("singular values of eigenvector matrix: {e:?}"),
    })?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_EIGVEC_CONDITION) {
        return Err(Error::NearDefective { cond: condition });
    }
    let left = right.partial_piv_lu().inverse();
    let prod = &left * &right;
    let biorthogonality_residual = qops::max_abs(&(prod - qops::identity(n)));

    let spec = GeneratorSpectrum { eigenvalues, right, left, biorthogonality_residual, condition };
    if g.kind == GeneratorKind::Lindblad {
        let tol = LINDBLAD_SPECTRAL_TOL * generator_scale(g);
        if spec.max_real() > tol {
            return Err(Error::SpectralInvariant(format!(
                "Lindblad generator has eigenvalue with real part {:.3e} > 0",
                spec.max_real()
            )));
        }
        if spec.min_abs() > tol {
            return Err(Error::SpectralInvariant(format!(
                "Lindblad generator has no null eigenvalue (min |λ| = {:.3e})",
                spec.min_abs()
            )));
        }
    }
    Ok(spec)
}

/// Stationary state of a generator.
#[derive(Clone, Debug, Serialize)]
pub struct SteadyState {
    #[serde(skip)]
    pub state: DensityMatrix,
    /// Dimension of the null space.
    pub null_dim: usize,
    /// A basis of stationary matrices when the null space is degenerate.
    #[serde(skip)]
    pub basis: Vec<CMat>,
    /// Only Lindblad generators guarantee a positive fixed point.
    pub positivity_guaranteed: bool,
    pub min_eigenvalue: f64,
}

/// Normalized null vector of the generator.
pub fn steady_state(g: &GeneratorMatrix) -> Result<SteadyState> {
    let d = g.dim;
    let n = d * d;
    let tol = NULL_TOL * generator_scale(g);
    let (null_dim, basis) = match spectrum(g) {
        Ok(sp) => {
            let idx = sp.null_indices(tol);
            if idx.is_empty() {
                return Err(Error::NoSteadyState(sp.min_abs()));
            }
            let basis: Vec<CMat> = idx
                .iter()
                .map(|&k| {
                    let col: Vec<C64> = (0..n).map(|i| sp.right[(i, k)]).collect();
                    qops::unvec(&col, d)
                })
                .collect();
            (idx.len(), basis)
        }
        Err(Error::NearDefective { .. }) => (1, Vec::new()),
        Err(e) => return Err(e),
    };

    let state = if null_dim == 1 {
        // Replace one equation by the trace constraint and solve directly; this is
        // more accurate than the eigenvector.
        let mut a = g.matrix.clone();
        let mut b = Mat::<C64>::zeros(n, 1);
        for c in 0..n {
            a[(0, c)] = C64::new(0.0, 0.0);
        }
        for i in 0..d {
            a[(0, i + d * i)] = C64::new(1.0, 0.0);
        }
        b[(0, 0)] = C64::new(1.0, 0.0);
        let x = a.partial_piv_lu().solve(&b);
        let v: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
        if v.iter().any(|z| !z.is_finite()) {
            return Err(Error::NoSteadyState(0.0));
        }
        let residual = qops::matvec(&g.matrix, &v).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual > tol {
            return Err(Error::NoSteadyState(residual));
        }
        qops::hermitian_part(&qops::unvec(&v, d))
    } else {
        let m = basis
            .iter()
            .find(|m| qops::trace(m).norm() > NULL_TOL)
            .ok_or(Error::NoSteadyState(0.0))?;
        qops::hermitian_part(&qops::scale(m, qops::trace(m).inv()))
    };
    let min_eigenvalue = qops::min_eigenvalue_of(&state)?;
    Ok(SteadyState {
        state: DensityMatrix::unchecked(state),
        null_dim,
        basis,
        positivity_guaranteed: g.kind == GeneratorKind::Lindblad,
        min_eigenvalue,
    })
}

/// Smallest eigenvalue of the Choi matrix of `e^{L t}`.
pub fn choi_psd_check(g: &GeneratorMatrix, t: f64) -> Result<f64> {
    let d = g.dim;
    if d > 8 {
        return Err(Error::InvalidArgument(format!("Choi check limited to d <= 8, got {d}")));
    }
    let e = qops::expm(&qops::scale(&g.matrix, qops::cr(t)));
    // C[(i d + k), (j d + l)] = E(|i⟩⟨j|)_{kl}
    let choi = Mat::from_fn(d * d, d * d, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        e[(k + d * l, i + d * j)]
    });
    qops::min_eigenvalue_of(&choi)
}

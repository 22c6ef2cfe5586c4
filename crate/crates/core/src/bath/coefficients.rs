//! Markovian coefficients `Γ(Ω) = ½γ(Ω) + iS(Ω)`, cross-spectral matrices and
//! the Kondo relaxation rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::hilbert::HilbertTransform;
use super::spectral::SpectralDensity;
use crate::error::{Error, Result};
use crate::qops::{self, CMat};
use crate::quad::{self, QuadOptions};
use crate::C64;

/// Lowest eigenvalue of a rate matrix tolerated before it is declared
/// inconsistent.
pub const GAMMA_PSD_TOL: f64 = 1e-8;

/// `Γ(Ω)` split into rate and dispersive part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfFourierCoefficient {
    pub omega: f64,
    /// `γ(Ω) = J(Ω)`; the right limit at a jump.
    pub gamma: f64,
    /// `S(Ω) = R(Ω)`.
    pub lamb: f64,
    /// `J` is discontinuous exactly at Ω.
    pub discontinuous: bool,
}

impl HalfFourierCoefficient {
    /// `Γ(Ω) = γ/2 + iS`.
    pub fn value(&self) -> C64 {
        C64::new(0.5 * self.gamma, self.lamb)
    }
}

/// `Γ(Ω)` for a single density.
pub fn gamma_coefficient(j: &SpectralDensity, omega: f64) -> Result<HalfFourierCoefficient> {
    gamma_coefficient_with(j, &HilbertTransform::new(j), omega)
}

fn gamma_coefficient_with(j: &SpectralDensity, h: &HilbertTransform, omega: f64) -> Result<HalfFourierCoefficient> {
    let hv = h.eval(omega)?;
    let gamma = j.evaluate_right(omega);
    Ok(HalfFourierCoefficient { omega, gamma, lamb: hv.value, discontinuous: hv.discontinuous })
}

/// How the bath couples to the labelled system operators.
#[derive(Clone, Debug)]
pub enum BathCoupling {
    /// `J_αβ(ω) = w_αβ J(ω)` with a Hermitian positive semidefinite weight matrix.
    Shared { density: SpectralDensity, weights: CMat },
    /// Independent baths, one per label: `J_αβ = δ_αβ J_α`.
    Independent(Vec<SpectralDensity>),
}

impl BathCoupling {
    pub fn single(density: SpectralDensity) -> Self {
        BathCoupling::Shared { density, weights: qops::identity(1) }
    }

    pub fn n_labels(&self) -> usize {
        match self {
            BathCoupling::Shared { weights, .. } => weights.nrows(),
            BathCoupling::Independent(v) => v.len(),
        }
    }

    /// Every distinct density involved.
    pub fn densities(&self) -> Vec<&SpectralDensity> {
        match self {
            BathCoupling::Shared { density, .. } => vec![density],
            BathCoupling::Independent(v) => v.iter().collect(),
        }
    }

    /// Same coupling with every density amplitude scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            BathCoupling::Shared { density, weights } => {
                BathCoupling::Shared { density: density.scaled(s), weights: weights.clone() }
            }
            BathCoupling::Independent(v) => BathCoupling::Independent(v.iter().map(|j| j.scaled(s)).collect()),
        }
    }

    fn validate(&self) -> Result<()> {
        if let BathCoupling::Shared { weights, .. } = self {
            if weights.nrows() != weights.ncols() {
                return Err(Error::DimensionMismatch("coupling weight matrix must be square".into()));
            }
            let res = qops::hermiticity_residual(weights);
            if res > qops::HERMITIAN_TOL * qops::max_abs(weights).max(1.0) {
                return Err(Error::NotHermitian { residual: res, tol: qops::HERMITIAN_TOL });
            }
        }
        Ok(())
    }
}

/// Rate and Lamb-shift matrices at one Bohr frequency.
#[derive(Clone, Debug)]
pub struct GammaBlock {
    pub omega: f64,
    /// `γ_αβ(Ω)`, Hermitian PSD.
    pub gamma: CMat,
    /// `S_αβ(Ω)`, Hermitian.
    pub lamb: CMat,
    /// Eigenvalues of `gamma`, ascending, clipped at zero.
    pub rates: Vec<f64>,
    /// Columns are the eigenvectors `u_a` of `gamma`.
    pub vectors: CMat,
    pub discontinuous: bool,
}

impl GammaBlock {
    /// `Γ_αβ(Ω) = ½γ_αβ + iS_αβ`.
    pub fn half_fourier(&self, a: usize, b: usize) -> C64 {
        self.gamma[(a, b)] * 0.5 + qops::I * self.lamb[(a, b)]
    }
}

/// Rate matrices over a set of Bohr frequencies.
#[derive(Clone, Debug)]
pub struct GammaMatrix {
    pub blocks: Vec<GammaBlock>,
}

impl GammaMatrix {
    pub fn block(&self, omega: f64) -> Option<&GammaBlock> {
        self.blocks.iter().find(|b| b.omega == omega)
    }

    pub fn n_labels(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.gamma.nrows())
    }

    pub fn any_discontinuous(&self) -> bool {
        self.blocks.iter().any(|b| b.discontinuous)
    }
}

/// Build `γ(Ω)` and `S(Ω)` at every requested frequency.
pub fn gamma_matrix(coupling: &BathCoupling, omegas: &[f64]) -> Result<GammaMatrix> {
    coupling.validate()?;
    let n = coupling.n_labels();
    let densities = coupling.densities();
    let transforms: Vec<HilbertTransform> = densities.iter().map(|j| HilbertTransform::new(j)).collect();

    let blocks: Result<Vec<GammaBlock>> = omegas
        .par_iter()
        .map(|&omega| {
            let coeffs: Result<Vec<HalfFourierCoefficient>> = densities
                .iter()
                .zip(&transforms)
                .map(|(j, h)| gamma_coefficient_with(j, h, omega))
                .collect();
            let coeffs = coeffs?;
            let discontinuous = coeffs.iter().any(|c| c.discontinuous);
            let (gamma, lamb) = match coupling {
                BathCoupling::Shared { weights, .. } => (
                    qops::scale(weights, qops::cr(coeffs[0].gamma)),
                    qops::scale(weights, qops::cr(coeffs[0].lamb)),
                ),
                BathCoupling::Independent(_) => {
                    let g: Vec<f64> = coeffs.iter().map(|c| c.gamma).collect();
                    let s: Vec<f64> = coeffs.iter().map(|c| c.lamb).collect();
                    (qops::diag_real(&g), qops::diag_real(&s))
                }
            };
            let eig = qops::eig_hermitian_matrix(&qops::hermitian_part(&gamma))?;
            let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
            if min < -GAMMA_PSD_TOL {
                return Err(Error::NotPositive { omega, min_eig: min });
            }
            let rates = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
            debug_assert_eq!(gamma.nrows(), n);
            Ok(GammaBlock { omega, gamma, lamb, rates, vectors: eig.eigenvectors, discontinuous })
        })
        .collect();
    Ok(GammaMatrix { blocks: blocks? })
}

/// Conduction-band model for the Kondo relaxation rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KondoBand {
    /// `ρ(ε) = ρ_F(1 − ε²/W²)` on `[−W, W]`.
    Parabolic,
    /// `ρ(ε) = ρ_F` on the whole line.
    Constant,
}

/// Parameters of the Kondo impurity relaxation problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KondoParams {
    pub jk: f64,
    pub rho_f: f64,
    pub half_bandwidth: f64,
    pub mu: f64,
    pub band: KondoBand,
}

/// `F(x)F(−x) = 1/(4cosh²(x/2))` without overflow.
fn sech2_quarter(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// Lindblad rate `γ_L(T) = πJ_K² ∫dε ρ(ε)²/(4cosh²[β(ε−μ)/2])`.
pub fn kondo_rate(p: &KondoParams, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::InvalidArgument(format!("temperature must be >= 0, got {temperature}")));
    }
    let w = p.half_bandwidth;
    if !(w > 0.0) || !(p.mu.abs() < w) {
        return Err(Error::InvalidArgument("Kondo rate needs W > 0 and |mu| < W".into()));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let beta = 1.0 / temperature;
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 4000 };
    let v = match p.band {
        KondoBand::Parabolic => {
            let f = |e: f64| {
                let rho = p.rho_f * (1.0 - (e / w).powi(2));
                rho * rho * sech2_quarter(beta * (e - p.mu))
            };
            let breaks = [p.mu - 5.0 * temperature, p.mu, p.mu + 5.0 * temperature];
            quad::integrate(f, -w, w, &breaks, opts)?.0
        }
        KondoBand::Constant => {
            let span = 60.0 * temperature;
            let f = |e: f64| p.rho_f * p.rho_f * sech2_quarter(beta * (e - p.mu));
            quad::integrate(f, p.mu - span, p.mu + span, &[p.mu], opts)?.0
        }
    };
    Ok(PI * p.jk * p.jk * v)
}

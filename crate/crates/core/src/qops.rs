//! Dense complex matrices, Hermitian operators, density matrices and the
//! Hermitian eigendecomposition everything else is built on.
//!
//! Units are natural throughout: hbar = k_B = 1.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMat = Mat<C64>;

/// Relative Hermiticity tolerance at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices at construction.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue for a density matrix at construction.
pub const POSITIVITY_TOL: f64 = 1e-10;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(r: usize, cols: usize) -> CMat {
    Mat::zeros(r, cols)
}

pub fn identity(d: usize) -> CMat {
    Mat::identity(d, d)
}

/// Build a matrix from row-major entries.
pub fn from_rows(rows: &[Vec<C64>]) -> Result<CMat> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let cols = rows[0].len();
    if cols == 0 || rows.iter().any(|row| row.len() != cols) {
        return Err(Error::DimensionMismatch("ragged rows".into()));
    }
    let m = Mat::from_fn(r, cols, |i, j| rows[i][j]);
    check_finite(&m)?;
    Ok(m)
}

pub fn diag_real(d: &[f64]) -> CMat {
    let n = d.len();
    Mat::from_fn(n, n, |i, j| if i == j { cr(d[i]) } else { ZERO })
}

pub fn check_finite(m: &CMat) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite);
            }
        }
    }
    Ok(())
}

pub fn max_abs(m: &CMat) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint().to_owned()
}

pub fn transpose(m: &CMat) -> CMat {
    m.transpose().to_owned()
}

pub fn conj(m: &CMat) -> CMat {
    m.conjugate().to_owned()
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn scale(m: &CMat, s: C64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub fn add(a: &CMat, b: &CMat) -> CMat {
    a + b
}

pub fn sub(a: &CMat, b: &CMat) -> CMat {
    a - b
}

pub fn hermitian_part(m: &CMat) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Maximum entry of M - M^dagger.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    let mut best = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            best = best.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    best
}

/// Kronecker product A (x) B.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kron(b)
}

fn check_square_pair(a: &CMat, b: &CMat) -> Result<()> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// [A, B] = AB - BA.
pub fn commutator(a: &CMat, b: &CMat) -> Result<CMat> {
    check_square_pair(a, b)?;
    Ok(a * b - b * a)
}

/// {A, B} = AB + BA.
pub fn anticommutator(a: &CMat, b: &CMat) -> Result<CMat> {
    check_square_pair(a, b)?;
    Ok(a * b + b * a)
}

/// Pauli matrices in the basis (|0>, |1>), sigma_z = diag(1, -1).
pub mod pauli {
    use super::*;

    pub fn x() -> CMat {
        from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }
    pub fn y() -> CMat {
        from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
    }
    pub fn z() -> CMat {
        from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).unwrap()
    }
    /// sigma_+ = |0><1|, raising towards the +1 eigenstate of sigma_z.
    pub fn plus() -> CMat {
        from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap()
    }
    /// sigma_- = |1><0|.
    pub fn minus() -> CMat {
        from_rows(&[vec![ZERO, ZERO], vec![ONE, ZERO]]).unwrap()
    }
}

/// Hermitian operator (energy units when used as a Hamiltonian).
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: CMat,
}

impl HermitianOperator {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch("Hermitian operator must be square".into()));
        }
        check_finite(&matrix)?;
        let residual = hermiticity_residual(&matrix);
        let tol = HERMITIAN_TOL * max_abs(&matrix);
        if residual > tol {
            return Err(Error::NotHermitian { residual, tol });
        }
        Ok(Self { matrix })
    }

    /// Build from a matrix, keeping only its Hermitian part.
    pub fn from_hermitian_part(matrix: &CMat) -> Result<Self> {
        Self::new(hermitian_part(matrix))
    }

    pub fn from_diag(d: &[f64]) -> Self {
        Self { matrix: diag_real(d) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Density matrix: Hermitian, unit trace and positive at construction.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidDensity("not square".into()));
        }
        check_finite(&matrix)?;
        let herm = hermiticity_residual(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("hermiticity residual {herm:.3e}")));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = min_eigenvalue_of(&matrix)?;
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidDensity(format!("min eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Wrap a propagated state without validation; violations are reported
    /// by the caller, not rejected.
    pub fn unchecked(matrix: CMat) -> Self {
        Self { matrix }
    }

    /// |psi><psi| for a normalized amplitude vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let d = psi.len();
        let m = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(hermitian_part(&m))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: scale(&identity(d), cr(1.0 / d as f64)) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V^dagger X V.
    pub fn to_eigenbasis(&self, x: &CMat) -> CMat {
        self.eigenvectors.adjoint() * x * &self.eigenvectors
    }

    /// V X V^dagger.
    pub fn to_original(&self, x: &CMat) -> CMat {
        &self.eigenvectors * x * self.eigenvectors.adjoint()
    }

    /// Diagonal Hamiltonian in its own eigenbasis.
    pub fn diagonal(&self) -> CMat {
        diag_real(&self.eigenvalues)
    }

    /// Decomposition of an already diagonal Hamiltonian.
    pub fn from_diagonal(energies: &[f64]) -> Self {
        let mut idx: Vec<usize> = (0..energies.len()).collect();
        idx.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let n = energies.len();
        let eigenvectors = Mat::from_fn(n, n, |i, j| if i == idx[j] { ONE } else { ZERO });
        Self { eigenvalues: idx.iter().map(|&k| energies[k]).collect(), eigenvectors }
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    eig_hermitian_matrix(h.matrix())
}

pub(crate) fn eig_hermitian_matrix(m: &CMat) -> Result<SpectralDecomposition> {
    let d = m.nrows();
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver {
        dim: d,
        norm: max_abs(m),
        message: format!("{e:?}"),
    })?;
    let s = evd.S();
    let vals: Vec<f64> = (0..d).map(|i| s.column_vector()[i].re).collect();
    let u = evd.U();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let eigenvectors = Mat::from_fn(d, d, |i, j| u[(i, idx[j])]);
    let eigenvalues = idx.iter().map(|&k| vals[k]).collect();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(m: &HermitianOperator) -> Result<f64> {
    min_eigenvalue_of(m.matrix())
}

/// Smallest eigenvalue of the Hermitian part of a square matrix.
pub fn min_eigenvalue_of(m: &CMat) -> Result<f64> {
    let h = hermitian_part(m);
    let d = h.nrows();
    let vals = h.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigensolver {
        dim: d,
        norm: max_abs(&h),
        message: format!("{e:?}"),
    })?;
    Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    m.singular_values().map(|s| s.iter().sum()).unwrap_or(f64::NAN)
}

fn norm_one(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = norm_one(a);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = scale(a, cr(0.5f64.powi(s)));
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=20 {
        term = scale(&(&term * &scaled), cr(1.0 / k as f64));
        result += &term;
        if max_abs(&term) < 1e-18 * max_abs(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Column-stacking vectorization: vec(rho)[i + d j] = rho[i, j].
pub fn vec_of(m: &CMat) -> Vec<C64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * m.ncols());
    for j in 0..m.ncols() {
        for i in 0..d {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vec_of`] for a d x d matrix.
pub fn unvec(v: &[C64], d: usize) -> CMat {
    Mat::from_fn(d, d, |i, j| v[i + d * j])
}

pub fn matvec(m: &CMat, v: &[C64]) -> Vec<C64> {
    let n = m.nrows();
    let mut out = vec![ZERO; n];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * vj;
        }
    }
    out
}

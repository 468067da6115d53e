//! Dense 3x3 tensor algebra: symmetric tensors, spectral decomposition and
//! matrix functions (log, exp, sqrt) of symmetric positive definite tensors.
//!
//! All quantities are plain `f64` 3x3 matrices backed by `nalgebra`. The
//! symmetric type enforces symmetry at construction by symmetrizing, so the
//! rest of the crate can rely on it unconditionally.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Errors raised by tensor-level operations.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("matrix is not positive definite (min eigenvalue {min_eig:e} <= tolerance {tol:e})")]
    NonPositiveDefinite { min_eig: f64, tol: f64 },
    #[error("matrix is not invertible (det = {det:e})")]
    NonInvertible { det: f64 },
}

/// A general (not necessarily symmetric) second-order tensor on R^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3(Matrix3<f64>);

impl Tensor3 {
    pub fn new(m: Matrix3<f64>) -> Self {
        Tensor3(m)
    }

    pub fn identity() -> Self {
        Tensor3(Matrix3::identity())
    }

    pub fn zero() -> Self {
        Tensor3(Matrix3::zeros())
    }

    pub fn from_diagonal(d: [f64; 3]) -> Self {
        Tensor3(Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn transpose(&self) -> Tensor3 {
        Tensor3(self.0.transpose())
    }

    pub fn try_inverse(&self) -> Result<Tensor3, TensorError> {
        self.0
            .try_inverse()
            .map(Tensor3)
            .ok_or(TensorError::NonInvertible { det: self.det() })
    }

    /// Symmetric part `(A + A^T)/2`.
    pub fn sym(&self) -> SymmetricTensor3 {
        SymmetricTensor3::new(self.0)
    }

    /// Skew part `(A - A^T)/2`.
    pub fn skew(&self) -> Tensor3 {
        Tensor3((self.0 - self.0.transpose()) * 0.5)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl From<Matrix3<f64>> for Tensor3 {
    fn from(m: Matrix3<f64>) -> Self {
        Tensor3(m)
    }
}

impl From<SymmetricTensor3> for Tensor3 {
    fn from(s: SymmetricTensor3) -> Self {
        Tensor3(*s.matrix())
    }
}

/// A symmetric second-order tensor. Construction symmetrizes the input, so
/// roundoff asymmetry from upstream products is scrubbed here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricTensor3(Matrix3<f64>);

impl SymmetricTensor3 {
    pub fn new(m: Matrix3<f64>) -> Self {
        SymmetricTensor3((m + m.transpose()) * 0.5)
    }

    pub fn identity() -> Self {
        SymmetricTensor3(Matrix3::identity())
    }

    pub fn zero() -> Self {
        SymmetricTensor3(Matrix3::zeros())
    }

    pub fn from_diagonal(d: [f64; 3]) -> Self {
        SymmetricTensor3(Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Spectral decomposition with ascending eigenvalues and a deterministic
    /// eigenvector sign convention.
    pub fn spectral(&self) -> SpectralData {
        spectral_decompose(self)
    }

    /// Matrix logarithm via the spectral theorem. Requires all eigenvalues
    /// above `tol` (default `1e-12`, see [`log_spd`]).
    pub fn log(&self) -> Result<SymmetricTensor3, TensorError> {
        log_spd(self, 1e-12)
    }

    /// Matrix exponential via the spectral theorem (always defined).
    pub fn exp(&self) -> SymmetricTensor3 {
        self.spectral().map_eigenvalues(f64::exp)
    }

    /// Principal square root; requires positive semidefiniteness in practice
    /// (negative eigenvalues would produce NaN, so we gate like `log`).
    pub fn sqrt(&self) -> Result<SymmetricTensor3, TensorError> {
        let spec = self.spectral();
        let min_eig = spec.eigenvalues[0];
        if min_eig <= -1e-12 {
            return Err(TensorError::NonPositiveDefinite {
                min_eig,
                tol: 1e-12,
            });
        }
        Ok(spec.map_eigenvalues(|e| e.max(0.0).sqrt()))
    }

    pub fn try_inverse(&self) -> Result<SymmetricTensor3, TensorError> {
        self.0
            .try_inverse()
            .map(SymmetricTensor3::new)
            .ok_or(TensorError::NonInvertible { det: self.det() })
    }
}

impl From<Matrix3<f64>> for SymmetricTensor3 {
    fn from(m: Matrix3<f64>) -> Self {
        SymmetricTensor3::new(m)
    }
}

/// Frobenius inner product `<A, B> = tr(A B^T)`.
pub fn inner(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    (a.component_mul(b)).sum()
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric tensor.
///
/// The eigenvector sign is fixed by making the largest-magnitude component
/// positive, which keeps downstream assemblies deterministic. For repeated
/// eigenvalues the vectors are an orthonormal basis of the eigenspace.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: [f64; 3],
    pub eigenvectors: [Vector3<f64>; 3],
}

impl SpectralData {
    /// Reassembles `sum_i f(e_i) U^i (x) U^i`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> SymmetricTensor3 {
        let mut m = Matrix3::zeros();
        for i in 0..3 {
            let u = self.eigenvectors[i];
            m += f(self.eigenvalues[i]) * u * u.transpose();
        }
        SymmetricTensor3::new(m)
    }

    /// Reconstructs the decomposed tensor.
    pub fn reconstruct(&self) -> SymmetricTensor3 {
        self.map_eigenvalues(|e| e)
    }
}

// Cyclic Jacobi iteration for 3x3 symmetric matrices. General-purpose
// solvers give reconstruction residuals around 1e-8 for clustered
// eigenvalues, which downstream finite differences amplify; Jacobi
// converges to machine precision in a handful of sweeps and stays exactly
// orthogonal.
fn jacobi_eigen(m: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let mut a = *m;
    let mut v = Matrix3::<f64>::identity();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..30 {
        let off = (a[(0, 1)] * a[(0, 1)] + a[(0, 2)] * a[(0, 2)] + a[(1, 2)] * a[(1, 2)]).sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq.abs() <= 1e-300 {
                continue;
            }
            // Stable rotation: t = sign(theta) / (|theta| + sqrt(theta^2+1)).
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = if theta >= 0.0 {
                1.0 / (theta + (theta * theta + 1.0).sqrt())
            } else {
                -1.0 / (-theta + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut g = Matrix3::<f64>::identity();
            g[(p, p)] = c;
            g[(q, q)] = c;
            g[(p, q)] = s;
            g[(q, p)] = -s;
            a = g.transpose() * a * g;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            v *= g;
        }
    }
    ([a[(0, 0)], a[(1, 1)], a[(2, 2)]], v)
}

/// Spectral decomposition of a symmetric tensor.
///
/// Eigenvalues come out ascending; ties keep the iteration's relative order
/// so the result is deterministic for identical inputs.
pub fn spectral_decompose(s: &SymmetricTensor3) -> SpectralData {
    let (values, vectors) = jacobi_eigen(s.matrix());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut eigenvalues = [0.0; 3];
    let mut eigenvectors = [Vector3::zeros(); 3];
    for (slot, &idx) in order.iter().enumerate() {
        eigenvalues[slot] = values[idx];
        let mut v: Vector3<f64> = vectors.column(idx).into_owned();
        // Sign convention: largest-magnitude component positive.
        let mut dominant = 0;
        for k in 1..3 {
            if v[k].abs() > v[dominant].abs() {
                dominant = k;
            }
        }
        if v[dominant] < 0.0 {
            v = -v;
        }
        eigenvectors[slot] = v;
    }
    SpectralData {
        eigenvalues,
        eigenvectors,
    }
}

/// Matrix logarithm of a symmetric positive definite tensor, computed
/// spectrally as `sum_i ln(e_i) U^i (x) U^i`.
pub fn log_spd(s: &SymmetricTensor3, tol: f64) -> Result<SymmetricTensor3, TensorError> {
    let spec = s.spectral();
    let min_eig = spec.eigenvalues[0];
    if min_eig <= tol {
        return Err(TensorError::NonPositiveDefinite { min_eig, tol });
    }
    Ok(spec.map_eigenvalues(f64::ln))
}

/// Exponential of a general 3x3 matrix (Pade scaling and squaring).
///
/// Used to build smooth motion paths like `F(t) = exp(t L) F0`; symmetric
/// inputs should prefer [`SymmetricTensor3::exp`].
pub fn matrix_exp(m: &Matrix3<f64>) -> Matrix3<f64> {
    m.exp()
}

/// Rotation by `angle` about a (not necessarily unit) `axis`, via Rodrigues.
pub fn rotation_about(axis: Vector3<f64>, angle: f64) -> Tensor3 {
    let n = axis.normalize();
    let k = Matrix3::new(0.0, -n[2], n[1], n[2], 0.0, -n[0], -n[1], n[0], 0.0);
    Tensor3(Matrix3::identity() + angle.sin() * k + (1.0 - angle.cos()) * k * k)
}

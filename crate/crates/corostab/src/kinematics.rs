//! Strain measures of a deformation gradient and rate quantities along
//! smooth motion paths.
//!
//! A [`DeformationState`] caches every strain measure used downstream:
//! `C = F^T F`, `B = F F^T`, `E = (C - 1)/2`, the left stretch `V = sqrt(B)`,
//! `log V`, `J = det F` and the spectral data of `E` (the Lagrangian axes).
//! Principal stretches come from `lambda_i^2 = 1 + 2 e_i`, which ties the
//! eigenvalues of `E` and `C` together exactly.
//!
//! Rates are realized through [`MotionPath`], a smooth map `t -> F(t)`;
//! time derivatives are central finite differences, O(h^2) for C^3 paths.

use crate::tensor::{SpectralData, SymmetricTensor3, Tensor3, TensorError};
use nalgebra::Matrix3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("deformation gradient is not orientation-preserving (det F = {det:e})")]
    NonInvertible { det: f64 },
    #[error("time {t} +/- step {h} exceeds the path domain [{t0}, {t1}]")]
    DomainExceeded { t: f64, h: f64, t0: f64, t1: f64 },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Deformation gradient together with every derived strain measure.
#[derive(Debug, Clone)]
pub struct DeformationState {
    f: Tensor3,
    f_inv: Tensor3,
    j: f64,
    c: SymmetricTensor3,
    b: SymmetricTensor3,
    e: SymmetricTensor3,
    v: SymmetricTensor3,
    log_v: SymmetricTensor3,
    spectral_e: SpectralData,
    stretches: [f64; 3],
    log_stretches: [f64; 3],
}

impl DeformationState {
    /// Builds the full set of strain measures from `F`; `det F` must be
    /// positive.
    pub fn new(f: Tensor3) -> Result<Self, KinematicsError> {
        let det = f.det();
        if !(det > 0.0) || !det.is_finite() {
            return Err(KinematicsError::NonInvertible { det });
        }
        let f_inv = f.try_inverse()?;
        let fm = f.matrix();
        let c = SymmetricTensor3::new(fm.transpose() * fm);
        let b = SymmetricTensor3::new(fm * fm.transpose());
        let e = SymmetricTensor3::new((c.matrix() - Matrix3::identity()) * 0.5);
        let v = b.sqrt()?;
        let log_v = v.log()?;
        let spectral_e = e.spectral();
        let mut stretches = [0.0; 3];
        let mut log_stretches = [0.0; 3];
        for i in 0..3 {
            let lam_sq = 1.0 + 2.0 * spectral_e.eigenvalues[i];
            stretches[i] = lam_sq.sqrt();
            log_stretches[i] = 0.5 * lam_sq.ln();
        }
        Ok(DeformationState {
            f,
            f_inv,
            j: det,
            c,
            b,
            e,
            v,
            log_v,
            spectral_e,
            stretches,
            log_stretches,
        })
    }

    /// State with `F = exp(diag(x))`, the pure diagonal stretch realizing a
    /// log-stretch triple.
    pub fn from_log_stretches(x: [f64; 3]) -> Result<Self, KinematicsError> {
        Self::new(Tensor3::from_diagonal([x[0].exp(), x[1].exp(), x[2].exp()]))
    }

    pub fn f(&self) -> &Tensor3 {
        &self.f
    }

    pub fn f_inv(&self) -> &Tensor3 {
        &self.f_inv
    }

    pub fn volume_ratio(&self) -> f64 {
        self.j
    }

    pub fn right_cauchy_green(&self) -> &SymmetricTensor3 {
        &self.c
    }

    pub fn left_cauchy_green(&self) -> &SymmetricTensor3 {
        &self.b
    }

    pub fn green_lagrange(&self) -> &SymmetricTensor3 {
        &self.e
    }

    pub fn left_stretch(&self) -> &SymmetricTensor3 {
        &self.v
    }

    pub fn log_left_stretch(&self) -> &SymmetricTensor3 {
        &self.log_v
    }

    /// Lagrangian axes: eigenvalues/eigenvectors of `E`, ascending.
    pub fn lagrangian_axes(&self) -> &SpectralData {
        &self.spectral_e
    }

    /// Principal stretches `lambda_i`, ascending (same order as the axes).
    pub fn stretches(&self) -> [f64; 3] {
        self.stretches
    }

    /// Principal logarithmic strains `x_i = log lambda_i`.
    pub fn log_stretches(&self) -> [f64; 3] {
        self.log_stretches
    }

    /// `lambda_i^2`, the eigenvalues of `C`.
    pub fn stretches_squared(&self) -> [f64; 3] {
        [
            self.stretches[0] * self.stretches[0],
            self.stretches[1] * self.stretches[1],
            self.stretches[2] * self.stretches[2],
        ]
    }
}

/// Builds a [`DeformationState`] from a deformation gradient.
pub fn strain_measures(f: Tensor3) -> Result<DeformationState, KinematicsError> {
    DeformationState::new(f)
}

/// A smooth map `t -> F(t)` on a closed interval, assumed C^2 with
/// `det F(t) > 0` throughout.
pub struct MotionPath {
    eval: Box<dyn Fn(f64) -> Tensor3 + Send + Sync>,
    t0: f64,
    t1: f64,
}

impl MotionPath {
    pub fn new(eval: impl Fn(f64) -> Tensor3 + Send + Sync + 'static, t0: f64, t1: f64) -> Self {
        assert!(t0 < t1, "empty path domain");
        MotionPath {
            eval: Box::new(eval),
            t0,
            t1,
        }
    }

    /// Path with constant spatial velocity gradient: `F(t) = exp(t L) F0`,
    /// so `L(t) = L` identically.
    pub fn constant_velocity_gradient(l: Matrix3<f64>, f0: Tensor3, t0: f64, t1: f64) -> Self {
        Self::new(
            move |t| Tensor3::new(crate::tensor::matrix_exp(&(l * t)) * f0.matrix()),
            t0,
            t1,
        )
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.t1
    }

    pub fn deformation_gradient(&self, t: f64) -> Tensor3 {
        (self.eval)(t)
    }

    pub fn state_at(&self, t: f64) -> Result<DeformationState, KinematicsError> {
        DeformationState::new(self.deformation_gradient(t))
    }

    fn require(&self, t: f64, h: f64) -> Result<(), KinematicsError> {
        if t - h < self.t0 || t + h > self.t1 {
            return Err(KinematicsError::DomainExceeded {
                t,
                h,
                t0: self.t0,
                t1: self.t1,
            });
        }
        Ok(())
    }
}

/// Default finite-difference step in path time: `1e-5 * max(1, |t|)`.
pub fn default_time_step(t: f64) -> f64 {
    1e-5 * t.abs().max(1.0)
}

/// Spatial velocity gradient `L = Fdot F^{-1}` and its split `D = sym L`,
/// `W = skew L`, with `Fdot` by central differences.
pub fn velocity_fields(
    path: &MotionPath,
    t: f64,
    h: f64,
) -> Result<(Tensor3, SymmetricTensor3, Tensor3), KinematicsError> {
    assert!(h > 0.0, "step must be positive");
    path.require(t, h)?;
    let f_plus = path.deformation_gradient(t + h);
    let f_minus = path.deformation_gradient(t - h);
    let f_dot = (f_plus.matrix() - f_minus.matrix()) / (2.0 * h);
    let state_f = path.deformation_gradient(t);
    let f_inv = state_f.try_inverse()?;
    let l = Tensor3::new(f_dot * f_inv.matrix());
    Ok((l, l.sym(), l.skew()))
}

/// Components `Edot_jk = <Edot . U^j, U^k>` of a strain rate in the
/// eigenframe of `E`; the diagonal equals the eigenvalue rates.
pub fn edot_components(state: &DeformationState, edot: &SymmetricTensor3) -> Matrix3<f64> {
    let axes = state.lagrangian_axes();
    Matrix3::from_fn(|j, k| (edot.matrix() * axes.eigenvectors[j]).dot(&axes.eigenvectors[k]))
}

/// Reassembles eigenframe components back into a tensor:
/// `sum_jk M_jk U^j (x) U^k`.
pub fn from_eigenframe(state: &DeformationState, m: &Matrix3<f64>) -> SymmetricTensor3 {
    let axes = state.lagrangian_axes();
    let mut out = Matrix3::zeros();
    for j in 0..3 {
        for k in 0..3 {
            out += m[(j, k)] * axes.eigenvectors[j] * axes.eigenvectors[k].transpose();
        }
    }
    SymmetricTensor3::new(out)
}

//! Zaremba-Jaumann stress rates along motion paths.
//!
//! The rate is assembled from the boxed definition
//!
//! ```text
//! Dzj/Dt[sigma] = d/dt[sigma] + sigma W - W sigma,    W = skew(Fdot F^{-1})
//! ```
//!
//! with the material derivative by central differences, and independently
//! through the corotated frame identity `Q d/dt[Q^T sigma Q] Q^T` where the
//! frame solves `Qdot = W Q`, `Q(t0) = 1`. The two routes agreeing is one of
//! the crate's standing oracles.

use crate::kinematics::{self, DeformationState, KinematicsError, MotionPath};
use crate::law::{LawError, MaterialLaw};
use crate::stress;
use crate::tensor::{inner, SymmetricTensor3, Tensor3};
use nalgebra::Matrix3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RateError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error("corotated frame does not cover t = {t} (frame domain [{t0}, {t1}])")]
    FrameDomain { t: f64, t0: f64, t1: f64 },
}

/// Stress-rate quantities at one instant of a motion path.
#[derive(Debug, Clone)]
pub struct RateSample {
    pub t: f64,
    /// Strain rate `D = sym(Fdot F^{-1})`.
    pub d: SymmetricTensor3,
    /// Vorticity `W = skew(Fdot F^{-1})`.
    pub w: Tensor3,
    pub state: DeformationState,
    pub sigma: SymmetricTensor3,
    /// Material derivative of the Cauchy stress.
    pub sigma_dot: SymmetricTensor3,
    /// Zaremba-Jaumann rate of the Cauchy stress.
    pub zj_sigma: SymmetricTensor3,
    pub tau: SymmetricTensor3,
    pub tau_dot: SymmetricTensor3,
    /// Zaremba-Jaumann rate of the Kirchhoff stress.
    pub zj_tau: SymmetricTensor3,
}

fn zj_assemble(stress: &SymmetricTensor3, rate: &Matrix3<f64>, w: &Tensor3) -> SymmetricTensor3 {
    let s = stress.matrix();
    let wm = w.matrix();
    SymmetricTensor3::new(rate + s * wm - wm * s)
}

/// Zaremba-Jaumann rates of `sigma` and `tau` at time `t`, with the material
/// derivative by central differences of step `h`.
pub fn zj_rate(
    law: &MaterialLaw,
    path: &MotionPath,
    t: f64,
    h: f64,
) -> Result<RateSample, RateError> {
    let (_, d, w) = kinematics::velocity_fields(path, t, h)?;
    let state = path.state_at(t)?;
    let here = stress::cauchy_stress(law, &state)?;
    let plus = stress::cauchy_stress(law, &path.state_at(t + h)?)?;
    let minus = stress::cauchy_stress(law, &path.state_at(t - h)?)?;

    let sigma_dot = (plus.cauchy.matrix() - minus.cauchy.matrix()) / (2.0 * h);
    let tau_dot = (plus.kirchhoff.matrix() - minus.kirchhoff.matrix()) / (2.0 * h);
    Ok(RateSample {
        t,
        d,
        w,
        zj_sigma: zj_assemble(&here.cauchy, &sigma_dot, &w),
        zj_tau: zj_assemble(&here.kirchhoff, &tau_dot, &w),
        sigma: here.cauchy,
        sigma_dot: SymmetricTensor3::new(sigma_dot),
        tau: here.kirchhoff,
        tau_dot: SymmetricTensor3::new(tau_dot),
        state,
    })
}

/// The corotational pairing `<Dzj sigma, D>` of a rate sample.
pub fn csp_pairing(sample: &RateSample) -> f64 {
    inner(sample.zj_sigma.matrix(), sample.d.matrix())
}

/// Kirchhoff analogue `<Dzj tau, D>`.
pub fn csp_pairing_kirchhoff(sample: &RateSample) -> f64 {
    inner(sample.zj_tau.matrix(), sample.d.matrix())
}

/// A corotated frame: samples of the orthogonal solution of
/// `Qdot = W(t) Q`, `Q(t0) = 1`, integrated with the classical four-stage
/// one-step method and re-orthonormalized (Gram-Schmidt) every step.
pub struct CorotatedFrame {
    t0: f64,
    step: f64,
    samples: Vec<Matrix3<f64>>,
    fd_step: f64,
}

/// Integrates the corotated frame over `[t0, t1]` with `n_steps` steps.
///
/// `fd_step` is the finite-difference step used to sample `W(t)`; the path
/// must cover `[t0 - fd_step, t1 + fd_step]`.
pub fn corotated_frame(
    path: &MotionPath,
    t0: f64,
    t1: f64,
    n_steps: usize,
    fd_step: f64,
) -> Result<CorotatedFrame, RateError> {
    assert!(n_steps > 0 && t1 > t0);
    let step = (t1 - t0) / n_steps as f64;
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut q = Matrix3::identity();
    samples.push(q);
    for i in 0..n_steps {
        let t = t0 + i as f64 * step;
        q = rk4_step(path, t, step, q, fd_step)?;
        q = gram_schmidt(&q);
        samples.push(q);
    }
    Ok(CorotatedFrame {
        t0,
        step,
        samples,
        fd_step,
    })
}

fn spin_at(path: &MotionPath, t: f64, fd_step: f64) -> Result<Matrix3<f64>, RateError> {
    let (_, _, w) = kinematics::velocity_fields(path, t, fd_step)?;
    Ok(*w.matrix())
}

fn rk4_step(
    path: &MotionPath,
    t: f64,
    h: f64,
    q: Matrix3<f64>,
    fd_step: f64,
) -> Result<Matrix3<f64>, RateError> {
    let w1 = spin_at(path, t, fd_step)?;
    let w2 = spin_at(path, t + 0.5 * h, fd_step)?;
    let w4 = spin_at(path, t + h, fd_step)?;
    let k1 = w1 * q;
    let k2 = w2 * (q + 0.5 * h * k1);
    let k3 = w2 * (q + 0.5 * h * k2);
    let k4 = w4 * (q + h * k3);
    Ok(q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

fn gram_schmidt(m: &Matrix3<f64>) -> Matrix3<f64> {
    let mut c0 = m.column(0).into_owned();
    c0 /= c0.norm();
    let mut c1 = m.column(1).into_owned();
    c1 -= c0 * c0.dot(&c1);
    c1 /= c1.norm();
    let mut c2 = m.column(2).into_owned();
    c2 -= c0 * c0.dot(&c2) + c1 * c1.dot(&c2);
    c2 /= c2.norm();
    Matrix3::from_columns(&[c0, c1, c2])
}

impl CorotatedFrame {
    pub fn domain(&self) -> (f64, f64) {
        (
            self.t0,
            self.t0 + self.step * (self.samples.len() - 1) as f64,
        )
    }

    /// Frame rotation at an arbitrary `t` inside the domain: one extra
    /// integration step from the nearest stored sample at or below `t`.
    pub fn rotation_at(&self, path: &MotionPath, t: f64) -> Result<Matrix3<f64>, RateError> {
        let (t0, t1) = self.domain();
        if t < t0 - 1e-12 || t > t1 + 1e-12 {
            return Err(RateError::FrameDomain { t, t0, t1 });
        }
        let idx = (((t - t0) / self.step).floor() as usize).min(self.samples.len() - 1);
        let t_base = t0 + idx as f64 * self.step;
        let q = self.samples[idx];
        let dt = t - t_base;
        if dt.abs() <= 1e-14 {
            return Ok(q);
        }
        Ok(gram_schmidt(&rk4_step(path, t_base, dt, q, self.fd_step)?))
    }
}

/// Zaremba-Jaumann rate through the corotated frame:
/// `Q(t) d/dt[Q^T sigma Q] Q^T`, with the corotated stress sampled at
/// `t +/- h` using the same integrated frame on both legs.
pub fn zj_rate_via_frame(
    law: &MaterialLaw,
    path: &MotionPath,
    t: f64,
    h: f64,
    frame: &CorotatedFrame,
) -> Result<SymmetricTensor3, RateError> {
    let q = frame.rotation_at(path, t)?;
    let q_plus = frame.rotation_at(path, t + h)?;
    let q_minus = frame.rotation_at(path, t - h)?;
    let sigma_plus = stress::cauchy_stress(law, &path.state_at(t + h)?)?.cauchy;
    let sigma_minus = stress::cauchy_stress(law, &path.state_at(t - h)?)?.cauchy;
    let corot_plus = q_plus.transpose() * sigma_plus.matrix() * q_plus;
    let corot_minus = q_minus.transpose() * sigma_minus.matrix() * q_minus;
    let corot_rate = (corot_plus - corot_minus) / (2.0 * h);
    Ok(SymmetricTensor3::new(q * corot_rate * q.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::default_time_step;
    use crate::law::hencky_law;
    use crate::tensor::{matrix_exp, rotation_about};
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};

    fn spin_matrix(omega: f64) -> Matrix3<f64> {
        let mut w = Matrix3::zeros();
        w[(1, 0)] = omega;
        w[(0, 1)] = -omega;
        w
    }

    #[test]
    fn zj_vanishes_along_rigid_rotation_of_unstressed_body() {
        let law = hencky_law(1.0, 1.0);
        let path = MotionPath::new(
            |t| rotation_about(Vector3::new(0.0, 0.0, 1.0), 0.7 * t),
            -1.0,
            1.0,
        );
        let sample = zj_rate(&law, &path, 0.2, 1e-5).unwrap();
        assert!(sample.d.norm() <= 1e-9);
        assert!(sample.zj_sigma.norm() <= 1e-9);
    }

    #[test]
    fn zj_equals_material_rate_without_spin() {
        let law = hencky_law(1.0, 1.0);
        let path = MotionPath::new(|t| Tensor3::from_diagonal([t.exp(), 1.0, 1.0]), -1.0, 1.0);
        let sample = zj_rate(&law, &path, 0.1, 1e-5).unwrap();
        assert!(sample.w.norm() <= 1e-10);
        assert!(
            (sample.zj_sigma.matrix() - sample.sigma_dot.matrix()).norm()
                <= 1e-12 * sample.sigma_dot.norm().max(1e-12)
        );
    }

    #[test]
    fn zj_neutral_for_rotating_frozen_stretch() {
        // F(t) = Q(t) F0: sigma(t) = Q sigma0 Q^T, D = 0, so the
        // corotational rate vanishes to O(h^2).
        let law = hencky_law(1.0, 1.0);
        let f0 = Tensor3::from_diagonal([1.4, 0.8, 1.1]);
        let path = MotionPath::new(
            move |t| {
                Tensor3::new(
                    rotation_about(Vector3::new(0.2, 1.0, -0.4), 0.9 * t).matrix() * f0.matrix(),
                )
            },
            -1.0,
            1.0,
        );
        let sample = zj_rate(&law, &path, 0.3, 1e-5).unwrap();
        assert!(sample.d.norm() <= 1e-9, "D = {:e}", sample.d.norm());
        assert!(
            sample.zj_sigma.norm() <= 1e-8,
            "Dzj sigma = {:e}",
            sample.zj_sigma.norm()
        );
        // sigma_dot itself is far from zero: the spin terms cancel it.
        assert!(sample.sigma_dot.norm() >= 1e-2);
    }

    #[test]
    fn frame_stays_identity_without_spin() {
        let path = MotionPath::new(
            |t| Tensor3::from_diagonal([(0.5 * t).exp(), 1.0, (0.1 * t).exp()]),
            -0.1,
            1.1,
        );
        let frame = corotated_frame(&path, 0.0, 1.0, 200, 1e-5).unwrap();
        let q = frame.rotation_at(&path, 0.73).unwrap();
        assert!((q - Matrix3::identity()).norm() <= 1e-9);
    }

    #[test]
    fn frame_matches_closed_form_for_constant_spin() {
        let omega = 1.0;
        let w = spin_matrix(omega);
        let path = MotionPath::new(move |t| Tensor3::new(matrix_exp(&(w * t))), -0.1, 1.1);
        let frame = corotated_frame(&path, 0.0, 1.0, 1000, 1e-5).unwrap();
        for &t in &[0.25, 0.5, 1.0] {
            let q = frame.rotation_at(&path, t).unwrap();
            let expect = rotation_about(Vector3::new(0.0, 0.0, 1.0), omega * t);
            assert!(
                (q - expect.matrix()).norm() <= 1e-8,
                "frame error {:e} at t = {t}",
                (q - expect.matrix()).norm()
            );
        }
    }

    #[test]
    fn frame_stays_orthogonal_on_simple_shear() {
        let path = MotionPath::new(
            |t| {
                let mut m = Matrix3::identity();
                m[(0, 1)] = t;
                Tensor3::new(m)
            },
            -0.1,
            2.1,
        );
        let frame = corotated_frame(&path, 0.0, 2.0, 500, 1e-5).unwrap();
        for k in 0..=10 {
            let t = 0.2 * k as f64;
            let q = frame.rotation_at(&path, t).unwrap();
            assert!((q.transpose() * q - Matrix3::identity()).norm() <= 1e-9);
        }
    }

    #[test]
    fn via_frame_equals_material_rate_without_spin() {
        let law = hencky_law(1.0, 1.0);
        let path = MotionPath::new(
            |t| Tensor3::from_diagonal([t.exp(), (0.2 * t).exp(), 1.0]),
            -0.1,
            1.1,
        );
        let frame = corotated_frame(&path, 0.0, 1.0, 400, 1e-5).unwrap();
        let t = 0.5;
        let h = 1e-5;
        let direct = zj_rate(&law, &path, t, h).unwrap();
        let via = zj_rate_via_frame(&law, &path, t, h, &frame).unwrap();
        assert!(
            (via.matrix() - direct.sigma_dot.matrix()).norm() <= 1e-7,
            "{:e}",
            (via.matrix() - direct.sigma_dot.matrix()).norm()
        );
    }

    #[test]
    fn via_frame_neutral_for_rotating_frozen_stress() {
        let law = hencky_law(1.0, 1.0);
        let f0 = Tensor3::from_diagonal([1.3, 0.9, 1.05]);
        let path = MotionPath::new(
            move |t| {
                Tensor3::new(
                    rotation_about(Vector3::new(0.0, 0.4, 1.0), 1.2 * t).matrix() * f0.matrix(),
                )
            },
            -0.1,
            1.1,
        );
        let frame = corotated_frame(&path, 0.0, 1.0, 1000, 1e-5).unwrap();
        let via = zj_rate_via_frame(&law, &path, 0.6, 1e-5, &frame).unwrap();
        assert!(via.norm() <= 1e-7, "via-frame rate {:e}", via.norm());
    }

    #[test]
    fn two_routes_agree_on_random_smooth_paths() {
        let law = hencky_law(1.0, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..25 {
            let a = Matrix3::from_fn(|_, _| rng.gen::<f64>() - 0.5);
            let b = Matrix3::from_fn(|_, _| (rng.gen::<f64>() - 0.5) * 0.5);
            let x0 = [
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            ];
            let f0 = Tensor3::from_diagonal([x0[0].exp(), x0[1].exp(), x0[2].exp()]);
            let path = MotionPath::new(
                move |t| Tensor3::new(matrix_exp(&(a * t + b * t * t)) * f0.matrix()),
                -0.1,
                0.6,
            );
            let frame = corotated_frame(&path, 0.0, 0.5, 500, 1e-5).unwrap();
            let t = 0.1 + 0.3 * rng.gen::<f64>();
            let h = default_time_step(t);
            let direct = zj_rate(&law, &path, t, h).unwrap();
            let via = zj_rate_via_frame(&law, &path, t, h, &frame).unwrap();
            let diff = (via.matrix() - direct.zj_sigma.matrix()).norm();
            assert!(diff <= 1e-6, "trial {trial}: route mismatch {diff:e}");
        }
    }

    #[test]
    fn pairing_matches_quadratic_form_value_at_reference() {
        // Uniaxial stretching through the reference: the pairing equals the
        // (1,1) entry of the diagonal block, which is 3 for mu = lam = 1.
        let law = hencky_law(1.0, 1.0);
        let path = MotionPath::new(|t| Tensor3::from_diagonal([t.exp(), 1.0, 1.0]), -1.0, 1.0);
        let sample = zj_rate(&law, &path, 0.0, 1e-5).unwrap();
        let pairing = csp_pairing(&sample);
        assert!(
            (pairing - 3.0).abs() <= 1e-6,
            "pairing {pairing} vs quadratic-form value 3"
        );
    }

    #[test]
    fn pairing_negative_for_volumetric_path_in_violating_regime() {
        // 2 mu + 3 lam = -1 < 0: hydrostatic stretching destabilizes.
        let law = hencky_law(1.0, -1.0);
        let path = MotionPath::new(
            |t| Tensor3::from_diagonal([t.exp(), t.exp(), t.exp()]),
            -1.0,
            1.0,
        );
        let sample = zj_rate(&law, &path, 0.0, 1e-5).unwrap();
        assert!(csp_pairing(&sample) < 0.0);
    }

    #[test]
    fn pairing_zero_on_rigid_paths() {
        let law = hencky_law(1.0, 1.0);
        let path = MotionPath::new(
            |t| rotation_about(Vector3::new(1.0, 0.0, 0.0), 0.5 * t),
            -1.0,
            1.0,
        );
        let sample = zj_rate(&law, &path, 0.0, 1e-5).unwrap();
        assert!(csp_pairing(&sample).abs() <= 1e-12);
    }
}

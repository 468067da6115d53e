//! Stress tensors from a law and a deformation state.
//!
//! The referential stress assembles spectrally on the Lagrangian axes,
//! `S2 = sum_i s2_i U^i (x) U^i` with `s2_i = tau_i / lambda_i^2`, and the
//! spatial measures follow from the Doyle-Ericksen push-forward
//! `sigma = (1/J) F S2 F^T`, `tau = J sigma`. The vectors `u^i = F.U^i`
//! (not unit in general) are eigenvectors of `sigma` with eigenvalues
//! `sigma_i = tau_i / J`.

use crate::kinematics::DeformationState;
use crate::law::{LawError, MaterialLaw};
use crate::tensor::{SymmetricTensor3, Tensor3};
use nalgebra::{Matrix3, Vector3};

/// All stress measures of one (law, state) pair.
#[derive(Debug, Clone)]
pub struct StressState {
    /// Second Piola-Kirchhoff stress (referential).
    pub second_pk: SymmetricTensor3,
    /// Cauchy stress.
    pub cauchy: SymmetricTensor3,
    /// Kirchhoff stress `tau = J sigma`.
    pub kirchhoff: SymmetricTensor3,
    /// Principal Cauchy stresses, ordered like the state's axes.
    pub principal_cauchy: [f64; 3],
    /// Principal Kirchhoff stresses.
    pub principal_kirchhoff: [f64; 3],
    /// Principal second Piola-Kirchhoff values `s2_i`.
    pub principal_referential: [f64; 3],
    /// Push-forward `u^i = F.U^i` of the Lagrangian axes.
    pub spatial_axes: [Vector3<f64>; 3],
}

/// Second Piola-Kirchhoff stress, assembled spectrally on the Lagrangian
/// axes. Depends on `C` only, so it is invariant under left rotations of `F`.
pub fn second_pk(
    law: &MaterialLaw,
    state: &DeformationState,
) -> Result<SymmetricTensor3, LawError> {
    let s2 = law.referential_principal(&state.log_stretches())?;
    let axes = state.lagrangian_axes();
    let mut m = Matrix3::zeros();
    for (value, u) in s2.iter().zip(&axes.eigenvectors) {
        m += *value * u * u.transpose();
    }
    Ok(SymmetricTensor3::new(m))
}

/// Full stress state: `S2`, `sigma`, `tau` and principal values.
pub fn cauchy_stress(law: &MaterialLaw, state: &DeformationState) -> Result<StressState, LawError> {
    let x = state.log_stretches();
    let tau_principal = law.kirchhoff_principal(&x)?;
    let s2_principal = law.referential_principal(&x)?;
    let j = state.volume_ratio();

    let s2 = second_pk(law, state)?;
    let f = state.f().matrix();
    let cauchy = SymmetricTensor3::new((f * s2.matrix() * f.transpose()) / j);
    let kirchhoff = SymmetricTensor3::new(cauchy.matrix() * j);

    let axes = state.lagrangian_axes();
    let spatial_axes = [
        f * axes.eigenvectors[0],
        f * axes.eigenvectors[1],
        f * axes.eigenvectors[2],
    ];
    Ok(StressState {
        second_pk: s2,
        cauchy,
        kirchhoff,
        principal_cauchy: [
            tau_principal[0] / j,
            tau_principal[1] / j,
            tau_principal[2] / j,
        ],
        principal_kirchhoff: tau_principal,
        principal_referential: s2_principal,
        spatial_axes,
    })
}

/// First Piola-Kirchhoff stress `S1 = J sigma F^{-T}`; non-symmetric.
pub fn first_pk(stress: &StressState, state: &DeformationState) -> Tensor3 {
    let f_inv_t = state.f_inv().matrix().transpose();
    Tensor3::new(state.volume_ratio() * stress.cauchy.matrix() * f_inv_t)
}

//! Quadratic forms in the Lagrangian eigenbasis and the log-stretch
//! stiffness matrices.
//!
//! For a strain rate with eigenframe components `Edot_jk`, the corotational
//! pairing reduces to a quadratic form that splits into two independent
//! blocks: a 3x3 form `Q1` on the diagonal components and three scalar
//! coefficients `Q2` on the shears,
//!
//! ```text
//! Q(Edot) = <diag, Q1 diag> + sum_{i != j} c_ij Edot_ij^2 .
//! ```
//!
//! With `s2_i` the principal second Piola-Kirchhoff values and `ds2_i/de_j`
//! their derivatives in the eigenvalues `e_j` of the Green-Lagrange strain,
//! the Cauchy flavor has
//!
//! ```text
//! Q1_ii = ds2_i/de_i + s2_i/lam_i^2
//! Q1_ij = ds2_i/de_j - (s2_i/lam_j^2 + s2_j/lam_i^2)/2      (i != j)
//! c_ij  = (s2_i - s2_j)/(e_i - e_j) + s2_j/lam_i^2 + s2_i/lam_j^2
//! ```
//!
//! while the Kirchhoff flavor keeps the same shear coefficients and uses
//! `Q1_ii = ds2_i/de_i + 2 s2_i/lam_i^2`, `Q1_ij = ds2_i/de_j`. The Cauchy
//! flavor equals `J <Dzj sigma, D>` with `Edot = F^T D F`; the Kirchhoff
//! flavor equals `<Dzj tau, D>` (no volume factor, see
//! [`crate::harness::verify`] for the empirical determination).
//!
//! Everything is equally valid for hyperelastic laws (`s2_i` is then the
//! gradient of the auxiliary energy in `e`, and `ds2_i/de_j` its symmetric
//! Hessian) and Cauchy-elastic laws (no major symmetry); only the law's
//! derivative providers differ.

use crate::kinematics::DeformationState;
use crate::law::{LawError, MaterialLaw};
use crate::stress;
use crate::tensor::{inner, SymmetricTensor3, Tensor3};
use nalgebra::Matrix3;

/// Which stress the form (or stiffness matrix) refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StressFlavor {
    Cauchy,
    Kirchhoff,
}

impl StressFlavor {
    pub fn label(&self) -> &'static str {
        match self {
            StressFlavor::Cauchy => "cauchy",
            StressFlavor::Kirchhoff => "kirchhoff",
        }
    }
}

/// Relative threshold below which two squared stretches count as degenerate
/// and the divided difference switches to a finite-difference directional
/// derivative across the degeneracy.
pub const DEGENERACY_THRESHOLD: f64 = 1e-7;

/// The symmetrized log-stretch stiffness `sym D_x sigma(x)` (or the `tau`
/// analogue), whose positive definiteness is the TSTS-M++ condition.
#[derive(Debug, Clone)]
pub struct LambdaMatrix {
    pub flavor: StressFlavor,
    pub x: [f64; 3],
    /// Raw Jacobian before symmetrization (major symmetry holds only for
    /// hyperelastic laws).
    pub unsymmetrized: Matrix3<f64>,
    /// `(J + J^T)/2`, the matrix whose spectrum decides definiteness.
    pub matrix: Matrix3<f64>,
    pub min_eigenvalue: f64,
}

/// Builds the stiffness matrix of principal stresses in log-stretch space.
///
/// Kirchhoff flavor: `d tau_i / d x_j`. Cauchy flavor:
/// `d sigma_i / d x_j = e^{-s} (d tau_i / d x_j - tau_i)` since
/// `sigma_i = e^{-s} tau_i` and `ds/dx_j = 1`.
pub fn lambda_matrix(
    law: &MaterialLaw,
    x: &[f64; 3],
    flavor: StressFlavor,
) -> Result<LambdaMatrix, LawError> {
    let jac_tau = law.kirchhoff_jacobian(x)?;
    let unsymmetrized = match flavor {
        StressFlavor::Kirchhoff => jac_tau,
        StressFlavor::Cauchy => {
            let tau = law.kirchhoff_principal(x)?;
            let inv_j = (-(x[0] + x[1] + x[2])).exp();
            Matrix3::from_fn(|i, j| inv_j * (jac_tau[(i, j)] - tau[i]))
        }
    };
    let matrix = (unsymmetrized + unsymmetrized.transpose()) * 0.5;
    let min_eigenvalue = min_symmetric_eigenvalue(&matrix);
    Ok(LambdaMatrix {
        flavor,
        x: *x,
        unsymmetrized,
        matrix,
        min_eigenvalue,
    })
}

pub(crate) fn min_symmetric_eigenvalue(m: &Matrix3<f64>) -> f64 {
    crate::tensor::spectral_decompose(&SymmetricTensor3::new(*m)).eigenvalues[0]
}

/// The block-decoupled quadratic form at one state.
#[derive(Debug, Clone)]
pub struct QuadFormBlocks {
    pub flavor: StressFlavor,
    /// Symmetrized 3x3 block acting on `(Edot_11, Edot_22, Edot_33)`.
    pub q1: Matrix3<f64>,
    /// Shear coefficients for the pairs (2,3), (1,3), (1,2); each shear
    /// enters the full form twice (ordered pair sum).
    pub q2: [f64; 3],
    pub volume_ratio: f64,
}

/// Index pairs matching the `q2` layout.
pub const SHEAR_PAIRS: [(usize, usize); 3] = [(1, 2), (0, 2), (0, 1)];

// Per-state law data in the eigenbasis: s2_i and ds2_i/de_j, obtained from
// the x-space providers by the chain rule e_j = (e^{2 x_j} - 1)/2 (one
// differentiation pathway, no re-differencing in e).
struct EigenbasisData {
    s2: [f64; 3],
    ds2_de: Matrix3<f64>,
}

fn eigenbasis_data(law: &MaterialLaw, x: &[f64; 3]) -> Result<EigenbasisData, LawError> {
    let tau = law.kirchhoff_principal(x)?;
    let jac_tau = law.kirchhoff_jacobian(x)?;
    let mut s2 = [0.0; 3];
    let inv_lam_sq: [f64; 3] = [
        (-2.0 * x[0]).exp(),
        (-2.0 * x[1]).exp(),
        (-2.0 * x[2]).exp(),
    ];
    for i in 0..3 {
        s2[i] = tau[i] * inv_lam_sq[i];
    }
    // d s2_i / d x_j = e^{-2 x_i} (d tau_i / d x_j - 2 delta_ij tau_i),
    // then d/de_j = e^{-2 x_j} d/dx_j.
    let ds2_de = Matrix3::from_fn(|i, j| {
        let dsdx = inv_lam_sq[i] * (jac_tau[(i, j)] - if i == j { 2.0 * tau[i] } else { 0.0 });
        dsdx * inv_lam_sq[j]
    });
    Ok(EigenbasisData { s2, ds2_de })
}

// (s2_i - s2_j)/(e_i - e_j), replaced near degeneracy by a central
// finite-difference directional derivative of the principal-value function
// across the degeneracy (the only continuous extension).
fn divided_difference(
    law: &MaterialLaw,
    x: &[f64; 3],
    s2: &[f64; 3],
    i: usize,
    j: usize,
) -> Result<f64, LawError> {
    let e = [
        0.5 * ((2.0 * x[0]).exp() - 1.0),
        0.5 * ((2.0 * x[1]).exp() - 1.0),
        0.5 * ((2.0 * x[2]).exp() - 1.0),
    ];
    let lam_sq_i = 1.0 + 2.0 * e[i];
    let lam_sq_j = 1.0 + 2.0 * e[j];
    if (lam_sq_i - lam_sq_j).abs() >= DEGENERACY_THRESHOLD * lam_sq_i.max(lam_sq_j) {
        return Ok((s2[i] - s2[j]) / (e[i] - e[j]));
    }
    let mid = 0.5 * (e[i] + e[j]);
    // Keep 1 + 2 (mid - delta) safely positive.
    let delta = (1e-4 * mid.abs().max(1.0)).min((1.0 + 2.0 * mid) / 8.0);
    let probe = |h: f64| -> Result<f64, LawError> {
        let mut e_probe = e;
        e_probe[i] = mid + h;
        e_probe[j] = mid - h;
        let x_probe = [
            0.5 * (1.0 + 2.0 * e_probe[0]).ln(),
            0.5 * (1.0 + 2.0 * e_probe[1]).ln(),
            0.5 * (1.0 + 2.0 * e_probe[2]).ln(),
        ];
        let tau = law.kirchhoff_principal(&x_probe)?;
        Ok(tau[i] * (-2.0 * x_probe[i]).exp())
    };
    Ok((probe(delta)? - probe(-delta)?) / (2.0 * delta))
}

/// Assembles the quadratic-form blocks of a law at a state, Cauchy or
/// Kirchhoff flavor. Valid for hyperelastic and Cauchy-elastic laws alike.
pub fn quadform_blocks(
    law: &MaterialLaw,
    state: &DeformationState,
    flavor: StressFlavor,
) -> Result<QuadFormBlocks, LawError> {
    let x = state.log_stretches();
    let lam_sq = state.stretches_squared();
    let data = eigenbasis_data(law, &x)?;

    let q1_raw = Matrix3::from_fn(|i, j| {
        if i == j {
            let weight = match flavor {
                StressFlavor::Cauchy => 1.0,
                StressFlavor::Kirchhoff => 2.0,
            };
            data.ds2_de[(i, i)] + weight * data.s2[i] / lam_sq[i]
        } else {
            match flavor {
                StressFlavor::Cauchy => {
                    data.ds2_de[(i, j)] - 0.5 * (data.s2[i] / lam_sq[j] + data.s2[j] / lam_sq[i])
                }
                StressFlavor::Kirchhoff => data.ds2_de[(i, j)],
            }
        }
    });
    // Only the symmetric part is visible to the quadratic form.
    let q1 = (q1_raw + q1_raw.transpose()) * 0.5;

    let mut q2 = [0.0; 3];
    for (slot, &(i, j)) in SHEAR_PAIRS.iter().enumerate() {
        let divided = divided_difference(law, &x, &data.s2, i, j)?;
        q2[slot] = divided + data.s2[j] / lam_sq[i] + data.s2[i] / lam_sq[j];
    }
    Ok(QuadFormBlocks {
        flavor,
        q1,
        q2,
        volume_ratio: state.volume_ratio(),
    })
}

impl QuadFormBlocks {
    /// Evaluates the full form on eigenframe components of a strain rate.
    /// Each unordered shear pair contributes twice, matching the ordered
    /// double sum of the block derivation.
    pub fn value(&self, edot: &Matrix3<f64>) -> f64 {
        let diag = nalgebra::Vector3::new(edot[(0, 0)], edot[(1, 1)], edot[(2, 2)]);
        let mut total = diag.dot(&(self.q1 * diag));
        for (slot, &(i, j)) in SHEAR_PAIRS.iter().enumerate() {
            let shear = edot[(i, j)];
            total += 2.0 * self.q2[slot] * shear * shear;
        }
        total
    }
}

/// The `Q1` block through the weighted stiffness identity:
/// `Q1 = J W Lambda_sigma W` (Cauchy) or `Q1 = W Lambda_tau W` (Kirchhoff),
/// with `W = diag(1/lam_i^2)`. An algebraically independent route used as an
/// oracle against [`quadform_blocks`].
pub fn q1_via_lambda(
    law: &MaterialLaw,
    state: &DeformationState,
    flavor: StressFlavor,
) -> Result<Matrix3<f64>, LawError> {
    let lambda = lambda_matrix(law, &state.log_stretches(), flavor)?;
    let lam_sq = state.stretches_squared();
    let w = Matrix3::from_diagonal(&nalgebra::Vector3::new(
        1.0 / lam_sq[0],
        1.0 / lam_sq[1],
        1.0 / lam_sq[2],
    ));
    let scale = match flavor {
        StressFlavor::Cauchy => state.volume_ratio(),
        StressFlavor::Kirchhoff => 1.0,
    };
    Ok(scale * w * lambda.matrix * w)
}

/// Shear coefficients through the principal stresses:
/// `c_ij = (tau_i - tau_j)/(lam_i^2 - lam_j^2) (1/lam_i^2 + 1/lam_j^2)`,
/// with the same degenerate-limit treatment. Equal to the divided-difference
/// route identically; used as an oracle.
pub fn q2_via_principal_stresses(
    law: &MaterialLaw,
    state: &DeformationState,
) -> Result<[f64; 3], LawError> {
    let x = state.log_stretches();
    let lam_sq = state.stretches_squared();
    let tau = law.kirchhoff_principal(&x)?;
    let s2 = law.referential_principal(&x)?;
    let mut out = [0.0; 3];
    for (slot, &(i, j)) in SHEAR_PAIRS.iter().enumerate() {
        if (lam_sq[i] - lam_sq[j]).abs() >= DEGENERACY_THRESHOLD * lam_sq[i].max(lam_sq[j]) {
            out[slot] =
                (tau[i] - tau[j]) / (lam_sq[i] - lam_sq[j]) * (1.0 / lam_sq[i] + 1.0 / lam_sq[j]);
        } else {
            // tau_i - tau_j = lam_i^2 s2_i - lam_j^2 s2_j; expand around the
            // midpoint: the limit is the divided-difference limit plus the
            // s2 weights, exactly as in the eigenbasis route.
            let divided = divided_difference(law, &x, &s2, i, j)?;
            out[slot] = divided + s2[j] / lam_sq[i] + s2[i] / lam_sq[j];
        }
    }
    Ok(out)
}

/// `S2` as a function of the Green-Lagrange strain alone: `C = 2E + 1`,
/// evaluated at `F = sqrt(C)` (legitimate because `S2` depends on `C` only).
pub fn second_pk_from_green_lagrange(
    law: &MaterialLaw,
    e: &SymmetricTensor3,
) -> Result<SymmetricTensor3, LawError> {
    let c = SymmetricTensor3::new(2.0 * e.matrix() + Matrix3::identity());
    let probe_error = || LawError::NonFinite {
        law: law.name().to_string(),
        what: "strain probe (C not positive definite)",
        x: [e.matrix()[(0, 0)], e.matrix()[(1, 1)], e.matrix()[(2, 2)]],
    };
    let u = c.sqrt().map_err(|_| probe_error())?;
    let state = DeformationState::new(Tensor3::from(u)).map_err(|_| probe_error())?;
    stress::second_pk(law, &state)
}

/// Direct tensorial evaluation of the form for one strain-rate tensor:
///
/// ```text
/// <S2dot, Edot> + 2 tr(C^{-1} Edot S2 Edot) - <C^{-1}, Edot> <S2, Edot>
/// ```
///
/// (the last term only for the Cauchy flavor), with `S2dot` by central
/// differences of `S2(E + t Edot)`. Independent of the eigenbasis assembly;
/// this is the oracle the block route is checked against.
pub fn tensorial_form_value(
    law: &MaterialLaw,
    state: &DeformationState,
    edot: &SymmetricTensor3,
    flavor: StressFlavor,
) -> Result<f64, LawError> {
    let e = state.green_lagrange();
    let s2 = stress::second_pk(law, state)?;
    let c_inv = state
        .right_cauchy_green()
        .try_inverse()
        .expect("C of a valid state is invertible");

    // Step at the truncation/roundoff crossover for a twice-differenced
    // spectral assembly.
    let scale = edot.norm().max(1e-12);
    let h = 1e-5 * e.norm().max(1.0) / scale;
    let e_plus = SymmetricTensor3::new(e.matrix() + h * edot.matrix());
    let e_minus = SymmetricTensor3::new(e.matrix() - h * edot.matrix());
    let s2_plus = second_pk_from_green_lagrange(law, &e_plus)?;
    let s2_minus = second_pk_from_green_lagrange(law, &e_minus)?;
    let s2_dot = (s2_plus.matrix() - s2_minus.matrix()) / (2.0 * h);

    let mut value = inner(&s2_dot, edot.matrix())
        + 2.0 * (c_inv.matrix() * edot.matrix() * s2.matrix() * edot.matrix()).trace();
    if flavor == StressFlavor::Cauchy {
        value -= inner(c_inv.matrix(), edot.matrix()) * inner(s2.matrix(), edot.matrix());
    }
    Ok(value)
}

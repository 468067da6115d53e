//! Constitutive stability predicates and the numerical equivalence audit.
//!
//! The predicates, per state and stress flavor:
//!
//! - TSTS-M++: the symmetrized log-stretch stiffness is positive definite
//!   (checked through its minimum eigenvalue with a relative definiteness
//!   tolerance);
//! - the corotational positivity of `<Dzj stress, D>` over all strain-rate
//!   directions, evaluated exactly through the 6x6 quadratic form in `D`
//!   and cross-checked by sampling;
//! - the Baker-Ericksen inequalities `(sigma_i - sigma_j)(lam_i - lam_j) > 0`;
//! - pairwise monotonicity of the induced map on symmetric tensors, with a
//!   line-integral reconstruction as the independent route.
//!
//! The audit asserts the sign agreement between the stiffness minimum
//! eigenvalue and the exact corotational minimum outside a marginal band,
//! and that positive definiteness never coexists with a Baker-Ericksen
//! violation. Strict inequalities are implemented with tolerances and an
//! explicit marginal verdict rather than a boolean cliff.

use crate::kinematics::{edot_components, DeformationState, KinematicsError};
use crate::law::{LawError, MaterialLaw};
use crate::quadform::{self, LambdaMatrix, QuadFormBlocks, StressFlavor};
use crate::tensor::{inner, spectral_decompose, SymmetricTensor3};
use nalgebra::{Matrix3, Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Relative tolerance below which a minimum eigenvalue does not count as
/// positive definite.
pub const DEFINITENESS_TOLERANCE: f64 = 1e-10;

/// Default half-width of the marginal band around zero for audits.
pub const MARGINAL_BAND: f64 = 1e-6;

/// TSTS-M++ check: minimum eigenvalue of the symmetrized stiffness and the
/// definiteness verdict at the relative tolerance.
pub fn check_tstsm_pp(
    law: &MaterialLaw,
    x: &[f64; 3],
    flavor: StressFlavor,
) -> Result<(f64, bool), StabilityError> {
    let lambda = quadform::lambda_matrix(law, x, flavor)?;
    Ok(definiteness(&lambda))
}

fn definiteness(lambda: &LambdaMatrix) -> (f64, bool) {
    let scale = lambda.matrix.norm();
    (
        lambda.min_eigenvalue,
        lambda.min_eigenvalue > DEFINITENESS_TOLERANCE * scale,
    )
}

/// Outcome of a Baker-Ericksen check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeVerdict {
    pub pass: bool,
    /// Smallest pair product over non-degenerate pairs (the margin);
    /// `None` when every pair is degenerate (vacuous pass).
    pub margin: Option<f64>,
    /// Pair attaining the margin, 0-based.
    pub worst_pair: Option<(usize, usize)>,
}

/// Baker-Ericksen inequalities: `(stress_i - stress_j)(lam_i - lam_j) > 0`
/// over every pair with distinct stretches; equal-stretch pairs are exempt.
pub fn check_be(principal_stress: &[f64; 3], stretches: &[f64; 3]) -> BeVerdict {
    let mut margin: Option<f64> = None;
    let mut worst_pair = None;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let scale = stretches[i].abs().max(stretches[j].abs());
            if (stretches[i] - stretches[j]).abs() <= 1e-12 * scale {
                continue;
            }
            let product =
                (principal_stress[i] - principal_stress[j]) * (stretches[i] - stretches[j]);
            if margin.is_none_or(|m| product < m) {
                margin = Some(product);
                worst_pair = Some((i, j));
            }
        }
    }
    BeVerdict {
        pass: margin.is_none_or(|m| m > 0.0),
        margin,
        worst_pair,
    }
}

/// The induced isotropic map on symmetric tensors: apply a symmetric vector
/// function to the spectrum in the tensor's own eigenframe.
pub struct InducedIsotropicMap<'a> {
    law: &'a MaterialLaw,
    flavor: StressFlavor,
}

impl<'a> InducedIsotropicMap<'a> {
    pub fn new(law: &'a MaterialLaw, flavor: StressFlavor) -> Self {
        InducedIsotropicMap { law, flavor }
    }

    fn principal(&self, x: &[f64; 3]) -> Result<[f64; 3], LawError> {
        match self.flavor {
            StressFlavor::Cauchy => self.law.cauchy_principal(x),
            StressFlavor::Kirchhoff => self.law.kirchhoff_principal(x),
        }
    }

    /// `Sigma_f(S) = sum_i f_i(spectrum) v^i (x) v^i` in `S`'s eigenframe.
    /// Well defined for equivariant `f`, which every law provides.
    pub fn apply(&self, s: &SymmetricTensor3) -> Result<SymmetricTensor3, LawError> {
        let spec = spectral_decompose(s);
        let values = self.principal(&spec.eigenvalues)?;
        let mut m = Matrix3::zeros();
        for (value, v) in values.iter().zip(&spec.eigenvectors) {
            m += *value * v * v.transpose();
        }
        Ok(SymmetricTensor3::new(m))
    }

    /// Spot-check that the induced map commutes with conjugation by
    /// rotations, `Sigma_f(R S R^T) = R Sigma_f(S) R^T`, on random samples.
    pub fn rotation_equivariance_residual(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<f64, LawError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let x = [
                rng.gen::<f64>() * 1.4 - 0.7,
                rng.gen::<f64>() * 1.4 - 0.7,
                rng.gen::<f64>() * 1.4 - 0.7,
            ];
            let s = SymmetricTensor3::from_diagonal(x);
            let r = crate::tensor::rotation_about(
                nalgebra::Vector3::new(
                    rng.gen::<f64>() - 0.5,
                    rng.gen::<f64>() - 0.5,
                    rng.gen::<f64>() - 0.5,
                ),
                rng.gen::<f64>() * 3.0,
            );
            let rotated = SymmetricTensor3::new(r.matrix() * s.matrix() * r.matrix().transpose());
            let lhs = self.apply(&rotated)?;
            let rhs = r.matrix() * self.apply(&s)?.matrix() * r.matrix().transpose();
            let resid = (lhs.matrix() - rhs).norm() / rhs.norm().max(1.0);
            worst = worst.max(resid);
        }
        Ok(worst)
    }
}

/// Frame placement for the pairwise monotonicity product.
#[derive(Debug, Clone, Copy)]
pub enum FrameChoice {
    /// Both arguments diagonal in the standard frame.
    Principal,
    /// One shared random rotation.
    SharedRandom { seed: u64 },
    /// Independent random rotations.
    IndependentRandom { seed: u64 },
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let axis = nalgebra::Vector3::new(
        rng.gen::<f64>() - 0.5,
        rng.gen::<f64>() - 0.5,
        rng.gen::<f64>() - 0.5,
    );
    let angle = rng.gen::<f64>() * std::f64::consts::TAU;
    *crate::tensor::rotation_about(axis, angle).matrix()
}

/// Pairwise monotonicity product
/// `<f(log V_a) - f(log V_b), log V_a - log V_b>` for SPD tensors with the
/// prescribed log-spectra `x_a`, `x_b`, where `f` is the induced stress map.
///
/// Panics if `x_a == x_b` (precondition; the product is about distinct
/// arguments).
pub fn check_tstsm_pair(
    law: &MaterialLaw,
    x_a: &[f64; 3],
    x_b: &[f64; 3],
    flavor: StressFlavor,
    frames: FrameChoice,
) -> Result<f64, StabilityError> {
    assert!(x_a != x_b, "pair monotonicity requires distinct arguments");
    let (q1, q2) = match frames {
        FrameChoice::Principal => (Matrix3::identity(), Matrix3::identity()),
        FrameChoice::SharedRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random_rotation(&mut rng);
            (q, q)
        }
        FrameChoice::IndependentRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (random_rotation(&mut rng), random_rotation(&mut rng))
        }
    };
    let log_v = |x: &[f64; 3], q: &Matrix3<f64>| {
        SymmetricTensor3::new(
            q * Matrix3::from_diagonal(&nalgebra::Vector3::from(*x)) * q.transpose(),
        )
    };
    let log_v_a = log_v(x_a, &q1);
    let log_v_b = log_v(x_b, &q2);
    let map = InducedIsotropicMap::new(law, flavor);
    let f_a = map.apply(&log_v_a)?;
    let f_b = map.apply(&log_v_b)?;
    Ok(inner(
        &(f_a.matrix() - f_b.matrix()),
        &(log_v_a.matrix() - log_v_b.matrix()),
    ))
}

/// Line-integral reconstruction of the pair product: integrates
/// `<sym Lambda(x(t)) delta, delta>` along the straight segment from `x_b`
/// to `x_a` with composite 4-point Gauss-Legendre quadrature over at least
/// `n_nodes` nodes (n_nodes >= 8). For laws with positive definite
/// stiffness along the whole segment the result is positive, which is the
/// sufficiency argument for pairwise monotonicity.
pub fn line_integral_monotonicity(
    law: &MaterialLaw,
    x_a: &[f64; 3],
    x_b: &[f64; 3],
    n_nodes: usize,
    flavor: StressFlavor,
) -> Result<f64, StabilityError> {
    assert!(n_nodes >= 8, "need at least 8 quadrature nodes");
    let delta = [x_a[0] - x_b[0], x_a[1] - x_b[1], x_a[2] - x_b[2]];
    let dvec = nalgebra::Vector3::from(delta);
    let integrand = |t: f64| -> Result<f64, StabilityError> {
        let x = [
            x_b[0] + t * delta[0],
            x_b[1] + t * delta[1],
            x_b[2] + t * delta[2],
        ];
        let lambda = quadform::lambda_matrix(law, &x, flavor)?;
        Ok(dvec.dot(&(lambda.matrix * dvec)))
    };
    // 4-point Gauss-Legendre nodes/weights on [-1, 1].
    const NODES: [f64; 4] = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ];
    const WEIGHTS: [f64; 4] = [
        0.347_854_845_137_453_9,
        0.652_145_154_862_546_1,
        0.652_145_154_862_546_1,
        0.347_854_845_137_453_9,
    ];
    let subintervals = n_nodes.div_ceil(4);
    let width = 1.0 / subintervals as f64;
    let mut total = 0.0;
    for k in 0..subintervals {
        let center = (k as f64 + 0.5) * width;
        for (node, weight) in NODES.iter().zip(WEIGHTS.iter()) {
            total += weight * integrand(center + 0.5 * width * node)? * 0.5 * width;
        }
    }
    Ok(total)
}

/// The corotational pairing of one strain-rate direction `D` at a state,
/// through the quadratic-form route: `Q(F^T D F)/J` for the Cauchy flavor,
/// `Q_tau(F^T D F)` for the Kirchhoff flavor.
pub fn pairing_from_blocks(
    blocks: &QuadFormBlocks,
    state: &DeformationState,
    direction: &SymmetricTensor3,
) -> f64 {
    let f = state.f().matrix();
    let edot = SymmetricTensor3::new(f.transpose() * direction.matrix() * f);
    let comp = edot_components(state, &edot);
    let raw = blocks.value(&comp);
    match blocks.flavor {
        StressFlavor::Cauchy => raw / blocks.volume_ratio,
        StressFlavor::Kirchhoff => raw,
    }
}

/// Exact extremum of the pairing over unit-Frobenius directions.
#[derive(Debug, Clone)]
pub struct CspExtremum {
    /// Minimum of the pairing over `|D|_F = 1`.
    pub minimum: f64,
    /// A unit direction attaining it.
    pub argmin: SymmetricTensor3,
}

// Orthonormal basis of Sym(3): three axis directions then the shear
// directions for pairs (2,3), (1,3), (1,2).
fn sym_basis() -> [SymmetricTensor3; 6] {
    let mut basis = [SymmetricTensor3::zero(); 6];
    for i in 0..3 {
        let mut m = Matrix3::zeros();
        m[(i, i)] = 1.0;
        basis[i] = SymmetricTensor3::new(m);
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for (slot, &(i, j)) in quadform::SHEAR_PAIRS.iter().enumerate() {
        let mut m = Matrix3::zeros();
        m[(i, j)] = inv_sqrt2;
        m[(j, i)] = inv_sqrt2;
        basis[3 + slot] = SymmetricTensor3::new(m);
    }
    basis
}

/// Assembles the 6x6 matrix of the pairing as a quadratic form in `D` (in
/// an orthonormal basis of Sym(3), by polarization) and extracts the exact
/// minimum. This is the authoritative corotational stability value; the
/// sampled route below is a cross-check.
pub fn csp_exact(blocks: &QuadFormBlocks, state: &DeformationState) -> CspExtremum {
    let basis = sym_basis();
    let q = |d: &SymmetricTensor3| pairing_from_blocks(blocks, state, d);
    let mut m = Matrix6::zeros();
    for a in 0..6 {
        for b in a..6 {
            let value = if a == b {
                q(&basis[a])
            } else {
                let plus = SymmetricTensor3::new(basis[a].matrix() + basis[b].matrix());
                let minus = SymmetricTensor3::new(basis[a].matrix() - basis[b].matrix());
                0.25 * (q(&plus) - q(&minus))
            };
            m[(a, b)] = value;
            m[(b, a)] = value;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut min_idx = 0;
    for k in 1..6 {
        if eig.eigenvalues[k] < eig.eigenvalues[min_idx] {
            min_idx = k;
        }
    }
    let coeffs: Vector6<f64> = eig.eigenvectors.column(min_idx).into_owned();
    let mut argmin = Matrix3::zeros();
    for a in 0..6 {
        argmin += coeffs[a] * basis[a].matrix();
    }
    CspExtremum {
        minimum: eig.eigenvalues[min_idx],
        argmin: SymmetricTensor3::new(argmin),
    }
}

/// Sampled minimum of the pairing over unit-Frobenius symmetric directions:
/// Gaussian-orthogonal-ensemble samples, the six coordinate directions, and
/// the exact minimizer candidate. The sampled minimum is an upper bound on
/// the true minimum; including the exact candidate makes the two coincide
/// up to roundoff.
pub fn csp_sampled(
    blocks: &QuadFormBlocks,
    state: &DeformationState,
    n_directions: usize,
    seed: u64,
) -> CspExtremum {
    assert!(n_directions >= 50, "sampling needs at least 50 directions");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<CspExtremum> = None;
    let mut consider = |d: SymmetricTensor3, value: f64| {
        if best.as_ref().is_none_or(|b| value < b.minimum) {
            best = Some(CspExtremum {
                minimum: value,
                argmin: d,
            });
        }
    };
    for d in sym_basis() {
        let value = pairing_from_blocks(blocks, state, &d);
        consider(d, value);
    }
    for _ in 0..n_directions {
        // GOE normalization: (G + G^T)/2 with iid standard normal entries.
        let g = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let mut d = SymmetricTensor3::new(g);
        let norm = d.norm();
        if norm < 1e-12 {
            continue;
        }
        d = SymmetricTensor3::new(d.matrix() / norm);
        let value = pairing_from_blocks(blocks, state, &d);
        consider(d, value);
    }
    let exact = csp_exact(blocks, state);
    let exact_value = pairing_from_blocks(blocks, state, &exact.argmin);
    consider(exact.argmin, exact_value);
    best.expect("at least one direction considered")
}

/// Audit tolerances; strict inequalities are audited with a marginal band.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AuditTolerances {
    /// Relative definiteness tolerance on stiffness eigenvalues.
    pub definiteness: f64,
    /// Half-width of the band around zero in which verdicts are marginal.
    pub marginal: f64,
}

impl Default for AuditTolerances {
    fn default() -> Self {
        AuditTolerances {
            definiteness: DEFINITENESS_TOLERANCE,
            marginal: MARGINAL_BAND,
        }
    }
}

/// Per-flavor verdict at one state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Marginal,
    /// Stiffness and corotational minima disagree in sign outside the
    /// marginal band; the audit reports these as violations.
    Inconsistent,
}

fn classify(lambda_min: f64, csp_min: f64, marginal: f64) -> Verdict {
    if lambda_min.abs() < marginal || csp_min.abs() < marginal {
        return Verdict::Marginal;
    }
    match (lambda_min > 0.0, csp_min > 0.0) {
        (true, true) => Verdict::Pass,
        (false, false) => Verdict::Fail,
        _ => Verdict::Inconsistent,
    }
}

/// Everything the audit measures at one state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub x: [f64; 3],
    pub stretches: [f64; 3],
    pub volume_ratio: f64,
    pub principal_cauchy: [f64; 3],
    pub principal_kirchhoff: [f64; 3],
    pub lambda_min_cauchy: f64,
    pub lambda_min_kirchhoff: f64,
    /// TSTS-M++ verdicts at the relative definiteness tolerance.
    pub definite_cauchy: bool,
    pub definite_kirchhoff: bool,
    pub csp_exact_min_cauchy: f64,
    pub csp_exact_min_kirchhoff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csp_sampled_min_cauchy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csp_sampled_min_kirchhoff: Option<f64>,
    pub be_cauchy: BeVerdict,
    pub be_kirchhoff: BeVerdict,
    pub verdict_cauchy: Verdict,
    pub verdict_kirchhoff: Verdict,
}

/// Evaluates every predicate at one log-stretch state.
pub fn evaluate_state(
    law: &MaterialLaw,
    x: &[f64; 3],
    tolerances: &AuditTolerances,
    sampling: Option<(usize, u64)>,
) -> Result<StabilityVerdict, StabilityError> {
    let state = DeformationState::from_log_stretches(*x)?;
    let stress = crate::stress::cauchy_stress(law, &state)?;
    let lambda_sigma = quadform::lambda_matrix(law, x, StressFlavor::Cauchy)?;
    let lambda_tau = quadform::lambda_matrix(law, x, StressFlavor::Kirchhoff)?;
    let blocks_sigma = quadform::quadform_blocks(law, &state, StressFlavor::Cauchy)?;
    let blocks_tau = quadform::quadform_blocks(law, &state, StressFlavor::Kirchhoff)?;
    let exact_sigma = csp_exact(&blocks_sigma, &state);
    let exact_tau = csp_exact(&blocks_tau, &state);
    let (sampled_sigma, sampled_tau) = match sampling {
        Some((n, seed)) => (
            Some(csp_sampled(&blocks_sigma, &state, n, seed).minimum),
            Some(csp_sampled(&blocks_tau, &state, n, seed ^ 0x9e37_79b9).minimum),
        ),
        None => (None, None),
    };
    let stretches = state.stretches();
    let definite = |lambda: &LambdaMatrix| {
        lambda.min_eigenvalue > tolerances.definiteness * lambda.matrix.norm()
    };
    Ok(StabilityVerdict {
        x: *x,
        stretches,
        volume_ratio: state.volume_ratio(),
        principal_cauchy: stress.principal_cauchy,
        principal_kirchhoff: stress.principal_kirchhoff,
        lambda_min_cauchy: lambda_sigma.min_eigenvalue,
        lambda_min_kirchhoff: lambda_tau.min_eigenvalue,
        definite_cauchy: definite(&lambda_sigma),
        definite_kirchhoff: definite(&lambda_tau),
        csp_exact_min_cauchy: exact_sigma.minimum,
        csp_exact_min_kirchhoff: exact_tau.minimum,
        csp_sampled_min_cauchy: sampled_sigma,
        csp_sampled_min_kirchhoff: sampled_tau,
        be_cauchy: check_be(&stress.principal_cauchy, &stretches),
        be_kirchhoff: check_be(&stress.principal_kirchhoff, &stretches),
        verdict_cauchy: classify(
            lambda_sigma.min_eigenvalue,
            exact_sigma.minimum,
            tolerances.marginal,
        ),
        verdict_kirchhoff: classify(
            lambda_tau.min_eigenvalue,
            exact_tau.minimum,
            tolerances.marginal,
        ),
    })
}

/// One recorded audit failure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditViolation {
    pub x: [f64; 3],
    pub flavor: String,
    pub kind: String,
    pub detail: String,
}

/// Outcome of the equivalence audit over a set of states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub verdicts: Vec<StabilityVerdict>,
    /// Sign disagreements outside the marginal band.
    pub equivalence_violations: Vec<AuditViolation>,
    /// States where the stiffness is positive definite yet Baker-Ericksen
    /// fails (the audited implication admits no exceptions).
    pub be_violations: Vec<AuditViolation>,
    pub consistent: bool,
}

/// Extracts the audit failures of one verdict: sign disagreements outside
/// the marginal band and Baker-Ericksen violations under a positive
/// definite stiffness (both already classified at evaluation time). Shared
/// between the sequential audit and the parallel scan.
pub fn verdict_violations(
    verdict: &StabilityVerdict,
) -> (Vec<AuditViolation>, Vec<AuditViolation>) {
    let mut equivalence = Vec::new();
    let mut baker_ericksen = Vec::new();
    for (flavor, v, lambda_min, pd, csp_min, be) in [
        (
            StressFlavor::Cauchy,
            verdict.verdict_cauchy,
            verdict.lambda_min_cauchy,
            verdict.definite_cauchy,
            verdict.csp_exact_min_cauchy,
            &verdict.be_cauchy,
        ),
        (
            StressFlavor::Kirchhoff,
            verdict.verdict_kirchhoff,
            verdict.lambda_min_kirchhoff,
            verdict.definite_kirchhoff,
            verdict.csp_exact_min_kirchhoff,
            &verdict.be_kirchhoff,
        ),
    ] {
        if v == Verdict::Inconsistent {
            equivalence.push(AuditViolation {
                x: verdict.x,
                flavor: flavor.label().to_string(),
                kind: "sign-disagreement".into(),
                detail: format!(
                    "stiffness min eigenvalue and corotational minimum disagree: \
                     {lambda_min} vs {csp_min}"
                ),
            });
        }
        if pd && !be.pass {
            baker_ericksen.push(AuditViolation {
                x: verdict.x,
                flavor: flavor.label().to_string(),
                kind: "baker-ericksen-under-pd".into(),
                detail: format!(
                    "stiffness positive definite (min eig {lambda_min}) but pair margin {:?}",
                    be.margin
                ),
            });
        }
    }
    (equivalence, baker_ericksen)
}

/// Audits the equivalence between stiffness definiteness and corotational
/// positivity, plus the Baker-Ericksen implication, over a set of states.
pub fn equivalence_audit(
    law: &MaterialLaw,
    states: &[[f64; 3]],
    tolerances: &AuditTolerances,
    sampling: Option<(usize, u64)>,
) -> Result<AuditOutcome, StabilityError> {
    assert!(!states.is_empty(), "audit needs at least one state");
    let mut verdicts = Vec::with_capacity(states.len());
    let mut equivalence_violations = Vec::new();
    let mut be_violations = Vec::new();
    for x in states {
        let verdict = evaluate_state(law, x, tolerances, sampling)?;
        let (equiv, be) = verdict_violations(&verdict);
        equivalence_violations.extend(equiv);
        be_violations.extend(be);
        verdicts.push(verdict);
    }
    let consistent = equivalence_violations.is_empty() && be_violations.is_empty();
    Ok(AuditOutcome {
        verdicts,
        equivalence_violations,
        be_violations,
        consistent,
    })
}

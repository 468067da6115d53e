//! Isotropic material laws in principal (log-stretch) form.
//!
//! Every law exposes the principal Kirchhoff stresses `tau_i(x1, x2, x3)`
//! with `x_i = log lambda_i` and their Jacobian `d tau_i / d x_j`; the
//! canonical variable throughout the crate is `x = log lambda`. Derived
//! quantities follow from
//!
//! ```text
//! sigma_i = e^{-s} tau_i          (s = x1 + x2 + x3 = log J)
//! s2_i    = e^{-2 x_i} tau_i      (principal second Piola-Kirchhoff values)
//! ```
//!
//! Hyperelastic laws carry a scalar energy `w(x)` whose gradient is `tau`;
//! Cauchy-elastic laws give `tau` directly (the Jacobian may then lack major
//! symmetry). A Cauchy-elastic law may additionally carry a gamma-form
//! `S2 = g0 1 + g1 C + g2 C^2` with coefficients depending on the principal
//! invariants of `C`.
//!
//! Built-in laws have analytic derivatives; expression-defined laws use
//! central finite differences (first order step 1e-6 relative, second order
//! 1e-4 relative).

use crate::expr::{self, EquivarianceReport, EvalContext, Expr, ExprError};
use crate::numdiff::{self, VectorFn3};
use nalgebra::Matrix3;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LawError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("components are not permutation-equivariant: {witness}")]
    Equivariance { witness: String },
    #[error("law `{law}` produced a non-finite {what} at x = {x:?}")]
    NonFinite {
        law: String,
        what: &'static str,
        x: [f64; 3],
    },
    #[error("missing parameter `{name}` for law kind `{kind}`")]
    MissingParameter { name: String, kind: String },
    #[error("missing expression `{name}` for law kind `{kind}`")]
    MissingExpression { name: String, kind: String },
    #[error("unknown law kind `{kind}` (expected one of: {})", LAW_KINDS.join(", "))]
    UnknownKind { kind: String },
    #[error("law `{law}` has no gamma form")]
    NoGammaForm { law: String },
}

type ScalarFn = Box<dyn Fn(&[f64; 3]) -> Result<f64, LawError> + Send + Sync>;
type TripleFn = Box<dyn Fn(&[f64; 3]) -> Result<[f64; 3], LawError> + Send + Sync>;
type JacobianFn = Box<dyn Fn(&[f64; 3]) -> Result<Matrix3<f64>, LawError> + Send + Sync>;

/// Gamma-form coefficients: `S2 = g0 1 + g1 C + g2 C^2`, each `g_k` a
/// function of the principal invariants `(i1, i2, i3)` of `C`.
pub struct GammaForm {
    pub g0: ScalarFn,
    pub g1: ScalarFn,
    pub g2: ScalarFn,
}

impl GammaForm {
    pub fn coefficients(&self, invariants: &[f64; 3]) -> Result<[f64; 3], LawError> {
        Ok([
            (self.g0)(invariants)?,
            (self.g1)(invariants)?,
            (self.g2)(invariants)?,
        ])
    }
}

/// A law defined by a stored energy of the principal logarithmic strains.
pub struct HyperelasticLaw {
    name: String,
    params: BTreeMap<String, f64>,
    energy: ScalarFn,
    gradient: Option<TripleFn>,
    hessian: Option<JacobianFn>,
}

/// A law defined directly by its principal Kirchhoff stresses.
pub struct CauchyElasticLaw {
    name: String,
    params: BTreeMap<String, f64>,
    stress: TripleFn,
    jacobian: Option<JacobianFn>,
    gamma: Option<Arc<GammaForm>>,
}

/// An isotropic material law, hyperelastic or Cauchy-elastic.
pub enum MaterialLaw {
    Hyperelastic(HyperelasticLaw),
    CauchyElastic(CauchyElasticLaw),
}

impl fmt::Debug for MaterialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MaterialLaw({})", self.name())
    }
}

impl MaterialLaw {
    pub fn name(&self) -> &str {
        match self {
            MaterialLaw::Hyperelastic(l) => &l.name,
            MaterialLaw::CauchyElastic(l) => &l.name,
        }
    }

    pub fn parameters(&self) -> &BTreeMap<String, f64> {
        match self {
            MaterialLaw::Hyperelastic(l) => &l.params,
            MaterialLaw::CauchyElastic(l) => &l.params,
        }
    }

    pub fn is_hyperelastic(&self) -> bool {
        matches!(self, MaterialLaw::Hyperelastic(_))
    }

    /// Stored energy `w(x)`; `None` for Cauchy-elastic laws.
    pub fn energy(&self, x: &[f64; 3]) -> Option<Result<f64, LawError>> {
        match self {
            MaterialLaw::Hyperelastic(l) => Some((l.energy)(x)),
            MaterialLaw::CauchyElastic(_) => None,
        }
    }

    /// Principal Kirchhoff stresses `tau_i(x)`.
    pub fn kirchhoff_principal(&self, x: &[f64; 3]) -> Result<[f64; 3], LawError> {
        let tau = match self {
            MaterialLaw::Hyperelastic(l) => match &l.gradient {
                Some(g) => g(x)?,
                None => numdiff::gradient3(&|y| (l.energy)(y), x, numdiff::FIRST_ORDER_STEP)?,
            },
            MaterialLaw::CauchyElastic(l) => (l.stress)(x)?,
        };
        if tau.iter().any(|v| !v.is_finite()) {
            return Err(LawError::NonFinite {
                law: self.name().to_string(),
                what: "stress",
                x: *x,
            });
        }
        Ok(tau)
    }

    /// Jacobian `d tau_i / d x_j`.
    pub fn kirchhoff_jacobian(&self, x: &[f64; 3]) -> Result<Matrix3<f64>, LawError> {
        let jac = match self {
            MaterialLaw::Hyperelastic(l) => match &l.hessian {
                Some(h) => h(x)?,
                None => numdiff::hessian3(&|y| (l.energy)(y), x, numdiff::SECOND_ORDER_STEP)?,
            },
            MaterialLaw::CauchyElastic(l) => match &l.jacobian {
                Some(j) => j(x)?,
                None => numdiff::jacobian3(
                    &|y| self.kirchhoff_principal(y),
                    x,
                    numdiff::FIRST_ORDER_STEP,
                )?,
            },
        };
        if jac.iter().any(|v| !v.is_finite()) {
            return Err(LawError::NonFinite {
                law: self.name().to_string(),
                what: "stress Jacobian",
                x: *x,
            });
        }
        Ok(jac)
    }

    /// Principal Cauchy stresses `sigma_i = e^{-s} tau_i`.
    pub fn cauchy_principal(&self, x: &[f64; 3]) -> Result<[f64; 3], LawError> {
        let tau = self.kirchhoff_principal(x)?;
        let inv_j = (-(x[0] + x[1] + x[2])).exp();
        Ok([tau[0] * inv_j, tau[1] * inv_j, tau[2] * inv_j])
    }

    /// Principal second Piola-Kirchhoff values `s2_i = e^{-2 x_i} tau_i`.
    pub fn referential_principal(&self, x: &[f64; 3]) -> Result<[f64; 3], LawError> {
        let tau = self.kirchhoff_principal(x)?;
        Ok([
            tau[0] * (-2.0 * x[0]).exp(),
            tau[1] * (-2.0 * x[1]).exp(),
            tau[2] * (-2.0 * x[2]).exp(),
        ])
    }

    pub fn gamma_form(&self) -> Option<&GammaForm> {
        match self {
            MaterialLaw::Hyperelastic(_) => None,
            MaterialLaw::CauchyElastic(l) => l.gamma.as_deref(),
        }
    }
}

/// Quadratic Hencky law: `w(x) = mu |x|^2 + lam/2 s^2`, so
/// `tau_i = 2 mu x_i + lam s` with the constant Hessian `2 mu 1 + lam 1(x)1`.
pub fn hencky_law(mu: f64, lam: f64) -> MaterialLaw {
    let params = param_map(&[("mu", mu), ("lam", lam)]);
    MaterialLaw::Hyperelastic(HyperelasticLaw {
        name: "hencky".into(),
        params,
        energy: Box::new(move |x| {
            let s = x[0] + x[1] + x[2];
            Ok(mu * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) + 0.5 * lam * s * s)
        }),
        gradient: Some(Box::new(move |x| {
            let s = x[0] + x[1] + x[2];
            Ok([
                2.0 * mu * x[0] + lam * s,
                2.0 * mu * x[1] + lam * s,
                2.0 * mu * x[2] + lam * s,
            ])
        })),
        hessian: Some(Box::new(move |_| {
            Ok(Matrix3::from_fn(|i, j| {
                lam + if i == j { 2.0 * mu } else { 0.0 }
            }))
        })),
    })
}

/// Exponentiated Hencky law:
/// `w(x) = mu/k e^{k |x|^2} + lam/(2 khat) e^{khat s^2}`.
pub fn exp_hencky_law(mu: f64, lam: f64, k: f64, khat: f64) -> MaterialLaw {
    let params = param_map(&[("mu", mu), ("lam", lam), ("k", k), ("khat", khat)]);
    MaterialLaw::Hyperelastic(HyperelasticLaw {
        name: "exp-hencky".into(),
        params,
        energy: Box::new(move |x| {
            let norm_sq = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let s = x[0] + x[1] + x[2];
            Ok(mu / k * (k * norm_sq).exp() + lam / (2.0 * khat) * (khat * s * s).exp())
        }),
        gradient: Some(Box::new(move |x| {
            let norm_sq = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let s = x[0] + x[1] + x[2];
            let dev_factor = 2.0 * mu * (k * norm_sq).exp();
            let vol_factor = lam * s * (khat * s * s).exp();
            Ok([
                dev_factor * x[0] + vol_factor,
                dev_factor * x[1] + vol_factor,
                dev_factor * x[2] + vol_factor,
            ])
        })),
        hessian: Some(Box::new(move |x| {
            let norm_sq = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let s = x[0] + x[1] + x[2];
            let iso = 2.0 * mu * (k * norm_sq).exp();
            let vol = lam * (khat * s * s).exp() * (1.0 + 2.0 * khat * s * s);
            Ok(Matrix3::from_fn(|i, j| {
                let kron = if i == j { 1.0 } else { 0.0 };
                iso * (kron + 2.0 * k * x[i] * x[j]) + vol
            }))
        })),
    })
}

/// A genuinely Cauchy-elastic (non-hyperelastic) law:
/// `tau_i = 2 mu x_i + lam s + d x_i s`. For `d != 0` the Jacobian
/// `2 mu delta_ij + lam + d (delta_ij s + x_i)` is non-symmetric whenever the
/// components of `x` differ; `d = 0` degenerates to the Hencky stresses.
pub fn cauchy_nonhyper_law(mu: f64, lam: f64, d: f64) -> MaterialLaw {
    let params = param_map(&[("mu", mu), ("lam", lam), ("d", d)]);
    MaterialLaw::CauchyElastic(CauchyElasticLaw {
        name: "cauchy-nonhyper".into(),
        params,
        stress: Box::new(move |x| {
            let s = x[0] + x[1] + x[2];
            Ok([
                2.0 * mu * x[0] + lam * s + d * x[0] * s,
                2.0 * mu * x[1] + lam * s + d * x[1] * s,
                2.0 * mu * x[2] + lam * s + d * x[2] * s,
            ])
        }),
        jacobian: Some(Box::new(move |x| {
            let s = x[0] + x[1] + x[2];
            Ok(Matrix3::from_fn(|i, j| {
                let kron = if i == j { 1.0 } else { 0.0 };
                2.0 * mu * kron + lam + d * (kron * s + x[i])
            }))
        })),
        gamma: None,
    })
}

/// Principal invariants of `C` from the squared stretches:
/// `i1 = tr C`, `i2 = (tr^2 C - tr C^2)/2`, `i3 = det C`.
pub fn invariants_from_stretches_squared(lam_sq: &[f64; 3]) -> [f64; 3] {
    let (a, b, c) = (lam_sq[0], lam_sq[1], lam_sq[2]);
    [a + b + c, a * b + b * c + c * a, a * b * c]
}

/// Principal `S2` values from a gamma form at given squared stretches:
/// `s2_j = g0 + g1 lam_j^2 + g2 lam_j^4`.
pub fn gamma_principal_s2(gamma: &GammaForm, lam_sq: &[f64; 3]) -> Result<[f64; 3], LawError> {
    let inv = invariants_from_stretches_squared(lam_sq);
    let g = gamma.coefficients(&inv)?;
    let mut out = [0.0; 3];
    for j in 0..3 {
        out[j] = g[0] + g[1] * lam_sq[j] + g[2] * lam_sq[j] * lam_sq[j];
    }
    Ok(out)
}

/// Builds a Cauchy-elastic law from gamma coefficient functions; the
/// principal Kirchhoff stresses follow as `tau_j = lam_j^2 s2_j`.
/// Isotropy is automatic since the coefficients depend on invariants only.
pub fn law_from_gamma(
    name: impl Into<String>,
    params: BTreeMap<String, f64>,
    gamma: GammaForm,
) -> MaterialLaw {
    let gamma = Arc::new(gamma);
    let gamma_for_stress = Arc::clone(&gamma);
    MaterialLaw::CauchyElastic(CauchyElasticLaw {
        name: name.into(),
        params,
        stress: Box::new(move |x| {
            let lam_sq = [(2.0 * x[0]).exp(), (2.0 * x[1]).exp(), (2.0 * x[2]).exp()];
            let s2 = gamma_principal_s2(&gamma_for_stress, &lam_sq)?;
            Ok([s2[0] * lam_sq[0], s2[1] * lam_sq[1], s2[2] * lam_sq[2]])
        }),
        jacobian: None,
        gamma: Some(gamma),
    })
}

/// Builds a Cauchy-elastic law from an explicit principal-stress triple.
pub fn law_from_principal_stress(
    name: impl Into<String>,
    params: BTreeMap<String, f64>,
    stress: impl Fn(&[f64; 3]) -> Result<[f64; 3], LawError> + Send + Sync + 'static,
) -> MaterialLaw {
    MaterialLaw::CauchyElastic(CauchyElasticLaw {
        name: name.into(),
        params,
        stress: Box::new(stress),
        jacobian: None,
        gamma: None,
    })
}

/// Builds a hyperelastic law from an explicit energy; derivatives are
/// finite differences.
pub fn law_from_energy(
    name: impl Into<String>,
    params: BTreeMap<String, f64>,
    energy: impl Fn(&[f64; 3]) -> Result<f64, LawError> + Send + Sync + 'static,
) -> MaterialLaw {
    MaterialLaw::Hyperelastic(HyperelasticLaw {
        name: name.into(),
        params,
        energy: Box::new(energy),
        gradient: None,
        hessian: None,
    })
}

fn param_map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Declared law kinds for material configuration.
pub const LAW_KINDS: [&str; 6] = [
    "hencky",
    "exp-hencky",
    "cauchy-nonhyper",
    "custom-energy",
    "custom-stress",
    "custom-gamma",
];

/// A parsed material definition: kind, parameter values and expression
/// strings for the custom kinds.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MaterialConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expressions: BTreeMap<String, String>,
}

impl MaterialConfig {
    pub fn builtin(kind: &str, parameters: BTreeMap<String, f64>) -> Self {
        MaterialConfig {
            kind: kind.to_string(),
            name: None,
            parameters,
            expressions: BTreeMap::new(),
        }
    }

    fn param(&self, name: &str) -> Result<f64, LawError> {
        self.parameters
            .get(name)
            .copied()
            .ok_or_else(|| LawError::MissingParameter {
                name: name.to_string(),
                kind: self.kind.clone(),
            })
    }

    fn expression(&self, name: &str) -> Result<&str, LawError> {
        self.expressions
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| LawError::MissingExpression {
                name: name.to_string(),
                kind: self.kind.clone(),
            })
    }

    /// Builds the law. Out-of-range parameters produce warnings, not errors:
    /// the violating regimes (for instance `2 mu + 3 lam <= 0`) are
    /// themselves objects of study.
    pub fn build(&self) -> Result<(MaterialLaw, Vec<String>), LawError> {
        let mut warnings = Vec::new();
        let mut warn_positive = |name: &str, value: f64| {
            if value <= 0.0 {
                warnings.push(format!(
                    "parameter {name} = {value} is outside the admissible range ({name} > 0)"
                ));
            }
        };
        let law = match self.kind.as_str() {
            "hencky" => {
                let (mu, lam) = (self.param("mu")?, self.param("lam")?);
                warn_positive("mu", mu);
                if 2.0 * mu + 3.0 * lam <= 0.0 {
                    warnings.push(format!(
                        "2*mu + 3*lam = {} violates 2*mu + 3*lam > 0",
                        2.0 * mu + 3.0 * lam
                    ));
                }
                hencky_law(mu, lam)
            }
            "exp-hencky" => {
                let (mu, lam) = (self.param("mu")?, self.param("lam")?);
                let (k, khat) = (self.param("k")?, self.param("khat")?);
                warn_positive("mu", mu);
                warn_positive("k", k);
                warn_positive("khat", khat);
                if 2.0 * mu + 3.0 * lam <= 0.0 {
                    warnings.push(format!(
                        "2*mu + 3*lam = {} violates 2*mu + 3*lam > 0",
                        2.0 * mu + 3.0 * lam
                    ));
                }
                exp_hencky_law(mu, lam, k, khat)
            }
            "cauchy-nonhyper" => {
                let (mu, lam, d) = (self.param("mu")?, self.param("lam")?, self.param("d")?);
                warn_positive("mu", mu);
                cauchy_nonhyper_law(mu, lam, d)
            }
            "custom-energy" => {
                let ast = expr::parse(self.expression("energy")?)?;
                let params = self.parameters.clone();
                let law_name = self.display_name("custom-energy");
                // Isotropy check on the finite-difference gradient of the
                // energy (the energy itself is then symmetric up to a
                // constant, which is all the stresses see).
                let grad_params = params.clone();
                let grad_ast = ast.clone();
                let grad = move |x: &[f64; 3]| -> Result<[f64; 3], LawError> {
                    numdiff::gradient3(
                        &|y: &[f64; 3]| {
                            expr::evaluate(&grad_ast, &EvalContext::new(*y, &grad_params))
                                .map_err(LawError::from)
                        },
                        x,
                        numdiff::FIRST_ORDER_STEP,
                    )
                };
                require_equivariant(&grad)?;
                let eval_params = params.clone();
                law_from_energy(law_name, params, move |x| {
                    expr::evaluate(&ast, &EvalContext::new(*x, &eval_params))
                        .map_err(LawError::from)
                })
            }
            "custom-stress" => {
                let asts = [
                    expr::parse(self.expression("tau1")?)?,
                    expr::parse(self.expression("tau2")?)?,
                    expr::parse(self.expression("tau3")?)?,
                ];
                let params = self.parameters.clone();
                let report = expr::check_permutation_equivariance(
                    &asts,
                    &params,
                    EQUIVARIANCE_SAMPLES,
                    EQUIVARIANCE_SEED,
                )?;
                check_equivariance_report(report)?;
                let law_name = self.display_name("custom-stress");
                let eval_params = params.clone();
                law_from_principal_stress(law_name, params, move |x| {
                    let ctx = EvalContext::new(*x, &eval_params);
                    Ok([
                        expr::evaluate(&asts[0], &ctx)?,
                        expr::evaluate(&asts[1], &ctx)?,
                        expr::evaluate(&asts[2], &ctx)?,
                    ])
                })
            }
            "custom-gamma" => {
                // In gamma expressions x1, x2, x3 are read as the principal
                // invariants i1, i2, i3 of C; isotropy is automatic.
                let g0 = expr::parse(self.expression("gamma0")?)?;
                let g1 = expr::parse(self.expression("gamma1")?)?;
                let g2 = expr::parse(self.expression("gamma2")?)?;
                let params = self.parameters.clone();
                let law_name = self.display_name("custom-gamma");
                let make = |ast: Expr, params: BTreeMap<String, f64>| {
                    move |inv: &[f64; 3]| -> Result<f64, LawError> {
                        expr::evaluate(&ast, &EvalContext::new(*inv, &params))
                            .map_err(LawError::from)
                    }
                };
                let gamma = GammaForm {
                    g0: Box::new(make(g0, params.clone())),
                    g1: Box::new(make(g1, params.clone())),
                    g2: Box::new(make(g2, params.clone())),
                };
                law_from_gamma(law_name, params, gamma)
            }
            other => {
                return Err(LawError::UnknownKind {
                    kind: other.to_string(),
                })
            }
        };
        Ok((law, warnings))
    }

    fn display_name(&self, default: &str) -> String {
        self.name.clone().unwrap_or_else(|| default.to_string())
    }
}

const EQUIVARIANCE_SAMPLES: usize = 64;
const EQUIVARIANCE_SEED: u64 = 0x0c0_2057ab;

fn require_equivariant(f: VectorFn3<LawError>) -> Result<(), LawError> {
    let adaptor = |x: &[f64; 3]| -> Result<[f64; 3], ExprError> {
        f(x).map_err(|e| ExprError::Eval {
            msg: format!("law evaluation failed during equivariance check: {e}"),
        })
    };
    let report = expr::check_equivariance_fn(&adaptor, EQUIVARIANCE_SAMPLES, EQUIVARIANCE_SEED)?;
    check_equivariance_report(report)
}

fn check_equivariance_report(report: EquivarianceReport) -> Result<(), LawError> {
    if report.equivariant {
        return Ok(());
    }
    let witness = report
        .witness
        .map(|w| {
            format!(
                "component {} at x = {:?} under permutation {:?}: {} vs {}",
                w.component + 1,
                w.x,
                w.permutation,
                w.lhs,
                w.rhs
            )
        })
        .unwrap_or_else(|| "no witness recorded".to_string());
    Err(LawError::Equivariance { witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn random_x(rng: &mut impl Rng, half_width: f64) -> [f64; 3] {
        [
            (rng.gen::<f64>() * 2.0 - 1.0) * half_width,
            (rng.gen::<f64>() * 2.0 - 1.0) * half_width,
            (rng.gen::<f64>() * 2.0 - 1.0) * half_width,
        ]
    }

    #[test]
    fn hencky_energy_and_stress_values() {
        let law = hencky_law(1.0, 1.0);
        let x = [1.0, 0.0, 0.0];
        assert_relative_eq!(law.energy(&x).unwrap().unwrap(), 1.5, max_relative = 1e-14);
        let tau = law.kirchhoff_principal(&x).unwrap();
        assert_relative_eq!(tau[0], 3.0, max_relative = 1e-14);
        assert_relative_eq!(tau[1], 1.0, max_relative = 1e-14);
        assert_relative_eq!(tau[2], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn hencky_stress_free_reference() {
        let law = hencky_law(1.3, 0.8);
        let x = [0.0; 3];
        assert_relative_eq!(law.energy(&x).unwrap().unwrap(), 0.0);
        assert_eq!(law.kirchhoff_principal(&x).unwrap(), [0.0; 3]);
    }

    #[test]
    fn hencky_hessian_is_constant_with_known_eigenvalues() {
        let law = hencky_law(1.0, 1.0);
        for x in [[0.0; 3], [0.4, -0.2, 0.9]] {
            let h = law.kirchhoff_jacobian(&x).unwrap();
            let expect = Matrix3::new(3.0, 1.0, 1.0, 1.0, 3.0, 1.0, 1.0, 1.0, 3.0);
            assert!((h - expect).norm() <= 1e-13);
        }
        // eigenvalues of 2 mu 1 + lam 1(x)1 are {2 mu, 2 mu, 2 mu + 3 lam}
        let h = law.kirchhoff_jacobian(&[0.0; 3]).unwrap();
        let mut eigs: Vec<f64> = nalgebra::SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(f64::total_cmp);
        assert_relative_eq!(eigs[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[1], 2.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[2], 5.0, max_relative = 1e-12);
    }

    #[test]
    fn exp_hencky_reference_is_stress_free() {
        let law = exp_hencky_law(1.0, 1.0, 1.0, 1.0);
        let tau = law.kirchhoff_principal(&[0.0; 3]).unwrap();
        assert!(tau.iter().all(|v| v.abs() <= 1e-14));
    }

    #[test]
    fn exp_hencky_gradient_matches_finite_differences() {
        // mu = k = 1, lam = 0, x = (1,0,0): tau_1 = 2 e by the chain rule.
        let law = exp_hencky_law(1.0, 0.0, 1.0, 1.0);
        let x = [1.0, 0.0, 0.0];
        let tau = law.kirchhoff_principal(&x).unwrap();
        assert_relative_eq!(tau[0], 2.0 * std::f64::consts::E, max_relative = 1e-12);
        // FD oracle on the energy across random points.
        let law_full = exp_hencky_law(1.1, 0.7, 0.9, 1.3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let x = random_x(&mut rng, 0.7);
            let tau = law_full.kirchhoff_principal(&x).unwrap();
            let fd = numdiff::gradient3(
                &|y: &[f64; 3]| law_full.energy(y).unwrap(),
                &x,
                numdiff::FIRST_ORDER_STEP,
            )
            .unwrap();
            for i in 0..3 {
                assert!(
                    (tau[i] - fd[i]).abs() <= 1e-6 * tau[i].abs().max(1.0),
                    "component {i}: analytic {} vs fd {}",
                    tau[i],
                    fd[i]
                );
            }
        }
    }

    #[test]
    fn exp_hencky_hessian_at_reference_matches_hencky() {
        let (mu, lam) = (1.4, 0.6);
        let law = exp_hencky_law(mu, lam, 1.0, 1.0);
        let h = law.kirchhoff_jacobian(&[0.0; 3]).unwrap();
        let fd = numdiff::hessian3(
            &|y: &[f64; 3]| law.energy(y).unwrap(),
            &[0.0; 3],
            numdiff::SECOND_ORDER_STEP,
        )
        .unwrap();
        let expect = Matrix3::from_fn(|i, j| lam + if i == j { 2.0 * mu } else { 0.0 });
        assert!((h - expect).norm() <= 1e-12);
        assert!((fd - expect).norm() <= 1e-6);
    }

    #[test]
    fn exp_hencky_jacobian_matches_finite_differences_away_from_reference() {
        let law = exp_hencky_law(1.1, 0.7, 0.9, 1.3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = random_x(&mut rng, 0.7);
            let analytic = law.kirchhoff_jacobian(&x).unwrap();
            let fd = numdiff::jacobian3(
                &|y: &[f64; 3]| law.kirchhoff_principal(y),
                &x,
                numdiff::FIRST_ORDER_STEP,
            )
            .unwrap();
            assert!(
                (analytic - fd).norm() <= 1e-5 * analytic.norm().max(1.0),
                "jacobian mismatch {:e}",
                (analytic - fd).norm()
            );
        }
    }

    #[test]
    fn cauchy_nonhyper_degenerates_to_hencky() {
        let law = cauchy_nonhyper_law(1.0, 1.0, 0.0);
        let hencky = hencky_law(1.0, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = random_x(&mut rng, 1.0);
            let a = law.kirchhoff_principal(&x).unwrap();
            let b = hencky.kirchhoff_principal(&x).unwrap();
            for i in 0..3 {
                assert_relative_eq!(a[i], b[i], max_relative = 1e-14, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn cauchy_nonhyper_jacobian_asymmetry() {
        // d = 1, x = (1,0,0): |J_12 - J_21| = |d (x1 - x2)| = 1.
        let law = cauchy_nonhyper_law(1.0, 1.0, 1.0);
        let jac = law.kirchhoff_jacobian(&[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!((jac[(0, 1)] - jac[(1, 0)]).abs(), 1.0, max_relative = 1e-12);
        // Stress-free reference regardless of d.
        let tau = law.kirchhoff_principal(&[0.0; 3]).unwrap();
        assert_eq!(tau, [0.0; 3]);
    }

    #[test]
    fn cauchy_nonhyper_asymmetry_scales_with_probe() {
        // max_ij |J_ij - J_ji| = |d| max_ij |x_i - x_j| >= 0.5 |d| |s| at
        // these probes.
        let d = 0.7;
        let law = cauchy_nonhyper_law(1.0, 1.0, d);
        for x in [[1.0, 0.0, 0.0], [0.5, -0.2, 0.4], [2.0, 1.0, 0.0]] {
            let s: f64 = x.iter().sum();
            let jac = law.kirchhoff_jacobian(&x).unwrap();
            let mut asym: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    asym = asym.max((jac[(i, j)] - jac[(j, i)]).abs());
                }
            }
            assert!(
                asym >= 0.5 * d.abs() * s.abs() - 1e-12,
                "asym {asym} at {x:?}"
            );
        }
    }

    #[test]
    fn hyperelastic_jacobians_are_symmetric() {
        let laws = [hencky_law(1.0, 1.0), exp_hencky_law(1.0, 1.0, 1.0, 1.0)];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for law in &laws {
            for _ in 0..10 {
                let x = random_x(&mut rng, 0.7);
                let fd = numdiff::jacobian3(
                    &|y: &[f64; 3]| law.kirchhoff_principal(y),
                    &x,
                    numdiff::FIRST_ORDER_STEP,
                )
                .unwrap();
                let asym = (fd - fd.transpose()).norm();
                assert!(asym <= 1e-7, "{}: asymmetry {asym:e}", law.name());
            }
        }
    }

    #[test]
    fn richter_consistency() {
        // tau_i equals the energy gradient by finite differences.
        let laws = [hencky_law(1.2, 0.5), exp_hencky_law(0.9, 0.4, 1.1, 0.8)];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for law in &laws {
            for _ in 0..10 {
                let x = random_x(&mut rng, 0.6);
                let tau = law.kirchhoff_principal(&x).unwrap();
                let fd = numdiff::gradient3(
                    &|y: &[f64; 3]| law.energy(y).unwrap(),
                    &x,
                    numdiff::FIRST_ORDER_STEP,
                )
                .unwrap();
                for i in 0..3 {
                    assert!(
                        (tau[i] - fd[i]).abs() <= 1e-6 * tau[i].abs().max(1.0),
                        "{}: tau_{i} {} vs fd {}",
                        law.name(),
                        tau[i],
                        fd[i]
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_constant_form() {
        let c = 2.5;
        let gamma = GammaForm {
            g0: Box::new(move |_| Ok(c)),
            g1: Box::new(|_| Ok(0.0)),
            g2: Box::new(|_| Ok(0.0)),
        };
        let s2 = gamma_principal_s2(&gamma, &[1.7, 0.4, 2.2]).unwrap();
        assert_eq!(s2, [c, c, c]);
    }

    #[test]
    fn gamma_affine_form_at_stretch() {
        // gamma = (1, 1, 0), lambda = (2, 1, 1): s2_j = 1 + lambda_j^2.
        let gamma = GammaForm {
            g0: Box::new(|_| Ok(1.0)),
            g1: Box::new(|_| Ok(1.0)),
            g2: Box::new(|_| Ok(0.0)),
        };
        let s2 = gamma_principal_s2(&gamma, &[4.0, 1.0, 1.0]).unwrap();
        assert_eq!(s2, [5.0, 2.0, 2.0]);
    }

    #[test]
    fn gamma_law_exposes_both_routes() {
        let gamma = GammaForm {
            g0: Box::new(|inv| Ok(0.3 * inv[0])),
            g1: Box::new(|inv| Ok(0.1 * inv[2])),
            g2: Box::new(|inv| Ok(-0.05 * inv[1])),
        };
        let law = law_from_gamma("poly-gamma", BTreeMap::new(), gamma);
        let x: [f64; 3] = [0.2, -0.1, 0.3];
        let lam_sq = [(2.0 * x[0]).exp(), (2.0 * x[1]).exp(), (2.0 * x[2]).exp()];
        let s2_direct = gamma_principal_s2(law.gamma_form().unwrap(), &lam_sq).unwrap();
        let s2_from_tau = law.referential_principal(&x).unwrap();
        for i in 0..3 {
            assert_relative_eq!(s2_direct[i], s2_from_tau[i], max_relative = 1e-9);
        }
    }

    #[test]
    fn custom_energy_matches_builtin_hencky() {
        let config = MaterialConfig {
            kind: "custom-energy".into(),
            name: Some("hencky-expr".into()),
            parameters: param_map(&[("mu", 1.0), ("lam", 1.0)]),
            expressions: [(
                "energy".to_string(),
                "mu*(x1^2+x2^2+x3^2) + lam/2*s^2".to_string(),
            )]
            .into_iter()
            .collect(),
        };
        let (law, warnings) = config.build().unwrap();
        assert!(warnings.is_empty());
        let builtin = hencky_law(1.0, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = random_x(&mut rng, 0.7);
            let a = law.kirchhoff_principal(&x).unwrap();
            let b = builtin.kirchhoff_principal(&x).unwrap();
            for i in 0..3 {
                assert!(
                    (a[i] - b[i]).abs() <= 1e-6 * b[i].abs().max(1.0),
                    "tau_{i}: {} vs {}",
                    a[i],
                    b[i]
                );
            }
        }
    }

    #[test]
    fn custom_stress_equivariance_rejection() {
        let config = MaterialConfig {
            kind: "custom-stress".into(),
            name: None,
            parameters: BTreeMap::new(),
            expressions: [
                ("tau1".to_string(), "x2".to_string()),
                ("tau2".to_string(), "x1".to_string()),
                ("tau3".to_string(), "x3".to_string()),
            ]
            .into_iter()
            .collect(),
        };
        assert!(matches!(config.build(), Err(LawError::Equivariance { .. })));
    }

    #[test]
    fn empty_expression_is_a_parse_error() {
        let config = MaterialConfig {
            kind: "custom-energy".into(),
            name: None,
            parameters: BTreeMap::new(),
            expressions: [("energy".to_string(), "".to_string())]
                .into_iter()
                .collect(),
        };
        assert!(matches!(
            config.build(),
            Err(LawError::Expr(ExprError::Parse { .. }))
        ));
    }

    #[test]
    fn out_of_range_parameters_warn_but_build() {
        let config = MaterialConfig::builtin("hencky", param_map(&[("mu", 1.0), ("lam", -1.0)]));
        let (law, warnings) = config.build().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("2*mu + 3*lam"));
        assert_eq!(law.name(), "hencky");
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let config = MaterialConfig::builtin("mooney", BTreeMap::new());
        assert!(matches!(config.build(), Err(LawError::UnknownKind { .. })));
    }
}

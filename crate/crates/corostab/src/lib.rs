//! Numerical verification of constitutive stability conditions for
//! isotropic nonlinear elastic laws.
//!
//! The library computes corotational (Zaremba-Jaumann) stress rates along
//! smooth motion paths, assembles the equivalent quadratic forms in the
//! Lagrangian eigenbasis, and checks the agreement between the corotational
//! stability postulate (positivity of `<D_zj sigma, D>`), monotonicity of
//! the Cauchy/Kirchhoff stress in the logarithmic strain, and the
//! Baker-Ericksen inequalities, for both hyperelastic and Cauchy-elastic
//! materials.
//!
//! Modules, bottom up:
//!
//! - [`tensor`]: 3x3 tensors, spectral decomposition, SPD matrix functions
//! - [`kinematics`]: strain measures, motion paths, velocity fields
//! - [`expr`]: the expression language for user-defined laws
//! - [`law`]: material laws (built-in and expression-defined)
//! - [`stress`]: stress tensors from a law and a deformation state
//! - [`rates`]: Zaremba-Jaumann rates and the corotated-frame route
//! - [`quadform`]: Lagrangian-axes quadratic forms and stiffness matrices
//! - [`stability`]: the constitutive predicates and the equivalence audit
//! - [`harness`]: scans, reports, verification suites and file formats
//!
//! Evaluating one state:
//!
//! ```
//! use corostab::law::hencky_law;
//! use corostab::stability::{evaluate_state, AuditTolerances, Verdict};
//!
//! let law = hencky_law(1.0, 1.0);
//! let verdict = evaluate_state(&law, &[0.3, 0.0, -0.2], &AuditTolerances::default(), None)?;
//! assert!(verdict.definite_kirchhoff);
//! assert_eq!(verdict.verdict_kirchhoff, Verdict::Pass);
//! assert!(verdict.be_kirchhoff.pass);
//! # Ok::<(), corostab::stability::StabilityError>(())
//! ```

pub mod expr;
pub mod harness;
pub mod kinematics;
pub mod law;
pub mod numdiff;
pub mod quadform;
pub mod rates;
pub mod stability;
pub mod stress;
pub mod tensor;

pub use kinematics::{DeformationState, MotionPath};
pub use law::{MaterialConfig, MaterialLaw};
pub use quadform::StressFlavor;
pub use tensor::{SpectralData, SymmetricTensor3, Tensor3};

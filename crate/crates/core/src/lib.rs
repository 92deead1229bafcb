//! Conjugate times along sub-Riemannian geodesics.
//!
//! The crate integrates the canonical Jacobi system
//! `d/dt (M; N) = [[-Γ₁, -R(t)], [Γ₂, Γ₁ᵀ]] (M; N)` attached to a Young diagram,
//! locates the first conjugate time either as the first singularity of `N(t)`
//! or as the blow-up time of the associated matrix Riccati equation, and
//! builds on that to compare geodesics against constant-curvature
//! linear-quadratic models.
//!
//! Module map:
//!
//! - [`young`]: Young diagrams, the structural matrices `Γ₁`, `Γ₂`, levels and
//!   partial-trace Ricci curvatures.
//! - [`curvature`]: curvature fields `t ↦ R(t)` (constant, sampled, closure).
//! - [`jacobi`]: Jacobi integration and the `det N` conjugate-time detector.
//! - [`riccati`]: limit-initial-condition Riccati integration, comparison and
//!   monotonicity checks, the matrix Cauchy–Schwarz gap.
//! - [`lq`]: constant-curvature LQ models, finiteness classification and
//!   closed forms.
//! - [`comparison`]: model bounds and the comparison verification harness.
//! - [`lie3d`]: contact structures on 3D unimodular Lie groups.
//! - [`selftest`]: the acceptance criteria as runnable checks.

pub mod comparison;
pub mod curvature;
pub mod error;
pub mod jacobi;
pub mod lie3d;
pub mod linalg;
pub mod lq;
pub mod ode;
pub mod poly;
pub mod riccati;
pub mod selftest;
pub mod young;

pub use curvature::{ConstantField, CurvatureField, FieldKind, SampledField};
pub use error::{Error, Result};
pub use jacobi::{ConjugateTimeResult, JacobiTrajectory, Tolerances, Verdict};
pub use young::{StructuralMatrices, YoungDiagram};

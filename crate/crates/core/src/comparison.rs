//! Curvature comparison: model bounds and a verification harness.
//!
//! A lower curvature bound `R(t) ⪰ Q₊` gives `t_c(γ) ≤ t_c(Y; Q₊)`; an upper
//! bound `R(t) ⪯ Q₋` gives `t_c(γ) ≥ t_c(Y; Q₋)`. A Ricci-type bound
//! `(1/r) Ric^{α_i} ≥ κ_i` on a level of length `ℓ` and size `r` gives
//! `t_c(γ) ≤ t_c(κ₁, …, κ_ℓ)`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureField;
use crate::error::{Error, Result};
use crate::jacobi::{self, Certificate, ConjugateTimeResult, Tolerances};
use crate::linalg::{self, Mat};
use crate::lq::{self, DiagonalRowModel, Finiteness, LQModel};
use crate::young::{partial_trace_ricci, StructuralMatrices, YoungDiagram};

#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureBoundSpec {
    /// `R(t) ⪰ q` for all `t`.
    SectionalLower { diagram: YoungDiagram, q: Mat },
    /// `R(t) ⪯ q` for all `t`.
    SectionalUpper { diagram: YoungDiagram, q: Mat },
    /// `(1/r) Ric^{α_i}(t) ≥ κ_i` on level `level` (index into
    /// [`YoungDiagram::levels`]).
    RicciLevel {
        diagram: YoungDiagram,
        level: usize,
        kappas: Vec<f64>,
    },
}

impl CurvatureBoundSpec {
    pub fn diagram(&self) -> &YoungDiagram {
        match self {
            Self::SectionalLower { diagram, .. }
            | Self::SectionalUpper { diagram, .. }
            | Self::RicciLevel { diagram, .. } => diagram,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.diagram().total_boxes();
        match self {
            Self::SectionalLower { q, .. } | Self::SectionalUpper { q, .. } => {
                if q.nrows() != n || q.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: q.nrows(),
                    });
                }
                linalg::check_symmetric(q, 1e-12)
            }
            Self::RicciLevel {
                diagram, level, kappas, ..
            } => {
                let levels = diagram.levels();
                let lv = levels
                    .get(*level)
                    .ok_or_else(|| Error::InvalidInput(format!("diagram {diagram} has no level {level}")))?;
                if kappas.len() != lv.length {
                    return Err(Error::DimensionMismatch {
                        expected: lv.length,
                        got: kappas.len(),
                    });
                }
                Ok(())
            }
        }
    }

    pub fn direction(&self) -> BoundDirection {
        match self {
            Self::SectionalUpper { .. } => BoundDirection::LowerBoundOnTc,
            _ => BoundDirection::UpperBoundOnTc,
        }
    }
}

/// What the model time says about the geodesic's conjugate time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundDirection {
    /// Curvature bounded below: `t_c(γ) ≤ t_model`.
    UpperBoundOnTc,
    /// Curvature bounded above: `t_c(γ) ≥ t_model`.
    LowerBoundOnTc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelBound {
    pub model: ConjugateTimeResult,
    pub direction: BoundDirection,
}

/// Model conjugate time for a sectional-type bound.
pub fn sectional_bound(spec: &CurvatureBoundSpec, horizon: f64, tol: &Tolerances) -> Result<ModelBound> {
    spec.validate()?;
    let (diagram, q) = match spec {
        CurvatureBoundSpec::SectionalLower { diagram, q } | CurvatureBoundSpec::SectionalUpper { diagram, q } => {
            (diagram, q)
        }
        CurvatureBoundSpec::RicciLevel { .. } => {
            return Err(Error::InvalidInput("sectional_bound needs a sectional spec".into()))
        }
    };
    let model = LQModel::new(diagram.clone(), q.clone())?;
    Ok(ModelBound {
        model: lq::lq_conjugate_time(&model, horizon, tol)?,
        direction: spec.direction(),
    })
}

/// `t_c(κ₁, …, κ_ℓ)`: closed form when one applies, certified infinity for
/// `ℓ ≤ 2` when the polynomial condition fails, otherwise the numeric scan.
pub fn diagonal_row_conjugate_time(
    kappas: &[f64],
    horizon: f64,
    tol: &Tolerances,
) -> Result<(ConjugateTimeResult, Finiteness)> {
    let row = DiagonalRowModel::new(kappas.to_vec())?;
    let finiteness = lq::classify_finiteness(&row);
    if finiteness == Finiteness::Infinite {
        return Ok((
            ConjugateTimeResult::CertifiedInfinite {
                certificate: Certificate::PolynomialCondition,
            },
            finiteness,
        ));
    }
    let model = row.to_model();
    if let Some(tc) = lq::closed_form_tc(&model) {
        let result = if tc.is_finite() {
            ConjugateTimeResult::closed_form(tc)
        } else {
            ConjugateTimeResult::CertifiedInfinite {
                certificate: Certificate::ClosedForm,
            }
        };
        return Ok((result, finiteness));
    }
    Ok((lq::lq_numeric_conjugate_time(&model, horizon, tol)?, finiteness))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciModelBound {
    pub model: ConjugateTimeResult,
    pub finiteness: Finiteness,
}

/// Model conjugate time for a Ricci-level bound.
pub fn ricci_bound(spec: &CurvatureBoundSpec, horizon: f64, tol: &Tolerances) -> Result<RicciModelBound> {
    spec.validate()?;
    let CurvatureBoundSpec::RicciLevel { kappas, .. } = spec else {
        return Err(Error::InvalidInput("ricci_bound needs a ricci-level spec".into()));
    };
    let (model, finiteness) = diagonal_row_conjugate_time(kappas, horizon, tol)?;
    Ok(RicciModelBound { model, finiteness })
}

/// Diameter bound `t_c(κ₁, …, κ_ℓ)` when the polynomial condition holds.
pub fn bonnet_myers_diameter(
    l: usize,
    r: usize,
    kappas: &[f64],
    horizon: f64,
    tol: &Tolerances,
) -> Result<Option<f64>> {
    if r == 0 || kappas.len() != l {
        return Err(Error::InvalidInput(format!(
            "need r >= 1 and {l} constants, got r = {r} and {} constants",
            kappas.len()
        )));
    }
    let (model, finiteness) = diagonal_row_conjugate_time(kappas, horizon, tol)?;
    if !finiteness.is_finite() {
        return Ok(None);
    }
    match model.time() {
        Some(tc) => Ok(Some(tc)),
        None => Err(Error::Precondition(format!(
            "finite model time expected but none found up to {horizon}; increase the horizon"
        ))),
    }
}

/// Ricci bound for `ℓ = 1`: `π/√κ`.
pub fn riemannian_ricci_bound(kappa: f64) -> Option<f64> {
    (kappa > 0.0).then(|| PI / kappa.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportVerdict {
    Pass,
    Fail,
    /// Hypothesis violated on the grid; nothing to verify.
    Vacuous,
    /// The horizon is too short to decide.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `None` when the geodesic had no conjugate time up to the horizon.
    pub tc_geodesic: Option<f64>,
    /// `None` when the model has none (certified, or up to the horizon).
    pub tc_model: Option<f64>,
    /// Slack in the asserted inequality (`+∞` when the model says nothing).
    pub margin: f64,
    /// Smallest hypothesis slack over the grid; negative means violated.
    pub hypothesis_margin: f64,
    pub direction: BoundDirection,
    pub verdict: ReportVerdict,
}

/// Smallest slack of the spec's hypothesis over `samples + 1` grid points.
pub fn hypothesis_margin(
    curvature: &dyn CurvatureField,
    spec: &CurvatureBoundSpec,
    horizon: f64,
    samples: usize,
) -> Result<f64> {
    spec.validate()?;
    let n = spec.diagram().total_boxes();
    if curvature.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: curvature.dim(),
        });
    }
    let levels = spec.diagram().levels();
    let mut worst = f64::INFINITY;
    for k in 0..=samples {
        let t = horizon * k as f64 / samples as f64;
        let r = curvature.eval(t);
        let slack = match spec {
            CurvatureBoundSpec::SectionalLower { q, .. } => {
                let scale = 1.0 + r.amax() + q.amax();
                linalg::min_eigenvalue(&(&r - q)) / scale
            }
            CurvatureBoundSpec::SectionalUpper { q, .. } => {
                let scale = 1.0 + r.amax() + q.amax();
                linalg::min_eigenvalue(&(q - &r)) / scale
            }
            CurvatureBoundSpec::RicciLevel {
                diagram, level, kappas, ..
            } => {
                let lv = &levels[*level];
                let ric = partial_trace_ricci(&r, diagram, lv)?;
                let size = lv.size() as f64;
                ric.iter()
                    .zip(kappas)
                    .map(|(ri, ki)| (ri / size - ki) / (1.0 + ri.abs() / size + ki.abs()))
                    .fold(f64::INFINITY, f64::min)
            }
        };
        worst = worst.min(slack);
    }
    Ok(worst)
}

/// Computes `t_c(γ)` and the model time and checks the comparison
/// inequality with slack `10 · refine`.
pub fn verify_comparison(
    structural: &StructuralMatrices,
    curvature: Arc<dyn CurvatureField>,
    spec: &CurvatureBoundSpec,
    horizon: f64,
    tol: &Tolerances,
) -> Result<ComparisonReport> {
    spec.validate()?;
    if *structural != spec.diagram().structural_matrices() {
        return Err(Error::InvalidInput(
            "structural matrices do not match the spec's diagram".into(),
        ));
    }
    let direction = spec.direction();
    let hyp = hypothesis_margin(curvature.as_ref(), spec, horizon, tol.grid_points)?;
    if hyp < -1e-9 {
        return Ok(ComparisonReport {
            tc_geodesic: None,
            tc_model: None,
            margin: f64::NAN,
            hypothesis_margin: hyp,
            direction,
            verdict: ReportVerdict::Vacuous,
        });
    }
    let model = match spec {
        CurvatureBoundSpec::RicciLevel { .. } => ricci_bound(spec, horizon, tol)?.model,
        _ => sectional_bound(spec, horizon, tol)?.model,
    };
    let geodesic = jacobi::conjugate_time(structural, curvature, horizon, tol)?;
    let slack = 10.0 * tol.refine;
    let (tg, tm) = (geodesic.time(), model.time());
    let (margin, verdict) = match direction {
        BoundDirection::UpperBoundOnTc => match (tg, tm) {
            (_, None) => (f64::INFINITY, ReportVerdict::Pass),
            (Some(g), Some(m)) => (m - g, pass_if(m - g >= -slack)),
            // the model conjugates inside the horizon but the geodesic did not
            (None, Some(m)) if m <= horizon - slack => (m - horizon, ReportVerdict::Fail),
            (None, Some(m)) => (m - horizon, ReportVerdict::Inconclusive),
        },
        BoundDirection::LowerBoundOnTc => match (tg, tm) {
            (None, _) => (f64::INFINITY, ReportVerdict::Pass),
            (Some(g), Some(m)) => (g - m, pass_if(g - m >= -slack)),
            (Some(g), None) => match model {
                ConjugateTimeResult::CertifiedInfinite { .. } => (f64::NEG_INFINITY, ReportVerdict::Fail),
                _ if g < horizon - slack => (g - horizon, ReportVerdict::Fail),
                _ => (g - horizon, ReportVerdict::Inconclusive),
            },
        },
    };
    Ok(ComparisonReport {
        tc_geodesic: tg,
        tc_model: tm,
        margin,
        hypothesis_margin: hyp,
        direction,
        verdict,
    })
}

fn pass_if(ok: bool) -> ReportVerdict {
    if ok {
        ReportVerdict::Pass
    } else {
        ReportVerdict::Fail
    }
}

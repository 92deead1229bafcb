//! Symmetric matrix Riccati equations.
//!
//! Equations are written in block form
//!
//! ```text
//! dX/dt = (I X) M(t) (I; X) = M₁₁ + M₁₂ X + X M₂₁ + X M₂₂ X
//! ```
//!
//! with `M(t)` a symmetric `2n × 2n` family. A limit initial condition
//! `lim X⁻¹ = Y₀` is realised by integrating `Y = X⁻¹`, which solves the same
//! kind of equation with coefficients `-J M J`, `J = [[0, I], [I, 0]]`, and
//! switching to `X = Y⁻¹` once `Y` is safely positive definite.
//!
//! For the Jacobi curvature equation
//! `dV/dt = -Γ₁V - VΓ₁ᵀ - R(t) - VΓ₂V` the coefficients are
//! `M = -[[R, Γ₁], [Γ₁ᵀ, Γ₂]]`, and the inverse `W = V⁻¹` starts at `W(0) = 0`.

use std::ops::ControlFlow;
use std::sync::Arc;

use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut};
use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureField;
use crate::error::{Error, Result};
use crate::jacobi::{ConjugateTimeResult, Tolerances, Witness};
use crate::linalg::{self, Mat};
use crate::young::StructuralMatrices;

/// Smallest eigenvalue of `W` at which the inverse is taken.
pub const SWITCH_THRESHOLD: f64 = 1e-6;
/// Norm of `V` treated as a blow-up.
pub const BLOW_UP_CAP: f64 = 1e12;

const INVERSE_NORM_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    /// Integrating the inverse `W = V⁻¹`.
    Inverse,
    /// Integrating `V` itself.
    Direct,
    BlownUp,
}

/// One sample of a Riccati run.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiState {
    pub t: f64,
    pub phase: Phase,
    /// `W` in the inverse phase, `V` in the direct phase.
    pub matrix: Mat,
}

impl RiccatiState {
    /// `V(t)`, inverting if needed. `None` when `W` is singular.
    pub fn direct(&self) -> Option<Mat> {
        match self.phase {
            Phase::Direct | Phase::BlownUp => Some(self.matrix.clone()),
            Phase::Inverse => self.matrix.clone().try_inverse().map(|m| linalg::symmetrize(&m)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RiccatiRun {
    pub history: Vec<RiccatiState>,
    pub switch_time: Option<f64>,
    /// `Some(t)` when the solution blew up at `t`.
    pub blow_up: Option<f64>,
    pub final_norm: f64,
    pub horizon: f64,
}

/// Starting data for [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// `X(t₀) = X₀`.
    Value(Mat),
    /// `lim_{t→t₀⁺} X⁻¹ = Y₀`.
    LimitInverse(Mat),
}

/// Options for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub switch_threshold: f64,
    pub cap: f64,
    pub grid_points: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            switch_threshold: SWITCH_THRESHOLD,
            cap: BLOW_UP_CAP,
            grid_points: 2000,
        }
    }
}

/// A time-dependent coefficient family `t ↦ M(t)` (`2n × 2n`, symmetric).
pub type Coefficients = Arc<dyn Fn(f64) -> Mat + Send + Sync>;

/// `-J M J` with `J = [[0, I], [I, 0]]`.
pub fn inverse_coefficients(m: &Mat) -> Mat {
    let n = m.nrows() / 2;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&(-m.view((n, n), (n, n))));
    out.view_mut((0, n), (n, n)).copy_from(&(-m.view((n, 0), (n, n))));
    out.view_mut((n, 0), (n, n)).copy_from(&(-m.view((0, n), (n, n))));
    out.view_mut((n, n), (n, n)).copy_from(&(-m.view((0, 0), (n, n))));
    out
}

/// `(I X) M (I; X)`, exactly symmetric.
fn riccati_rhs(m: &Mat, x: &DMatrixView<f64>, out: &mut DMatrixViewMut<f64>) {
    let n = x.nrows();
    let m11 = m.view((0, 0), (n, n));
    let m12 = m.view((0, n), (n, n));
    let m22 = m.view((n, n), (n, n));
    // half = M₁₁/2 + X M₂₁ + X M₂₂ X / 2, and out = half + halfᵀ
    let xm22 = x * m22;
    let mut half = m11 * 0.5;
    half += x * m12.transpose();
    half += (&xm22 * x) * 0.5;
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = half[(i, j)] + half[(j, i)];
        }
    }
}

/// Integrates a Riccati equation from `t0` to at most `horizon`.
pub fn solve(
    coeffs: &Coefficients,
    start: Start,
    t0: f64,
    horizon: f64,
    tol: &Tolerances,
    opts: &SolveOptions,
) -> Result<RiccatiRun> {
    tol.validate()?;
    let (mut phase, mut y) = match start {
        Start::Value(x) => (Phase::Direct, x),
        Start::LimitInverse(y) => (Phase::Inverse, y),
    };
    let n = y.nrows();
    linalg::check_symmetric(&y, 1e-12)?;
    linalg::symmetrize_in_place(&mut y);
    let ode = tol.integrator();
    let dt = (horizon - t0) / opts.grid_points as f64;

    let mut run = RiccatiRun {
        history: vec![RiccatiState {
            t: t0,
            phase,
            matrix: y.clone(),
        }],
        switch_time: None,
        blow_up: None,
        final_norm: y.norm(),
        horizon,
    };
    if phase == Phase::Inverse && leave_inverse(&y, opts.switch_threshold) {
        y = invert_symmetric(&y, t0)?;
        phase = Phase::Direct;
        run.switch_time = Some(t0);
    }

    let mut t = t0;
    let mut k = 1usize;
    let mut h: Option<f64> = None;
    while k <= opts.grid_points {
        let target = if k == opts.grid_points {
            horizon
        } else {
            t0 + k as f64 * dt
        };
        let inverse = phase == Phase::Inverse;
        // (t, ‖X‖) of the last two accepted steps
        let mut tail: [(f64, f64); 2] = [(t, y.norm()); 2];
        let mut stop_reason = None;
        let result = ode.integrate_observed(
            |s, state, deriv| {
                let mut m = coeffs(s);
                if inverse {
                    m = inverse_coefficients(&m);
                }
                let xv = DMatrixView::from_slice(state, n, n);
                let mut dv = DMatrixViewMut::from_slice(deriv, n, n);
                riccati_rhs(&m, &xv, &mut dv);
            },
            t,
            y.as_mut_slice(),
            target,
            h,
            |s, state, _| {
                let x = DMatrixView::from_slice(state, n, n);
                let norm = x.norm();
                tail = [tail[1], (s, norm)];
                if inverse {
                    if leave_inverse(&x.into_owned(), opts.switch_threshold) {
                        stop_reason = Some(Phase::Direct);
                        return ControlFlow::Break(());
                    }
                } else if norm > opts.cap {
                    stop_reason = Some(Phase::BlownUp);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            },
        );
        let outcome = match result {
            Ok(o) => o,
            Err(Error::StepUnderflow { .. }) | Err(Error::NonFinite { .. }) | Err(Error::TooManySteps { .. })
                if !inverse && tail[1].1 > 1e6 =>
            {
                // step collapse near a pole
                let tc = extrapolate_pole(&tail);
                run.blow_up = Some(tc);
                run.final_norm = tail[1].1;
                return Ok(run);
            }
            Err(e) => return Err(e),
        };
        t = outcome.t;
        h = Some(outcome.h_next);
        run.final_norm = y.norm();
        match stop_reason {
            Some(Phase::Direct) => {
                y = invert_symmetric(&y, t)?;
                phase = Phase::Direct;
                run.switch_time = Some(t);
                run.history.push(RiccatiState {
                    t,
                    phase,
                    matrix: y.clone(),
                });
                // the inverse lives on a very different scale
                h = None;
                if t < target {
                    continue;
                }
            }
            Some(Phase::BlownUp) => {
                let tc = extrapolate_pole(&tail);
                run.blow_up = Some(tc);
                run.history.push(RiccatiState {
                    t,
                    phase: Phase::BlownUp,
                    matrix: y.clone(),
                });
                return Ok(run);
            }
            _ => {}
        }
        if t >= target {
            run.history.push(RiccatiState {
                t,
                phase,
                matrix: y.clone(),
            });
            k += 1;
        }
    }
    Ok(run)
}

/// `Y` is safely invertible: positive definite, or large and away from
/// singular (an indefinite `Y` that keeps growing would otherwise blow up
/// while `X = Y⁻¹` stays bounded).
fn leave_inverse(y: &Mat, threshold: f64) -> bool {
    linalg::min_eigenvalue(y) > threshold
        || (y.norm() > INVERSE_NORM_LIMIT && linalg::min_abs_eigenvalue(y) > threshold)
}

fn invert_symmetric(y: &Mat, t: f64) -> Result<Mat> {
    y.clone()
        .try_inverse()
        .map(|m| linalg::symmetrize(&m))
        .ok_or(Error::NonFinite { t })
}

/// Pole of `‖X‖ ~ c / (t_c - t)` from the last two samples.
fn extrapolate_pole(tail: &[(f64, f64); 2]) -> f64 {
    let (t1, n1) = tail[0];
    let (t2, n2) = tail[1];
    let (y1, y2) = (1.0 / n1, 1.0 / n2);
    if t2 > t1 && y1 > y2 {
        t2 + y2 * (t2 - t1) / (y1 - y2)
    } else {
        t2
    }
}

/// `M(t) = -[[R(t), Γ₁], [Γ₁ᵀ, Γ₂]]`.
pub fn jacobi_coefficients(structural: &StructuralMatrices, curvature: Arc<dyn CurvatureField>) -> Coefficients {
    let g1 = structural.gamma1.clone();
    let g2 = structural.gamma2.clone();
    let n = structural.dim();
    let mut base = DMatrix::zeros(2 * n, 2 * n);
    base.view_mut((0, n), (n, n)).copy_from(&(-&g1));
    base.view_mut((n, 0), (n, n)).copy_from(&(-g1.transpose()));
    base.view_mut((n, n), (n, n)).copy_from(&(-g2));
    Arc::new(move |t| {
        let mut m = base.clone();
        m.view_mut((0, 0), (n, n)).copy_from(&(-curvature.eval(t)));
        m
    })
}

/// Integrates the curvature Riccati equation with `lim V⁻¹ = 0` and reports
/// its blow-up time as a conjugate time.
pub fn integrate_riccati_limit_ic(
    structural: &StructuralMatrices,
    curvature: Arc<dyn CurvatureField>,
    horizon: f64,
    tol: &Tolerances,
) -> Result<(RiccatiRun, ConjugateTimeResult)> {
    let n = structural.dim();
    if curvature.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: curvature.dim(),
        });
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
    }
    let coeffs = jacobi_coefficients(structural, curvature);
    let opts = SolveOptions {
        grid_points: tol.grid_points,
        ..SolveOptions::default()
    };
    let run = solve(
        &coeffs,
        Start::LimitInverse(DMatrix::zeros(n, n)),
        0.0,
        horizon,
        tol,
        &opts,
    )?;
    if run.switch_time.is_none() {
        return Err(Error::SwitchNotReached { t: horizon });
    }
    let result = match run.blow_up {
        Some(tc) => ConjugateTimeResult::Finite {
            tc,
            bracket: [run.history.last().map_or(tc, |s| s.t.min(tc)), tc],
            witness: Witness::RiccatiBlowUp { norm: run.final_norm },
        },
        None => ConjugateTimeResult::NoneUpToHorizon { horizon },
    };
    Ok((run, result))
}

/// Initial data for [`riccati_comparison_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum ComparisonStart {
    /// `X₁(t₀) ⪰ X₂(t₀)`.
    Ordered { x1: Mat, x2: Mat },
    /// `lim X₁⁻¹ = Y₁ ⪯ Y₂ = lim X₂⁻¹`.
    Limit { y1: Mat, y2: Mat },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ComparisonVerdict {
    /// `X₁ ⪰ X₂` held on every common sample up to `checked_until`.
    Holds { checked_until: f64, worst_margin: f64 },
    /// Coefficients or initial data were not ordered.
    PreconditionViolated { t: f64, min_eigenvalue: f64 },
    /// The ordering failed at `t`.
    ConclusionViolated { t: f64, min_eigenvalue: f64 },
}

/// Ordering tolerance `1e-8 · (1 + ‖X₁‖ + ‖X₂‖)`.
pub fn ordering_tolerance(x1: &Mat, x2: &Mat) -> f64 {
    1e-8 * (1.0 + linalg::op_norm(x1) + linalg::op_norm(x2))
}

/// Integrates both equations and checks `X₁(t) ⪰ X₂(t)` wherever both are
/// defined (below `cap`).
pub fn riccati_comparison_check(
    m1: &Coefficients,
    m2: &Coefficients,
    start: &ComparisonStart,
    t0: f64,
    horizon: f64,
    tol: &Tolerances,
    cap: f64,
) -> Result<ComparisonVerdict> {
    let opts = SolveOptions {
        cap,
        grid_points: tol.grid_points,
        ..SolveOptions::default()
    };
    // precondition: coefficients on the grid, then the initial data
    let dt = (horizon - t0) / opts.grid_points as f64;
    for k in 0..=opts.grid_points {
        let t = t0 + k as f64 * dt;
        let a = m1(t);
        let b = m2(t);
        let diff = &a - &b;
        let lam = linalg::min_eigenvalue(&diff);
        if lam < -1e-9 * (1.0 + a.amax() + b.amax()) {
            return Ok(ComparisonVerdict::PreconditionViolated { t, min_eigenvalue: lam });
        }
    }
    let (s1, s2) = match start {
        ComparisonStart::Ordered { x1, x2 } => {
            let lam = linalg::min_eigenvalue(&(x1 - x2));
            if lam < -ordering_tolerance(x1, x2) {
                return Ok(ComparisonVerdict::PreconditionViolated {
                    t: t0,
                    min_eigenvalue: lam,
                });
            }
            (Start::Value(x1.clone()), Start::Value(x2.clone()))
        }
        ComparisonStart::Limit { y1, y2 } => {
            let lam = linalg::min_eigenvalue(&(y2 - y1));
            if lam < -ordering_tolerance(y1, y2) {
                return Ok(ComparisonVerdict::PreconditionViolated {
                    t: t0,
                    min_eigenvalue: lam,
                });
            }
            (Start::LimitInverse(y1.clone()), Start::LimitInverse(y2.clone()))
        }
    };
    let r1 = solve(m1, s1, t0, horizon, tol, &opts)?;
    let r2 = solve(m2, s2, t0, horizon, tol, &opts)?;
    Ok(compare_runs(&r1, &r2))
}

fn compare_runs(r1: &RiccatiRun, r2: &RiccatiRun) -> ComparisonVerdict {
    let mut worst = f64::INFINITY;
    let mut checked_until = r1.history.first().map_or(0.0, |s| s.t);
    // switches and blow-ups add off-grid samples; match by time
    let mut j = 0;
    for a in &r1.history {
        while j < r2.history.len() && r2.history[j].t < a.t {
            j += 1;
        }
        let Some(b) = r2.history.get(j) else { break };
        if b.t != a.t {
            continue;
        }
        if a.phase == Phase::BlownUp || b.phase == Phase::BlownUp {
            break;
        }
        // inverse phase: Y₂ ⪰ Y₁; direct phase: X₁ ⪰ X₂; mixed: skip
        let diff = match (a.phase, b.phase) {
            (Phase::Direct, Phase::Direct) => &a.matrix - &b.matrix,
            (Phase::Inverse, Phase::Inverse) => &b.matrix - &a.matrix,
            _ => continue,
        };
        let lam = linalg::min_eigenvalue(&diff);
        let tol = ordering_tolerance(&a.matrix, &b.matrix);
        let margin = lam / tol.max(f64::MIN_POSITIVE);
        worst = worst.min(lam);
        if lam < -tol {
            return ComparisonVerdict::ConclusionViolated {
                t: a.t,
                min_eigenvalue: margin * tol,
            };
        }
        checked_until = a.t;
    }
    ComparisonVerdict::Holds {
        checked_until,
        worst_margin: worst,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub holds: bool,
    /// Largest eigenvalue of `V(t+δ) - V(t)` relative to the tolerance scale.
    pub worst_increase: f64,
    pub first_violation: Option<f64>,
    pub samples_checked: usize,
    pub blow_up: Option<f64>,
}

/// Checks `V(t + δ) ⪯ V(t) + tol·I` along the limit-IC solution with
/// constant curvature `Q`.
pub fn riccati_monotonicity_check(
    structural: &StructuralMatrices,
    q: &Mat,
    horizon: f64,
    tol: &Tolerances,
) -> Result<MonotonicityReport> {
    let field = Arc::new(crate::curvature::ConstantField::new(q.clone())?);
    let (run, _) = integrate_riccati_limit_ic(structural, field, horizon, tol)?;
    let vs: Vec<(f64, Mat)> = run
        .history
        .iter()
        .filter(|s| s.t > 0.0 && s.phase != Phase::BlownUp)
        .filter_map(|s| s.direct().map(|v| (s.t, v)))
        .collect();
    let mut report = MonotonicityReport {
        holds: true,
        worst_increase: f64::NEG_INFINITY,
        first_violation: None,
        samples_checked: 0,
        blow_up: run.blow_up,
    };
    for w in vs.windows(2) {
        let (_, ref v0) = w[0];
        let (t1, ref v1) = w[1];
        let scale = 1e-8 * (1.0 + linalg::op_norm(v0) + linalg::op_norm(v1));
        let inc = linalg::max_eigenvalue(&(v1 - v0));
        report.worst_increase = report.worst_increase.max(inc / scale);
        report.samples_checked += 1;
        if inc > scale && report.first_violation.is_none() {
            report.holds = false;
            report.first_violation = Some(t1);
        }
    }
    Ok(report)
}

/// `‖Σ Yₐᵀ Yₐ‖ · Σ Xₐᵀ Xₐ − (Σ Xₐᵀ Yₐ)(Σ Xₐᵀ Yₐ)ᵀ`, positive semidefinite.
pub fn matrix_cauchy_schwarz_gap(xs: &[Mat], ys: &[Mat]) -> Result<Mat> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len().max(1),
            got: ys.len(),
        });
    }
    let l = xs[0].nrows();
    for m in xs.iter().chain(ys) {
        if m.nrows() != l || m.ncols() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                got: m.nrows(),
            });
        }
    }
    let mut xty = DMatrix::zeros(l, l);
    let mut yty = DMatrix::zeros(l, l);
    let mut xtx = DMatrix::zeros(l, l);
    for (x, y) in xs.iter().zip(ys) {
        xty += x.transpose() * y;
        yty += y.transpose() * y;
        xtx += x.transpose() * x;
    }
    let gap = xtx * linalg::op_norm(&yty) - &xty * xty.transpose();
    Ok(linalg::symmetrize(&gap))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::curvature::ConstantField;
    use crate::young::YoungDiagram;

    fn scalar_coeffs(k: f64) -> Coefficients {
        let s = YoungDiagram::riemannian(1).unwrap().structural_matrices();
        jacobi_coefficients(&s, Arc::new(ConstantField::diagonal(&[k])))
    }

    #[test]
    fn scalar_cotangent_and_blow_up() {
        let k: f64 = 2.0;
        let s = YoungDiagram::riemannian(1).unwrap().structural_matrices();
        let (run, res) =
            integrate_riccati_limit_ic(&s, Arc::new(ConstantField::diagonal(&[k])), 5.0, &Tolerances::default())
                .unwrap();
        let rk = k.sqrt();
        for st in run.history.iter().filter(|s| s.phase == Phase::Direct).step_by(40) {
            let exact = rk / (rk * st.t).tan();
            assert!(
                (st.matrix[(0, 0)] - exact).abs() < 1e-6 * (1.0 + exact.abs()),
                "t = {}",
                st.t
            );
        }
        assert!((res.time().unwrap() - PI / rk).abs() < 1e-8, "{res:?}");
    }

    #[test]
    fn flat_scalar_is_one_over_t() {
        let s = YoungDiagram::riemannian(1).unwrap().structural_matrices();
        let (run, res) = integrate_riccati_limit_ic(
            &s,
            Arc::new(ConstantField::diagonal(&[0.0])),
            4.0,
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!res.is_finite());
        for st in run.history.iter().skip(1).step_by(77) {
            let v = st.direct().unwrap()[(0, 0)];
            assert!((v - 1.0 / st.t).abs() < 1e-7 * (1.0 / st.t), "t = {}", st.t);
        }
    }

    #[test]
    fn two_row_blow_up_at_two_pi() {
        let s = YoungDiagram::single_row(2).unwrap().structural_matrices();
        let (_, res) = integrate_riccati_limit_ic(
            &s,
            Arc::new(ConstantField::diagonal(&[1.0, 0.0])),
            10.0,
            &Tolerances::default(),
        )
        .unwrap();
        assert!((res.time().unwrap() - 2.0 * PI).abs() < 1e-6, "{res:?}");
    }

    #[test]
    fn inverse_phase_is_positive_definite_early() {
        for rows in [vec![2], vec![3], vec![2, 1], vec![3, 2, 2]] {
            let y = YoungDiagram::new(rows).unwrap();
            let s = y.structural_matrices();
            let n = s.dim();
            let q = Mat::from_fn(n, n, |i, j| ((i + 2 * j) as f64).sin() + ((j + 2 * i) as f64).sin());
            let (run, _) = integrate_riccati_limit_ic(
                &s,
                Arc::new(ConstantField::new(q).unwrap()),
                1.0,
                &Tolerances::default(),
            )
            .unwrap();
            assert!(run.switch_time.is_some());
            for st in run.history.iter().filter(|s| s.phase == Phase::Inverse && s.t > 0.0) {
                assert!(linalg::min_eigenvalue(&st.matrix) > 0.0);
            }
        }
    }

    #[test]
    fn comparison_flat_dominates_unit_curvature() {
        // X₁ = 1/t (R = 0) ⪰ X₂ = cot t (R = 1)
        let zero = Mat::zeros(1, 1);
        let v = riccati_comparison_check(
            &scalar_coeffs(0.0),
            &scalar_coeffs(1.0),
            &ComparisonStart::Limit {
                y1: zero.clone(),
                y2: zero,
            },
            0.0,
            3.0,
            &Tolerances::default(),
            1e8,
        )
        .unwrap();
        assert!(
            matches!(v, ComparisonVerdict::Holds { checked_until, .. } if checked_until > 3.0 - 1e-3),
            "{v:?}"
        );
    }

    #[test]
    fn comparison_identical_problems_are_equal() {
        let c = scalar_coeffs(0.7);
        let x0 = Mat::from_element(1, 1, 0.3);
        let v = riccati_comparison_check(
            &c,
            &c,
            &ComparisonStart::Ordered { x1: x0.clone(), x2: x0 },
            0.0,
            2.0,
            &Tolerances::default(),
            1e8,
        )
        .unwrap();
        match v {
            ComparisonVerdict::Holds { worst_margin, .. } => assert!(worst_margin.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparison_reports_precondition_distinctly() {
        let zero = Mat::zeros(1, 1);
        let v = riccati_comparison_check(
            &scalar_coeffs(1.0),
            &scalar_coeffs(0.0),
            &ComparisonStart::Limit {
                y1: zero.clone(),
                y2: zero,
            },
            0.0,
            1.0,
            &Tolerances::default(),
            1e8,
        )
        .unwrap();
        assert!(matches!(v, ComparisonVerdict::PreconditionViolated { .. }));
    }

    #[test]
    fn monotone_examples() {
        let s1 = YoungDiagram::riemannian(1).unwrap().structural_matrices();
        let r = riccati_monotonicity_check(&s1, &linalg::diag(&[1.0]), 3.0, &Tolerances::default()).unwrap();
        assert!(r.holds, "{r:?}");
        let s2 = YoungDiagram::single_row(2).unwrap().structural_matrices();
        let r = riccati_monotonicity_check(&s2, &linalg::diag(&[0.0, 0.0]), 10.0, &Tolerances::default()).unwrap();
        assert!(r.holds, "{r:?}");
        let r = riccati_monotonicity_check(&s2, &linalg::diag(&[1.0, 0.0]), 8.0, &Tolerances::default()).unwrap();
        assert!(r.holds && r.blow_up.is_some(), "{r:?}");
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let i2 = Mat::identity(2, 2);
        let gap = matrix_cauchy_schwarz_gap(&[i2.clone()], &[i2]).unwrap();
        assert!(gap.amax() < 1e-15);

        let xs = [Mat::from_element(1, 1, 1.0), Mat::from_element(1, 1, 2.0)];
        let ys = [Mat::from_element(1, 1, 2.0), Mat::from_element(1, 1, 1.0)];
        let gap = matrix_cauchy_schwarz_gap(&xs, &ys).unwrap();
        assert!((gap[(0, 0)] - 9.0).abs() < 1e-12);

        assert!(matrix_cauchy_schwarz_gap(&xs, &ys[..1]).is_err());
        assert!(matrix_cauchy_schwarz_gap(&[Mat::identity(2, 2)], &[Mat::identity(3, 3)]).is_err());
    }

    #[test]
    fn inverse_coefficients_swap_blocks() {
        let m = Mat::from_fn(4, 4, |i, j| (i * 4 + j) as f64);
        let m = linalg::symmetrize(&m);
        let inv = inverse_coefficients(&inverse_coefficients(&m));
        assert_eq!(inv, m);
    }
}

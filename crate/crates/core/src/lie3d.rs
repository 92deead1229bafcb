//! Contact left-invariant structures on 3D unimodular Lie groups.
//!
//! After the direction of motion is taken out, a geodesic reduces to the
//! single row `ℓ = 2` with diagonal curvature `diag(R11, R22)`.

use std::f64::consts::PI;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curvature::{ConstantField, CurvatureField, FieldKind};
use crate::error::{Error, Result};
use crate::jacobi::{self, Certificate, ConjugateTimeResult, Tolerances};
use crate::linalg::{self, Mat};
use crate::ode::Dopri5;
use crate::young::{StructuralMatrices, YoungDiagram};

/// Structure constants of a left-invariant orthonormal frame:
/// `[X₁,X₀] = c01¹X₁ + c01²X₂`, `[X₂,X₀] = c02¹X₁ + c02²X₂`,
/// `[X₂,X₁] = c12¹X₁ + c12²X₂ + X₀`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StructureConstants3D {
    pub c01_1: f64,
    pub c01_2: f64,
    pub c02_1: f64,
    pub c02_2: f64,
    pub c12_1: f64,
    pub c12_2: f64,
}

impl StructureConstants3D {
    /// The frame with `[X₁,X₀] = (χ+κ)X₂`, `[X₂,X₀] = (χ−κ)X₁`, `[X₂,X₁] = X₀`.
    pub fn canonical(chi: f64, kappa: f64) -> Self {
        Self {
            c01_2: chi + kappa,
            c02_1: chi - kappa,
            ..Self::default()
        }
    }
}

/// `(χ, κ)` from constant structure constants.
pub fn invariants_from_constants(c: &StructureConstants3D) -> Result<(f64, f64)> {
    let trace = c.c01_1 + c.c02_2;
    if trace.abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "trace-free condition c01_1 + c02_2 = 0 violated ({trace:e})"
        )));
    }
    let off = c.c01_2 + c.c02_1;
    let chi = (c.c01_1 * c.c01_1 + off * off / 4.0).sqrt();
    let kappa = -c.c12_1 * c.c12_1 - c.c12_2 * c.c12_2 + (c.c01_2 - c.c02_1) / 2.0;
    Ok((chi, kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactStructure3D {
    pub chi: f64,
    pub kappa: f64,
}

impl ContactStructure3D {
    pub fn new(chi: f64, kappa: f64) -> Result<Self> {
        if !(chi >= 0.0 && chi.is_finite() && kappa.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "need chi >= 0 and finite kappa, got ({chi}, {kappa})"
            )));
        }
        Ok(Self { chi, kappa })
    }

    pub fn heisenberg() -> Self {
        Self { chi: 0.0, kappa: 0.0 }
    }

    pub fn su2() -> Self {
        Self { chi: 0.0, kappa: 1.0 }
    }

    pub fn sl2() -> Self {
        Self { chi: 0.0, kappa: -1.0 }
    }

    pub fn from_constants(c: &StructureConstants3D) -> Result<Self> {
        let (chi, kappa) = invariants_from_constants(c)?;
        Self::new(chi, kappa)
    }

    /// Constants of the canonical frame (meaningful for `χ > 0`).
    pub fn canonical_constants(&self) -> StructureConstants3D {
        StructureConstants3D::canonical(self.chi, self.kappa)
    }

    /// `(ḣ₀, ḣ₁, ḣ₂) = (2χ h₁h₂, h₀h₂, −h₀h₁)`.
    pub fn vector_field(&self, h: &CovectorState) -> CovectorState {
        CovectorState {
            h0: 2.0 * self.chi * h.h1 * h.h2,
            h1: h.h0 * h.h2,
            h2: -h.h0 * h.h1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovectorState {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
}

impl CovectorState {
    pub fn new(h1: f64, h2: f64, h0: f64) -> Self {
        Self { h0, h1, h2 }
    }

    /// `H = (h₁² + h₂²)/2`.
    pub fn hamiltonian(&self) -> f64 {
        0.5 * (self.h1 * self.h1 + self.h2 * self.h2)
    }

    /// `E = h₀²/(2χ) + h₂²`; `None` when `χ = 0`.
    pub fn energy(&self, chi: f64) -> Option<f64> {
        (chi > 0.0).then(|| self.h0 * self.h0 / (2.0 * chi) + self.h2 * self.h2)
    }

    /// Length-parametrised covector with prescribed `E` and `h₀`:
    /// `h₂² = E − h₀²/(2χ)`, `h₁² = 1 − h₂²`, signs chosen by the caller.
    pub fn from_energy(chi: f64, e: f64, h0: f64, h2_positive: bool, h1_positive: bool) -> Result<Self> {
        if chi <= 0.0 {
            return Err(Error::Precondition("E is defined only for chi > 0".into()));
        }
        let h2sq = e - h0 * h0 / (2.0 * chi);
        let slack = 1e-12 * (1.0 + e.abs());
        if h2sq < -slack || h2sq > 1.0 + slack {
            return Err(Error::Precondition(format!(
                "need 2chi(E-1) <= h0^2 <= 2chi E, got E = {e}, h0 = {h0}"
            )));
        }
        let h2sq = h2sq.clamp(0.0, 1.0);
        let h2 = h2sq.sqrt() * if h2_positive { 1.0 } else { -1.0 };
        let h1 = (1.0 - h2sq).sqrt() * if h1_positive { 1.0 } else { -1.0 };
        Ok(Self { h0, h1, h2 })
    }

    fn to_array(self) -> [f64; 3] {
        [self.h0, self.h1, self.h2]
    }

    fn from_slice(y: &[f64]) -> Self {
        Self {
            h0: y[0],
            h1: y[1],
            h2: y[2],
        }
    }
}

fn check_length_parametrized(h: &CovectorState) -> Result<()> {
    let drift = (h.h1 * h.h1 + h.h2 * h.h2 - 1.0).abs();
    if drift > 1e-9 {
        return Err(Error::Precondition(format!(
            "initial covector must satisfy h1^2 + h2^2 = 1 (off by {drift:e})"
        )));
    }
    Ok(())
}

/// Samples of the extremal on a uniform grid.
#[derive(Debug, Clone)]
pub struct ExtremalFlow {
    pub structure: ContactStructure3D,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<CovectorState>,
    pub max_h_drift: f64,
    pub max_e_drift: f64,
}

/// Flow integration never runs looser than these.
const FLOW_RTOL: f64 = 1e-12;
const FLOW_ATOL: f64 = 1e-14;
const DRIFT_ABORT: f64 = 1e-6;

/// Integrates `ḣ₀ = 2χh₁h₂, ḣ₁ = h₀h₂, ḣ₂ = −h₀h₁`, sampled every `dt`
/// (at most `0.01`, finer when `h₀` is large).
pub fn extremal_flow(
    s: &ContactStructure3D,
    initial: &CovectorState,
    horizon: f64,
    tol: &Tolerances,
) -> Result<ExtremalFlow> {
    check_length_parametrized(initial)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
    }
    let h_bound = match initial.energy(s.chi) {
        Some(e) => (2.0 * s.chi * e).sqrt().max(initial.h0.abs()),
        None => initial.h0.abs(),
    } + (2.0 * s.chi).sqrt()
        + 1.0;
    let dt_max = (0.05 / h_bound).min(0.01);
    let steps = (horizon / dt_max).ceil() as usize;
    let dt = horizon / steps as f64;

    let ode = Dopri5::new(tol.rel.min(FLOW_RTOL), tol.abs.min(FLOW_ATOL));
    let h_ref = initial.hamiltonian();
    let e_ref = initial.energy(s.chi);
    let mut y = initial.to_array();
    let mut flow = ExtremalFlow {
        structure: *s,
        dt,
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        max_h_drift: 0.0,
        max_e_drift: 0.0,
    };
    flow.times.push(0.0);
    flow.states.push(*initial);
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let d = s.vector_field(&CovectorState::from_slice(y));
        dy.copy_from_slice(&d.to_array());
    };
    let mut h = None;
    for k in 1..=steps {
        let t0 = (k - 1) as f64 * dt;
        let t1 = if k == steps { horizon } else { k as f64 * dt };
        let out = ode.integrate_observed(rhs, t0, &mut y, t1, h, |_, _, _| ControlFlow::Continue(()))?;
        h = Some(out.h_next);
        let st = CovectorState::from_slice(&y);
        let dh = (st.hamiltonian() - h_ref).abs();
        let de = match (st.energy(s.chi), e_ref) {
            (Some(e), Some(e0)) => (e - e0).abs(),
            _ => (st.h0 - initial.h0).abs(),
        };
        flow.max_h_drift = flow.max_h_drift.max(dh);
        flow.max_e_drift = flow.max_e_drift.max(de);
        if dh > DRIFT_ABORT || de > DRIFT_ABORT {
            return Err(Error::ConservationDrift {
                t: t1,
                drift: dh.max(de),
            });
        }
        flow.times.push(t1);
        flow.states.push(st);
    }
    Ok(flow)
}

impl ExtremalFlow {
    /// Cubic Hermite interpolation with exact derivatives; held constant
    /// outside the sampled range.
    pub fn state_at(&self, t: f64) -> CovectorState {
        let last = self.times.len() - 1;
        if t <= 0.0 {
            return self.states[0];
        }
        if t >= self.times[last] {
            return self.states[last];
        }
        let i = ((t / self.dt) as usize).min(last - 1);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (a, b) = (self.states[i].to_array(), self.states[i + 1].to_array());
        let (da, db) = (
            self.structure.vector_field(&self.states[i]).to_array(),
            self.structure.vector_field(&self.states[i + 1]).to_array(),
        );
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = h00 * a[k] + h10 * h * da[k] + h01 * b[k] + h11 * h * db[k];
        }
        CovectorState::from_slice(&out)
    }
}

/// `(Ric¹, Ric²)` from the covector; with `χ = 0` this is `(h₀² + κ(h₁²+h₂²), 0)`.
pub fn curvature_along(s: &ContactStructure3D, h: &CovectorState) -> (f64, f64) {
    let (chi, kappa) = (s.chi, s.kappa);
    let (a, b, c) = (h.h0 * h.h0, h.h1 * h.h1, h.h2 * h.h2);
    let r11 = a + 3.0 * chi * (b - c) + kappa * (b + c);
    let r22 = 6.0 * chi * (b - c) * a
        - 2.0 * chi * (chi + kappa) * b * b
        - 12.0 * chi * chi * b * c
        - 2.0 * chi * (chi - kappa) * c * c;
    (r11, r22)
}

/// The same curvatures written through `h₀` and `E` (`χ > 0`).
pub fn curvature_energy_form(s: &ContactStructure3D, h0: f64, e: f64) -> (f64, f64) {
    let (chi, kappa) = (s.chi, s.kappa);
    let a = h0 * h0;
    let r11 = 4.0 * a - 3.0 * chi * (2.0 * e - 1.0) + kappa;
    let r22 = 8.0 * a * a - (2.0 * kappa + 10.0 * chi * (2.0 * e - 1.0)) * a
        + (2.0 * chi * kappa * (2.0 * e - 1.0) + chi * chi * (8.0 * e * e - 8.0 * e - 2.0));
    (r11, r22)
}

/// `diag(R11(t), R22(t))` along an integrated extremal.
pub struct GeodesicCurvature {
    flow: ExtremalFlow,
}

impl GeodesicCurvature {
    pub fn new(flow: ExtremalFlow) -> Self {
        Self { flow }
    }

    pub fn flow(&self) -> &ExtremalFlow {
        &self.flow
    }
}

impl CurvatureField for GeodesicCurvature {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Sampled
    }

    fn raw(&self, t: f64) -> Mat {
        let (r11, r22) = curvature_along(&self.flow.structure, &self.flow.state_at(t));
        linalg::diag(&[r11, r22])
    }

    fn eval(&self, t: f64) -> Mat {
        self.raw(t)
    }
}

/// Structural matrices of the reduced single row of length two.
pub fn reduced_structural() -> StructuralMatrices {
    YoungDiagram::single_row(2).expect("valid").structural_matrices()
}

/// Curvature field along the geodesic: constant `diag(h₀² + κ, 0)` when
/// `χ = 0`, integrated along the extremal otherwise.
pub fn geodesic_field(
    s: &ContactStructure3D,
    initial: &CovectorState,
    horizon: f64,
    tol: &Tolerances,
) -> Result<Arc<dyn CurvatureField>> {
    check_length_parametrized(initial)?;
    if s.chi == 0.0 {
        let (r11, r22) = curvature_along(s, initial);
        return Ok(Arc::new(ConstantField::diagonal(&[r11, r22])));
    }
    Ok(Arc::new(GeodesicCurvature::new(extremal_flow(
        s, initial, horizon, tol,
    )?)))
}

/// First conjugate time of the geodesic through the reduced Jacobi system.
pub fn conjugate_time_3d(
    s: &ContactStructure3D,
    initial: &CovectorState,
    horizon: f64,
    tol: &Tolerances,
) -> Result<ConjugateTimeResult> {
    let field = geodesic_field(s, initial, horizon, tol)?;
    jacobi::conjugate_time(&reduced_structural(), field, horizon, tol)
}

/// Exact `χ = 0` conjugate time: `2π/√(h₀² + κ)` when positive, else `+∞`.
pub fn chi0_conjugate_time(kappa: f64, h0: f64) -> ConjugateTimeResult {
    let r = h0 * h0 + kappa;
    if r > 0.0 {
        ConjugateTimeResult::closed_form(2.0 * PI / r.sqrt())
    } else {
        ConjugateTimeResult::CertifiedInfinite {
            certificate: Certificate::PolynomialCondition,
        }
    }
}

/// One row of a geodesic table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
    pub r11: f64,
    pub r22: f64,
    pub det_n: f64,
}

/// `(t, h, R11, R22, det N)` on the Jacobi grid.
pub fn trajectory_table(
    s: &ContactStructure3D,
    initial: &CovectorState,
    horizon: f64,
    tol: &Tolerances,
) -> Result<Vec<TrajectoryRow>> {
    check_length_parametrized(initial)?;
    let flow = extremal_flow(s, initial, horizon, tol)?;
    let field: Arc<dyn CurvatureField> = Arc::new(GeodesicCurvature::new(flow.clone()));
    let traj = jacobi::integrate_jacobi(&reduced_structural(), field, horizon, tol)?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.det_n)
        .map(|(&t, &det_n)| {
            let h = flow.state_at(t);
            let (r11, r22) = curvature_along(s, &h);
            TrajectoryRow {
                t,
                h0: h.h0,
                h1: h.h1,
                h2: h.h2,
                r11,
                r22,
                det_n,
            }
        })
        .collect())
}

/// Smallest `E` for which the bounds below apply: `(5 − κ/χ)/2`.
pub fn energy_threshold(chi: f64, kappa: f64) -> f64 {
    0.5 * (5.0 - kappa / chi)
}

/// `κ₁ = 2χE − 5χ + κ`, `κ₂ = 2χ²(15 − 26E) − 2χκ`.
///
/// `R11 ≥ κ₁` holds along every flow with this `E`. The estimate `R22 ≥ κ₂`
/// additionally uses `E ≥ 1`, which the threshold implies when `κ ≤ 3χ`.
pub fn ricci_bounds_egrande(chi: f64, kappa: f64, e: f64) -> Result<(f64, f64)> {
    if chi <= 0.0 {
        return Err(Error::Precondition("chi must be positive".into()));
    }
    let threshold = energy_threshold(chi, kappa);
    if e < threshold - 1e-12 * (1.0 + threshold.abs()) {
        return Err(Error::Precondition(format!("need E >= {threshold}, got {e}")));
    }
    let k1 = 2.0 * chi * e - 5.0 * chi + kappa;
    let k2 = 2.0 * chi * chi * (15.0 - 26.0 * e) - 2.0 * chi * kappa;
    Ok((k1, k2))
}

/// `Ē(χ, κ)`: the largest root of `4χ²E² + (4χκ − 228χ²)E + (145χ² − 18χκ + κ²)`,
/// but at least the threshold of [`ricci_bounds_egrande`].
pub fn ebar(chi: f64, kappa: f64) -> Result<f64> {
    if chi <= 0.0 {
        return Err(Error::Precondition("chi must be positive".into()));
    }
    let a = 4.0 * chi * chi;
    let b = 4.0 * chi * kappa - 228.0 * chi * chi;
    let c = 145.0 * chi * chi - 18.0 * chi * kappa + kappa * kappa;
    let disc = b * b - 4.0 * a * c;
    let threshold = energy_threshold(chi, kappa);
    if disc < 0.0 {
        return Ok(threshold);
    }
    // (−b + √disc)/(2a) without cancellation
    let root = if b <= 0.0 {
        (-b + disc.sqrt()) / (2.0 * a)
    } else {
        2.0 * c / (-b - disc.sqrt())
    };
    Ok(root.max(threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::Verdict;

    #[test]
    fn invariants_examples() {
        assert_eq!(
            invariants_from_constants(&StructureConstants3D::default()).unwrap(),
            (0.0, 0.0)
        );
        let (chi, kappa) = invariants_from_constants(&StructureConstants3D::canonical(2.0, 0.5)).unwrap();
        assert!((chi - 2.0).abs() < 1e-15 && (kappa - 0.5).abs() < 1e-15);
        let su2 = StructureConstants3D {
            c01_2: 1.0,
            c02_1: -1.0,
            ..Default::default()
        };
        assert_eq!(invariants_from_constants(&su2).unwrap(), (0.0, 1.0));
        let bad = StructureConstants3D {
            c01_1: 1.0,
            ..Default::default()
        };
        assert!(invariants_from_constants(&bad).is_err());
    }

    #[test]
    fn curvature_examples() {
        let s = ContactStructure3D::new(1.0, 0.0).unwrap();
        assert_eq!(curvature_along(&s, &CovectorState::new(1.0, 0.0, 0.0)), (3.0, -2.0));
        assert_eq!(curvature_along(&s, &CovectorState::new(0.0, 1.0, 0.0)), (-3.0, -2.0));
    }

    #[test]
    fn fixed_point_flow() {
        let s = ContactStructure3D::new(1.0, 0.0).unwrap();
        let h = CovectorState::new(1.0, 0.0, 0.0);
        assert_eq!(s.vector_field(&h), CovectorState::new(0.0, 0.0, 0.0));
        let f = extremal_flow(&s, &h, 5.0, &Tolerances::default()).unwrap();
        assert!(f.states.iter().all(|x| *x == h));
    }

    #[test]
    fn energy_is_conserved() {
        let s = ContactStructure3D::new(1.0, 0.0).unwrap();
        let h = CovectorState::new(1.0, 0.0, 1.0);
        assert_eq!(h.energy(1.0), Some(0.5));
        let f = extremal_flow(&s, &h, 20.0, &Tolerances::default()).unwrap();
        assert!(
            f.max_e_drift <= 1e-9 && f.max_h_drift <= 1e-9,
            "{} {}",
            f.max_e_drift,
            f.max_h_drift
        );
        for st in &f.states {
            assert!((st.energy(1.0).unwrap() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn hermite_interpolation_tracks_flow() {
        let s = ContactStructure3D::new(0.7, -0.3).unwrap();
        let h = CovectorState::new(0.6, 0.8, 1.3);
        let f = extremal_flow(&s, &h, 3.0, &Tolerances::default()).unwrap();
        // compare mid-interval values with a direct integration
        let ode = Dopri5::new(1e-13, 1e-15);
        for &t in &[0.0137, 1.2345, 2.9999] {
            let mut y = h.to_array();
            ode.integrate(
                |_, y, dy| dy.copy_from_slice(&s.vector_field(&CovectorState::from_slice(y)).to_array()),
                0.0,
                &mut y,
                t,
                None,
            )
            .unwrap();
            let g = f.state_at(t);
            assert!((g.h0 - y[0]).abs() < 1e-9 && (g.h1 - y[1]).abs() < 1e-9 && (g.h2 - y[2]).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_form_matches() {
        let s = ContactStructure3D::new(1.3, 0.4).unwrap();
        for k in 0..50 {
            let th = k as f64 * 0.13;
            let h = CovectorState::new(th.cos(), th.sin(), 2.0 * (0.7 * th).sin());
            let e = h.energy(s.chi).unwrap();
            let (a, b) = curvature_along(&s, &h);
            let (c, d) = curvature_energy_form(&s, h.h0, e);
            assert!((a - c).abs() < 1e-10 * (1.0 + a.abs()) && (b - d).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn from_energy_round_trip() {
        let h = CovectorState::from_energy(2.0, 3.0, 3.0, false, true).unwrap();
        assert!((h.energy(2.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((h.hamiltonian() - 0.5).abs() < 1e-15);
        assert!(h.h2 < 0.0 && h.h1 > 0.0);
        // h0^2 outside [2chi(E-1), 2chi E]
        assert!(CovectorState::from_energy(2.0, 3.0, 0.5, true, true).is_err());
    }

    #[test]
    fn chi0_examples() {
        let tol = Tolerances::default();
        let r = conjugate_time_3d(
            &ContactStructure3D::heisenberg(),
            &CovectorState::new(1.0, 0.0, 2.0),
            10.0,
            &tol,
        )
        .unwrap();
        assert!((r.time().unwrap() - PI).abs() < 1e-8);
        let r = conjugate_time_3d(
            &ContactStructure3D::su2(),
            &CovectorState::new(0.0, 1.0, 0.0),
            10.0,
            &tol,
        )
        .unwrap();
        assert!((r.time().unwrap() - 2.0 * PI).abs() < 1e-8);
        let r = conjugate_time_3d(
            &ContactStructure3D::sl2(),
            &CovectorState::new(1.0, 0.0, 1.0),
            100.0,
            &tol,
        )
        .unwrap();
        assert_eq!(r.verdict(), Verdict::NoneUpToHorizon);

        assert_eq!(chi0_conjugate_time(0.0, 0.0).verdict(), Verdict::CertifiedInfinite);
        assert!((chi0_conjugate_time(-1.0, 2f64.sqrt()).time().unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((chi0_conjugate_time(1.0, 0.0).time().unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(ricci_bounds_egrande(1.0, 0.0, 3.0).unwrap(), (1.0, -126.0));
        assert_eq!(ricci_bounds_egrande(1.0, 0.0, 2.5).unwrap().0, 0.0);
        assert_eq!(ricci_bounds_egrande(2.0, 1.0, 10.0).unwrap(), (31.0, -1964.0));
        assert!(ricci_bounds_egrande(1.0, 0.0, 2.0).is_err());
        assert!(ricci_bounds_egrande(0.0, 0.0, 3.0).is_err());
    }

    #[test]
    fn ebar_examples() {
        let e = ebar(1.0, 0.0).unwrap();
        // independent oracle: plain quadratic formula
        let oracle = (228.0 + (228.0f64 * 228.0 - 16.0 * 145.0).sqrt()) / 8.0;
        assert!((e - oracle).abs() < 1e-12 && (e - 56.357).abs() < 1e-3, "{e}");
        let c = |e: f64| {
            let (k1, k2) = ricci_bounds_egrande(1.0, 0.0, e).unwrap();
            4.0 * k2 + k1 * k1
        };
        assert!(c(57.0) > 0.0 && c(56.0) < 0.0);
        assert!((ebar(2.0, 2.0 * 0.3).unwrap() - ebar(1.0, 0.3).unwrap()).abs() < 1e-10);
        let (k1, k2) = ricci_bounds_egrande(1.0, 0.0, 57.0).unwrap();
        assert!(crate::lq::classify_finiteness_l2(k1, k2).is_finite());
    }

    #[test]
    fn trajectory_table_starts_at_initial_state() {
        let s = ContactStructure3D::new(1.0, 0.2).unwrap();
        let h = CovectorState::new(0.6, -0.8, 0.9);
        let rows = trajectory_table(&s, &h, 2.0, &Tolerances::default()).unwrap();
        assert_eq!(rows.len(), Tolerances::default().grid_points + 1);
        assert_eq!((rows[0].h0, rows[0].h1, rows[0].h2), (0.9, 0.6, -0.8));
        assert_eq!(rows[0].det_n, 0.0);
    }

    #[test]
    fn rejects_non_unit_covector() {
        let s = ContactStructure3D::new(1.0, 0.0).unwrap();
        assert!(conjugate_time_3d(&s, &CovectorState::new(1.0, 1.0, 0.0), 5.0, &Tolerances::default()).is_err());
        assert!(ContactStructure3D::new(-1.0, 0.0).is_err());
    }
}

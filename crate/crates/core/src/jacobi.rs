//! The linear Jacobi system along an extremal and the `det N` conjugate-time
//! detector.
//!
//! The pair `(M, N)` solves
//!
//! ```text
//! d/dt (M; N) = [[-Γ₁, -R(t)], [Γ₂, Γ₁ᵀ]] (M; N),   M(0) = I, N(0) = 0,
//! ```
//!
//! and the first conjugate time is the first `t > 0` with `det N(t) = 0`.
//! Only the column span of `(M; N)` matters, so the integrator carries an
//! orthonormal frame `F` with `(M; N) = F C`, re-orthonormalised at every grid
//! point; `C` is upper triangular with positive diagonal, so `det N` and
//! `det N_F` share their sign.

use std::sync::Arc;

use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut};
use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureField;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::ode::Dopri5;
use crate::young::StructuralMatrices;

/// Integration and detection tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    /// Width of the final bracket around a conjugate time.
    pub refine: f64,
    /// Number of uniform grid intervals over the horizon.
    pub grid_points: usize,
    /// Smallest-singular-value level below which a dip counts as a zero.
    pub sigma_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-12,
            refine: 1e-9,
            grid_points: 2000,
            sigma_threshold: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel > 0.0
            && self.abs > 0.0
            && self.refine > 0.0
            && self.grid_points >= 4
            && self.sigma_threshold > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("tolerances must be positive: {self:?}")))
        }
    }

    /// Integration tolerances divided by `factor`.
    pub fn tighter(&self, factor: f64) -> Self {
        Self {
            rel: self.rel / factor,
            abs: self.abs / factor,
            ..*self
        }
    }

    pub(crate) fn integrator(&self) -> Dopri5 {
        Dopri5::new(self.rel, self.abs)
    }
}

/// How a finite conjugate time was located.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `det N` changes sign across the bracket.
    SignChange { det_lo: f64, det_hi: f64 },
    /// Smallest singular value of the normalised `N` dips to `sigma`.
    SingularValueDip { sigma: f64 },
    /// Riccati solution norm exceeded the cap.
    RiccatiBlowUp { norm: f64 },
    /// Exact formula.
    ClosedForm,
}

/// Why a conjugate time is known to be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Curvature bounded above by zero; compared with the flat model.
    NonPositiveCurvature,
    /// The exact `ℓ ≤ 2` finiteness conditions fail.
    PolynomialCondition,
    /// Closed-form model value.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Finite,
    NoneUpToHorizon,
    CertifiedInfinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConjugateTimeResult {
    Finite {
        tc: f64,
        bracket: [f64; 2],
        witness: Witness,
    },
    NoneUpToHorizon {
        horizon: f64,
    },
    CertifiedInfinite {
        certificate: Certificate,
    },
}

impl ConjugateTimeResult {
    pub fn verdict(&self) -> Verdict {
        match self {
            Self::Finite { .. } => Verdict::Finite,
            Self::NoneUpToHorizon { .. } => Verdict::NoneUpToHorizon,
            Self::CertifiedInfinite { .. } => Verdict::CertifiedInfinite,
        }
    }

    pub fn time(&self) -> Option<f64> {
        match self {
            Self::Finite { tc, .. } => Some(*tc),
            _ => None,
        }
    }

    /// `tc`, or `+∞` when no conjugate time was found.
    pub fn time_or_inf(&self) -> f64 {
        self.time().unwrap_or(f64::INFINITY)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite { .. })
    }

    pub(crate) fn closed_form(tc: f64) -> Self {
        Self::Finite {
            tc,
            bracket: [tc, tc],
            witness: Witness::ClosedForm,
        }
    }
}

/// Samples of the Jacobi solution on a uniform grid.
#[derive(Debug, Clone)]
pub struct JacobiTrajectory {
    pub structural: StructuralMatrices,
    pub curvature: Arc<dyn CurvatureField>,
    pub tolerances: Tolerances,
    pub horizon: f64,
    pub times: Vec<f64>,
    /// Orthonormal `2n × n` frames spanning the columns of `(M; N)`.
    pub frames: Vec<Mat>,
    /// `(M; N) = frame · scale`.
    pub scales: Vec<Mat>,
    /// `det N(t)`; may overflow to `±∞` for fast-growing solutions.
    pub det_n: Vec<f64>,
    /// `det` of the normalised `N` block (same sign as `det N`).
    pub det_n_frame: Vec<f64>,
    /// Smallest singular value of the normalised `N` block.
    pub sigma_min: Vec<f64>,
}

impl JacobiTrajectory {
    pub fn dim(&self) -> usize {
        self.structural.dim()
    }

    pub fn m(&self, i: usize) -> Mat {
        let n = self.dim();
        self.frames[i].rows(0, n) * &self.scales[i]
    }

    pub fn n(&self, i: usize) -> Mat {
        let n = self.dim();
        self.frames[i].rows(n, n) * &self.scales[i]
    }

    /// Start of the zero search; `N(0) = 0` by construction.
    pub fn startup_time(&self) -> f64 {
        1e-4 * self.horizon
    }
}

/// The Jacobi system `[[-Γ₁, -R], [Γ₂, Γ₁ᵀ]]` for a structural pair and a
/// curvature field.
pub(crate) struct JacobiSystem<'a> {
    structural: &'a StructuralMatrices,
    curvature: &'a dyn CurvatureField,
    constant: Option<Mat>,
}

impl<'a> JacobiSystem<'a> {
    pub(crate) fn new(structural: &'a StructuralMatrices, curvature: &'a dyn CurvatureField) -> Self {
        let mut sys = Self {
            structural,
            curvature,
            constant: None,
        };
        if let Some(q) = curvature.as_constant() {
            sys.constant = Some(sys.matrix_with(q));
        }
        sys
    }

    fn matrix_with(&self, r: &Mat) -> Mat {
        let n = self.structural.dim();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, 0), (n, n)).copy_from(&(-&self.structural.gamma1));
        a.view_mut((0, n), (n, n)).copy_from(&(-r));
        a.view_mut((n, 0), (n, n)).copy_from(&self.structural.gamma2);
        a.view_mut((n, n), (n, n))
            .copy_from(&self.structural.gamma1.transpose());
        a
    }

    /// Propagates the `2n × n` frame `y` from `t0` to `t1` in place.
    pub(crate) fn propagate(&self, ode: &Dopri5, t0: f64, y: &mut Mat, t1: f64, h0: Option<f64>) -> Result<f64> {
        let rows = y.nrows();
        let cols = y.ncols();
        let out = ode.integrate(
            |t, state, deriv| {
                let owned;
                let a = match &self.constant {
                    Some(a) => a,
                    None => {
                        owned = self.matrix_with(&self.curvature.eval(t));
                        &owned
                    }
                };
                let yv = DMatrixView::from_slice(state, rows, cols);
                let mut dv = DMatrixViewMut::from_slice(deriv, rows, cols);
                dv.gemm(1.0, a, &yv, 0.0);
            },
            t0,
            y.as_mut_slice(),
            t1,
            h0,
        )?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: out.t });
        }
        Ok(out.h_next)
    }
}

/// QR with positive diagonal: returns `(Q, R)` with `y = Q R`.
fn orthonormalize(y: &Mat) -> (Mat, Mat) {
    let qr = y.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..r.nrows() {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
            let mut row = r.row_mut(j);
            row.neg_mut();
        }
    }
    (q, r)
}

fn n_block(frame: &Mat, n: usize) -> Mat {
    frame.rows(n, n).into_owned()
}

fn det_and_sigma(frame: &Mat, n: usize) -> (f64, f64) {
    let nb = n_block(frame, n);
    (nb.determinant(), linalg::min_singular_value(&nb))
}

/// Integrates the Jacobi system from `M(0) = I`, `N(0) = 0` up to `horizon`.
pub fn integrate_jacobi(
    structural: &StructuralMatrices,
    curvature: Arc<dyn CurvatureField>,
    horizon: f64,
    tol: &Tolerances,
) -> Result<JacobiTrajectory> {
    tol.validate()?;
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
    let sys = JacobiSystem::new(structural, curvature.as_ref());
    let ode = tol.integrator();
    let steps = tol.grid_points;
    let dt = horizon / steps as f64;

    let mut frame = DMatrix::zeros(2 * n, n);
    frame.view_mut((0, 0), (n, n)).fill_with_identity();
    let mut scale = Mat::identity(n, n);
    let mut log_det_scale = 0.0;

    let mut traj = JacobiTrajectory {
        structural: structural.clone(),
        curvature: curvature.clone(),
        tolerances: *tol,
        horizon,
        times: Vec::with_capacity(steps + 1),
        frames: Vec::with_capacity(steps + 1),
        scales: Vec::with_capacity(steps + 1),
        det_n: Vec::with_capacity(steps + 1),
        det_n_frame: Vec::with_capacity(steps + 1),
        sigma_min: Vec::with_capacity(steps + 1),
    };
    traj.times.push(0.0);
    traj.frames.push(frame.clone());
    traj.scales.push(scale.clone());
    traj.det_n.push(0.0);
    traj.det_n_frame.push(0.0);
    traj.sigma_min.push(0.0);

    let mut h = None;
    for k in 1..=steps {
        let t0 = (k - 1) as f64 * dt;
        let t1 = if k == steps { horizon } else { k as f64 * dt };
        h = Some(sys.propagate(&ode, t0, &mut frame, t1, h)?);
        let (q, r) = orthonormalize(&frame);
        frame = q;
        scale = &r * &scale;
        log_det_scale += r.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        // keep the scale representable; its determinant is tracked separately
        let smax = scale.amax();
        if smax > 1e200 {
            scale /= smax;
        }
        let (det_f, sigma) = det_and_sigma(&frame, n);
        let det = if det_f == 0.0 {
            0.0
        } else {
            det_f.signum() * (det_f.abs().ln() + log_det_scale).exp()
        };
        traj.times.push(t1);
        traj.frames.push(frame.clone());
        traj.scales.push(scale.clone());
        traj.det_n.push(det);
        traj.det_n_frame.push(det_f);
        traj.sigma_min.push(sigma);
    }
    Ok(traj)
}

struct Refiner<'a> {
    traj: &'a JacobiTrajectory,
    sys: JacobiSystem<'a>,
    ode: Dopri5,
    n: usize,
}

impl<'a> Refiner<'a> {
    fn new(traj: &'a JacobiTrajectory, tol: &Tolerances) -> Self {
        Self {
            traj,
            sys: JacobiSystem::new(&traj.structural, traj.curvature.as_ref()),
            ode: tol.integrator(),
            n: traj.dim(),
        }
    }

    /// Normalised `(det N, σ_min N)` at `t`, starting from grid sample `from`.
    fn eval(&self, from: usize, t: f64) -> Result<(f64, f64)> {
        let mut y = self.traj.frames[from].clone();
        self.sys.propagate(&self.ode, self.traj.times[from], &mut y, t, None)?;
        let (q, _) = orthonormalize(&y);
        Ok(det_and_sigma(&q, self.n))
    }

    fn bisect(&self, from: usize, lo: f64, hi: f64, refine: f64) -> Result<(f64, f64)> {
        let sign_lo = self.traj.det_n_frame[from].signum();
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > refine {
            let mid = 0.5 * (lo + hi);
            let (d, _) = self.eval(from, mid)?;
            if d == 0.0 {
                return Ok((mid, mid));
            }
            if d.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo, hi))
    }

    /// Golden-section minimisation of `σ_min` on `[lo, hi]`.
    fn minimize_sigma(&self, from: usize, lo: f64, hi: f64, refine: f64) -> Result<(f64, f64)> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = self.eval(from, c)?.1;
        let mut fd = self.eval(from, d)?.1;
        while b - a > refine {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = self.eval(from, c)?.1;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = self.eval(from, d)?.1;
            }
        }
        let t = 0.5 * (a + b);
        let s = self.eval(from, t)?.1;
        Ok((t, s.min(fc).min(fd)))
    }
}

enum Dip {
    Zero { t: f64, sigma: f64 },
    NotZero,
}

fn examine_dip(traj: &JacobiTrajectory, centre: usize, refine: f64) -> Result<Dip> {
    let tol = traj.tolerances;
    let thr = tol.sigma_threshold;
    let lo_idx = centre - 1;
    let lo = traj.times[lo_idx];
    let hi = traj.times[centre + 1];

    let (t1, s1) = Refiner::new(traj, &tol).minimize_sigma(lo_idx, lo, hi, refine)?;
    if s1 >= 1e3 * thr {
        return Ok(Dip::NotZero);
    }
    // confirm (or disambiguate) at 10x tighter integration tolerances
    let (t2, s2) = Refiner::new(traj, &tol.tighter(10.0)).minimize_sigma(lo_idx, lo, hi, refine)?;
    if s2 < thr {
        Ok(Dip::Zero { t: t2, sigma: s2 })
    } else if s2 < 1e3 * thr {
        Err(Error::AmbiguousDip {
            t: t1.max(t2),
            sigma: s2,
        })
    } else {
        Ok(Dip::NotZero)
    }
}

/// Smallest `t` in `(t_min, horizon]` with `det N(t) = 0`.
///
/// Odd-multiplicity zeros show up as sign changes of `det N` and are refined
/// by bisection. Even-multiplicity zeros are found as local minima of the
/// smallest singular value of the normalised `N` that reach the threshold.
pub fn first_conjugate_time(traj: &JacobiTrajectory, refine: f64) -> Result<ConjugateTimeResult> {
    let t_min = traj.startup_time();
    let len = traj.times.len();
    let Some(first) = traj.times.iter().position(|&t| t >= t_min) else {
        return Ok(ConjugateTimeResult::NoneUpToHorizon { horizon: traj.horizon });
    };
    let first = first.max(1);
    let refiner = Refiner::new(traj, &traj.tolerances);

    for i in (first + 1)..len {
        // dip centred on i - 1
        let c = i - 1;
        if c > first {
            let s = &traj.sigma_min;
            if s[c] < s[c - 1] && s[c] <= s[i] {
                if let Dip::Zero { t, sigma } = examine_dip(traj, c, refine)? {
                    // an odd zero in [t_{c-1}, t_c] would have been caught already
                    return Ok(ConjugateTimeResult::Finite {
                        tc: t,
                        bracket: [t - 0.5 * refine, t + 0.5 * refine],
                        witness: Witness::SingularValueDip { sigma },
                    });
                }
            }
        }
        let d0 = traj.det_n_frame[i - 1];
        let d1 = traj.det_n_frame[i];
        if d1 == 0.0 {
            let t = traj.times[i];
            return Ok(ConjugateTimeResult::Finite {
                tc: t,
                bracket: [t, t],
                witness: Witness::SignChange {
                    det_lo: d0,
                    det_hi: 0.0,
                },
            });
        }
        if d0.signum() != d1.signum() {
            let (lo, hi) = refiner.bisect(i - 1, traj.times[i - 1], traj.times[i], refine)?;
            return Ok(ConjugateTimeResult::Finite {
                tc: 0.5 * (lo + hi),
                bracket: [lo, hi],
                witness: Witness::SignChange { det_lo: d0, det_hi: d1 },
            });
        }
    }
    Ok(ConjugateTimeResult::NoneUpToHorizon { horizon: traj.horizon })
}

/// Integrate and detect in one call.
pub fn conjugate_time(
    structural: &StructuralMatrices,
    curvature: Arc<dyn CurvatureField>,
    horizon: f64,
    tol: &Tolerances,
) -> Result<ConjugateTimeResult> {
    let traj = integrate_jacobi(structural, curvature, horizon, tol)?;
    first_conjugate_time(&traj, tol.refine)
}

//! Three entry points for the browser page in `www/`. Each returns JSON so
//! the page needs nothing beyond `JSON.parse`.

use std::sync::Arc;

use serde::Serialize;
use sr_conjugate::jacobi::{self, ConjugateTimeResult, Tolerances};
use sr_conjugate::lie3d::{self, ContactStructure3D, CovectorState};
use sr_conjugate::lq::{self, DiagonalRowModel};
use wasm_bindgen::prelude::*;

/// Fewer grid points than the library default keep the page responsive.
const GRID: usize = 600;

fn demo_tolerances() -> Tolerances {
    Tolerances {
        grid_points: GRID,
        ..Tolerances::default()
    }
}

#[derive(Serialize)]
struct Curve {
    t: Vec<f64>,
    /// `det N` of the orthonormalised frame: same zeros, bounded scale.
    det: Vec<f64>,
    sigma_min: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    r11: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    r22: Vec<f64>,
    result: Option<ConjugateTimeResult>,
    error: Option<String>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn failed(e: impl ToString) -> String {
    to_json(&Curve {
        t: vec![],
        det: vec![],
        sigma_min: vec![],
        r11: vec![],
        r22: vec![],
        result: None,
        error: Some(e.to_string()),
    })
}

/// `det N(t)` for the single-row model `Q = diag(kappas)` and its first
/// conjugate time. `kappas` is comma separated.
#[wasm_bindgen]
pub fn lq_curve(kappas: &str, horizon: f64) -> String {
    let parsed: Result<Vec<f64>, _> = kappas.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let Ok(k) = parsed else {
        return failed(format!("cannot parse kappas `{kappas}`"));
    };
    let model = match DiagonalRowModel::new(k) {
        Ok(m) => m.to_model(),
        Err(e) => return failed(e),
    };
    let tol = demo_tolerances();
    let traj = match jacobi::integrate_jacobi(&model.structural(), model.field(), horizon, &tol) {
        Ok(t) => t,
        Err(e) => return failed(e),
    };
    let result = jacobi::first_conjugate_time(&traj, tol.refine).ok();
    to_json(&Curve {
        t: traj.times,
        det: traj.det_n_frame,
        sigma_min: traj.sigma_min,
        r11: vec![],
        r22: vec![],
        result,
        error: None,
    })
}

/// Row-major `n × n` grid over `[k1_min, k1_max] × [k2_min, k2_max]`
/// (κ₂ increasing with the row): 1 where `t_c(κ₁, κ₂)` is finite.
#[wasm_bindgen]
pub fn finiteness_map(k1_min: f64, k1_max: f64, k2_min: f64, k2_max: f64, n: usize) -> Vec<u8> {
    let n = n.max(2);
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let k2 = step(k2_min, k2_max, j);
        for i in 0..n {
            let k1 = step(k1_min, k1_max, i);
            out.push(u8::from(lq::classify_finiteness_l2(k1, k2).is_finite()));
        }
    }
    out
}

/// Curvature `R11, R22` and `det N` along the geodesic with initial
/// covector `(cos θ, sin θ, h0)`, plus its first conjugate time.
#[wasm_bindgen]
pub fn lie3d_curves(chi: f64, kappa: f64, h0: f64, theta: f64, horizon: f64) -> String {
    let s = match ContactStructure3D::new(chi, kappa) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let h = CovectorState::new(theta.cos(), theta.sin(), h0);
    let tol = demo_tolerances();
    let field = match lie3d::geodesic_field(&s, &h, horizon, &tol) {
        Ok(f) => f,
        Err(e) => return failed(e),
    };
    let traj = match jacobi::integrate_jacobi(&lie3d::reduced_structural(), Arc::clone(&field), horizon, &tol) {
        Ok(t) => t,
        Err(e) => return failed(e),
    };
    let (r11, r22) = traj
        .times
        .iter()
        .map(|&t| {
            let r = field.eval(t);
            (r[(0, 0)], r[(1, 1)])
        })
        .unzip();
    let mut result = jacobi::first_conjugate_time(&traj, tol.refine).ok();
    if chi == 0.0 && !matches!(result, Some(ConjugateTimeResult::Finite { .. })) {
        // the closed form can certify what the scan only bounds
        result = Some(lie3d::chi0_conjugate_time(kappa, h0));
    }
    to_json(&Curve {
        t: traj.times,
        det: traj.det_n_frame,
        sigma_min: traj.sigma_min,
        r11,
        r22,
        result,
        error: None,
    })
}

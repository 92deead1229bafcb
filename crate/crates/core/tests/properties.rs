use std::sync::Arc;

use proptest::prelude::*;
use sr_conjugate::curvature::ConstantField;
use sr_conjugate::jacobi::{self, Tolerances};
use sr_conjugate::linalg::{self, Mat};
use sr_conjugate::lq::{self, DiagonalRowModel};
use sr_conjugate::riccati::{self, Phase};
use sr_conjugate::young::{partial_trace_ricci, YoungDiagram};

/// Non-increasing row lengths with at most `n` boxes.
fn partition(max_boxes: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=max_boxes, 1..=max_boxes).prop_filter_map("too many boxes", move |mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        (v.iter().sum::<usize>() <= max_boxes).then_some(v)
    })
}

fn symmetric(n: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| linalg::symmetrize(&Mat::from_vec(n, n, v)))
}

fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn eval_derivative(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &v)| acc * x + k as f64 * v)
}

/// Positive roots of `q` on `(0, ymax]` by a dense sign scan plus bisection.
/// `None` when some near-tangency makes the scan unreliable.
fn scan_positive_roots(q: &[f64], ymax: f64) -> Option<Vec<f64>> {
    const N: usize = 200_000;
    let h = ymax / N as f64;
    let mut roots = Vec::new();
    let mut prev = eval(q, h);
    for k in 2..=N {
        let (y0, y1) = ((k - 1) as f64 * h, k as f64 * h);
        let v = eval(q, y1);
        if v.abs() < 1e-9 {
            return None;
        }
        if (v > 0.0) != (prev > 0.0) {
            let (mut lo, mut hi) = (y0, y1);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if (eval(q, m) > 0.0) == (eval(q, lo) > 0.0) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            let y = 0.5 * (lo + hi);
            if eval_derivative(q, y).abs() < 1e-3 {
                return None;
            }
            roots.push(y);
        } else if (v - prev).abs() < 1e-12 && v.abs() < 1e-4 {
            return None;
        }
        prev = v;
    }
    Some(roots)
}

/// `q(y) = P(iy)` for `P(x) = p(x²)`, i.e. `q(y) = p(−y²)`, ascending.
fn q_of_y(p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; 2 * (p.len() - 1) + 1];
    for (i, &c) in p.iter().enumerate() {
        q[2 * i] = if i % 2 == 0 { c } else { -c };
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_diagram_is_controllable(rows in partition(8)) {
        let d = YoungDiagram::new(rows).unwrap();
        let s = d.structural_matrices();
        prop_assert!(s.is_controllable());
        // Γ₁ nilpotent, Γ₂ an orthogonal projection
        let n = s.dim();
        let mut p = Mat::identity(n, n);
        for _ in 0..n {
            p = &p * &s.gamma1;
        }
        prop_assert!(p.amax() == 0.0);
        prop_assert_eq!(&s.gamma2 * &s.gamma2, s.gamma2.clone());
        prop_assert_eq!(s.gamma2.transpose(), s.gamma2.clone());
        prop_assert_eq!(s.gamma2.trace() as usize, d.num_rows());
    }

    #[test]
    fn partial_traces_sum_to_trace(rows in partition(8), seed in any::<u64>()) {
        let d = YoungDiagram::new(rows).unwrap();
        let n = d.total_boxes();
        let r = Mat::from_fn(n, n, |i, j| ((seed as f64 + (i * n + j) as f64) * 0.37).sin());
        let total: f64 = d
            .levels()
            .iter()
            .map(|l| partial_trace_ricci(&r, &d, l).unwrap().iter().sum::<f64>())
            .sum();
        prop_assert!((total - r.trace()).abs() < 1e-12);
    }

    #[test]
    fn substitution_identity(kappas in prop::collection::vec(-3.0f64..3.0, 1..=4)) {
        let row = DiagonalRowModel::new(kappas).unwrap();
        let p = row.finiteness_polynomial();
        let q = q_of_y(p.coeffs());
        // brute force: sign changes of q on y > 0, away from y = 0
        let bound = 1.0 + p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let ys = scan_positive_roots(&q, bound.sqrt() + 1.0);
        prop_assume!(ys.is_some());
        let mut want: Vec<f64> = ys.unwrap().iter().filter(|y| **y > 1e-3).map(|y| -y * y).collect();
        want.sort_by(f64::total_cmp);
        let got: Vec<f64> = lq::simple_negative_roots(&row).into_iter().filter(|s| *s < -1e-6).collect();
        let mut got = got;
        got.sort_by(f64::total_cmp);
        prop_assert_eq!(got.len(), want.len(), "p = {:?}, got {:?}, want {:?}", p.coeffs(), got, want);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-6 * (1.0 + w.abs()));
        }
    }

    #[test]
    fn l2_classifiers_agree(k1 in -5.0f64..5.0, k2 in -5.0f64..5.0) {
        let row = DiagonalRowModel::new(vec![k1, k2]).unwrap();
        let general = lq::classify_finiteness(&row);
        prop_assert!(general != lq::Finiteness::NotCertified);
        prop_assert_eq!(general.is_finite(), lq::classify_finiteness_l2(k1, k2).is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn riccati_solution_is_symmetric_and_inverse_phase_positive(q in symmetric(3)) {
        let d = YoungDiagram::new(vec![2, 1]).unwrap();
        let s = d.structural_matrices();
        let tol = Tolerances::default();
        let (run, _) = riccati::integrate_riccati_limit_ic(&s, Arc::new(ConstantField::new(q).unwrap()), 5.0, &tol).unwrap();
        for st in &run.history {
            prop_assert_eq!(st.matrix.transpose(), st.matrix.clone());
            if st.phase == Phase::Inverse && st.t > 0.0 {
                prop_assert!(linalg::min_eigenvalue(&st.matrix) > -1e-12);
            }
        }
    }

    #[test]
    fn detectors_agree(q in symmetric(2), shift in -1.0f64..2.0) {
        let d = YoungDiagram::single_row(2).unwrap();
        let s = d.structural_matrices();
        let q = q + linalg::diag(&[shift, 0.0]);
        let tol = Tolerances::default();
        let field = Arc::new(ConstantField::new(q).unwrap());
        let a = jacobi::conjugate_time(&s, field.clone(), 20.0, &tol).unwrap();
        let (_, b) = riccati::integrate_riccati_limit_ic(&s, field, 20.0, &tol).unwrap();
        // a pole right at the horizon may legitimately land on either side
        prop_assume!(a.time().map_or(true, |t| t < 19.9) && b.time().map_or(true, |t| t < 19.9));
        prop_assert_eq!(a.is_finite(), b.is_finite(), "{:?} vs {:?}", a, b);
        if let (Some(x), Some(y)) = (a.time(), b.time()) {
            prop_assert!((x - y).abs() < 1e-8, "{} vs {}", x, y);
        }
    }
}

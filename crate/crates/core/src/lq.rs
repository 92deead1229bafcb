//! Constant-curvature linear-quadratic models `LQ(Y; Q)`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::ConstantField;
use crate::error::{Error, Result};
use crate::jacobi::{self, Certificate, ConjugateTimeResult, Tolerances};
use crate::linalg::{self, Mat};
use crate::poly::Poly;
use crate::young::{StructuralMatrices, YoungDiagram};

/// Default scan horizon for model conjugate times.
pub const DEFAULT_HORIZON: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LQModel {
    diagram: YoungDiagram,
    q: Mat,
}

impl LQModel {
    pub fn new(diagram: YoungDiagram, q: Mat) -> Result<Self> {
        let n = diagram.total_boxes();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.nrows(),
            });
        }
        linalg::check_symmetric(&q, 1e-12)?;
        Ok(Self {
            diagram,
            q: linalg::symmetrize(&q),
        })
    }

    pub fn diagram(&self) -> &YoungDiagram {
        &self.diagram
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    pub fn structural(&self) -> StructuralMatrices {
        self.diagram.structural_matrices()
    }

    /// `[[-Γ₁, -Q], [Γ₂, Γ₁ᵀ]]`.
    pub fn hamiltonian_matrix(&self) -> Mat {
        let s = self.structural();
        let n = s.dim();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(&(-&s.gamma1));
        h.view_mut((0, n), (n, n)).copy_from(&(-&self.q));
        h.view_mut((n, 0), (n, n)).copy_from(&s.gamma2);
        h.view_mut((n, n), (n, n)).copy_from(&s.gamma1.transpose());
        h
    }

    pub fn field(&self) -> Arc<ConstantField> {
        Arc::new(ConstantField::new(self.q.clone()).expect("symmetric by construction"))
    }
}

/// `LQ(κ₁, …, κ_ℓ)`: a single row of length `ℓ` with `Q = diag(κ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalRowModel {
    pub kappas: Vec<f64>,
}

impl DiagonalRowModel {
    pub fn new(kappas: Vec<f64>) -> Result<Self> {
        if kappas.is_empty() {
            return Err(Error::InvalidInput("need at least one kappa".into()));
        }
        if kappas.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidInput("kappas must be finite".into()));
        }
        YoungDiagram::single_row(kappas.len())?;
        Ok(Self { kappas })
    }

    pub fn length(&self) -> usize {
        self.kappas.len()
    }

    pub fn to_model(&self) -> LQModel {
        let d = YoungDiagram::single_row(self.length()).expect("validated length");
        LQModel::new(d, linalg::diag(&self.kappas)).expect("diagonal is symmetric")
    }

    /// `p(s) = s^ℓ − Σ_{i<ℓ} (−1)^{ℓ−i} κ_{ℓ−i} s^i`, the characteristic
    /// polynomial in `s = x²`.
    pub fn finiteness_polynomial(&self) -> Poly {
        let l = self.length();
        let mut c = vec![0.0; l + 1];
        c[l] = 1.0;
        for (i, ci) in c.iter_mut().enumerate().take(l) {
            let sign = if (l - i) % 2 == 0 { 1.0 } else { -1.0 };
            // + 0.0 turns −0 into 0
            *ci = -sign * self.kappas[l - i - 1] + 0.0;
        }
        Poly::new(c)
    }
}

/// JSON model forms: `{"rows": [..], "Q": [[..]]}` or `{"l": 2, "kappas": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    General {
        rows: Vec<usize>,
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
    },
    DiagonalRow {
        l: usize,
        kappas: Vec<f64>,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<LQModel> {
        match self {
            ModelSpec::General { rows, q } => LQModel::new(YoungDiagram::new(rows.clone())?, linalg::from_rows(q)?),
            ModelSpec::DiagonalRow { l, kappas } => {
                if *l != kappas.len() {
                    return Err(Error::DimensionMismatch {
                        expected: *l,
                        got: kappas.len(),
                    });
                }
                Ok(DiagonalRowModel::new(kappas.clone())?.to_model())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Finiteness {
    /// `p` has a simple negative root; `root = −y²` is the most negative one.
    Finite {
        root: f64,
    },
    Infinite,
    /// No simple negative root for `ℓ ≥ 3`; the polynomial alone decides nothing.
    NotCertified,
}

impl Finiteness {
    pub fn is_finite(&self) -> bool {
        matches!(self, Finiteness::Finite { .. })
    }
}

/// Simple negative roots of the finiteness polynomial, ascending.
pub fn simple_negative_roots(model: &DiagonalRowModel) -> Vec<f64> {
    let p = model.finiteness_polynomial();
    p.real_roots(1e-14)
        .into_iter()
        .filter(|r| r.simple && r.value < 0.0)
        // s = 0 is ignored: the corresponding x = 0 has even multiplicity
        .filter(|r| r.value.abs() > 1e-12 * (1.0 + p.scale()))
        .map(|r| r.value)
        .collect()
}

pub fn classify_finiteness(model: &DiagonalRowModel) -> Finiteness {
    let roots = simple_negative_roots(model);
    if let Some(&root) = roots.first() {
        return Finiteness::Finite { root };
    }
    if model.length() <= 2 {
        Finiteness::Infinite
    } else {
        Finiteness::NotCertified
    }
}

/// Exact case analysis for `ℓ = 2`:
/// finite iff `κ₁ > 0, 4κ₂ > −κ₁²` or `κ₁ ≤ 0, κ₂ > 0`.
pub fn classify_finiteness_l2(k1: f64, k2: f64) -> Finiteness {
    let finite = (k1 > 0.0 && 4.0 * k2 > -k1 * k1) || (k1 <= 0.0 && k2 > 0.0);
    if finite {
        // smaller root of s² + κ₁ s − κ₂
        let disc = k1 * k1 + 4.0 * k2;
        Finiteness::Finite {
            root: (-k1 - disc.sqrt()) / 2.0,
        }
    } else {
        Finiteness::Infinite
    }
}

/// Closed-form conjugate times: `π/√κ` for `Q = κI` on a Riemannian diagram
/// (`+∞` when `κ ≤ 0`) and `2π/√κ₁` for a single row of length two with
/// `Q = diag(κ₁, 0)`, `κ₁ > 0`.
pub fn closed_form_tc(model: &LQModel) -> Option<f64> {
    let q = model.q();
    let n = q.nrows();
    let d = model.diagram();
    if d.is_riemannian() {
        let k = q[(0, 0)];
        if *q != Mat::identity(n, n) * k {
            return None;
        }
        return Some(if k > 0.0 { PI / k.sqrt() } else { f64::INFINITY });
    }
    if d.row_lengths() == [2] && q[(0, 1)] == 0.0 && q[(1, 1)] == 0.0 && q[(0, 0)] > 0.0 {
        return Some(2.0 * PI / q[(0, 0)].sqrt());
    }
    None
}

/// `Q` as a [`DiagonalRowModel`] when the diagram is a single row and `Q` is
/// diagonal.
pub fn as_diagonal_row(model: &LQModel) -> Option<DiagonalRowModel> {
    let q = model.q();
    let n = q.nrows();
    if model.diagram().num_rows() != 1 {
        return None;
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && q[(i, j)] != 0.0 {
                return None;
            }
        }
    }
    Some(DiagonalRowModel {
        kappas: (0..n).map(|i| q[(i, i)]).collect(),
    })
}

/// Why the model's conjugate time is infinite, when that is certain without
/// integrating.
pub fn infinity_certificate(model: &LQModel) -> Option<Certificate> {
    if linalg::max_eigenvalue(model.q()) <= 0.0 {
        return Some(Certificate::NonPositiveCurvature);
    }
    if let Some(row) = as_diagonal_row(model) {
        if row.length() <= 2 && classify_finiteness(&row) == Finiteness::Infinite {
            return Some(Certificate::PolynomialCondition);
        }
    }
    None
}

/// Numeric conjugate time of the model: Jacobi integration and the `det N`
/// detector, without any certificate.
pub fn lq_numeric_conjugate_time(model: &LQModel, horizon: f64, tol: &Tolerances) -> Result<ConjugateTimeResult> {
    jacobi::conjugate_time(&model.structural(), model.field(), horizon, tol)
}

/// Certified infinity when available, otherwise the numeric scan.
pub fn lq_conjugate_time(model: &LQModel, horizon: f64, tol: &Tolerances) -> Result<ConjugateTimeResult> {
    if let Some(certificate) = infinity_certificate(model) {
        return Ok(ConjugateTimeResult::CertifiedInfinite { certificate });
    }
    lq_numeric_conjugate_time(model, horizon, tol)
}

/// An eigenvalue cluster of the Hamiltonian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    /// `|Re λ| ≤ 1e-9 (1 + |λ|)`.
    pub imaginary: bool,
}

/// Eigenvalues of the Hamiltonian matrix grouped into clusters. Diagnostic
/// only: defective eigenvalues are perturbed by roughly `ε^{1/k}`.
pub fn hamiltonian_spectrum(model: &LQModel) -> Result<Vec<SpectralEntry>> {
    let h = model.hamiltonian_matrix();
    let eig = h.complex_eigenvalues();
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    let mut vals: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im)).collect();
    vals.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let cluster_tol = |a: (f64, f64)| 1e-3 * (1.0 + a.0.hypot(a.1));
    let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
    for v in vals {
        let hit = groups.iter_mut().find(|g| {
            let c = centre(g);
            (c.0 - v.0).hypot(c.1 - v.1) <= cluster_tol(c)
        });
        match hit {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    Ok(groups
        .iter()
        .map(|g| {
            let (re, im) = centre(g);
            let re = if re.abs() < 1e-12 { 0.0 } else { re };
            let im = if im.abs() < 1e-12 { 0.0 } else { im };
            SpectralEntry {
                re,
                im,
                multiplicity: g.len(),
                imaginary: re.abs() <= 1e-9 * (1.0 + re.hypot(im)),
            }
        })
        .collect())
}

fn centre(g: &[(f64, f64)]) -> (f64, f64) {
    let n = g.len() as f64;
    let (a, b) = g.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    (a / n, b / n)
}

//! Curvature fields `t ↦ R(t)` along an extremal.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Constant,
    ClosedForm,
    Sampled,
}

/// A symmetric `n × n` matrix-valued function of `t ≥ 0`.
///
/// Implementations must be total on `[0, horizon]` for any horizon the
/// caller integrates over. Callers go through [`CurvatureField::eval`],
/// which symmetrizes.
pub trait CurvatureField: Send + Sync {
    fn dim(&self) -> usize;

    fn kind(&self) -> FieldKind;

    /// Raw evaluation; may be slightly asymmetric.
    fn raw(&self, t: f64) -> Mat;

    fn eval(&self, t: f64) -> Mat {
        let mut r = self.raw(t);
        linalg::symmetrize_in_place(&mut r);
        r
    }

    /// `Some(Q)` when the field is the constant `Q`.
    fn as_constant(&self) -> Option<&Mat> {
        None
    }
}

impl fmt::Debug for dyn CurvatureField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurvatureField({:?}, n = {})", self.kind(), self.dim())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantField {
    q: Mat,
}

impl ConstantField {
    pub fn new(q: Mat) -> Result<Self> {
        linalg::check_symmetric(&q, 1e-12)?;
        Ok(Self {
            q: linalg::symmetrize(&q),
        })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            q: linalg::diag(values),
        }
    }

    pub fn scalar_identity(n: usize, k: f64) -> Self {
        Self {
            q: Mat::identity(n, n) * k,
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.q
    }
}

impl CurvatureField for ConstantField {
    fn dim(&self) -> usize {
        self.q.nrows()
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Constant
    }

    fn raw(&self, _t: f64) -> Mat {
        self.q.clone()
    }

    fn eval(&self, _t: f64) -> Mat {
        self.q.clone()
    }

    fn as_constant(&self) -> Option<&Mat> {
        Some(&self.q)
    }
}

/// Piecewise-linear interpolation between `(t, R)` samples. Held constant
/// outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    times: Vec<f64>,
    values: Vec<Mat>,
}

impl SampledField {
    pub fn new(times: Vec<f64>, values: Vec<Mat>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidInput(
                "sampled field needs equally many (>= 1) times and matrices".into(),
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("sample times must be strictly increasing".into()));
        }
        let n = values[0].nrows();
        for v in &values {
            if v.nrows() != n || v.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.nrows(),
                });
            }
            linalg::check_symmetric(v, 1e-12)?;
        }
        Ok(Self { times, values })
    }
}

impl CurvatureField for SampledField {
    fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Sampled
    }

    fn raw(&self, t: f64) -> Mat {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= self.times[last] {
            return self.values[last].clone();
        }
        let hi = self.times.partition_point(|&s| s <= t);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        &self.values[lo] * (1.0 - w) + &self.values[hi] * w
    }
}

/// Field given by a closure.
pub struct FnField<F> {
    n: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(f64) -> Mat + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> CurvatureField for FnField<F>
where
    F: Fn(f64) -> Mat + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn kind(&self) -> FieldKind {
        FieldKind::ClosedForm
    }

    fn raw(&self, t: f64) -> Mat {
        (self.f)(t)
    }
}

/// JSON form of a curvature field.
///
/// ```json
/// {"kind": "constant", "matrix": [[1, 0], [0, 0]]}
/// {"kind": "sampled", "interpolation": "linear",
///  "samples": [{"t": 0.0, "matrix": [[1]]}, {"t": 1.0, "matrix": [[2]]}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Constant {
        matrix: Vec<Vec<f64>>,
    },
    Sampled {
        interpolation: Interpolation,
        samples: Vec<Sample>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub matrix: Vec<Vec<f64>>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<Arc<dyn CurvatureField>> {
        match self {
            FieldSpec::Constant { matrix } => Ok(Arc::new(ConstantField::new(linalg::from_rows(matrix)?)?)),
            FieldSpec::Sampled { samples, .. } => {
                let times = samples.iter().map(|s| s.t).collect();
                let values = samples
                    .iter()
                    .map(|s| linalg::from_rows(&s.matrix))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Arc::new(SampledField::new(times, values)?))
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("curvature JSON: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_interpolates_linearly() {
        let f = SampledField::new(
            vec![0.0, 2.0],
            vec![linalg::diag(&[0.0, 1.0]), linalg::diag(&[2.0, 3.0])],
        )
        .unwrap();
        assert_eq!(f.eval(1.0), linalg::diag(&[1.0, 2.0]));
        assert_eq!(f.eval(5.0), linalg::diag(&[2.0, 3.0]));
        assert_eq!(f.eval(-1.0), linalg::diag(&[0.0, 1.0]));
    }

    #[test]
    fn sampled_rejects_unsorted_times() {
        assert!(SampledField::new(vec![1.0, 0.0], vec![linalg::diag(&[1.0]); 2]).is_err());
    }

    #[test]
    fn closure_field_is_symmetrized() {
        let f = FnField::new(2, |t| Mat::from_row_slice(2, 2, &[0.0, t, 0.0, 0.0]));
        let r = f.eval(2.0);
        assert_eq!(r[(0, 1)], 1.0);
        assert_eq!(r[(1, 0)], 1.0);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"sampled","interpolation":"linear",
            "samples":[{"t":0.0,"matrix":[[1.0]]},{"t":1.0,"matrix":[[3.0]]}]}"#;
        let spec = FieldSpec::from_json(text).unwrap();
        let field = spec.build().unwrap();
        assert_eq!(field.eval(0.5)[(0, 0)], 2.0);
        let again: FieldSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(again, spec);

        let c = FieldSpec::from_json(r#"{"kind":"constant","matrix":[[1,0],[0,0]]}"#).unwrap();
        assert_eq!(c.build().unwrap().as_constant().unwrap(), &linalg::diag(&[1.0, 0.0]));
    }

    #[test]
    fn constant_rejects_asymmetric() {
        assert!(ConstantField::new(Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])).is_err());
    }
}

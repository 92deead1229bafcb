//! Young diagrams of ample equiregular geodesics and their structural
//! matrices.
//!
//! Boxes are indexed row-major: row `a` ascending, then box `i` ascending
//! within the row. Every matrix in the crate uses this ordering.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Upper bound on the number of boxes.
pub const MAX_BOXES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

/// A maximal group of rows with equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    /// Common row length `ℓ`; also the number of superboxes.
    pub length: usize,
    /// Indices (0-based) of the rows in this level.
    pub rows: Vec<usize>,
    /// `superboxes[i]` holds the flat box indices of column `i` of the level.
    pub superboxes: Vec<Vec<usize>>,
}

impl Level {
    /// Number of rows `r`.
    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDiagram("no rows".into()));
        }
        if rows.contains(&0) {
            return Err(Error::InvalidDiagram("zero-length row".into()));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidDiagram(format!(
                "row lengths must be non-increasing, got {rows:?}"
            )));
        }
        let total: usize = rows.iter().sum();
        if total > MAX_BOXES {
            return Err(Error::InvalidDiagram(format!(
                "{total} boxes exceeds the limit of {MAX_BOXES}"
            )));
        }
        Ok(Self { rows })
    }

    /// Riemannian diagram: `n` rows of length one.
    pub fn riemannian(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// Single row of length `len`.
    pub fn single_row(len: usize) -> Result<Self> {
        Self::new(vec![len])
    }

    pub fn row_lengths(&self) -> &[usize] {
        &self.rows
    }

    pub fn total_boxes(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Flat index of box `i` (0-based) in row `a` (0-based).
    pub fn box_index(&self, row: usize, i: usize) -> usize {
        debug_assert!(i < self.rows[row]);
        self.rows[..row].iter().sum::<usize>() + i
    }

    pub fn levels(&self) -> Vec<Level> {
        let mut levels: Vec<Level> = Vec::new();
        for (a, &len) in self.rows.iter().enumerate() {
            match levels.last_mut() {
                Some(level) if level.length == len => level.rows.push(a),
                _ => levels.push(Level {
                    length: len,
                    rows: vec![a],
                    superboxes: Vec::new(),
                }),
            }
        }
        for level in &mut levels {
            level.superboxes = (0..level.length)
                .map(|i| level.rows.iter().map(|&a| self.box_index(a, i)).collect())
                .collect();
        }
        levels
    }

    pub fn structural_matrices(&self) -> StructuralMatrices {
        let n = self.total_boxes();
        let mut gamma1 = DMatrix::zeros(n, n);
        let mut gamma2 = DMatrix::zeros(n, n);
        for (a, &len) in self.rows.iter().enumerate() {
            let first = self.box_index(a, 0);
            gamma2[(first, first)] = 1.0;
            for i in 0..len.saturating_sub(1) {
                gamma1[(first + i, first + i + 1)] = 1.0;
            }
        }
        StructuralMatrices { gamma1, gamma2 }
    }

    pub fn is_riemannian(&self) -> bool {
        self.rows.iter().all(|&r| r == 1)
    }
}

impl TryFrom<Vec<usize>> for YoungDiagram {
    type Error = Error;

    fn try_from(rows: Vec<usize>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<YoungDiagram> for Vec<usize> {
    fn from(d: YoungDiagram) -> Self {
        d.rows
    }
}

impl FromStr for YoungDiagram {
    type Err = Error;

    /// Parses the compact form `"2,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidDiagram(format!("bad row length {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `Γ₁` (nilpotent shift per row) and `Γ₂` (projector on the first box of
/// each row).
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralMatrices {
    pub gamma1: Mat,
    pub gamma2: Mat,
}

impl StructuralMatrices {
    pub fn dim(&self) -> usize {
        self.gamma1.nrows()
    }

    /// Stacked `[Γ₂; Γ₂Γ₁; …; Γ₂Γ₁ⁿ⁻¹]`.
    pub fn controllability_matrix(&self) -> Mat {
        let n = self.dim();
        let mut out = DMatrix::zeros(n * n, n);
        let mut block = self.gamma2.clone();
        for k in 0..n {
            out.view_mut((k * n, 0), (n, n)).copy_from(&block);
            block = &block * &self.gamma1;
        }
        out
    }

    pub fn is_controllable(&self) -> bool {
        linalg::numerical_rank(&self.controllability_matrix(), 1e-12) == self.dim()
    }
}

/// `Ric^{α_i} = Σ_{a ∈ level} R_{ai,ai}` for each superbox of the level.
pub fn partial_trace_ricci(r: &Mat, diagram: &YoungDiagram, level: &Level) -> Result<Vec<f64>> {
    let n = diagram.total_boxes();
    if r.nrows() != n || r.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: r.nrows(),
        });
    }
    let max_index = level.superboxes.iter().flatten().copied().max().unwrap_or(0);
    if max_index >= n {
        return Err(Error::InvalidInput("level does not belong to diagram".into()));
    }
    Ok(level
        .superboxes
        .iter()
        .map(|sb| sb.iter().map(|&k| r[(k, k)]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn riemannian_gives_zero_and_identity() {
        let s = d(&[1, 1, 1]).structural_matrices();
        assert_eq!(s.gamma1, DMatrix::zeros(3, 3));
        assert_eq!(s.gamma2, DMatrix::identity(3, 3));
    }

    #[test]
    fn single_row_two() {
        let s = d(&[2]).structural_matrices();
        assert_eq!(s.gamma1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(s.gamma2, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn contact_diagram_blocks() {
        let s = d(&[2, 1]).structural_matrices();
        #[rustfmt::skip]
        let g1 = DMatrix::from_row_slice(3, 3, &[
            0.0, 1.0, 0.0,
            0.0, 0.0, 0.0,
            0.0, 0.0, 0.0,
        ]);
        assert_eq!(s.gamma1, g1);
        assert_eq!(s.gamma2, linalg::diag(&[1.0, 0.0, 1.0]));
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(YoungDiagram::new(vec![1, 2]).is_err());
        assert!(YoungDiagram::new(vec![2, 0]).is_err());
        assert!(YoungDiagram::new(vec![]).is_err());
        assert!(YoungDiagram::new(vec![65]).is_err());
        assert!("2,x".parse::<YoungDiagram>().is_err());
        assert!("1,2".parse::<YoungDiagram>().is_err());
    }

    #[test]
    fn parse_and_display() {
        let y: YoungDiagram = "3, 3,2".parse().unwrap();
        assert_eq!(y.row_lengths(), &[3, 3, 2]);
        assert_eq!(y.to_string(), "3,3,2");
    }

    #[test]
    fn levels_examples() {
        let l = d(&[1, 1, 1]).levels();
        assert_eq!(l.len(), 1);
        assert_eq!((l[0].length, l[0].size()), (1, 3));

        let l = d(&[2, 1]).levels();
        assert_eq!(l.len(), 2);
        assert_eq!((l[0].length, l[0].size()), (2, 1));
        assert_eq!((l[1].length, l[1].size()), (1, 1));

        let l = d(&[3, 3, 2]).levels();
        assert_eq!((l[0].length, l[0].size()), (3, 2));
        assert_eq!((l[1].length, l[1].size()), (2, 1));
        assert_eq!(l[0].superboxes[1], vec![1, 4]);
        assert_eq!(l[1].superboxes, vec![vec![6], vec![7]]);
    }

    #[test]
    fn partial_trace_examples() {
        let y = d(&[2]);
        let lv = &y.levels()[0];
        let r = linalg::diag(&[0.7, -2.0]);
        assert_eq!(partial_trace_ricci(&r, &y, lv).unwrap(), vec![0.7, -2.0]);

        let y = d(&[1, 1]);
        let r = DMatrix::from_row_slice(2, 2, &[2.0, 5.0, 5.0, 3.0]);
        assert_eq!(partial_trace_ricci(&r, &y, &y.levels()[0]).unwrap(), vec![5.0]);

        // brute force: level rows {0,1}, boxes (0,0)=0,(0,1)=1,(1,0)=2,(1,1)=3
        let y = d(&[2, 2]);
        let r = linalg::diag(&[1.0, 2.0, 3.0, 4.0]);
        let mut expected = [0.0; 2];
        for row in 0..2 {
            for i in 0..2 {
                expected[i] += r[(row * 2 + i, row * 2 + i)];
            }
        }
        assert_eq!(expected, [4.0, 6.0]);
        assert_eq!(partial_trace_ricci(&r, &y, &y.levels()[0]).unwrap(), expected.to_vec());
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let y = d(&[2]);
        let r = linalg::diag(&[1.0, 2.0, 3.0]);
        assert!(partial_trace_ricci(&r, &y, &y.levels()[0]).is_err());
    }
}

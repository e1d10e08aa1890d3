use serde::{Deserialize, Serialize};

use super::channel::MatrixRepr;
use super::check_square;
use crate::error::{Error, Result};

const SYM_TOL: f64 = 1e-12;

/// A per-letter distortion measure `rho(x, xhat)` on a `K x K` grid.
///
/// JSON form matches the channel: `{"K": 2, "rows": [[0, 1], [1, 0]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct DistortionMeasure {
    rows: Vec<Vec<f64>>,
    is_symmetric: bool,
    is_hamming: bool,
}

impl TryFrom<MatrixRepr> for DistortionMeasure {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.rows.len() != r.k {
            return Err(Error::DimensionMismatch {
                expected: r.k,
                got: r.rows.len(),
            });
        }
        DistortionMeasure::new(r.rows)
    }
}

impl From<DistortionMeasure> for MatrixRepr {
    fn from(d: DistortionMeasure) -> Self {
        MatrixRepr {
            k: d.rows.len(),
            rows: d.rows,
        }
    }
}

impl DistortionMeasure {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        check_square(&rows)?;
        if rows.iter().flatten().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::Parameter(
                "distortion entries must be finite and nonnegative".into(),
            ));
        }
        let is_hamming = rows
            .iter()
            .enumerate()
            .all(|(x, r)| r.iter().enumerate().all(|(y, &v)| v == if x == y { 0.0 } else { 1.0 }));
        let is_symmetric = permutation_rows(&rows) && permutation_rows(&transpose(&rows));
        Ok(DistortionMeasure {
            rows,
            is_symmetric,
            is_hamming,
        })
    }

    pub fn hamming(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidAlphabet(k));
        }
        DistortionMeasure::new(
            (0..k)
                .map(|x| (0..k).map(|y| if x == y { 0.0 } else { 1.0 }).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, x: usize, xhat: usize) -> f64 {
        self.rows[x][xhat]
    }

    /// Rows are permutations of each other and so are columns.
    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric
    }

    pub fn is_hamming(&self) -> bool {
        self.is_hamming
    }

    pub fn max_value(&self) -> f64 {
        self.rows.iter().flatten().copied().fold(0.0, f64::max)
    }
}

fn transpose(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = rows.len();
    (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

fn permutation_rows(rows: &[Vec<f64>]) -> bool {
    let sorted = |r: &Vec<f64>| {
        let mut s = r.clone();
        s.sort_by(f64::total_cmp);
        s
    };
    let reference = sorted(&rows[0]);
    rows.iter().skip(1).all(|r| {
        sorted(r)
            .iter()
            .zip(&reference)
            .all(|(a, b)| (a - b).abs() <= SYM_TOL)
    })
}

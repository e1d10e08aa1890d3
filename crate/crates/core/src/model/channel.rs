use serde::{Deserialize, Serialize};

use super::{check_square, PROB_TOL};
use crate::error::{Error, Result};

/// A discrete memoryless channel `p(y|x)` from the source alphabet to itself.
///
/// Rows are indexed by the input `x`, columns by the output `y`. JSON form:
/// `{"K": 2, "rows": [[0.9, 0.1], [0.1, 0.9]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Channel {
    rows: Vec<Vec<f64>>,
}

/// `{"K": int, "rows": [[...]]}`, shared by channels and distortion measures.
#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixRepr {
    #[serde(rename = "K")]
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for Channel {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.rows.len() != r.k {
            return Err(Error::DimensionMismatch {
                expected: r.k,
                got: r.rows.len(),
            });
        }
        Channel::new(r.rows)
    }
}

impl From<Channel> for MatrixRepr {
    fn from(c: Channel) -> Self {
        MatrixRepr {
            k: c.rows.len(),
            rows: c.rows,
        }
    }
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        check_square(&rows)?;
        for (x, row) in rows.iter().enumerate() {
            super::check_pmf(row, &format!("channel row {}", x + 1))?;
        }
        Ok(Channel { rows })
    }

    pub fn identity(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidAlphabet(k));
        }
        Ok(Channel {
            rows: (0..k)
                .map(|x| (0..k).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
                .collect(),
        })
    }

    /// `mu` on the diagonal, `(1 - mu)/(K - 1)` elsewhere. Requires `1/K < mu <= 1`.
    pub fn symmetric(k: usize, mu: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidAlphabet(k));
        }
        if !(mu > 1.0 / k as f64 && mu <= 1.0) {
            return Err(Error::Parameter(format!(
                "symmetric channel needs 1/K < mu <= 1, got mu={mu} with K={k}"
            )));
        }
        let eps = (1.0 - mu) / (k - 1) as f64;
        Ok(Channel {
            rows: (0..k)
                .map(|x| (0..k).map(|y| if x == y { mu } else { eps }).collect())
                .collect(),
        })
    }

    /// Input `x` produces one of the `l` cyclically consecutive outputs
    /// `x, x+1, .., x+l-1 (mod K)` with equal probability.
    pub fn circular(k: usize, l: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidAlphabet(k));
        }
        if l == 0 || l >= k {
            return Err(Error::Parameter(format!(
                "circular channel needs 0 < l < K, got l={l} with K={k}"
            )));
        }
        let w = 1.0 / l as f64;
        let mut rows = vec![vec![0.0; k]; k];
        for (x, row) in rows.iter_mut().enumerate() {
            for j in 0..l {
                row[(x + j) % k] = w;
            }
        }
        Ok(Channel { rows })
    }

    /// `p(y|x)` proportional to `exp(-(x - y)^2 / (2 sigma^2))` on integer
    /// coordinates without wraparound; each row normalised separately.
    pub fn gaussian_like(k: usize, sigma: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidAlphabet(k));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "gaussian-like channel needs sigma > 0, got {sigma}"
            )));
        }
        let two_var = 2.0 * sigma * sigma;
        let rows = (0..k)
            .map(|x| {
                let raw: Vec<f64> = (0..k)
                    .map(|y| {
                        let d = x as f64 - y as f64;
                        (-d * d / two_var).exp()
                    })
                    .collect();
                let norm: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / norm).collect()
            })
            .collect();
        Ok(Channel { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `p(y|x)`.
    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        let k = self.size();
        (0..k).all(|y| {
            let s: f64 = self.rows.iter().map(|r| r[y]).sum();
            (s - 1.0).abs() <= PROB_TOL
        })
    }
}

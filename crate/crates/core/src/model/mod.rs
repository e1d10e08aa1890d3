//! Domain types: sources, side-information channels, encoders, decoders,
//! distortion measures and the convex functionals `Q`, plus the basic
//! Shannon quantities built on them.
//!
//! Symbols are 0-based everywhere in the library API. External formats
//! (JSON files, CSV encoder maps) use 1-based symbols.

mod channel;
mod coding;
mod distortion;
mod qfunc;
mod source;

pub use channel::Channel;
pub use coding::{Decoder, DeterministicEncoder, StochasticEncoder};
pub use distortion::DistortionMeasure;
pub use qfunc::QFunction;
pub use source::Source;

use crate::error::{Error, Result};

/// Absolute tolerance on probability sums.
pub const PROB_TOL: f64 = 1e-12;

/// A joint pmf `p(x, y)` on a `K x K` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    rows: Vec<Vec<f64>>,
}

impl JointPmf {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        check_square(&rows)?;
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        check_pmf(&flat, "joint pmf")?;
        Ok(JointPmf { rows })
    }

    /// `p(x) p(y)`.
    pub fn product(px: &[f64], py: &[f64]) -> Result<Self> {
        JointPmf::new(
            px.iter()
                .map(|&a| py.iter().map(|&b| a * b).collect())
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
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let k = self.size();
        (0..k).map(|y| self.rows.iter().map(|r| r[y]).sum()).collect()
    }
}

/// `p(x, y) = p(x) p(y|x)`.
pub fn joint_distribution(source: &Source, channel: &Channel) -> Result<JointPmf> {
    let k = source.size();
    if channel.size() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: channel.size(),
        });
    }
    Ok(JointPmf {
        rows: source
            .pmf()
            .iter()
            .zip(channel.rows())
            .map(|(&p, row)| row.iter().map(|&w| p * w).collect())
            .collect(),
    })
}

/// Shannon entropy of a pmf in bits; zero-probability terms contribute 0.
pub fn entropy(pmf: &[f64]) -> f64 {
    pmf.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// `I(X;Y)` in bits.
pub fn mutual_information(joint: &JointPmf) -> f64 {
    let px = joint.marginal_x();
    let py = joint.marginal_y();
    let mut total = 0.0;
    for (x, row) in joint.rows().iter().enumerate() {
        for (y, &pxy) in row.iter().enumerate() {
            if pxy > 0.0 {
                total += pxy * (pxy / (px[x] * py[y])).log2();
            }
        }
    }
    total
}

/// `H(X|Y)` in bits.
pub fn conditional_entropy_x_given_y(joint: &JointPmf) -> f64 {
    let py = joint.marginal_y();
    let mut total = 0.0;
    for row in joint.rows() {
        for (y, &pxy) in row.iter().enumerate() {
            if pxy > 0.0 {
                total -= pxy * (pxy / py[y]).log2();
            }
        }
    }
    total
}

pub(crate) fn check_pmf(p: &[f64], what: &str) -> Result<()> {
    if let Some(v) = p.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidProbability(format!(
            "{what} has entry {v}, expected a finite nonnegative value"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidProbability(format!(
            "{what} sums to {s}, expected 1"
        )));
    }
    Ok(())
}

pub(crate) fn check_square(rows: &[Vec<f64>]) -> Result<()> {
    let k = rows.len();
    if k < 2 {
        return Err(Error::InvalidAlphabet(k));
    }
    for r in rows {
        if r.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: r.len(),
            });
        }
    }
    Ok(())
}

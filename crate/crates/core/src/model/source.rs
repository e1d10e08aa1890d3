use serde::{Deserialize, Serialize};

use super::PROB_TOL;
use crate::error::{Error, Result};

/// A memoryless source over the alphabet `{0, .., K-1}`.
///
/// JSON form: `{"K": 4, "pmf": [0.25, 0.25, 0.25, 0.25]}`. The first entry of
/// `pmf` is the probability of symbol 1 in the 1-based external convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceRepr", into = "SourceRepr")]
pub struct Source {
    pmf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SourceRepr {
    #[serde(rename = "K")]
    k: usize,
    pmf: Vec<f64>,
}

impl TryFrom<SourceRepr> for Source {
    type Error = Error;

    fn try_from(r: SourceRepr) -> Result<Self> {
        if r.pmf.len() != r.k {
            return Err(Error::DimensionMismatch {
                expected: r.k,
                got: r.pmf.len(),
            });
        }
        Source::new(r.pmf)
    }
}

impl From<Source> for SourceRepr {
    fn from(s: Source) -> Self {
        SourceRepr {
            k: s.pmf.len(),
            pmf: s.pmf,
        }
    }
}

impl Source {
    pub fn new(pmf: Vec<f64>) -> Result<Self> {
        if pmf.len() < 2 {
            return Err(Error::InvalidAlphabet(pmf.len()));
        }
        super::check_pmf(&pmf, "source pmf")?;
        Ok(Source { pmf })
    }

    /// Uniform source on `k` symbols.
    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidAlphabet(k));
        }
        Ok(Source {
            pmf: vec![1.0 / k as f64; k],
        })
    }

    pub fn size(&self) -> usize {
        self.pmf.len()
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.size() as f64;
        self.pmf.iter().all(|&p| (p - u).abs() <= PROB_TOL)
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        super::entropy(&self.pmf)
    }
}

//! Distortion lower bounds for codes with `M` cells.
//!
//! For any such code, `R^Q(D) <= I^Q(X; X̂) <= I^Q(X;Y,Z) <= C^Q(M)`, so the
//! achieved distortion is at least the inverse of `R^Q` at `C^Q(M)`. With
//! `Q(t) = t^(1 - alpha)` every `alpha` gives a valid bound and the best is
//! kept.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::invert_rq;
use crate::capacity::{
    brute_force_cq, circular_cq, classical_dpt_capacity, holder_bound, symmetric_cq_closed_form,
};
use crate::error::{Error, Result};
use crate::model::{Channel, QFunction, Source};
use crate::partition::SearchBudget;

/// Which capacity evaluation feeds the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapacityMethod {
    BruteForce(SearchBudget),
    Holder,
    /// Closed form for the symmetric channel with diagonal `mu`.
    SymmetricClosedForm { mu: f64 },
    /// Closed form for the circular channel with window `l`.
    CircularClosedForm { l: usize },
}

impl CapacityMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            CapacityMethod::BruteForce(_) => "brute_force",
            CapacityMethod::Holder => "holder",
            CapacityMethod::SymmetricClosedForm { .. } => "symmetric_closed_form",
            CapacityMethod::CircularClosedForm { .. } => "circular_closed_form",
        }
    }

    fn capacity(&self, source: &Source, channel: &Channel, m: usize, alpha: f64) -> Result<f64> {
        let k = source.size();
        Ok(match *self {
            CapacityMethod::BruteForce(budget) => {
                brute_force_cq(source, channel, m, &QFunction::power(alpha)?, budget)?.value
            }
            CapacityMethod::Holder => holder_bound(source, channel, m, alpha)?.value,
            CapacityMethod::SymmetricClosedForm { mu } => {
                symmetric_cq_closed_form(k, mu, m, alpha)?.value
            }
            CapacityMethod::CircularClosedForm { l } => circular_cq(k, l, m, alpha)?.value,
        })
    }
}

/// Equally spaced `alpha` values in `[start, end]`, all inside `(1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        AlphaGrid {
            start: 1.02,
            end: 1.98,
            points: 25,
        }
    }
}

impl AlphaGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::Parameter("alpha grid needs at least one point".into()));
        }
        if !(self.start > 1.0 && self.end < 2.0 && self.start <= self.end) {
            return Err(Error::Parameter(format!(
                "alpha grid [{}, {}] must satisfy 1 < start <= end < 2",
                self.start, self.end
            )));
        }
        if self.points > 1 && self.start == self.end {
            return Err(Error::Parameter("alpha grid with repeated points".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.start + (self.end - self.start) * i as f64 / n)
            .collect()
    }
}

/// Best bound found and the `alpha` that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub distortion: f64,
    pub alpha: f64,
}

const GOLDEN_TOL: f64 = 1e-4;

fn require_uniform(source: &Source) -> Result<()> {
    if !source.is_uniform() {
        return Err(Error::Parameter(
            "the closed-form R^Q used for inversion needs a uniform source".into(),
        ));
    }
    Ok(())
}

/// Hamming-distortion lower bound for codes with `m` cells, maximised over
/// `alpha` on the grid and refined by golden-section search around the best
/// grid point.
pub fn distortion_lower_bound(
    source: &Source,
    channel: &Channel,
    m: usize,
    method: &CapacityMethod,
    grid: &AlphaGrid,
) -> Result<LowerBound> {
    require_uniform(source)?;
    grid.validate()?;
    let k = source.size();
    let bound_at = |alpha: f64| -> Result<f64> {
        let c = method.capacity(source, channel, m, alpha)?;
        Ok(invert_rq(k, &QFunction::power(alpha)?, c)?.max(0.0))
    };
    let alphas = grid.values();
    let values: Vec<f64> = alphas
        .par_iter()
        .map(|&a| bound_at(a))
        .collect::<Result<Vec<f64>>>()?;
    let (mut best_i, mut best) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best_i = i;
            best = v;
        }
    }
    let mut result = LowerBound {
        distortion: best,
        alpha: alphas[best_i],
    };
    if alphas.len() < 2 || best <= 0.0 {
        return Ok(result);
    }

    let mut a = alphas[best_i.saturating_sub(1)];
    let mut b = alphas[(best_i + 1).min(alphas.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = bound_at(c)?;
    let mut fd = bound_at(d)?;
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = bound_at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = bound_at(d)?;
        }
    }
    for (alpha, v) in [(c, fc), (d, fd)] {
        if v > result.distortion {
            result = LowerBound {
                distortion: v,
                alpha,
            };
        }
    }
    Ok(result)
}

/// Lower bound from the classical data-processing chain: invert the Shannon
/// Hamming rate-distortion function at `I(X;Y) + max H(Z|Y)`.
pub fn classical_dpt_distortion_bound(
    source: &Source,
    channel: &Channel,
    m: usize,
    budget: SearchBudget,
) -> Result<f64> {
    require_uniform(source)?;
    let c = classical_dpt_capacity(source, channel, m, budget)?;
    Ok(invert_rq(source.size(), &QFunction::NegLog, c.value)?.max(0.0))
}

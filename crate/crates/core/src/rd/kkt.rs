//! `R^Q(D)` for a uniform source under a symmetric distortion measure.
//!
//! With a uniform source and a symmetric measure the optimal test channel
//! puts the same mass `p_k` on the reconstruction at distortion `rho_k`
//! from every source symbol, so the problem reduces to
//!
//! ```text
//! minimise  sum_k p_k Q(1/(K p_k))
//! subject to sum_k p_k = 1,  sum_k p_k rho_k = D,  p_k >= 0.
//! ```
//!
//! Writing `phi(p) = p Q(1/(K p))`, the stationarity conditions are
//! `phi'(p_k) + l1 + l2 rho_k - mu_k = 0` with `mu_k >= 0` and
//! `mu_k p_k = 0`. Each equation involves one `p_k` only, and `phi'` is
//! nondecreasing, so for fixed multipliers every `p_k` is an explicit
//! inverse. `l1` is then fixed by normalisation and `l2 >= 0` by the
//! distortion constraint, each through a monotone scalar bisection.

use crate::error::{Error, Result};
use crate::model::QFunction;

/// Optimum of the reduced problem together with its multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution {
    /// `R^Q(D)`.
    pub value: f64,
    /// `p_k`, in the order of the input row.
    pub pmf: Vec<f64>,
    pub lambda1: f64,
    /// `+inf` when `D` equals the smallest entry of the row.
    pub lambda2: f64,
    /// Multipliers of `p_k >= 0`.
    pub mu: Vec<f64>,
    /// `sum_k p_k rho_k` at the returned point.
    pub distortion: f64,
}

const SUM_TOL: f64 = 1e-9;
const DIST_TOL: f64 = 1e-8;

/// `phi'(p)` for `p` in `(0, 1]`.
fn phi_prime(q: &QFunction, k: f64, p: f64) -> f64 {
    q.perspective_slope(1.0 / (k * p))
}

/// The `p` in `[0, 1]` with `phi'(p) = t`, clamped at both ends.
fn p_at_level(q: &QFunction, k: f64, t: f64) -> f64 {
    if t <= q.perspective_slope_at_infinity() {
        return 0.0;
    }
    if t >= phi_prime(q, k, 1.0) {
        return 1.0;
    }
    let u = match *q {
        // -log2 u + 1/ln 2 = t
        QFunction::NegLog => (std::f64::consts::LOG2_E - t).exp2(),
        // alpha u^(1-alpha) = t
        QFunction::Power { alpha } => (t / alpha).powf(1.0 / (1.0 - alpha)),
        // (1+s) u^(-s) = t
        QFunction::InversePower { s } => (t / (1.0 + s)).powf(-1.0 / s),
    };
    (1.0 / (k * u)).min(1.0)
}

struct Groups {
    values: Vec<f64>,
    counts: Vec<f64>,
    index: Vec<usize>,
}

/// Distinct values of the row (ascending) and multiplicities; `index[k]` is
/// the group of entry `k`.
fn group(rho_row: &[f64]) -> Groups {
    let mut values: Vec<f64> = rho_row.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let index: Vec<usize> = rho_row
        .iter()
        .map(|v| values.iter().position(|u| u == v).unwrap())
        .collect();
    let mut counts = vec![0.0; values.len()];
    for &g in &index {
        counts[g] += 1.0;
    }
    Groups { values, counts, index }
}

/// Per-group masses for a given `l2`, with `l1` fixed by normalisation.
/// Returns the masses and the level `c' = -l1 - l2 * min(rho)`.
fn masses(q: &QFunction, k: f64, g: &Groups, l2: f64) -> (Vec<f64>, f64) {
    let vmin = g.values[0];
    let spread = g.values.last().unwrap() - vmin;
    let at = |c: f64| -> Vec<f64> {
        g.values
            .iter()
            .map(|&v| p_at_level(q, k, c - l2 * (v - vmin)))
            .collect()
    };
    let total = |p: &[f64]| -> f64 { p.iter().zip(&g.counts).map(|(a, n)| a * n).sum() };
    // At lo the cheapest group has mass 1/K and the others no more, so the
    // total is at most 1. At hi every group has mass 1.
    let mut lo = phi_prime(q, k, 1.0 / k);
    let mut hi = phi_prime(q, k, 1.0) + l2 * spread;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(&at(mid)) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick the endpoint whose total is closer to 1.
    let (pl, ph) = (at(lo), at(hi));
    if (total(&pl) - 1.0).abs() <= (total(&ph) - 1.0).abs() {
        (pl, lo)
    } else {
        (ph, hi)
    }
}

fn distortion_of(g: &Groups, p: &[f64]) -> f64 {
    p.iter()
        .zip(&g.counts)
        .zip(&g.values)
        .map(|((a, n), v)| a * n * v)
        .sum()
}

/// Solves the reduced problem for the distortion row `rho_row` (one row of
/// a symmetric measure, `K = rho_row.len()`).
///
/// `D` must lie between the smallest entry and the row mean; above the mean
/// the optimum is the uniform point with value `Q(1)`.
pub fn rq_symmetric_kkt(rho_row: &[f64], d: f64, q: &QFunction) -> Result<KktSolution> {
    let k = rho_row.len();
    if k < 2 {
        return Err(Error::InvalidAlphabet(k));
    }
    if rho_row.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Parameter(
            "distortion values must be finite and nonnegative".into(),
        ));
    }
    if d.is_nan() {
        return Err(Error::Domain("distortion level is NaN".into()));
    }
    let kf = k as f64;
    let g = group(rho_row);
    let vmin = g.values[0];
    let mean = rho_row.iter().sum::<f64>() / kf;
    if d < vmin - 1e-12 {
        return Err(Error::Domain(format!(
            "distortion {d} below the smallest achievable value {vmin}"
        )));
    }

    let finish = |gp: Vec<f64>, lambda1: f64, lambda2: f64, level: Option<f64>| {
        let pmf: Vec<f64> = g.index.iter().map(|&i| gp[i]).collect();
        let value: f64 = pmf.iter().map(|&p| q.weighted(p, 1.0 / kf)).sum();
        let mu = rho_row
            .iter()
            .zip(&pmf)
            .map(|(&r, &p)| {
                if p > 0.0 {
                    0.0
                } else if let Some(c) = level {
                    (q.perspective_slope_at_infinity() - (c - lambda2 * (r - vmin))).max(0.0)
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let distortion = distortion_of(&g, &gp);
        KktSolution {
            value,
            pmf,
            lambda1,
            lambda2,
            mu,
            distortion,
        }
    };

    if d >= mean || g.values.len() == 1 {
        let u = vec![1.0 / kf; g.values.len()];
        return Ok(finish(u, -phi_prime(q, kf, 1.0 / kf), 0.0, Some(phi_prime(q, kf, 1.0 / kf))));
    }
    if d <= vmin {
        let mut gp = vec![0.0; g.values.len()];
        gp[0] = 1.0 / g.counts[0];
        return Ok(finish(gp, f64::NAN, f64::INFINITY, None));
    }

    // Distortion decreases in l2 from the mean at 0 towards vmin.
    let mut lo = 0.0;
    let mut hi = 1.0;
    while distortion_of(&g, &masses(q, kf, &g, hi).0) > d {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonConvergence {
                what: "distortion multiplier bracket".into(),
                residual: d - vmin,
            });
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if distortion_of(&g, &masses(q, kf, &g, mid).0) > d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (dl, dh) = (masses(q, kf, &g, lo), masses(q, kf, &g, hi));
    let ((gp, c), l2) = if (distortion_of(&g, &dl.0) - d).abs() <= (distortion_of(&g, &dh.0) - d).abs() {
        (dl, lo)
    } else {
        (dh, hi)
    };
    let sol = finish(gp, -(c + l2 * vmin), l2, Some(c));
    let sum_res = (sol.pmf.iter().sum::<f64>() - 1.0).abs();
    if sum_res > SUM_TOL {
        return Err(Error::NonConvergence {
            what: "normalisation of the KKT solution".into(),
            residual: sum_res,
        });
    }
    let dist_res = (sol.distortion - d).abs();
    if dist_res > DIST_TOL {
        return Err(Error::NonConvergence {
            what: "distortion constraint of the KKT solution".into(),
            residual: dist_res,
        });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rd::rq_hamming;

    fn hamming_row(k: usize) -> Vec<f64> {
        (0..k).map(|i| if i == 0 { 0.0 } else { 1.0 }).collect()
    }

    #[test]
    fn hamming_rows_match_closed_form() {
        for k in [2, 4, 6] {
            let dmax = (k - 1) as f64 / k as f64;
            for q in [QFunction::NegLog, QFunction::power(1.5).unwrap(), QFunction::power(1.9).unwrap()] {
                for i in 0..50 {
                    let d = dmax * i as f64 / 49.0;
                    let s = rq_symmetric_kkt(&hamming_row(k), d, &q).unwrap();
                    let want = rq_hamming(k, d, &q).unwrap();
                    assert!((s.value - want).abs() < 1e-8, "{q} K={k} D={d}: {} vs {want}", s.value);
                }
            }
        }
    }

    #[test]
    fn uniform_at_mean() {
        let row = [0.0, 1.0, 2.0, 0.5];
        let q = QFunction::power(1.4).unwrap();
        let s = rq_symmetric_kkt(&row, 0.875, &q).unwrap();
        assert!(s.pmf.iter().all(|&p| (p - 0.25).abs() < 1e-15));
        assert!((s.value - 1.0).abs() < 1e-14);
        let s = rq_symmetric_kkt(&row, 5.0, &q).unwrap();
        assert!((s.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn residuals_and_slackness() {
        let row = [0.0, 0.3, 0.3, 1.0, 2.0];
        for q in [QFunction::NegLog, QFunction::power(1.2).unwrap(), QFunction::power(1.8).unwrap()] {
            for i in 1..40 {
                let d = 0.72 * i as f64 / 40.0;
                let s = rq_symmetric_kkt(&row, d, &q).unwrap();
                assert!((s.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                let dist: f64 = s.pmf.iter().zip(&row).map(|(p, r)| p * r).sum();
                assert!((dist - d).abs() < 1e-8);
                for (m, p) in s.mu.iter().zip(&s.pmf) {
                    assert!(*m >= 0.0 && (m * p).abs() < 1e-8);
                }
                assert_eq!(s.pmf[1], s.pmf[2]);
            }
        }
    }

    #[test]
    fn inverse_power_mass_decreases_with_distortion() {
        let row = [0.0, 0.2, 0.5, 0.9, 1.4];
        let q = QFunction::inverse_power(0.8).unwrap();
        for d in [0.05, 0.2, 0.4, 0.55] {
            let s = rq_symmetric_kkt(&row, d, &q).unwrap();
            for w in s.pmf.windows(2) {
                assert!(w[1] <= w[0] + 1e-15);
            }
        }
    }

    #[test]
    fn smallest_distortion_and_errors() {
        let s = rq_symmetric_kkt(&[0.0, 1.0, 1.0], 0.0, &QFunction::NegLog).unwrap();
        assert_eq!(s.pmf, vec![1.0, 0.0, 0.0]);
        assert!((s.value - 3f64.log2()).abs() < 1e-15);
        assert!(s.lambda2.is_infinite());
        assert!(rq_symmetric_kkt(&[0.2, 1.0, 1.0], 0.1, &QFunction::NegLog).is_err());
        assert!(rq_symmetric_kkt(&[0.0], 0.1, &QFunction::NegLog).is_err());
    }
}

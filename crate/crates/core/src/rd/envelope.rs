//! Lower convex envelope of per-rate distortion bounds.
//!
//! Time-sharing between fixed-rate codes with rates `R_i` and weights
//! `beta_i` spends `sum beta_i R_i` bits and incurs `sum beta_i D_i`. The
//! smallest distortion reachable within a rate budget `R` is therefore the
//! lower convex hull of the points, made nonincreasing by holding its
//! minimum once reached.

use crate::error::{Error, Result};

/// Piecewise-linear, convex, nonincreasing function of rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexEnvelope {
    vertices: Vec<(f64, f64)>,
}

/// Builds the envelope of `(rate, distortion)` points with distinct rates.
pub fn convex_envelope(points: &[(f64, f64)]) -> Result<ConvexEnvelope> {
    if points.is_empty() {
        return Err(Error::Parameter("envelope of an empty point set".into()));
    }
    if points.iter().any(|(r, d)| !r.is_finite() || !d.is_finite()) {
        return Err(Error::Parameter("envelope points must be finite".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Parameter(format!(
            "envelope rates must be distinct, {} appears twice",
            w[0].0
        )));
    }
    // Monotone-chain lower hull.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Keep the decreasing part; beyond the minimum the value is held.
    let argmin = hull
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    hull.truncate(argmin + 1);
    Ok(ConvexEnvelope { vertices: hull })
}

impl ConvexEnvelope {
    /// Hull vertices in increasing rate.
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Envelope value at rate `r`. Rates below the first vertex take the
    /// first value; rates beyond the last take the last.
    pub fn eval(&self, r: f64) -> f64 {
        let v = &self.vertices;
        if r <= v[0].0 {
            return v[0].1;
        }
        for w in v.windows(2) {
            let (a, b) = (w[0], w[1]);
            if r <= b.0 {
                let t = (r - a.0) / (b.0 - a.0);
                return a.1 + t * (b.1 - a.1);
            }
        }
        v[v.len() - 1].1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The envelope LP has an optimal vertex with at most two nonzero
    /// weights, so single points and pairs cover it.
    fn lp_oracle(points: &[(f64, f64)], r: f64) -> f64 {
        let mut best = f64::INFINITY;
        for &(ri, di) in points {
            if ri <= r {
                best = best.min(di);
            }
        }
        for &(ri, di) in points {
            for &(rj, dj) in points {
                if ri <= r && r < rj {
                    let b = (rj - r) / (rj - ri);
                    best = best.min(b * di + (1.0 - b) * dj);
                }
            }
        }
        best
    }

    #[test]
    fn three_point_example() {
        let e = convex_envelope(&[(0.0, 0.3), (1.0, 0.2), (2.0, 0.0)]).unwrap();
        assert!((e.eval(1.0) - 0.15).abs() < 1e-15);
        assert_eq!(e.vertices(), &[(0.0, 0.3), (2.0, 0.0)]);
    }

    #[test]
    fn single_point_is_constant() {
        let e = convex_envelope(&[(1.0, 0.4)]).unwrap();
        for r in [0.0, 1.0, 5.0] {
            assert_eq!(e.eval(r), 0.4);
        }
        assert!(convex_envelope(&[]).is_err());
        assert!(convex_envelope(&[(1.0, 0.4), (1.0, 0.2)]).is_err());
    }

    #[test]
    fn matches_lp_and_stays_below_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|i| ((i as f64 + 1.0).log2(), rng.gen::<f64>()))
                .collect();
            let e = convex_envelope(&pts).unwrap();
            for &(r, d) in &pts {
                assert!(e.eval(r) <= d + 1e-12);
            }
            for i in 0..=60 {
                let r = 3.0 * i as f64 / 60.0;
                assert!((e.eval(r) - lp_oracle(&pts, r)).abs() < 1e-12, "R={r}");
            }
            let v: Vec<f64> = (0..=100).map(|i| e.eval(0.03 * i as f64)).collect();
            for w in v.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12);
                assert!(w[1] <= w[0] + 1e-15);
            }
        }
    }
}

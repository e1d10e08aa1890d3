//! Generalized rate-distortion functions `R^Q(D)` and the distortion lower
//! bounds obtained by inverting them at a capacity value.

mod bounds;
mod envelope;
mod kkt;
mod oracle;

pub use bounds::{
    classical_dpt_distortion_bound, distortion_lower_bound, AlphaGrid, CapacityMethod,
    LowerBound,
};
pub use envelope::{convex_envelope, ConvexEnvelope};
pub use kkt::{rq_symmetric_kkt, KktSolution};
pub use oracle::{rq_numeric_oracle, rq_numeric_oracle_with, OracleOptions};

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::QFunction;

/// Slack allowed when checking that `D` lies in `[0, (K-1)/K]`.
const D_SLACK: f64 = 1e-12;

/// A point of `R^Q(D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub distortion: f64,
    pub rq: f64,
}

fn hamming_dmax(k: usize) -> f64 {
    (k - 1) as f64 / k as f64
}

fn check_hamming_domain(k: usize, d: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidAlphabet(k));
    }
    let dmax = hamming_dmax(k);
    if !(d >= -D_SLACK && d <= dmax + D_SLACK) {
        return Err(Error::Domain(format!(
            "Hamming distortion {d} outside [0, {dmax}] for K={k}"
        )));
    }
    Ok(d.clamp(0.0, dmax))
}

/// `R^Q(D)` of a uniform source on `K` symbols under Hamming distortion:
/// `(1-D) Q(1/(K(1-D))) + D Q((K-1)/(K D))`.
pub fn rq_hamming(k: usize, d: f64, q: &QFunction) -> Result<f64> {
    let d = check_hamming_domain(k, d)?;
    let kf = k as f64;
    Ok(q.weighted(1.0 - d, 1.0 / kf) + q.weighted(d, (kf - 1.0) / kf))
}

/// The same function for `Q(t) = t^(1 - alpha)` in the form
/// `K^(a-1) [ (1-D)^a + D^a / (K-1)^(a-1) ]`.
pub fn rq_power_hamming(k: usize, d: f64, alpha: f64) -> Result<f64> {
    let d = check_hamming_domain(k, d)?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("need alpha > 1, got {alpha}")));
    }
    let kf = k as f64;
    Ok(kf.powf(alpha - 1.0)
        * ((1.0 - d).powf(alpha) + d.powf(alpha) / (kf - 1.0).powf(alpha - 1.0)))
}

/// Smallest `D` with `R^Q(D) <= target` for the uniform Hamming case, rounded
/// down so the result stays a valid lower bound.
///
/// Returns 0 when `target >= R^Q(0)` and `(K-1)/K` when `target <= Q(1)`.
/// Targets within a relative `1e-12` of `R^Q(0)` are treated as equal to it.
pub fn invert_rq(k: usize, q: &QFunction, target: f64) -> Result<f64> {
    if target.is_nan() {
        return Err(Error::Domain("cannot invert at NaN".into()));
    }
    let top = rq_hamming(k, 0.0, q)?;
    if target >= top - 1e-12 * top.abs() {
        return Ok(0.0);
    }
    let dmax = hamming_dmax(k);
    if target <= q.value(1.0) {
        return Ok(dmax);
    }
    let (mut lo, mut hi) = (0.0, dmax);
    // R^Q(lo) > target >= R^Q(hi); stop once the bracket is below 1e-13.
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if rq_hamming(k, mid, q)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// One row of a bound or achievability curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub rate_bits: f64,
    pub distortion: f64,
    pub method: String,
    pub alpha: Option<f64>,
}

/// Distortion values against rate, sorted by strictly increasing rate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundCurve {
    points: Vec<CurvePoint>,
}

/// Column names of every curve CSV.
pub const CURVE_HEADER: [&str; 4] = ["rate_bits", "distortion_lower", "method", "alpha"];

/// 17 significant digits.
pub(crate) fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl BoundCurve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[1].rate_bits > w[0].rate_bits) {
                return Err(Error::Parameter(format!(
                    "curve rates must be strictly increasing, got {} then {}",
                    w[0].rate_bits, w[1].rate_bits
                )));
            }
        }
        if let Some(p) = points.iter().find(|p| !(p.distortion >= 0.0)) {
            return Err(Error::Parameter(format!(
                "negative distortion {} at rate {}",
                p.distortion, p.rate_bits
            )));
        }
        Ok(BoundCurve { points })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(rate, distortion)` pairs.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.rate_bits, p.distortion)).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CURVE_HEADER)?;
        for p in &self.points {
            w.write_record([
                fmt_float(p.rate_bits),
                fmt_float(p.distortion),
                p.method.clone(),
                p.alpha.map(fmt_float).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::entropy;

    fn p(alpha: f64) -> QFunction {
        QFunction::power(alpha).unwrap()
    }

    fn grid(k: usize, n: usize) -> Vec<f64> {
        let dmax = hamming_dmax(k);
        (0..n).map(|i| dmax * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn neg_log_is_shannon_rd() {
        for k in [2, 4, 7] {
            for d in grid(k, 101).into_iter().skip(1).take(99) {
                let want = (k as f64).log2() - entropy(&[d, 1.0 - d]) - d * ((k - 1) as f64).log2();
                let got = rq_hamming(k, d, &QFunction::NegLog).unwrap();
                assert!((got - want).abs() < 1e-12, "K={k} D={d}");
            }
        }
    }

    #[test]
    fn power_endpoints() {
        let q = p(1.5);
        assert!((rq_hamming(4, 0.0, &q).unwrap() - 2.0).abs() < 1e-15);
        assert!((rq_hamming(4, 0.75, &q).unwrap() - 1.0).abs() < 1e-15);
        assert!((rq_power_hamming(4, 0.0, 1.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((rq_power_hamming(4, 0.75, 1.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(rq_hamming(4, 0.8, &q).is_err());
        assert!(rq_hamming(4, -0.1, &q).is_err());
    }

    #[test]
    fn two_routes_agree() {
        for alpha in [1.1, 1.5, 1.9] {
            for k in [2, 4, 9] {
                for d in grid(k, 100) {
                    let a = rq_hamming(k, d, &p(alpha)).unwrap();
                    let b = rq_power_hamming(k, d, alpha).unwrap();
                    assert!((a - b).abs() < 1e-12 * a.max(1.0));
                }
            }
        }
    }

    #[test]
    fn convex_and_nonincreasing() {
        for q in [QFunction::NegLog, p(1.3), p(1.8), QFunction::inverse_power(0.5).unwrap()] {
            for k in [2, 4, 6] {
                let v: Vec<f64> = grid(k, 200).iter().map(|&d| rq_hamming(k, d, &q).unwrap()).collect();
                for w in v.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "{q} K={k}");
                }
                for w in v.windows(3) {
                    assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12, "{q} K={k}");
                }
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let q = p(1.5);
        assert_eq!(invert_rq(4, &q, 2.0).unwrap(), 0.0);
        assert_eq!(invert_rq(4, &q, 5.0).unwrap(), 0.0);
        assert_eq!(invert_rq(4, &q, 1.0).unwrap(), 0.75);
        assert_eq!(invert_rq(4, &QFunction::NegLog, 0.0).unwrap(), 0.75);
    }

    #[test]
    fn inversion_roundtrip_and_monotone() {
        for q in [QFunction::NegLog, p(1.5)] {
            for d in grid(4, 60).into_iter().skip(1).take(58) {
                let c = rq_hamming(4, d, &q).unwrap();
                let back = invert_rq(4, &q, c).unwrap();
                assert!((back - d).abs() < 1e-8, "{q}: {d} -> {back}");
                assert!(rq_hamming(4, back, &q).unwrap() >= c);
            }
            let mut prev = f64::INFINITY;
            for i in 0..200 {
                let t = q.value(1.0) + 2.5 * i as f64 / 199.0;
                let d = invert_rq(4, &q, t).unwrap();
                assert!(d <= prev);
                prev = d;
            }
        }
    }

    #[test]
    fn curve_validation_and_csv() {
        let pts = vec![
            CurvePoint { rate_bits: 0.0, distortion: 0.3, method: "x".into(), alpha: Some(1.5) },
            CurvePoint { rate_bits: 1.0, distortion: 0.1, method: "x".into(), alpha: None },
        ];
        let c = BoundCurve::new(pts.clone()).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "rate_bits,distortion_lower,method,alpha");
        assert_eq!(
            lines.next().unwrap(),
            "0.0000000000000000e0,2.9999999999999999e-1,x,1.5000000000000000e0"
        );
        assert!(lines.next().unwrap().ends_with(",x,"));
        let rev: Vec<CurvePoint> = pts.into_iter().rev().collect();
        assert!(BoundCurve::new(rev).is_err());
    }
}

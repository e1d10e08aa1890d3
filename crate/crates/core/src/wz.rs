//! Wyner–Ziv rate-distortion curve for small alphabets, the zero-rate
//! distortion `D_max` and the time-sharing line `D̄(R)`.
//!
//! The curve is traced by alternating minimisation of the Lagrangian
//! `I(X;Z|Y) + s E rho(X, g(Z,Y))` over `p(z|x)`, an auxiliary `q(z|y)` and
//! the decoder `g`. Each block update lowers the Lagrangian, but the problem
//! is not convex, so the result is an achievable (upper) approximation of
//! `R_WZ`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    conditional_entropy_x_given_y, joint_distribution, Channel, DistortionMeasure, Source,
};
use crate::rd::{convex_envelope, fmt_float, CURVE_HEADER};

/// Largest source alphabet accepted by [`wz_rd_curve`].
pub const WZ_MAX_ALPHABET: usize = 6;

fn check_dims(source: &Source, channel: &Channel, distortion: &DistortionMeasure) -> Result<usize> {
    let k = source.size();
    for got in [channel.size(), distortion.size()] {
        if got != k {
            return Err(Error::DimensionMismatch { expected: k, got });
        }
    }
    Ok(k)
}

/// Smallest distortion attainable from the side information alone:
/// `sum_y min_xhat sum_x p(x) p(y|x) rho(x, xhat)`.
pub fn zero_rate_distortion(
    source: &Source,
    channel: &Channel,
    distortion: &DistortionMeasure,
) -> Result<f64> {
    let k = check_dims(source, channel, distortion)?;
    let px = source.pmf();
    Ok((0..k)
        .map(|y| {
            (0..k)
                .map(|xh| (0..k).map(|x| px[x] * channel.prob(x, y) * distortion.get(x, xh)).sum())
                .fold(f64::INFINITY, f64::min)
        })
        .sum())
}

/// `D̄(R) = D_max (1 - R / H(X|Y))` on `[0, H(X|Y)]` and 0 beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DBarLine {
    pub d_max: f64,
    pub h_x_given_y: f64,
    /// Set when `H(X|Y) = 0`; the line is then identically zero.
    pub degenerate: bool,
}

impl DBarLine {
    pub fn eval(&self, rate: f64) -> f64 {
        if self.degenerate || rate >= self.h_x_given_y {
            return 0.0;
        }
        self.d_max * (1.0 - rate.max(0.0) / self.h_x_given_y)
    }
}

/// Time-sharing line between the zero-rate point `(0, D_max)` and the
/// lossless point `(H(X|Y), 0)`.
pub fn d_bar_line(
    source: &Source,
    channel: &Channel,
    distortion: &DistortionMeasure,
) -> Result<DBarLine> {
    let d_max = zero_rate_distortion(source, channel, distortion)?;
    let h = conditional_entropy_x_given_y(&joint_distribution(source, channel)?);
    let degenerate = h <= 1e-12;
    if degenerate {
        log::warn!("H(X|Y) = 0, the time-sharing line is identically zero");
    }
    Ok(DBarLine {
        d_max,
        h_x_given_y: h,
        degenerate,
    })
}

/// Settings of the alternating solver.
#[derive(Debug, Clone, PartialEq)]
pub struct WzOptions {
    /// Auxiliary alphabet size; `K + 1` when unset.
    pub z_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// Lagrange multipliers on distortion, in nats per unit distortion.
    pub multipliers: Vec<f64>,
    pub max_iter: usize,
    /// Relative change of the Lagrangian below which a run stops.
    pub tol: f64,
}

impl Default for WzOptions {
    fn default() -> Self {
        WzOptions {
            z_size: None,
            restarts: 32,
            seed: 0,
            multipliers: log_grid(1e-2, 1e3, 40),
            max_iter: 10_000,
            tol: 1e-9,
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Points `(distortion, rate)` of the lower convex hull of everything the
/// solver reached, in increasing distortion and decreasing rate.
#[derive(Debug, Clone, PartialEq)]
pub struct WzCurve {
    pub points: Vec<(f64, f64)>,
    pub restarts_used: usize,
    /// Whether the run behind each point met the tolerance. The two anchor
    /// points are exact and always flagged true.
    pub converged: Vec<bool>,
}

impl WzCurve {
    /// Curve rate at distortion `d`, or `None` below the smallest
    /// distortion reached.
    pub fn rate_at(&self, d: f64) -> Option<f64> {
        let v = &self.points;
        if d < v[0].0 - 1e-12 {
            return None;
        }
        for w in v.windows(2) {
            let (a, b) = (w[0], w[1]);
            if d <= b.0 {
                let t = ((d - a.0) / (b.0 - a.0)).clamp(0.0, 1.0);
                return Some(a.1 + t * (b.1 - a.1));
            }
        }
        Some(v[v.len() - 1].1)
    }

    /// Smallest distortion on the curve with rate at most `r`.
    pub fn distortion_at_rate(&self, r: f64) -> f64 {
        let v = &self.points;
        if r >= v[0].1 {
            return v[0].0;
        }
        for w in v.windows(2) {
            let (a, b) = (w[0], w[1]);
            if r >= b.1 {
                let t = (a.1 - r) / (a.1 - b.1);
                return a.0 + t * (b.0 - a.0);
            }
        }
        v[v.len() - 1].0
    }

    /// Same schema as the bound curves, rows in increasing rate, method
    /// `wz_ba`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CURVE_HEADER)?;
        for &(d, r) in self.points.iter().rev() {
            w.write_record([fmt_float(r), fmt_float(d), "wz_ba".into(), String::new()])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Problem<'a> {
    k: usize,
    nz: usize,
    px: &'a [f64],
    channel: &'a Channel,
    rho: &'a DistortionMeasure,
}

struct RunResult {
    lagrangian: f64,
    distortion: f64,
    rate_bits: f64,
    converged: bool,
}

impl Problem<'_> {
    /// `q(z|y)` induced by `p(z|x)`, indexed `[y][z]`.
    fn posterior(&self, p: &[Vec<f64>]) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|y| {
                let py: f64 = (0..self.k).map(|x| self.px[x] * self.channel.prob(x, y)).sum();
                (0..self.nz)
                    .map(|z| {
                        if py == 0.0 {
                            return 0.0;
                        }
                        (0..self.k)
                            .map(|x| self.px[x] * self.channel.prob(x, y) * p[x][z])
                            .sum::<f64>()
                            / py
                    })
                    .collect()
            })
            .collect()
    }

    /// Bayes decoder for the stochastic encoder, ties to the smallest index.
    fn decoder(&self, p: &[Vec<f64>]) -> Vec<Vec<usize>> {
        (0..self.nz)
            .map(|z| {
                (0..self.k)
                    .map(|y| {
                        let mut best = (0, f64::INFINITY);
                        for xh in 0..self.k {
                            let c: f64 = (0..self.k)
                                .map(|x| {
                                    self.px[x] * self.channel.prob(x, y) * p[x][z] * self.rho.get(x, xh)
                                })
                                .sum();
                            if c < best.1 {
                                best = (xh, c);
                            }
                        }
                        best.0
                    })
                    .collect()
            })
            .collect()
    }

    /// `(I(X;Z|Y)` in nats, distortion`)`.
    fn evaluate(&self, p: &[Vec<f64>], q: &[Vec<f64>], g: &[Vec<usize>]) -> (f64, f64) {
        let (mut rate, mut dist) = (0.0, 0.0);
        for x in 0..self.k {
            for y in 0..self.k {
                let w = self.px[x] * self.channel.prob(x, y);
                if w == 0.0 {
                    continue;
                }
                for z in 0..self.nz {
                    let pz = p[x][z];
                    if pz == 0.0 {
                        continue;
                    }
                    rate += w * pz * (pz / q[y][z]).ln();
                    dist += w * pz * self.rho.get(x, g[z][y]);
                }
            }
        }
        (rate.max(0.0), dist)
    }

    /// `p(z|x) ∝ exp(sum_y p(y|x) [ln q(z|y) - s rho(x, g(z,y))])`.
    fn update(&self, q: &[Vec<f64>], g: &[Vec<usize>], s: f64) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|x| {
                let expo: Vec<f64> = (0..self.nz)
                    .map(|z| {
                        (0..self.k)
                            .filter(|&y| self.channel.prob(x, y) > 0.0)
                            .map(|y| {
                                self.channel.prob(x, y) * (q[y][z].ln() - s * self.rho.get(x, g[z][y]))
                            })
                            .sum()
                    })
                    .collect();
                let top = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let un: Vec<f64> = expo.iter().map(|e| (e - top).exp()).collect();
                let total: f64 = un.iter().sum();
                un.into_iter().map(|u| u / total).collect()
            })
            .collect()
    }

    fn run(&self, s: f64, mut p: Vec<Vec<f64>>, max_iter: usize, tol: f64) -> RunResult {
        let mut prev = f64::INFINITY;
        let mut converged = false;
        let (mut rate, mut dist) = (0.0, 0.0);
        for it in 0..=max_iter {
            let q = self.posterior(&p);
            let g = self.decoder(&p);
            (rate, dist) = self.evaluate(&p, &q, &g);
            let l = rate + s * dist;
            if (prev - l).abs() <= tol * l.abs().max(1e-12) {
                converged = true;
                break;
            }
            prev = l;
            if it < max_iter {
                p = self.update(&q, &g, s);
            }
        }
        RunResult {
            lagrangian: rate + s * dist,
            distortion: dist,
            rate_bits: rate / std::f64::consts::LN_2,
            converged,
        }
    }
}

/// Rows mix a random deterministic assignment with random noise. Nearly
/// uniform starts sit next to the constant-`Z` fixed point and stay there.
fn random_start(rng: &mut ChaCha8Rng, k: usize, nz: usize) -> Vec<Vec<f64>> {
    let eta = rng.gen_range(0.02..0.5);
    (0..k)
        .map(|_| {
            let peak = rng.gen_range(0..nz);
            let noise: Vec<f64> = (0..nz).map(|_| rng.gen_range(0.0..1.0)).collect();
            let t: f64 = noise.iter().sum();
            (0..nz)
                .map(|z| eta * noise[z] / t + if z == peak { 1.0 - eta } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Approximate Wyner–Ziv curve by a multiplier sweep with seeded restarts.
///
/// For each multiplier the restart with the smallest Lagrangian is kept.
/// The two exact endpoints (constant `Z`, and `Z = X`) are added, and the
/// lower convex hull of all points forms the curve. The distortions are
/// the ones achieved, not targets.
pub fn wz_rd_curve(
    source: &Source,
    channel: &Channel,
    distortion: &DistortionMeasure,
    opts: &WzOptions,
) -> Result<WzCurve> {
    let k = check_dims(source, channel, distortion)?;
    if k > WZ_MAX_ALPHABET {
        return Err(Error::AlphabetTooLarge {
            k,
            cap: WZ_MAX_ALPHABET,
        });
    }
    let nz = opts.z_size.unwrap_or(k + 1);
    if nz == 0 || nz > k + 1 {
        return Err(Error::Parameter(format!(
            "auxiliary alphabet size must lie in [1, {}], got {nz}",
            k + 1
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::Parameter("at least one restart is required".into()));
    }
    if opts.multipliers.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(Error::Parameter("multipliers must be finite and nonnegative".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let problem = Problem {
        k,
        nz,
        px: source.pmf(),
        channel,
        rho: distortion,
    };

    let runs: Vec<RunResult> = opts
        .multipliers
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            (0..opts.restarts)
                .map(|r| {
                    let seed = opts.seed.wrapping_add((i * opts.restarts + r) as u64);
                    let start = random_start(&mut ChaCha8Rng::seed_from_u64(seed), k, nz);
                    problem.run(s, start, opts.max_iter, opts.tol)
                })
                .min_by(|a, b| a.lagrangian.total_cmp(&b.lagrangian))
                .expect("at least one restart")
        })
        .collect();

    let d_max = zero_rate_distortion(source, channel, distortion)?;
    let d_min: f64 = (0..k)
        .map(|x| problem.px[x] * (0..k).map(|xh| distortion.get(x, xh)).fold(f64::INFINITY, f64::min))
        .sum();
    let h = conditional_entropy_x_given_y(&joint_distribution(source, channel)?);

    // (distortion, rate, converged), keeping the smallest rate per distortion.
    let mut pts: Vec<(f64, f64, bool)> = vec![(d_max, 0.0, true), (d_min, h, true)];
    pts.extend(runs.iter().map(|r| (r.distortion, r.rate_bits, r.converged)));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|b, a| a.0 == b.0);

    let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.1)).collect();
    let hull = convex_envelope(&pairs)?;
    let points = hull.vertices().to_vec();
    let converged = points
        .iter()
        .map(|v| pts.iter().find(|p| p.0 == v.0).map_or(true, |p| p.2))
        .collect();
    Ok(WzCurve {
        points,
        restarts_used: opts.restarts,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> (Source, Channel, DistortionMeasure) {
        (
            Source::uniform(4).unwrap(),
            Channel::symmetric(4, 0.7).unwrap(),
            DistortionMeasure::hamming(4).unwrap(),
        )
    }

    #[test]
    fn zero_rate_examples() {
        let (s, c, h) = fig2();
        assert!((zero_rate_distortion(&s, &c, &h).unwrap() - 0.3).abs() < 1e-12);
        let id = Channel::identity(4).unwrap();
        assert_eq!(zero_rate_distortion(&s, &id, &h).unwrap(), 0.0);
        let flat = Channel::new(vec![vec![0.25; 4]; 4]).unwrap();
        assert!((zero_rate_distortion(&s, &flat, &h).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn d_bar_endpoints() {
        let s = Source::uniform(64).unwrap();
        let c = Channel::circular(64, 16).unwrap();
        let h = DistortionMeasure::hamming(64).unwrap();
        let line = d_bar_line(&s, &c, &h).unwrap();
        assert!((line.h_x_given_y - 4.0).abs() < 1e-12);
        assert!(!line.degenerate);
        assert_eq!(line.eval(0.0), line.d_max);
        assert_eq!(line.eval(4.0), 0.0);
        assert_eq!(line.eval(5.0), 0.0);
        assert!((line.eval(2.0) - line.d_max / 2.0).abs() < 1e-15);

        let id = Channel::identity(64).unwrap();
        let line = d_bar_line(&s, &id, &h).unwrap();
        assert!(line.degenerate);
        assert_eq!(line.eval(0.0), 0.0);
    }

    #[test]
    fn alphabet_cap() {
        let s = Source::uniform(7).unwrap();
        let c = Channel::symmetric(7, 0.5).unwrap();
        let h = DistortionMeasure::hamming(7).unwrap();
        assert!(matches!(
            wz_rd_curve(&s, &c, &h, &WzOptions::default()),
            Err(Error::AlphabetTooLarge { k: 7, cap: 6 })
        ));
    }

    fn quick() -> WzOptions {
        WzOptions {
            restarts: 6,
            multipliers: log_grid(1e-1, 1e2, 16),
            ..WzOptions::default()
        }
    }

    #[test]
    fn curve_shape_and_endpoints() {
        let (s, c, h) = fig2();
        let curve = wz_rd_curve(&s, &c, &h, &quick()).unwrap();
        let hxy = conditional_entropy_x_given_y(&joint_distribution(&s, &c).unwrap());
        assert!(curve.rate_at(0.3).unwrap().abs() < 1e-3);
        assert!((curve.rate_at(0.0).unwrap() - hxy).abs() < 1e-2);
        assert!(curve.rate_at(-0.01).is_none());
        for w in curve.points.windows(2) {
            assert!(w[1].0 > w[0].0 && w[1].1 < w[0].1);
        }
        assert!(curve.points.iter().all(|p| p.1 >= 0.0));
        assert_eq!(curve.converged.len(), curve.points.len());
        // The alternating solver should improve on plain time sharing.
        let line = d_bar_line(&s, &c, &h).unwrap();
        let mid = curve.distortion_at_rate(0.5 * hxy);
        assert!(mid <= line.eval(0.5 * hxy) + 1e-2);
        assert!(mid < line.eval(0.5 * hxy) - 1e-3);
    }

    #[test]
    fn inverse_is_consistent() {
        let (s, c, h) = fig2();
        let curve = wz_rd_curve(&s, &c, &h, &quick()).unwrap();
        for i in 0..=30 {
            let d = 0.3 * i as f64 / 30.0;
            let r = curve.rate_at(d).unwrap();
            assert!((curve.distortion_at_rate(r) - d).abs() < 1e-9 || r == 0.0);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let (s, c, h) = fig2();
        let a = wz_rd_curve(&s, &c, &h, &quick()).unwrap();
        let b = wz_rd_curve(&s, &c, &h, &quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identity_side_information_needs_no_rate() {
        let s = Source::uniform(3).unwrap();
        let c = Channel::identity(3).unwrap();
        let h = DistortionMeasure::hamming(3).unwrap();
        let curve = wz_rd_curve(&s, &c, &h, &quick()).unwrap();
        assert_eq!(curve.points, vec![(0.0, 0.0)]);
    }

    #[test]
    fn csv_rows_in_increasing_rate() {
        let (s, c, h) = fig2();
        let curve = wz_rd_curve(&s, &c, &h, &quick()).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "rate_bits,distortion_lower,method,alpha");
        let rates: Vec<f64> = lines
            .map(|l| {
                assert!(l.ends_with(",wz_ba,"));
                l.split(',').next().unwrap().parse().unwrap()
            })
            .collect();
        assert_eq!(rates.len(), curve.points.len());
        assert!(rates.windows(2).all(|w| w[1] > w[0]));
    }
}

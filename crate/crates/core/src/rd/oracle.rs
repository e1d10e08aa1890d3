//! General-purpose numerical minimiser for `R^Q(D)`, used to cross-check the
//! closed forms. It is slow and makes no use of structure.
//!
//! The objective over row-stochastic test channels `W[x][xhat]` is
//!
//! ```text
//! F(W) = sum_{x,xhat} p(x) W[x][xhat] Q( r[xhat] / W[x][xhat] ),
//! r[xhat] = sum_x p(x) W[x][xhat],
//! ```
//!
//! which is convex in `W`. The distortion constraint is moved into the
//! objective with a multiplier `s >= 0`:
//! `L_s(W) = F(W) + s * sum p(x) rho(x,xhat) W[x][xhat]`. For each `s` the
//! inner problem over the product of row simplices is solved by entropic
//! projected gradient (multiplicative updates with a backtracking step),
//! stopped by the Frank–Wolfe gap, which bounds the suboptimality. The
//! outer loop bisects on `s` until the minimiser meets the distortion
//! level, and the best dual value `min_W L_s(W) - s D` is returned.

use crate::error::{Error, Result};
use crate::model::{DistortionMeasure, QFunction, Source};

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Iteration cap of each inner solve.
    pub max_iter: usize,
    /// Frank–Wolfe gap at which an inner solve stops.
    pub gap_tol: f64,
    /// Number of bisection steps on the multiplier.
    pub outer_steps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_iter: 100_000,
            gap_tol: 1e-10,
            outer_steps: 100,
        }
    }
}

type Mat = Vec<Vec<f64>>;

struct Problem<'a> {
    px: &'a [f64],
    /// `p(x) rho(x, xhat)`.
    cost: Mat,
    q: QFunction,
}

struct Inner {
    w: Mat,
    /// `L_s(w)`.
    value: f64,
    gap: f64,
}

impl Problem<'_> {
    fn k(&self) -> usize {
        self.px.len()
    }

    fn columns(&self, w: &Mat) -> Vec<f64> {
        let k = self.k();
        (0..k)
            .map(|j| (0..k).map(|x| self.px[x] * w[x][j]).sum())
            .collect()
    }

    fn objective(&self, w: &Mat) -> f64 {
        let r = self.columns(w);
        let mut f = 0.0;
        for (x, row) in w.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                f += self.px[x] * self.q.weighted(v, r[j]);
            }
        }
        f
    }

    fn distortion(&self, w: &Mat) -> f64 {
        w.iter()
            .zip(&self.cost)
            .map(|(a, c)| a.iter().zip(c).map(|(u, v)| u * v).sum::<f64>())
            .sum()
    }

    fn lagrangian(&self, w: &Mat, s: f64) -> f64 {
        self.objective(w) + s * self.distortion(w)
    }

    /// Gradient of `L_s` at a point with positive entries.
    fn gradient(&self, w: &Mat, s: f64) -> Mat {
        let k = self.k();
        let r = self.columns(w);
        let col: Vec<f64> = (0..k)
            .map(|j| {
                (0..k)
                    .filter(|&x| w[x][j] > 0.0)
                    .map(|x| self.px[x] * self.q.derivative(r[j] / w[x][j]))
                    .sum()
            })
            .collect();
        (0..k)
            .map(|x| {
                (0..k)
                    .map(|j| {
                        let slope = if w[x][j] > 0.0 {
                            self.q.perspective_slope(r[j] / w[x][j])
                        } else {
                            self.q.perspective_slope_at_infinity()
                        };
                        self.px[x] * (slope + col[j]) + s * self.cost[x][j]
                    })
                    .collect()
            })
            .collect()
    }

    /// Minimises `L_s` over row-stochastic matrices starting from `w`.
    fn solve_inner(&self, mut w: Mat, s: f64, opts: &OracleOptions) -> Inner {
        let mut value = self.lagrangian(&w, s);
        let mut eta = 1.0f64;
        let mut gap = f64::INFINITY;
        for _ in 0..opts.max_iter {
            let g = self.gradient(&w, s);
            // Frank–Wolfe gap: sum_x [ <g_x, w_x> - min_j g_x[j] ].
            gap = g
                .iter()
                .zip(&w)
                .map(|(gr, wr)| {
                    let lin: f64 = gr.iter().zip(wr).map(|(a, b)| a * b).sum();
                    lin - gr.iter().copied().fold(f64::INFINITY, f64::min)
                })
                .sum();
            if gap <= opts.gap_tol {
                break;
            }
            let mut accepted = false;
            for _ in 0..60 {
                let next = mirror_step(&w, &g, eta);
                let v = self.lagrangian(&next, s);
                let lin: f64 = inner(&g, &sub(&next, &w));
                let kl = kl_rows(&next, &w);
                if v.is_finite() && v <= value + lin + kl / eta + 1e-15 * value.abs().max(1.0) {
                    w = next;
                    value = v;
                    eta *= 1.5;
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Inner { w, value, gap }
    }
}

/// `w[x][j] * exp(-eta g[x][j])`, renormalised per row. Entries are kept
/// strictly positive so the gradient stays finite for `-log2`.
fn mirror_step(w: &Mat, g: &Mat, eta: f64) -> Mat {
    w.iter()
        .zip(g)
        .map(|(wr, gr)| {
            let m = gr.iter().copied().fold(f64::INFINITY, f64::min);
            let raw: Vec<f64> = wr
                .iter()
                .zip(gr)
                .map(|(a, b)| (a * (-eta * (b - m)).exp()).max(1e-300))
                .collect();
            let z: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / z).collect()
        })
        .collect()
}

fn kl_rows(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb))
        .filter(|(u, _)| **u > 0.0)
        .map(|(u, v)| u * (u / v).ln())
        .sum()
}

fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, g)| r.iter().zip(g).map(|(u, v)| u - v).collect())
        .collect()
}

fn inner(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b)
        .map(|(r, g)| r.iter().zip(g).map(|(u, v)| u * v).sum::<f64>())
        .sum()
}

/// Numerical `R^Q(D)` for an arbitrary source and distortion measure.
pub fn rq_numeric_oracle(
    source: &Source,
    distortion: &DistortionMeasure,
    d: f64,
    q: &QFunction,
) -> Result<f64> {
    rq_numeric_oracle_with(source, distortion, d, q, OracleOptions::default())
}

pub fn rq_numeric_oracle_with(
    source: &Source,
    distortion: &DistortionMeasure,
    d: f64,
    q: &QFunction,
    opts: OracleOptions,
) -> Result<f64> {
    let k = source.size();
    if distortion.size() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: distortion.size(),
        });
    }
    let px = source.pmf();
    let dmin: f64 = (0..k)
        .map(|x| px[x] * distortion.rows()[x].iter().copied().fold(f64::INFINITY, f64::min))
        .sum();
    if !(d >= dmin - 1e-12) {
        return Err(Error::Domain(format!(
            "distortion {d} below the smallest achievable value {dmin}"
        )));
    }
    // A constant reconstruction gives I^Q = Q(1), the global minimum.
    let best_constant = (0..k)
        .map(|j| (0..k).map(|x| px[x] * distortion.get(x, j)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    if d >= best_constant {
        return Ok(q.value(1.0));
    }

    let prob = Problem {
        px,
        cost: (0..k)
            .map(|x| (0..k).map(|j| px[x] * distortion.get(x, j)).collect())
            .collect(),
        q: *q,
    };
    let uniform = vec![vec![1.0 / k as f64; k]; k];

    // Dual value at s, with the inner optimum's certified slack removed.
    let mut best_dual = f64::NEG_INFINITY;
    let mut dual = |sol: &Inner, s: f64| {
        best_dual = best_dual.max(sol.value - sol.gap - s * d);
    };

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut w_hi = prob.solve_inner(uniform.clone(), hi, &opts);
    dual(&w_hi, hi);
    while prob.distortion(&w_hi.w) > d {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NonConvergence {
                what: "distortion multiplier bracket in the numeric oracle".into(),
                residual: prob.distortion(&w_hi.w) - d,
            });
        }
        w_hi = prob.solve_inner(w_hi.w, hi, &opts);
        dual(&w_hi, hi);
    }
    let mut warm = w_hi.w.clone();
    for _ in 0..opts.outer_steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let sol = prob.solve_inner(warm, mid, &opts);
        dual(&sol, mid);
        if prob.distortion(&sol.w) > d {
            lo = mid;
        } else {
            hi = mid;
        }
        warm = sol.w;
    }
    if !best_dual.is_finite() {
        return Err(Error::NonConvergence {
            what: "numeric oracle".into(),
            residual: f64::NAN,
        });
    }
    Ok(best_dual)
}

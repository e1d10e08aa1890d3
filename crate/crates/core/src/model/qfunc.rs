//! Convex, non-increasing functionals `Q` used in place of `-log` inside
//! mutual information.
//!
//! Three families are supported:
//!
//! - `NegLog`: `Q(t) = -log2 t`, recovering Shannon mutual information in bits.
//! - `Power { alpha }`: `Q(t) = t^(1 - alpha)`, `alpha > 1` (the Rényi family).
//! - `InversePower { s }`: `Q(t) = t^(-s)`, `s > 0`.
//!
//! Every family satisfies `lim_{t -> 0} t * Q(1/t) = 0`, which is what makes the
//! convention `0 * Q(r / 0) = 0` consistent. [`QFunction::weighted`] implements
//! that convention so callers never evaluate `Q` on `r/0` or `0/0`.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QFunction {
    NegLog,
    Power { alpha: f64 },
    InversePower { s: f64 },
}

impl fmt::Display for QFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QFunction::NegLog => write!(f, "neg_log"),
            QFunction::Power { alpha } => write!(f, "power(alpha={alpha})"),
            QFunction::InversePower { s } => write!(f, "inverse_power(s={s})"),
        }
    }
}

impl QFunction {
    pub fn neg_log() -> Self {
        QFunction::NegLog
    }

    /// `Q(t) = t^(1 - alpha)`; requires `alpha > 1`.
    pub fn power(alpha: f64) -> Result<Self> {
        let q = QFunction::Power { alpha };
        q.validate()?;
        Ok(q)
    }

    /// `Q(t) = t^(-s)`; requires `s > 0`.
    pub fn inverse_power(s: f64) -> Result<Self> {
        let q = QFunction::InversePower { s };
        q.validate()?;
        Ok(q)
    }

    /// Checks the parameter range, then probes convexity, monotonicity and the
    /// `t * Q(1/t) -> 0` limit on a geometric grid.
    pub fn validate(&self) -> Result<()> {
        match *self {
            QFunction::NegLog => {}
            QFunction::Power { alpha } => {
                if !(alpha.is_finite() && alpha > 1.0) {
                    return Err(Error::Parameter(format!(
                        "power q-function needs alpha > 1, got {alpha}"
                    )));
                }
            }
            QFunction::InversePower { s } => {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Parameter(format!(
                        "inverse-power q-function needs s > 0, got {s}"
                    )));
                }
            }
        }

        let grid: Vec<f64> = (-12..=12).map(|e| 2f64.powf(f64::from(e) / 2.0)).collect();
        for w in grid.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let (qa, qb, qc) = (self.value(a), self.value(b), self.value(c));
            let scale = 1.0 + qa.abs() + qc.abs();
            if qb > qa + 1e-12 * scale {
                return Err(Error::Parameter(format!("{self} is increasing near t={b}")));
            }
            // Convexity on a non-uniform grid: b lies between a and c.
            let lam = (c - b) / (c - a);
            if qb > lam * qa + (1.0 - lam) * qc + 1e-12 * scale {
                return Err(Error::Parameter(format!("{self} is not convex near t={b}")));
            }
        }
        let tail = 1e-12 * self.value(1e12);
        if !(tail.abs() < 1e-6) {
            return Err(Error::Parameter(format!(
                "{self} violates t*Q(1/t) -> 0 (value {tail:e} at t=1e-12)"
            )));
        }
        Ok(())
    }

    /// `alpha` for the power family, `None` otherwise.
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            QFunction::Power { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// Power functionals give useful distortion bounds only for `1 < alpha < 2`.
    /// Evaluation outside that window is allowed; this flags it.
    pub fn in_bound_range(&self) -> bool {
        match *self {
            QFunction::Power { alpha } => alpha > 1.0 && alpha < 2.0,
            _ => true,
        }
    }

    /// `Q(t)` for `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("Q evaluated at negative argument {t}")));
        }
        Ok(self.value(t))
    }

    /// Unchecked `Q(t)`; `t = 0` yields `+inf` for every family.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            QFunction::NegLog => -t.log2(),
            QFunction::Power { alpha } => t.powf(1.0 - alpha),
            QFunction::InversePower { s } => t.powf(-s),
        }
    }

    /// `Q'(t)`.
    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            QFunction::NegLog => -1.0 / (t * LN_2),
            QFunction::Power { alpha } => (1.0 - alpha) * t.powf(-alpha),
            QFunction::InversePower { s } => -s * t.powf(-s - 1.0),
        }
    }

    /// `Q''(t)`.
    #[inline]
    pub fn second_derivative(&self, t: f64) -> f64 {
        match *self {
            QFunction::NegLog => 1.0 / (t * t * LN_2),
            QFunction::Power { alpha } => (1.0 - alpha) * (-alpha) * t.powf(-alpha - 1.0),
            QFunction::InversePower { s } => s * (s + 1.0) * t.powf(-s - 2.0),
        }
    }

    /// `w * Q(r / w)` with the convention that the product is zero when `w = 0`.
    #[inline]
    pub fn weighted(&self, w: f64, r: f64) -> f64 {
        if w == 0.0 {
            0.0
        } else {
            w * self.value(r / w)
        }
    }

    /// `Q(u) - u Q'(u)`, the derivative of `p -> p Q(1/(K p))` written in
    /// terms of `u = 1/(K p)`. Non-increasing in `u`.
    #[inline]
    pub fn perspective_slope(&self, u: f64) -> f64 {
        match *self {
            QFunction::NegLog => -u.log2() + 1.0 / LN_2,
            QFunction::Power { alpha } => alpha * u.powf(1.0 - alpha),
            QFunction::InversePower { s } => (1.0 + s) * u.powf(-s),
        }
    }

    /// Limit of [`Self::perspective_slope`] as `u -> inf`.
    pub fn perspective_slope_at_infinity(&self) -> f64 {
        match *self {
            QFunction::NegLog => f64::NEG_INFINITY,
            QFunction::Power { .. } | QFunction::InversePower { .. } => 0.0,
        }
    }
}

//! The generalized capacity `C^Q(M) = sup I^Q(X;Y,Z)` over encoders with
//! `M` cells, plus the classical counterpart `I(X;Y) + sup H(Z|Y)`.
//!
//! Exact values come from exhaustive search over set partitions. The Hölder
//! bound and the two channel-specific closed forms avoid the search.

use std::fmt;

use serde::Serialize;

use crate::codes::modular_encoder;
use crate::error::{Error, Result};
use crate::gmi::iq_xyz_deterministic;
use crate::model::{
    conditional_entropy_x_given_y, joint_distribution, mutual_information, Channel,
    DeterministicEncoder, JointPmf, QFunction, Source,
};
use crate::partition::{argmax_partition, SearchBudget};

/// How a capacity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Holder,
    SymmetricClosedForm,
    CircularClosedForm,
    ClassicalDpt,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::BruteForce => "brute_force",
            Method::Holder => "holder",
            Method::SymmetricClosedForm => "symmetric_closed_form",
            Method::CircularClosedForm => "circular_closed_form",
            Method::ClassicalDpt => "classical_dpt",
        })
    }
}

/// A capacity value in the units of `Q`.
///
/// `witness` is present exactly when the value is attained, in which case
/// `I^Q` of the witness equals `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub value: f64,
    pub method: Method,
    pub witness: Option<DeterministicEncoder>,
    pub is_upper_bound: bool,
}

fn check_cells(k: usize, m: usize) -> Result<()> {
    if m == 0 || m > k {
        return Err(Error::Parameter(format!(
            "number of cells must satisfy 1 <= M <= K, got M={m}, K={k}"
        )));
    }
    Ok(())
}

/// Exact `C^Q` by enumerating every partition into `m` nonempty cells.
/// Ties go to the first partition in restricted-growth order.
pub fn brute_force_cq(
    source: &Source,
    channel: &Channel,
    m: usize,
    q: &QFunction,
    budget: SearchBudget,
) -> Result<CapacityResult> {
    let k = source.size();
    if channel.size() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: channel.size(),
        });
    }
    check_cells(k, m)?;
    let (value, enc) = argmax_partition(k, m, budget, |e| {
        iq_xyz_deterministic(source, channel, e, q)
            .expect("dimensions checked above")
            .value
    })?;
    Ok(CapacityResult {
        value,
        method: Method::BruteForce,
        witness: Some(enc),
        is_upper_bound: false,
    })
}

/// Hölder upper bound on `C^Q` for `Q(t) = t^(1 - alpha)`:
/// `M^(alpha-1) sum_y ( sum_x p(x) p(y|x)^(1/(2-alpha)) )^(2-alpha)`.
pub fn holder_bound(
    source: &Source,
    channel: &Channel,
    m: usize,
    alpha: f64,
) -> Result<CapacityResult> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "Hölder bound needs 1 < alpha < 2, got {alpha}"
        )));
    }
    if m == 0 {
        return Err(Error::Parameter("M must be at least 1".into()));
    }
    let k = source.size();
    if channel.size() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: channel.size(),
        });
    }
    let r = 1.0 / (2.0 - alpha);
    let px = source.pmf();
    let mut total = 0.0;
    for y in 0..k {
        // Scale by the column maximum so p^r does not underflow as alpha -> 2.
        let top = (0..k)
            .filter(|&x| px[x] > 0.0)
            .map(|x| channel.prob(x, y))
            .fold(0.0, f64::max);
        if top == 0.0 {
            continue;
        }
        let s: f64 = (0..k).map(|x| px[x] * (channel.prob(x, y) / top).powf(r)).sum();
        total += top * s.powf(2.0 - alpha);
    }
    Ok(CapacityResult {
        value: (m as f64).powf(alpha - 1.0) * total,
        method: Method::Holder,
        witness: None,
        is_upper_bound: true,
    })
}

/// Rényi-converted Hölder bound evaluated just above `alpha = 1`; tends to
/// `log2 M + I(X;Y)` bits.
pub fn holder_alpha_limit(source: &Source, channel: &Channel, m: usize) -> Result<f64> {
    let alpha = 1.0 + 1e-4;
    let b = holder_bound(source, channel, m, alpha)?;
    Ok(b.value.log2() / (alpha - 1.0))
}

/// `eps * q_alpha(x)` for the symmetric channel, written so that it stays
/// finite at `mu = 1`.
fn scaled_q_alpha(k: usize, mu: f64, alpha: f64, x: f64) -> f64 {
    let eps = (1.0 - mu) / (k - 1) as f64;
    let inside = x * (eps.powf(alpha) * (x - 1.0) + mu.powf(alpha))
        / (eps * (x - 1.0) + mu).powf(alpha - 1.0);
    inside + (k as f64 - x) * eps * x.powf(2.0 - alpha)
}

/// `q_alpha(x) = x (x + mu^a/eps^a - 1) / (x + mu/eps - 1)^(a-1) + (K - x) x^(2-a)`
/// for the symmetric channel with `eps = (1 - mu)/(K - 1)`. A cell of size
/// `x` contributes `K^(a-2) eps q_alpha(x)` to `I^Q` under a uniform source.
pub fn q_alpha(k: usize, mu: f64, alpha: f64, x: f64) -> Result<f64> {
    check_symmetric(k, mu)?;
    if mu == 1.0 {
        return Err(Error::Domain(
            "q_alpha is unbounded for a noiseless channel (eps = 0)".into(),
        ));
    }
    let eps = (1.0 - mu) / (k - 1) as f64;
    Ok(scaled_q_alpha(k, mu, alpha, x) / eps)
}

fn check_symmetric(k: usize, mu: f64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidAlphabet(k));
    }
    if !(mu > 1.0 / k as f64 && mu <= 1.0) {
        return Err(Error::Parameter(format!(
            "symmetric channel needs 1/K < mu <= 1, got mu={mu} with K={k}"
        )));
    }
    Ok(())
}

/// Integer second differences of `q_alpha` on `x = 1..=K-M+1` are all <= 0,
/// up to rounding.
pub fn q_alpha_is_concave(k: usize, mu: f64, m: usize, alpha: f64) -> bool {
    let top = k - m + 1;
    let vals: Vec<f64> = (1..=top).map(|x| scaled_q_alpha(k, mu, alpha, x as f64)).collect();
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    vals.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] <= 1e-12 * scale)
}

/// Multisets of `m` positive integers summing to `k`, as nonincreasing lists.
fn integer_partitions(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // Each remaining part is at least 1 and at most `cap`.
        let hi = cap.min(left + 1 - parts);
        let lo = left.div_ceil(parts);
        for v in (lo..=hi).rev() {
            cur.push(v);
            rec(left - v, parts - 1, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, m, k, &mut Vec::new(), &mut out);
    out
}

/// `C^Q` for a uniform source through the `K`-ary symmetric channel with
/// `Q(t) = t^(1 - alpha)`.
///
/// Under the uniform source, `I^Q` of a partition depends only on its cell
/// sizes `M_z` and equals `K^(a-2) sum_z eps q_alpha(M_z)`. When `q_alpha` is
/// concave, equal cells `M_z = K/M` maximise the sum; the result is exact if
/// `M` divides `K` and an upper bound otherwise. When concavity fails the
/// sum is maximised over integer cell sizes directly, which is exact.
pub fn symmetric_cq_closed_form(k: usize, mu: f64, m: usize, alpha: f64) -> Result<CapacityResult> {
    check_symmetric(k, mu)?;
    check_cells(k, m)?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("need alpha > 1, got {alpha}")));
    }
    let pre = (k as f64).powf(alpha - 2.0);
    if q_alpha_is_concave(k, mu, m, alpha) {
        let x = k as f64 / m as f64;
        let value = pre * m as f64 * scaled_q_alpha(k, mu, alpha, x);
        let exact = k % m == 0;
        let witness = exact
            .then(|| DeterministicEncoder::contiguous(&vec![k / m; m]))
            .transpose()?;
        return Ok(CapacityResult {
            value,
            method: Method::SymmetricClosedForm,
            witness,
            is_upper_bound: !exact,
        });
    }
    let (value, sizes) = integer_partitions(k, m)
        .into_iter()
        .map(|sizes| {
            let v: f64 = sizes.iter().map(|&n| scaled_q_alpha(k, mu, alpha, n as f64)).sum();
            (pre * v, sizes)
        })
        .fold(None, |best: Option<(f64, Vec<usize>)>, cand| match best {
            Some(b) if b.0 >= cand.0 => Some(b),
            _ => Some(cand),
        })
        .expect("at least one composition exists for 1 <= M <= K");
    Ok(CapacityResult {
        value,
        method: Method::SymmetricClosedForm,
        witness: Some(DeterministicEncoder::contiguous(&sizes)?),
        is_upper_bound: false,
    })
}

/// `C^Q` for a uniform source through the circular channel with window `l`:
/// `K^(a-1) (M/l)^(a-1)`.
///
/// The value coincides with the Hölder bound. It is attained by the modular
/// encoder when `M` divides both `l` and `K`; then every cell meets each
/// output window in exactly `l/M` symbols. Otherwise it is reported as an
/// upper bound. For `alpha >= 2` the capacity is unbounded and the value is
/// `+inf`.
pub fn circular_cq(k: usize, l: usize, m: usize, alpha: f64) -> Result<CapacityResult> {
    if k < 2 {
        return Err(Error::InvalidAlphabet(k));
    }
    if l == 0 || l >= k {
        return Err(Error::Parameter(format!(
            "circular channel needs 0 < l < K, got l={l} with K={k}"
        )));
    }
    if m == 0 {
        return Err(Error::Parameter("M must be at least 1".into()));
    }
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("need alpha > 1, got {alpha}")));
    }
    if alpha >= 2.0 {
        return Ok(CapacityResult {
            value: f64::INFINITY,
            method: Method::CircularClosedForm,
            witness: None,
            is_upper_bound: true,
        });
    }
    let value = ((k as f64) * (m as f64) / l as f64).powf(alpha - 1.0);
    let exact = l % m == 0 && k % m == 0 && m <= k;
    let witness = if exact { Some(modular_encoder(k, m)?) } else { None };
    Ok(CapacityResult {
        value,
        method: Method::CircularClosedForm,
        witness,
        is_upper_bound: !exact,
    })
}

/// `H(Z|Y)` in bits for `Z = f(X)`.
pub fn h_z_given_y(source: &Source, channel: &Channel, encoder: &DeterministicEncoder) -> Result<f64> {
    let joint = joint_distribution(source, channel)?;
    Ok(h_z_given_y_from_joint(&joint, encoder))
}

fn h_z_given_y_from_joint(joint: &JointPmf, encoder: &DeterministicEncoder) -> f64 {
    let k = joint.size();
    // Pad the (z, y) table to K x K so the square-joint helper applies.
    let mut zy = vec![vec![0.0; k]; k];
    for x in 0..k {
        for y in 0..k {
            zy[encoder.cell_of(x)][y] += joint.get(x, y);
        }
    }
    conditional_entropy_x_given_y(&JointPmf::new(zy).expect("masses of a valid joint"))
}

/// Exact `max H(Z|Y)` over partitions into `m` cells, with the maximiser.
pub fn sup_h_z_given_y(
    source: &Source,
    channel: &Channel,
    m: usize,
    budget: SearchBudget,
) -> Result<(f64, DeterministicEncoder)> {
    let joint = joint_distribution(source, channel)?;
    check_cells(joint.size(), m)?;
    argmax_partition(joint.size(), m, budget, |e| h_z_given_y_from_joint(&joint, e))
}

/// `I(X;Y) + sup H(Z|Y)` in bits.
pub fn classical_dpt_capacity(
    source: &Source,
    channel: &Channel,
    m: usize,
    budget: SearchBudget,
) -> Result<CapacityResult> {
    let joint = joint_distribution(source, channel)?;
    let (h, enc) = sup_h_z_given_y(source, channel, m, budget)?;
    Ok(CapacityResult {
        value: mutual_information(&joint) + h,
        method: Method::ClassicalDpt,
        witness: Some(enc),
        is_upper_bound: false,
    })
}

//! Generalized mutual information `I^Q`.
//!
//! For a convex, non-increasing `Q`,
//! `I^Q(X;Y) = sum_{x,y} p(x,y) Q(p(y) / p(y|x))`. With `Q = -log2` this is
//! Shannon mutual information in bits.
//!
//! The triple functional `I^Q(X;Y,Z)` is computed directly from its
//! definition for both deterministic and randomised encoders. Sums run
//! x-major, then y, then z, so results are bit-reproducible.

use crate::error::{Error, Result};
use crate::model::{
    Channel, DeterministicEncoder, JointPmf, QFunction, Source, StochasticEncoder,
};

/// A value of `I^Q` tagged with the functional that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmiValue {
    pub value: f64,
    pub q: QFunction,
}

/// `Q(t)` with a domain check.
pub fn q_eval(q: &QFunction, t: f64) -> Result<f64> {
    q.eval(t)
}

/// `w * Q(r / w)`, zero when `w = 0`.
pub fn q_weighted(q: &QFunction, w: f64, r: f64) -> f64 {
    q.weighted(w, r)
}

/// `I^Q(X;Y)` of a joint pmf.
pub fn generalized_mi(joint: &JointPmf, q: &QFunction) -> GmiValue {
    let px = joint.marginal_x();
    let py = joint.marginal_y();
    let mut value = 0.0;
    for (x, row) in joint.rows().iter().enumerate() {
        if px[x] == 0.0 {
            continue;
        }
        for (y, &pxy) in row.iter().enumerate() {
            // p(x,y) Q(p(y)/p(y|x)) = p(x) * [p(y|x) Q(p(y)/p(y|x))]
            value += px[x] * q.weighted(pxy / px[x], py[y]);
        }
    }
    GmiValue { value, q: *q }
}

fn check_dims(source: &Source, channel: &Channel, enc_k: usize) -> Result<usize> {
    let k = source.size();
    for got in [channel.size(), enc_k] {
        if got != k {
            return Err(Error::DimensionMismatch { expected: k, got });
        }
    }
    Ok(k)
}

/// `I^Q(X;Y,Z)` for `Z = f(X)`:
/// `sum_{x,y} p(x,y) Q( sum_{x' in A_f(x)} p(x',y) / p(y|x) )`.
pub fn iq_xyz_deterministic(
    source: &Source,
    channel: &Channel,
    encoder: &DeterministicEncoder,
    q: &QFunction,
) -> Result<GmiValue> {
    let k = check_dims(source, channel, encoder.source_size())?;
    let px = source.pmf();
    // cell_mass[z][y] = sum_{x in A_z} p(x) p(y|x)
    let mut cell_mass = vec![vec![0.0; k]; encoder.cells()];
    for x in 0..k {
        let z = encoder.cell_of(x);
        for y in 0..k {
            cell_mass[z][y] += px[x] * channel.prob(x, y);
        }
    }
    let mut value = 0.0;
    for x in 0..k {
        let z = encoder.cell_of(x);
        for y in 0..k {
            value += px[x] * q.weighted(channel.prob(x, y), cell_mass[z][y]);
        }
    }
    Ok(GmiValue { value, q: *q })
}

/// `I^Q(X;Y,Z)` for a randomised encoder `p(z|x)`:
/// `sum_{x,y,z} p(x)p(y|x)p(z|x) Q( sum_x' p(x')p(y|x')p(z|x') / (p(y|x)p(z|x)) )`.
pub fn iq_xyz_stochastic(
    source: &Source,
    channel: &Channel,
    encoder: &StochasticEncoder,
    q: &QFunction,
) -> Result<GmiValue> {
    let k = check_dims(source, channel, encoder.source_size())?;
    let m = encoder.cells();
    let px = source.pmf();
    let mut mass = vec![vec![0.0; m]; k];
    for x in 0..k {
        for y in 0..k {
            let pxy = px[x] * channel.prob(x, y);
            for z in 0..m {
                mass[y][z] += pxy * encoder.prob(x, z);
            }
        }
    }
    let mut value = 0.0;
    for x in 0..k {
        for y in 0..k {
            for z in 0..m {
                let w = channel.prob(x, y) * encoder.prob(x, z);
                value += px[x] * q.weighted(w, mass[y][z]);
            }
        }
    }
    Ok(GmiValue { value, q: *q })
}

/// `G_y(p_z) = sum_x p(x) p(y|x) p_z[x] Q( <p_z, pbar_y> / (p(y|x) p_z[x]) )`,
/// where `pbar_y[x] = p(x) p(y|x)`.
///
/// Summing `G_y(p_z)` over `y` and over the columns `p_z` of an encoder gives
/// [`iq_xyz_stochastic`]. Each term is a perspective of `Q`, so `G_y` is
/// convex in `p_z`.
pub fn g_y(
    source: &Source,
    channel: &Channel,
    y: usize,
    p_z: &[f64],
    q: &QFunction,
) -> Result<f64> {
    let k = check_dims(source, channel, p_z.len())?;
    if y >= k {
        return Err(Error::Parameter(format!(
            "output symbol {} outside alphabet of size {k}",
            y + 1
        )));
    }
    if let Some(v) = p_z.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
        return Err(Error::InvalidProbability(format!(
            "p_z entry {v} outside [0, 1]"
        )));
    }
    let px = source.pmf();
    let inner: f64 = (0..k).map(|x| p_z[x] * px[x] * channel.prob(x, y)).sum();
    Ok((0..k)
        .map(|x| px[x] * q.weighted(channel.prob(x, y) * p_z[x], inner))
        .sum())
}

/// Rényi-type conversion `(1/(alpha - 1)) log2 I^Q` for `Q = t^(1 - alpha)`.
pub fn renyi_from_iq(iq: &GmiValue, alpha: f64) -> Result<f64> {
    match iq.q {
        QFunction::Power { alpha: a } if a == alpha => {}
        other => {
            return Err(Error::QMismatch {
                expected: format!("power(alpha={alpha})"),
                got: other.to_string(),
            })
        }
    }
    if !(iq.value > 0.0) {
        return Err(Error::Domain(format!(
            "Rényi conversion needs a positive value, got {}",
            iq.value
        )));
    }
    Ok(iq.value.log2() / (alpha - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{conditional_entropy_x_given_y, joint_distribution, mutual_information};
    use crate::partition::RestrictedGrowth;
    use crate::testutil::{random_channel, random_pmf};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p15() -> QFunction {
        QFunction::power(1.5).unwrap()
    }

    /// Reference for `I^Q(X;Y,Z)` written over explicit triples `(x, y, z)`.
    fn triple_sum_oracle(
        src: &Source,
        ch: &Channel,
        enc: &DeterministicEncoder,
        q: &QFunction,
    ) -> f64 {
        let k = src.size();
        let p = src.pmf();
        let mut pyz = vec![vec![0.0; enc.cells()]; k];
        for x in 0..k {
            for y in 0..k {
                pyz[y][enc.cell_of(x)] += p[x] * ch.prob(x, y);
            }
        }
        let mut total = 0.0;
        for x in 0..k {
            for y in 0..k {
                let pxyz = p[x] * ch.prob(x, y);
                if pxyz > 0.0 {
                    let pyz_given_x = ch.prob(x, y);
                    total += pxyz * q.value(pyz[y][enc.cell_of(x)] / pyz_given_x);
                }
            }
        }
        total
    }

    #[test]
    fn q_eval_examples() {
        assert_eq!(q_eval(&QFunction::NegLog, 1.0).unwrap(), 0.0);
        assert!((q_eval(&p15(), 4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(q_eval(&p15(), -0.1).is_err());
        assert_eq!(q_weighted(&p15(), 0.0, 7.0), 0.0);
    }

    #[test]
    fn generalized_mi_examples() {
        let j = joint_distribution(&Source::uniform(2).unwrap(), &Channel::identity(2).unwrap())
            .unwrap();
        assert!((generalized_mi(&j, &p15()).value - 2f64.sqrt()).abs() < 1e-14);
        let prod = JointPmf::product(&[0.3, 0.7], &[0.4, 0.6]).unwrap();
        assert!((generalized_mi(&prod, &p15()).value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn neg_log_matches_shannon() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let k = rng.gen_range(2..=8);
            let src = Source::new(random_pmf(&mut rng, k)).unwrap();
            let j = joint_distribution(&src, &random_channel(&mut rng, k)).unwrap();
            let a = generalized_mi(&j, &QFunction::NegLog).value;
            assert!((a - mutual_information(&j)).abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_matches_triple_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let k = rng.gen_range(2..=6);
            let src = Source::new(random_pmf(&mut rng, k)).unwrap();
            let ch = random_channel(&mut rng, k);
            let m = rng.gen_range(1..=k);
            let enc = crate::testutil::random_encoder(&mut rng, k, m);
            for q in [QFunction::NegLog, p15(), QFunction::inverse_power(0.6).unwrap()] {
                let a = iq_xyz_deterministic(&src, &ch, &enc, &q).unwrap().value;
                let b = triple_sum_oracle(&src, &ch, &enc, &q);
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn deterministic_neg_log_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let k = rng.gen_range(2..=6);
            let src = Source::new(random_pmf(&mut rng, k)).unwrap();
            let ch = random_channel(&mut rng, k);
            let m = rng.gen_range(1..=k);
            let enc = crate::testutil::random_encoder(&mut rng, k, m);
            let j = joint_distribution(&src, &ch).unwrap();
            // H(Z|Y) from the (z, y) joint.
            let mut zy = vec![vec![0.0; k]; k];
            for x in 0..k {
                for y in 0..k {
                    zy[enc.cell_of(x)][y] += j.get(x, y);
                }
            }
            let h_z_given_y = conditional_entropy_x_given_y(&JointPmf::new(zy).unwrap());
            let want = mutual_information(&j) + h_z_given_y;
            let got = iq_xyz_deterministic(&src, &ch, &enc, &QFunction::NegLog)
                .unwrap()
                .value;
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_extremes() {
        let src = Source::uniform(4).unwrap();
        let ch = Channel::symmetric(4, 0.7).unwrap();
        let j = joint_distribution(&src, &ch).unwrap();
        let full = iq_xyz_deterministic(&src, &ch, &DeterministicEncoder::identity(4), &QFunction::NegLog)
            .unwrap();
        assert!((full.value - 2.0).abs() < 1e-12);
        let one = iq_xyz_deterministic(&src, &ch, &DeterministicEncoder::constant(4), &QFunction::NegLog)
            .unwrap();
        assert!((one.value - mutual_information(&j)).abs() < 1e-12);
        assert!(iq_xyz_deterministic(&src, &ch, &DeterministicEncoder::constant(3), &QFunction::NegLog)
            .is_err());
    }

    #[test]
    fn stochastic_agrees_with_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let k = rng.gen_range(2..=5);
            let src = Source::new(random_pmf(&mut rng, k)).unwrap();
            let ch = random_channel(&mut rng, k);
            let m = rng.gen_range(1..=k);
            let enc = crate::testutil::random_encoder(&mut rng, k, m);
            let s = StochasticEncoder::from_deterministic(&enc);
            let q = QFunction::power(1.3).unwrap();
            let a = iq_xyz_deterministic(&src, &ch, &enc, &q).unwrap().value;
            let b = iq_xyz_stochastic(&src, &ch, &s, &q).unwrap().value;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn independent_stochastic_encoder_gives_mi() {
        let src = Source::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let ch = Channel::symmetric(4, 0.6).unwrap();
        let row = vec![0.25, 0.35, 0.4];
        let s = StochasticEncoder::new(vec![row; 4]).unwrap();
        let j = joint_distribution(&src, &ch).unwrap();
        let v = iq_xyz_stochastic(&src, &ch, &s, &QFunction::NegLog).unwrap().value;
        assert!((v - mutual_information(&j)).abs() < 1e-12);
    }

    #[test]
    fn randomised_encoders_never_beat_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..500 {
            let k = rng.gen_range(2..=5);
            let m = rng.gen_range(1..=k.min(3));
            let src = Source::new(random_pmf(&mut rng, k)).unwrap();
            let ch = random_channel(&mut rng, k);
            let q = if rng.gen_bool(0.5) {
                QFunction::power(1.3).unwrap()
            } else {
                QFunction::NegLog
            };
            let best = RestrictedGrowth::new(k, m)
                .unwrap()
                .map(|l| {
                    let e = DeterministicEncoder::new(l, m).unwrap();
                    iq_xyz_deterministic(&src, &ch, &e, &q).unwrap().value
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let rows = (0..k).map(|_| random_pmf(&mut rng, m)).collect();
            let s = StochasticEncoder::new(rows).unwrap();
            let v = iq_xyz_stochastic(&src, &ch, &s, &q).unwrap().value;
            assert!(v <= best + 1e-10, "{v} > {best}");
        }
    }

    #[test]
    fn g_y_sums_to_stochastic_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..100 {
            let k = rng.gen_range(2..=5);
            let m = rng.gen_range(1..=3);
            let src = Source::new(random_pmf(&mut rng, k)).unwrap();
            let ch = random_channel(&mut rng, k);
            let s = StochasticEncoder::new((0..k).map(|_| random_pmf(&mut rng, m)).collect())
                .unwrap();
            let q = QFunction::power(1.7).unwrap();
            let mut total = 0.0;
            for y in 0..k {
                for z in 0..m {
                    total += g_y(&src, &ch, y, &s.column(z), &q).unwrap();
                }
            }
            let want = iq_xyz_stochastic(&src, &ch, &s, &q).unwrap().value;
            assert!((total - want).abs() < 1e-12 * (1.0 + want));
        }
    }

    #[test]
    fn g_y_examples() {
        let src = Source::uniform(4).unwrap();
        let ch = Channel::symmetric(4, 0.7).unwrap();
        let j = joint_distribution(&src, &ch).unwrap();
        let total: f64 = (0..4)
            .map(|y| g_y(&src, &ch, y, &[1.0; 4], &QFunction::NegLog).unwrap())
            .sum();
        assert!((total - mutual_information(&j)).abs() < 1e-12);
        assert_eq!(g_y(&src, &ch, 2, &[0.0; 4], &p15()).unwrap(), 0.0);
        assert!(g_y(&src, &ch, 4, &[0.0; 4], &p15()).is_err());
        assert!(g_y(&src, &ch, 0, &[1.5, 0.0, 0.0, 0.0], &p15()).is_err());
    }

    #[test]
    fn g_y_midpoint_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..2000 {
            let k = rng.gen_range(2..=6);
            let src = Source::new(random_pmf(&mut rng, k)).unwrap();
            let ch = random_channel(&mut rng, k);
            let y = rng.gen_range(0..k);
            let a: Vec<f64> = (0..k).map(|_| rng.gen()).collect();
            let b: Vec<f64> = (0..k).map(|_| rng.gen()).collect();
            let lam: f64 = rng.gen();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(u, v)| lam * u + (1.0 - lam) * v).collect();
            for q in [QFunction::NegLog, QFunction::power(1.4).unwrap()] {
                let ga = g_y(&src, &ch, y, &a, &q).unwrap();
                let gb = g_y(&src, &ch, y, &b, &q).unwrap();
                let gm = g_y(&src, &ch, y, &mid, &q).unwrap();
                assert!(gm <= lam * ga + (1.0 - lam) * gb + 1e-10);
            }
        }
    }

    #[test]
    fn renyi_conversion() {
        let q = p15();
        assert_eq!(renyi_from_iq(&GmiValue { value: 1.0, q }, 1.5).unwrap(), 0.0);
        let v = renyi_from_iq(&GmiValue { value: 2.0, q }, 1.5).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert!(matches!(
            renyi_from_iq(&GmiValue { value: 2.0, q }, 1.4),
            Err(Error::QMismatch { .. })
        ));
        assert!(matches!(
            renyi_from_iq(&GmiValue { value: 0.0, q }, 1.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn renyi_limit_approaches_shannon() {
        let src = Source::new(vec![0.2, 0.3, 0.5]).unwrap();
        let ch = Channel::new(vec![
            vec![0.6, 0.3, 0.1],
            vec![0.2, 0.5, 0.3],
            vec![0.1, 0.1, 0.8],
        ])
        .unwrap();
        let j = joint_distribution(&src, &ch).unwrap();
        let mi = mutual_information(&j);
        for e in 2..=5 {
            let alpha = 1.0 + 10f64.powi(-e);
            let q = QFunction::power(alpha).unwrap();
            let r = renyi_from_iq(&generalized_mi(&j, &q), alpha).unwrap();
            assert!((r - mi).abs() < 10.0 * (alpha - 1.0), "alpha={alpha}");
        }
    }
}

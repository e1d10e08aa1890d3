//! Concrete scalar codes: exact expected distortion, Bayes decoders,
//! exhaustive search for the best code, and reference formulas for the
//! symmetric channel.

use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Channel, Decoder, DeterministicEncoder, DistortionMeasure, Source};
use crate::partition::{argmax_partition, SearchBudget};
use crate::rd::fmt_float;

/// An encoder/decoder pair with its exact expected distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct CodePerformance {
    pub distortion: f64,
    pub encoder: DeterministicEncoder,
    pub decoder: Decoder,
    /// `log2 M`.
    pub rate_bits: f64,
}

/// Column names of the code CSV.
pub const CODE_HEADER: [&str; 4] = ["rate_bits", "distortion", "encoder_map", "method"];

/// Writes `(code, method)` rows; encoder maps use 1-based labels.
pub fn write_codes_csv<W: Write>(out: W, rows: &[(&CodePerformance, &str)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CODE_HEADER)?;
    for (c, method) in rows {
        w.write_record([
            fmt_float(c.rate_bits),
            fmt_float(c.distortion),
            c.encoder.to_string(),
            method.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn check_dims(
    source: &Source,
    channel: &Channel,
    encoder: &DeterministicEncoder,
    distortion: &DistortionMeasure,
) -> Result<usize> {
    let k = source.size();
    for got in [channel.size(), encoder.source_size(), distortion.size()] {
        if got != k {
            return Err(Error::DimensionMismatch { expected: k, got });
        }
    }
    Ok(k)
}

/// `E rho(X, g(f(X), Y))`, summed exactly over `(x, y)`.
pub fn code_distortion(
    source: &Source,
    channel: &Channel,
    encoder: &DeterministicEncoder,
    decoder: &Decoder,
    distortion: &DistortionMeasure,
) -> Result<f64> {
    let k = check_dims(source, channel, encoder, distortion)?;
    if decoder.cells() != encoder.cells() {
        return Err(Error::DimensionMismatch {
            expected: encoder.cells(),
            got: decoder.cells(),
        });
    }
    let px = source.pmf();
    let mut total = 0.0;
    for x in 0..k {
        let z = encoder.cell_of(x);
        for y in 0..k {
            total += px[x] * channel.prob(x, y) * distortion.get(x, decoder.decode(z, y));
        }
    }
    Ok(total)
}

fn argmin_first(costs: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, c) in costs.enumerate() {
        if c < best.1 {
            best = (i, c);
        }
    }
    best.0
}

/// Bayes-optimal decoder for a given encoder:
/// `g(z, y) = argmin_xhat sum_{x in A_z} p(x) p(y|x) rho(x, xhat)`, ties to
/// the smallest index.
///
/// For a pair `(z, y)` of probability zero every reconstruction is optimal;
/// the decoder then uses the best estimate of `X` from the cell alone, which
/// keeps single-symbol cells decoding to their symbol.
pub fn bayes_decoder(
    source: &Source,
    channel: &Channel,
    encoder: &DeterministicEncoder,
    distortion: &DistortionMeasure,
) -> Result<Decoder> {
    let k = check_dims(source, channel, encoder, distortion)?;
    let px = source.pmf();
    let members = encoder.cell_members();
    let table = members
        .iter()
        .map(|cell| {
            let fallback = argmin_first(
                (0..k).map(|xh| cell.iter().map(|&x| px[x] * distortion.get(x, xh)).sum()),
            );
            (0..k)
                .map(|y| {
                    let mass: f64 = cell.iter().map(|&x| px[x] * channel.prob(x, y)).sum();
                    if mass == 0.0 {
                        return fallback;
                    }
                    argmin_first((0..k).map(|xh| {
                        cell.iter()
                            .map(|&x| px[x] * channel.prob(x, y) * distortion.get(x, xh))
                            .sum()
                    }))
                })
                .collect()
        })
        .collect();
    Decoder::new(table, k)
}

fn check_symmetric(k: usize, mu: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidAlphabet(k));
    }
    if !(mu > 1.0 / k as f64 && mu <= 1.0) {
        return Err(Error::Parameter(format!(
            "symmetric channel needs 1/K < mu <= 1, got mu={mu} with K={k}"
        )));
    }
    Ok((1.0 - mu) / (k - 1) as f64)
}

/// Smallest Hamming distortion of an `M`-cell code for a uniform source
/// through the `K`-ary symmetric channel: `eps (K - M)`.
pub fn symmetric_optimal_distortion(k: usize, mu: f64, m: usize) -> Result<f64> {
    let eps = check_symmetric(k, mu)?;
    if m == 0 || m > k {
        return Err(Error::Parameter(format!(
            "number of cells must satisfy 1 <= M <= K, got M={m}, K={k}"
        )));
    }
    Ok(eps * (k - m) as f64)
}

/// Time sharing between the full-rate code and the zero-rate code:
/// `eps (K - 1) (1 - R / log2 K)`.
pub fn time_sharing_distortion(k: usize, mu: f64, rate: f64) -> Result<f64> {
    let eps = check_symmetric(k, mu)?;
    let top = (k as f64).log2();
    if !(rate >= 0.0 && rate <= top) {
        return Err(Error::Domain(format!("rate {rate} outside [0, {top}]")));
    }
    Ok(eps * (k - 1) as f64 * (1.0 - rate / top))
}

/// Best `M`-cell code by exhaustive search with Bayes decoding. Ties go to
/// the first partition in restricted-growth order.
pub fn brute_force_optimal_code(
    source: &Source,
    channel: &Channel,
    distortion: &DistortionMeasure,
    m: usize,
    budget: SearchBudget,
) -> Result<CodePerformance> {
    let k = source.size();
    if m == 0 || m > k {
        return Err(Error::Parameter(format!(
            "number of cells must satisfy 1 <= M <= K, got M={m}, K={k}"
        )));
    }
    check_dims(source, channel, &DeterministicEncoder::constant(k), distortion)?;
    let eval = |e: &DeterministicEncoder| -> f64 {
        let dec = bayes_decoder(source, channel, e, distortion).expect("dimensions checked");
        code_distortion(source, channel, e, &dec, distortion).expect("dimensions checked")
    };
    let (neg, encoder) = argmax_partition(k, m, budget, |e| -eval(e))?;
    let decoder = bayes_decoder(source, channel, &encoder, distortion)?;
    Ok(CodePerformance {
        distortion: -neg,
        rate_bits: encoder.rate_bits(),
        encoder,
        decoder,
    })
}

/// `f(x) = 1 + (x mod M)` on 1-based symbols, i.e. `(x + 1) mod M` on
/// 0-based ones.
pub fn modular_encoder(k: usize, m: usize) -> Result<DeterministicEncoder> {
    if m == 0 || m > k {
        return Err(Error::Parameter(format!(
            "number of cells must satisfy 1 <= M <= K, got M={m}, K={k}"
        )));
    }
    DeterministicEncoder::new((0..k).map(|x| (x + 1) % m).collect(), m)
}

/// Modular encoder with its Bayes decoder.
pub fn modular_code(
    source: &Source,
    channel: &Channel,
    distortion: &DistortionMeasure,
    m: usize,
) -> Result<CodePerformance> {
    let encoder = modular_encoder(source.size(), m)?;
    let decoder = bayes_decoder(source, channel, &encoder, distortion)?;
    Ok(CodePerformance {
        distortion: code_distortion(source, channel, &encoder, &decoder, distortion)?,
        rate_bits: encoder.rate_bits(),
        encoder,
        decoder,
    })
}

/// Empirical mean distortion over `samples` simulated `(x, y)` draws and its
/// standard error.
pub fn monte_carlo_distortion(
    source: &Source,
    channel: &Channel,
    encoder: &DeterministicEncoder,
    decoder: &Decoder,
    distortion: &DistortionMeasure,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let k = check_dims(source, channel, encoder, distortion)?;
    if samples < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sx = WeightedIndex::new(source.pmf())
        .map_err(|e| Error::InvalidProbability(e.to_string()))?;
    let rows: Vec<Option<WeightedIndex<f64>>> = (0..k)
        .map(|x| WeightedIndex::new(channel.rows()[x].as_slice()).ok())
        .collect();
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x = sx.sample(&mut rng);
        let y = rows[x].as_ref().expect("row of a drawn symbol has mass").sample(&mut rng);
        let v = distortion.get(x, decoder.decode(encoder.cell_of(x), y));
        sum += v;
        sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use wzbounds::model::{Channel, Decoder, DeterministicEncoder};

pub fn random_pmf(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|v| v / s).collect();
    let head: f64 = p[..k - 1].iter().sum();
    p[k - 1] = 1.0 - head;
    p
}

pub fn random_channel(rng: &mut impl Rng, k: usize) -> Channel {
    Channel::new((0..k).map(|_| random_pmf(rng, k)).collect()).unwrap()
}

/// Surjective map onto `m` cells, shuffled.
pub fn random_encoder(rng: &mut impl Rng, k: usize, m: usize) -> DeterministicEncoder {
    let mut map: Vec<usize> = (0..k).map(|x| if x < m { x } else { rng.gen_range(0..m) }).collect();
    map.shuffle(rng);
    DeterministicEncoder::new(map, m).unwrap()
}

pub fn random_decoder(rng: &mut impl Rng, k: usize, m: usize) -> Decoder {
    Decoder::new((0..m).map(|_| (0..k).map(|_| rng.gen_range(0..k)).collect()).collect(), k).unwrap()
}

/// Circulant rows built from `row`.
pub fn circulant(row: &[f64]) -> Vec<Vec<f64>> {
    let k = row.len();
    (0..k).map(|i| (0..k).map(|j| row[(j + k - i) % k]).collect()).collect()
}

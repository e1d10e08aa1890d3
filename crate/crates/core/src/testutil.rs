//! Random instance generators shared by the unit tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Channel, DeterministicEncoder};

/// A random pmf with every entry bounded away from zero; the last entry
/// absorbs rounding so the sum is 1 to machine precision.
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

/// A uniformly shuffled surjective map onto `m` cells.
pub fn random_encoder(rng: &mut impl Rng, k: usize, m: usize) -> DeterministicEncoder {
    let mut map: Vec<usize> = (0..k).map(|x| if x < m { x } else { rng.gen_range(0..m) }).collect();
    map.shuffle(rng);
    DeterministicEncoder::new(map, m).unwrap()
}

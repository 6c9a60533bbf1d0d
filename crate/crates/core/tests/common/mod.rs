//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn_info::{AprioriWeights, JointDistribution, MarkovMeasure, Potential};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Probability vector with entries bounded below by `floor / d`.
pub fn probability(rng: &mut ChaCha8Rng, d: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| floor + rng.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Strictly positive (hence irreducible and aperiodic) chain.
pub fn positive_chain(rng: &mut ChaCha8Rng, d: usize) -> MarkovMeasure {
    let rows = (0..d).map(|_| probability(rng, d, 0.05)).collect();
    MarkovMeasure::from_rows(rows).unwrap()
}

/// Potential with entries uniform in `[-scale, scale]`.
pub fn potential(rng: &mut ChaCha8Rng, d: usize, k: usize, scale: f64) -> Potential {
    let len = d.pow(k as u32);
    let table = (0..len)
        .map(|_| scale * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    Potential::new(d, k, table).unwrap()
}

pub fn weights(rng: &mut ChaCha8Rng, d: usize) -> AprioriWeights {
    AprioriWeights::new(probability(rng, d, 0.1)).unwrap()
}

/// Random joint table; `zeros` entries are forced to zero (never a whole
/// table).
pub fn joint(rng: &mut ChaCha8Rng, d: usize, r: usize, zeros: usize) -> JointDistribution {
    let mut raw: Vec<f64> = (0..d * r).map(|_| 0.01 + rng.random::<f64>()).collect();
    for _ in 0..zeros.min(d * r - 1) {
        let idx = rng.random_range(0..d * r);
        raw[idx] = 0.0;
    }
    if raw.iter().all(|&x| x == 0.0) {
        raw[0] = 1.0;
    }
    let s: f64 = raw.iter().sum();
    JointDistribution::from_flat(d, r, raw.into_iter().map(|x| x / s).collect()).unwrap()
}

/// `Σ_{i,j} μ₂(i,j) A(i,j)` with the 2-cylinder marginal of `mu`.
pub fn pair_integral(mu: &MarkovMeasure, a: &Potential) -> f64 {
    let d = mu.dim();
    let pi = mu.stationary();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            let m = pi[i] * mu.p(i, j);
            if m > 0.0 {
                s += m * a.pair(i, j);
            }
        }
    }
    s
}

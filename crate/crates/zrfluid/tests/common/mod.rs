//! Seeded generators shared by the integration suites. Everything is driven
//! by an explicit `ChaCha8Rng` so failures replay exactly.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zrfluid::markov::{RateMatrix, SiteSet, StochasticMatrix};
use zrfluid::simplex::SimplexPoint;
use zrfluid::DEFAULT_TOL;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random irreducible rate matrix on `n` sites. A directed ring guarantees
/// strong connectivity; every other edge appears with probability `extra`.
/// Rates are drawn from (0.1, 1], so the scale never exceeds 1 and
/// tolerance comparisons against plain thresholds stay meaningful.
pub fn random_rate_matrix(rng: &mut ChaCha8Rng, n: usize, extra: f64) -> RateMatrix {
    let labels: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut rates = vec![vec![0.0; n]; n];
    for (i, row) in rates.iter_mut().enumerate() {
        for (j, rate) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let ring = j == (i + 1) % n;
            if ring || rng.gen::<f64>() < extra {
                *rate = 0.1 + 0.9 * rng.gen::<f64>();
            }
        }
    }
    RateMatrix::new(labels, rates).expect("ring construction is always irreducible")
}

/// Random simplex point from normalized exponentials. With `sparse`, each
/// coordinate is zeroed with probability 1/2 (keeping at least one), so
/// lower-dimensional faces get exercised.
pub fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize, sparse: bool) -> SimplexPoint {
    loop {
        let mut values: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        if sparse {
            for v in values.iter_mut() {
                if rng.gen::<bool>() {
                    *v = 0.0;
                }
            }
        }
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for v in values.iter_mut() {
            *v /= total;
        }
        return SimplexPoint::new(values, DEFAULT_TOL).expect("normalized by construction");
    }
}

/// Random nonempty subset of `0..n`.
pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> SiteSet {
    loop {
        let indices: Vec<usize> = (0..n).filter(|_| rng.gen::<bool>()).collect();
        if !indices.is_empty() {
            return SiteSet::from_indices(indices, n).unwrap();
        }
    }
}

/// Random nonempty subset of the given carrier.
pub fn random_subset_of(rng: &mut ChaCha8Rng, carrier: &SiteSet, n: usize) -> SiteSet {
    loop {
        let indices: Vec<usize> = carrier
            .iter()
            .filter(|_| rng.gen::<bool>())
            .collect();
        if !indices.is_empty() {
            return SiteSet::from_indices(indices, n).unwrap();
        }
    }
}

/// Random irreducible routing matrix: the embedded chain of a random rate
/// matrix, rows normalized to 1.
pub fn random_stochastic(rng: &mut ChaCha8Rng, n: usize, extra: f64) -> StochasticMatrix {
    random_rate_matrix(rng, n, extra)
        .embedded()
        .expect("positive exit rates by construction")
}

/// Random drift with coordinates summing to zero exactly.
pub fn random_balanced_drift(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    let mean: f64 = values.iter().sum::<f64>() / n as f64;
    for v in values.iter_mut() {
        *v -= mean;
    }
    // Kill the rounding dust so the balance check upstream cannot trip.
    let residue: f64 = values.iter().sum();
    values[0] -= residue;
    values
}

/// The acceptance corpus: 200 seeded rate matrices with 3 to 6 sites.
pub fn acceptance_corpus() -> Vec<RateMatrix> {
    let mut out = Vec::with_capacity(200);
    for k in 0..200u64 {
        let n = 3 + (k % 4) as usize;
        let mut r = rng(0xACCE97 + k);
        out.push(random_rate_matrix(&mut r, n, 0.35));
    }
    out
}

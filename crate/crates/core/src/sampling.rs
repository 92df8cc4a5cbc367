//! Reproducible, parallel Monte Carlo counting.
//!
//! Trials are cut into fixed-size batches. Batch `i` draws from a ChaCha
//! stream seeded with `derive_seed(master, i)`, and batch results are integer
//! counts, so the total never depends on how rayon schedules the batches or
//! how many threads the pool has.

use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BATCH_SIZE: u64 = 4096;

/// SplitMix64 finalizer applied to `master + (index+1) * golden gamma`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index))
}

/// Runs `trials` Bernoulli trials and returns the number of successes.
pub fn count_successes<F>(trials: u64, seed: u64, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let batches = trials.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, b);
            let len = BATCH_SIZE.min(trials - b * BATCH_SIZE);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum()
}

/// Like [`count_successes`], but each trial may also bump one of `bins`
/// histogram cells. Returns the per-bin totals.
pub fn histogram<F>(trials: u64, seed: u64, bins: usize, trial: F) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng) -> Option<usize> + Sync,
{
    let batches = trials.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, b);
            let len = BATCH_SIZE.min(trials - b * BATCH_SIZE);
            let mut counts = vec![0u64; bins];
            for _ in 0..len {
                if let Some(bin) = trial(&mut rng) {
                    counts[bin] += 1;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Uniform `s`-subset of `[0, n)`, sorted ascending.
pub fn sample_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, s: usize) -> Vec<usize> {
    let mut v = index::sample(rng, n, s).into_vec();
    v.sort_unstable();
    v
}

/// Uniform `s`-subset of `[0, n)` as a bitmask; `n <= 64`.
pub fn sample_mask<R: Rng + ?Sized>(rng: &mut R, n: usize, s: usize) -> u64 {
    debug_assert!(n <= 64);
    index::sample(rng, n, s)
        .into_iter()
        .fold(0u64, |m, i| m | (1u64 << i))
}

/// Point estimate of a Bernoulli rate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub sigma: f64,
}

impl RateEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let sigma = if trials == 0 {
            0.0
        } else {
            (p * (1.0 - p) / trials as f64).sqrt()
        };
        RateEstimate {
            successes,
            trials,
            estimate: p,
            sigma,
        }
    }

    /// Half-width of the reported error bar (3 sigma).
    pub fn error_bar(&self) -> f64 {
        3.0 * self.sigma
    }

    /// Whether `value` lies within `k` standard errors, with a floor of one
    /// count's worth of slack so that degenerate rates (0 or 1) still compare.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        let slack = k * self.sigma + 1.0 / self.trials.max(1) as f64;
        (self.estimate - value).abs() <= slack
    }
}

//! Seeded, thread-count-independent resampling.
//!
//! Resample `k` draws from its own ChaCha8 stream `k` under the run seed, so
//! the set of resample statistics is a pure function of `(seed, B)` no
//! matter how rayon schedules the work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The RNG for resample `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `n_resamples` replicates of `replicate`, each on its own substream.
/// Results are in replicate order.
pub fn replicate<F>(seed: u64, n_resamples: usize, replicate: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<f64>) -> f64 + Sync,
{
    (0..n_resamples)
        .into_par_iter()
        .map_init(Vec::new, |buffer, k| {
            let mut rng = substream(seed, k as u64);
            replicate(&mut rng, buffer)
        })
        .collect()
}

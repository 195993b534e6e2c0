//! Seeded trial orchestration.
//!
//! Trial `i` of a run with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`. Streams never
//! overlap, so trials are independent of each other and of the order in
//! which they execute.
//!
//! With the `parallel` feature (on by default) [`run`] fans trials out over
//! rayon; without it, [`run`] is [`run_sequential`]. Both produce identical
//! results for identical seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Seed handed to components that take a `u64` rather than an RNG.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    trial_rng(master_seed, index).next_u64()
}

pub fn run_sequential<T, F>(master_seed: u64, trials: usize, f: F) -> Vec<T>
where
    F: Fn(usize, &mut ChaCha8Rng) -> T,
{
    (0..trials).map(|i| f(i, &mut trial_rng(master_seed, i as u64))).collect()
}

#[cfg(feature = "parallel")]
pub fn run_parallel<T, F>(master_seed: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(|i| f(i, &mut trial_rng(master_seed, i as u64))).collect()
}

/// Runs `trials` seeded trials, in parallel when the feature is enabled.
/// Results are in trial order either way.
pub fn run<T, F>(master_seed: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        run_parallel(master_seed, trials, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sequential(master_seed, trials, f)
    }
}

/// Parallel map over a slice of independent work items.
pub fn map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fraction of `true` values.
pub fn success_fraction(outcomes: &[bool]) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().filter(|&&b| b).count() as f64 / outcomes.len() as f64
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

//! Seeded randomness helpers.
//!
//! Every trial draws from its own ChaCha stream selected by `(master seed, trial
//! index)`, so serial and parallel executions see identical numbers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type TrialRng = ChaCha8Rng;

/// Independent stream for one trial of an experiment.
pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Draws from `CN(0, variance)`: each real component has variance `variance / 2`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

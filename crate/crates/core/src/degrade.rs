//! Random-replacement degradation: a fixed fraction of samples is overwritten
//! with Gaussian draws matched to the signal's mean and standard deviation.
//! This is not additive noise; the replaced samples lose all original content.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::audio::AudioSignal;
use crate::error::{Error, Result};
use crate::rng::{self, stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradeSpec {
    fraction: f64,
    noise_mean: f64,
    noise_std: f64,
    seed: u64,
}

impl DegradeSpec {
    pub fn new(fraction: f64, noise_mean: f64, noise_std: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidParameter {
                name: "degradation fraction",
                reason: "must lie in [0, 1]",
            });
        }
        if !noise_mean.is_finite() {
            return Err(Error::InvalidParameter {
                name: "noise mean",
                reason: "must be finite",
            });
        }
        if !(noise_std.is_finite() && noise_std >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "noise standard deviation",
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            fraction,
            noise_mean,
            noise_std,
            seed,
        })
    }

    /// Noise statistics taken from `signal` itself.
    pub fn matched(signal: &AudioSignal, fraction: f64, seed: u64) -> Result<Self> {
        let (mean, std) = match_noise_stats(signal)?;
        Self::new(fraction, mean, std, seed)
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn noise_mean(&self) -> f64 {
        self.noise_mean
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sample mean and population standard deviation.
pub fn match_noise_stats(signal: &AudioSignal) -> Result<(f64, f64)> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mean = signal.mean();
    let var = signal
        .samples()
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / signal.len() as f64;
    Ok((mean, libm::sqrt(var)))
}

/// Number of samples replaced when degrading `len` samples by `fraction`.
pub fn replacement_count(len: usize, fraction: f64) -> usize {
    (libm::round(fraction * len as f64) as usize).min(len)
}

/// Overwrites `count` distinct positions of `samples`, chosen uniformly
/// without replacement, with values from `draw`. `positions` is scratch space
/// holding a permutation of `0..samples.len()`; any permutation will do, so
/// it can be reused across calls. Returns the chosen positions.
pub(crate) fn replace_random<'p, R: Rng + ?Sized>(
    samples: &mut [f64],
    positions: &'p mut [usize],
    count: usize,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> f64,
) -> &'p [usize] {
    debug_assert_eq!(samples.len(), positions.len());
    let chosen = choose_positions(positions, count, rng);
    for &i in chosen {
        samples[i] = draw(rng);
    }
    chosen
}

/// Picks `count` entries of `positions` uniformly without replacement.
pub(crate) fn choose_positions<'p, R: Rng + ?Sized>(
    positions: &'p mut [usize],
    count: usize,
    rng: &mut R,
) -> &'p [usize] {
    positions.partial_shuffle(rng, count).0
}

pub fn degrade(signal: &AudioSignal, spec: &DegradeSpec) -> AudioSignal {
    let mut out = signal.samples().to_vec();
    let count = replacement_count(out.len(), spec.fraction);
    let mut positions: Vec<usize> = (0..out.len()).collect();
    let mut rng = rng::seeded(spec.seed, stream::DEGRADE);
    let normal = Normal::new(spec.noise_mean, spec.noise_std).expect("validated parameters");
    replace_random(&mut out, &mut positions, count, &mut rng, |r| {
        normal.sample(r)
    });
    signal.with_samples(out)
}

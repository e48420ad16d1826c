//! Mono signals and the affine map into the network's `[0, 1]` domain.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vecops;

/// Mono time-domain samples at a fixed rate. Nominal amplitude range is
/// `[-1, 1]`, but nothing here enforces it.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidSampleRate);
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// A signal at the same rate carrying different samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Self {
        Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Samples `[start, end)` as a new signal.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        self.with_samples(self.samples[start..end].to_vec())
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            vecops::mean(&self.samples)
        }
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }
}

/// Affine normalization `y = 0.5 + (x - center) / (2 * half_range)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    center: f64,
    half_range: f64,
}

impl NormParams {
    pub fn new(center: f64, half_range: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center",
                reason: "must be finite",
            });
        }
        if !(half_range.is_finite() && half_range > 0.0) {
            return Err(Error::InvalidParameter {
                name: "half_range",
                reason: "must be finite and positive",
            });
        }
        Ok(Self { center, half_range })
    }

    /// Maps `[-1, 1]` onto `[0, 1]`.
    pub fn unit() -> Self {
        Self {
            center: 0.0,
            half_range: 1.0,
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_range(&self) -> f64 {
        self.half_range
    }

    /// Normalized value of one sample, clipped to `[0, 1]`.
    #[inline]
    pub fn normalize_sample(&self, x: f64) -> f64 {
        (0.5 + (x - self.center) / (2.0 * self.half_range)).clamp(0.0, 1.0)
    }

    #[inline]
    pub fn denormalize_sample(&self, y: f64) -> f64 {
        (y - 0.5) * 2.0 * self.half_range + self.center
    }
}

/// `center` is the sample mean and `half_range` the largest deviation from it,
/// so the fitted signal normalizes onto `[0, 1]` with mean exactly 0.5.
pub fn fit_norm(signal: &AudioSignal) -> Result<NormParams> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let center = signal.mean();
    let half_range = signal
        .samples()
        .iter()
        .map(|x| (x - center).abs())
        .fold(0.0, f64::max);
    if half_range == 0.0 {
        return Err(Error::ConstantSignal);
    }
    NormParams::new(center, half_range)
}

pub fn normalize(signal: &AudioSignal, params: &NormParams) -> AudioSignal {
    signal.with_samples(
        signal
            .samples()
            .iter()
            .map(|&x| params.normalize_sample(x))
            .collect(),
    )
}

pub fn denormalize(signal: &AudioSignal, params: &NormParams) -> AudioSignal {
    signal.with_samples(
        signal
            .samples()
            .iter()
            .map(|&y| params.denormalize_sample(y))
            .collect(),
    )
}

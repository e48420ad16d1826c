//! Synthetic voiced-speech stand-in: a few harmonics of a drifting
//! fundamental under a syllable-rate amplitude envelope.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::audio::AudioSignal;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiSpeech {
    pub fundamental_hz: f64,
    /// Number of harmonics including the fundamental.
    pub harmonics: usize,
    pub modulation_hz: f64,
    /// Relative depth of the slow fundamental drift.
    pub drift_depth: f64,
    pub drift_hz: f64,
    pub peak: f64,
}

impl Default for QuasiSpeech {
    fn default() -> Self {
        Self {
            fundamental_hz: 110.0,
            harmonics: 4,
            modulation_hz: 4.0,
            drift_depth: 0.05,
            drift_hz: 0.13,
            peak: 0.5,
        }
    }
}

impl QuasiSpeech {
    pub fn generate(&self, duration_secs: f64, sample_rate_hz: u32) -> Result<AudioSignal> {
        let rate = f64::from(sample_rate_hz);
        let len = libm::round(duration_secs * rate) as usize;
        let mut phase = 0.0;
        let amp_sum: f64 = (1..=self.harmonics).map(|k| 1.0 / k as f64).sum();
        let mut samples = Vec::with_capacity(len);
        for i in 0..len {
            let t = i as f64 / rate;
            let f0 =
                self.fundamental_hz * (1.0 + self.drift_depth * libm::sin(TAU * self.drift_hz * t));
            phase += TAU * f0 / rate;
            let tone: f64 = (1..=self.harmonics)
                .map(|k| {
                    let kf = k as f64;
                    libm::sin(kf * phase + 0.7 * kf) / kf
                })
                .sum();
            let envelope = 0.55 + 0.45 * libm::sin(TAU * self.modulation_hz * t);
            samples.push(self.peak * envelope * tone / amp_sum);
        }
        AudioSignal::new(samples, sample_rate_hz)
    }
}

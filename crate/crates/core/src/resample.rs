//! Integer-factor decimation behind a windowed-sinc anti-alias filter.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::audio::AudioSignal;
use crate::error::{Error, Result};

/// Length of the anti-alias FIR. Odd, so the filter has an integer delay.
pub const ANTI_ALIAS_TAPS: usize = 127;

/// Passband edge as a fraction of the output Nyquist frequency.
pub const CUTOFF_OF_TARGET_NYQUIST: f64 = 0.9;

/// Blackman-windowed sinc low-pass with unity DC gain. `cutoff` is in cycles
/// per sample (0.5 is Nyquist).
pub fn lowpass_taps(num_taps: usize, cutoff: f64) -> Vec<f64> {
    assert!(num_taps % 2 == 1, "tap count must be odd");
    let mid = (num_taps / 2) as f64;
    let last = (num_taps - 1) as f64;
    let mut taps: Vec<f64> = (0..num_taps)
        .map(|i| {
            let n = i as f64 - mid;
            let sinc = if n == 0.0 {
                2.0 * cutoff
            } else {
                libm::sin(2.0 * PI * cutoff * n) / (PI * n)
            };
            let w = 0.42 - 0.5 * libm::cos(2.0 * PI * i as f64 / last)
                + 0.08 * libm::cos(4.0 * PI * i as f64 / last);
            sinc * w
        })
        .collect();
    let gain: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= gain;
    }
    taps
}

/// Reflects an out-of-range index back into `0..len` (edge sample not repeated).
fn reflect(i: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let m = i.rem_euclid(period);
    if m < len as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// Zero-phase FIR filtering: the symmetric kernel is centered on each output
/// sample and the signal is extended by reflection at both ends.
pub fn filter_zero_phase(samples: &[f64], taps: &[f64]) -> Vec<f64> {
    let half = (taps.len() / 2) as isize;
    let n = samples.len();
    (0..n as isize)
        .map(|t| {
            taps.iter()
                .enumerate()
                .map(|(k, &h)| h * samples[reflect(t + k as isize - half, n)])
                .sum()
        })
        .collect()
}

/// Low-pass filters then keeps every `factor`-th sample, starting with the
/// first. The output holds `ceil(len / factor)` samples.
pub fn decimate(signal: &AudioSignal, target_rate_hz: u32) -> Result<AudioSignal> {
    let from_hz = signal.sample_rate_hz();
    if target_rate_hz == 0 || target_rate_hz > from_hz || from_hz % target_rate_hz != 0 {
        return Err(Error::NonIntegerFactor {
            from_hz,
            to_hz: target_rate_hz,
        });
    }
    let factor = (from_hz / target_rate_hz) as usize;
    if factor == 1 {
        return Ok(signal.clone());
    }
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let cutoff = CUTOFF_OF_TARGET_NYQUIST * 0.5 / factor as f64;
    let taps = lowpass_taps(ANTI_ALIAS_TAPS, cutoff);
    let filtered = filter_zero_phase(signal.samples(), &taps);
    let samples = filtered.into_iter().step_by(factor).collect();
    AudioSignal::new(samples, target_rate_hz)
}

//! Projection signal-to-distortion ratio and Pearson correlation.

use crate::audio::AudioSignal;
use crate::error::{Error, Result};
use crate::vecops;

/// Value reported when the distortion energy is exactly zero. Results are
/// clamped to `±SDR_CAP_DB`.
pub const SDR_CAP_DB: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdrReport {
    pub sdr_db: f64,
}

impl SdrReport {
    pub fn is_capped(&self) -> bool {
        self.sdr_db >= SDR_CAP_DB
    }
}

/// Single-source SDR with a gain-only projection: the estimate is split into
/// its component along the reference and the orthogonal remainder, and the
/// ratio of their energies is reported in decibels.
pub fn sdr_samples(reference: &[f64], estimate: &[f64]) -> Result<SdrReport> {
    if reference.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: estimate.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::EmptySignal);
    }
    let ref_energy = vecops::dot(reference, reference);
    if ref_energy == 0.0 {
        return Err(Error::ZeroReference);
    }
    let gain = vecops::dot(estimate, reference) / ref_energy;
    let mut target_energy = 0.0;
    let mut error_energy = 0.0;
    for (&r, &e) in reference.iter().zip(estimate) {
        let t = gain * r;
        target_energy += t * t;
        error_energy += (e - t) * (e - t);
    }
    let sdr_db = if error_energy == 0.0 {
        SDR_CAP_DB
    } else {
        (10.0 * libm::log10(target_energy / error_energy)).clamp(-SDR_CAP_DB, SDR_CAP_DB)
    };
    Ok(SdrReport { sdr_db })
}

pub fn sdr(reference: &AudioSignal, estimate: &AudioSignal) -> Result<SdrReport> {
    sdr_samples(reference.samples(), estimate.samples())
}

/// SDR over the first `len` samples after removing each signal's mean there.
/// Used to score restorations, which discard DC and leave the uncovered tail
/// empty.
pub fn sdr_centered(reference: &[f64], estimate: &[f64], len: usize) -> Result<SdrReport> {
    if reference.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: estimate.len(),
        });
    }
    let len = len.min(reference.len());
    if len == 0 {
        return Err(Error::EmptySignal);
    }
    let center = |xs: &[f64]| {
        let m = vecops::mean(xs);
        xs.iter().map(|x| x - m).collect::<alloc::vec::Vec<_>>()
    };
    sdr_samples(&center(&reference[..len]), &center(&estimate[..len]))
}

/// Pearson product-moment correlation, accumulated in a single pass with
/// Welford-style co-moment updates.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::TooFewPoints {
            required: 3,
            actual: x.len(),
        });
    }
    let (mut mx, mut my) = (0.0, 0.0);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (k, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (k + 1) as f64;
        let dx = a - mx;
        let dy = b - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (a - mx);
        syy += dy * (b - my);
        sxy += dx * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

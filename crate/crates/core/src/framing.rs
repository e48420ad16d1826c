//! Overlapping rectangular frames and count-normalized overlap-add.

use alloc::vec;
use alloc::vec::Vec;

use crate::audio::AudioSignal;
use crate::error::{Error, Result};

/// Number of full frames of `frame_len` at stride `hop` in `source_len` samples.
pub fn frame_count(source_len: usize, frame_len: usize, hop: usize) -> usize {
    if frame_len == 0 || hop == 0 || source_len < frame_len {
        0
    } else {
        (source_len - frame_len) / hop + 1
    }
}

/// Length of the prefix touched by at least one full frame.
pub fn covered_len(source_len: usize, frame_len: usize, hop: usize) -> usize {
    match frame_count(source_len, frame_len, hop) {
        0 => 0,
        n => (n - 1) * hop + frame_len,
    }
}

/// A stack of equal-length frames, stored row-major. Frame `i` starts at
/// sample `i * hop` of a source signal of `source_len` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    data: Vec<f64>,
    frame_len: usize,
    hop: usize,
    source_len: usize,
    sample_rate_hz: u32,
}

impl FrameMatrix {
    /// Builds a matrix from row-major frame data, checking the geometry.
    pub fn from_parts(
        data: Vec<f64>,
        frame_len: usize,
        hop: usize,
        source_len: usize,
        sample_rate_hz: u32,
    ) -> Result<Self> {
        if frame_len == 0 || hop == 0 {
            return Err(Error::InvalidParameter {
                name: "frame geometry",
                reason: "frame length and hop must be at least 1",
            });
        }
        if source_len < frame_len {
            return Err(Error::SignalTooShort {
                len: source_len,
                frame_len,
            });
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidSampleRate);
        }
        let expected = frame_count(source_len, frame_len, hop) * frame_len;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            data,
            frame_len,
            hop,
            source_len,
            sample_rate_hz,
        })
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.frame_len
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn frame(&self, index: usize) -> &[f64] {
        &self.data[index * self.frame_len..(index + 1) * self.frame_len]
    }

    pub fn frames(&self) -> core::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.frame_len)
    }

    pub fn frames_mut(&mut self) -> core::slice::ChunksExactMut<'_, f64> {
        self.data.chunks_exact_mut(self.frame_len)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn covered_len(&self) -> usize {
        covered_len(self.source_len, self.frame_len, self.hop)
    }

    /// Elementwise mean over all frames.
    pub fn mean_frame(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.frame_len];
        for f in self.frames() {
            for (a, x) in acc.iter_mut().zip(f) {
                *a += x;
            }
        }
        let n = self.len() as f64;
        for a in &mut acc {
            *a /= n;
        }
        acc
    }
}

/// Slices `signal` into frames `[i * hop, i * hop + frame_len)`. Samples past
/// the last full frame are left out; `source_len` still records them.
pub fn frame(signal: &AudioSignal, frame_len: usize, hop: usize) -> Result<FrameMatrix> {
    if frame_len == 0 || hop == 0 {
        return Err(Error::InvalidParameter {
            name: "frame geometry",
            reason: "frame length and hop must be at least 1",
        });
    }
    let s = signal.samples();
    if s.len() < frame_len {
        return Err(Error::SignalTooShort {
            len: s.len(),
            frame_len,
        });
    }
    let count = frame_count(s.len(), frame_len, hop);
    let mut data = Vec::with_capacity(count * frame_len);
    for i in 0..count {
        data.extend_from_slice(&s[i * hop..i * hop + frame_len]);
    }
    FrameMatrix::from_parts(data, frame_len, hop, s.len(), signal.sample_rate_hz())
}

/// Sums every frame back at its offset and divides each position by the
/// number of frames covering it. Uncovered trailing samples are zero.
pub fn overlap_add(frames: &FrameMatrix) -> AudioSignal {
    // running per-sample mean: exact when every overlapping value agrees,
    // and positions no frame covers stay zero
    let mut out = vec![0.0; frames.source_len];
    let mut seen = vec![0u32; frames.covered_len()];
    for (i, f) in frames.frames().enumerate() {
        let start = i * frames.hop;
        let span = start..start + frames.frame_len;
        for ((o, c), x) in out[span.clone()].iter_mut().zip(&mut seen[span]).zip(f) {
            *c += 1;
            *o += (x - *o) / f64::from(*c);
        }
    }
    AudioSignal::new(out, frames.sample_rate_hz).expect("rate validated on construction")
}

/// Subtracts the mean so the result is zero-mean.
pub fn remove_dc(signal: &AudioSignal) -> AudioSignal {
    let m = signal.mean();
    signal.with_samples(signal.samples().iter().map(|x| x - m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(xs: &[f64]) -> AudioSignal {
        AudioSignal::new(xs.to_vec(), 8000).unwrap()
    }

    #[test]
    fn paper_scale_frame_counts() {
        assert_eq!(frame_count(480_000, 1000, 10), 47_901);
        assert_eq!(frame_count(40_000, 1000, 1), 39_001);
    }

    #[test]
    fn single_frame() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        for hop in [1, 7, 1000, 5000] {
            let m = frame(&sig(&xs), 1000, hop).unwrap();
            assert_eq!(m.len(), 1);
            assert_eq!(m.frame(0), &xs[..]);
        }
    }

    #[test]
    fn too_short() {
        assert_eq!(
            frame(&sig(&[0.0; 3]), 4, 1),
            Err(Error::SignalTooShort {
                len: 3,
                frame_len: 4
            })
        );
        assert!(frame(&sig(&[0.0; 3]), 2, 0).is_err());
    }

    #[test]
    fn hand_computed_average() {
        let m = FrameMatrix::from_parts(vec![1.0, 1.0, 3.0, 3.0], 2, 1, 3, 8000).unwrap();
        assert_eq!(overlap_add(&m).samples(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn single_frame_padded() {
        let m = FrameMatrix::from_parts(vec![4.0, 5.0], 2, 3, 4, 8000).unwrap();
        assert_eq!(overlap_add(&m).samples(), &[4.0, 5.0, 0.0, 0.0]);
    }

    #[test]
    fn from_parts_checks_shape() {
        assert!(FrameMatrix::from_parts(vec![0.0; 5], 2, 1, 3, 8000).is_err());
    }

    #[test]
    fn trailing_remainder_is_zero() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let m = frame(&sig(&xs), 4, 3).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.covered_len(), 10);
        let m = frame(&sig(&xs[..9]), 4, 3).unwrap();
        assert_eq!(m.covered_len(), 7);
        let out = overlap_add(&m);
        assert_eq!(
            out.samples(),
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 0.0, 0.0]
        );
    }

    #[test]
    fn remove_dc_cases() {
        assert_eq!(remove_dc(&sig(&[1.0, 1.0, 1.0])).samples(), &[0.0; 3]);
        assert_eq!(remove_dc(&sig(&[0.0, 2.0])).samples(), &[-1.0, 1.0]);
        assert_eq!(remove_dc(&sig(&[-1.0, 1.0])).samples(), &[-1.0, 1.0]);
    }

    #[test]
    fn mean_frame_of_two() {
        let m = FrameMatrix::from_parts(vec![1.0, 2.0, 3.0, 6.0], 2, 1, 3, 8000).unwrap();
        assert_eq!(m.mean_frame(), vec![2.0, 4.0]);
    }
}

//! Convolutive probabilistic re-synthesis.
//!
//! Each overlapping frame of the degraded signal goes through the
//! autoencoder `N` times. Before every pass a fresh random subset of the
//! frame's samples is replaced with uniform noise, and the `N` outputs are
//! averaged. The averaged frames are then centered on their common mean
//! frame, overlap-added, and stripped of DC.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::audio::{self, AudioSignal};
use crate::degrade::{choose_positions, replacement_count};
use crate::error::{Error, Result};
use crate::exec::{FrameExecutor, Sequential};
use crate::framing::{self, FrameMatrix};
use crate::neural::{Autoencoder, Workspace};
use crate::rng::{self, stream};
use crate::vecops::{axpy, gemm, matvec, sigmoid_in_place, Layout};

/// Default number of passes per frame.
pub const DEFAULT_PASSES: usize = 100;
/// Default share of each frame re-randomized before a pass.
pub const DEFAULT_INNER_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResynthConfig {
    n_passes: usize,
    inner_fraction: f64,
    seed: u64,
}

impl Default for ResynthConfig {
    fn default() -> Self {
        Self {
            n_passes: DEFAULT_PASSES,
            inner_fraction: DEFAULT_INNER_FRACTION,
            seed: 0,
        }
    }
}

impl ResynthConfig {
    pub fn new(n_passes: usize, inner_fraction: f64, seed: u64) -> Result<Self> {
        if n_passes == 0 {
            return Err(Error::InvalidParameter {
                name: "pass count",
                reason: "must be at least 1",
            });
        }
        if !(0.0..=1.0).contains(&inner_fraction) {
            return Err(Error::InvalidParameter {
                name: "inner fraction",
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self {
            n_passes,
            inner_fraction,
            seed,
        })
    }

    pub fn n_passes(&self) -> usize {
        self.n_passes
    }

    pub fn inner_fraction(&self) -> f64 {
        self.inner_fraction
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Passes evaluated together in one matrix product.
const PASS_BLOCK: usize = 128;

/// A model prepared for repeated re-synthesis.
///
/// Passes are evaluated in blocks as matrix products. Only the replaced
/// positions differ from the frame, so the hidden pre-activation of a pass is
/// the frame's own pre-activation plus `W1 · (noisy − frame)`, a product with
/// a sparse difference matrix. That is the same affine map as a full forward
/// pass, summed in a different order.
pub struct Resynthesizer<'m> {
    model: &'m Autoencoder,
    cfg: ResynthConfig,
}

impl<'m> Resynthesizer<'m> {
    pub fn new(model: &'m Autoencoder, cfg: ResynthConfig) -> Self {
        Self { model, cfg }
    }

    pub fn config(&self) -> &ResynthConfig {
        &self.cfg
    }

    /// Writes the averaged output for frame `frame_index` into `out`. The
    /// random stream depends only on `(seed, frame_index)`, so frames can be
    /// processed in any order.
    pub fn frame_into(&self, frame: &[f64], frame_index: usize, out: &mut [f64]) -> Result<()> {
        let model = self.model;
        let (inputs, hidden) = (model.input_len(), model.hidden_len());
        for len in [frame.len(), out.len()] {
            if len != inputs {
                return Err(Error::LengthMismatch {
                    expected: inputs,
                    actual: len,
                });
            }
        }
        let replace = replacement_count(inputs, self.cfg.inner_fraction);
        if replace == 0 {
            // every pass would see the same input
            let mut ws = Workspace::new(model);
            model.forward_with(frame, &mut ws);
            out.copy_from_slice(ws.output());
            return Ok(());
        }

        let mut base = vec![0.0; hidden];
        matvec(model.w1(), frame, &mut base);
        axpy(1.0, model.b1(), &mut base);

        let mut rng = rng::seeded(
            self.cfg.seed,
            stream::RESYNTH_BASE.wrapping_add(frame_index as u64),
        );
        let mut positions: Vec<usize> = (0..inputs).collect();
        let block = self.cfg.n_passes.min(PASS_BLOCK);
        let mut diff = vec![0.0; block * inputs];
        let mut pre = vec![0.0; block * hidden];
        let mut recon = vec![0.0; block * inputs];
        let w1_t = Layout::row_major(hidden, inputs).transposed();
        let w2_t = Layout::row_major(inputs, hidden).transposed();

        out.fill(0.0);
        let mut remaining = self.cfg.n_passes;
        while remaining > 0 {
            let rows = remaining.min(block);
            remaining -= rows;
            diff.fill(0.0);
            for row in diff.chunks_exact_mut(inputs).take(rows) {
                for &j in choose_positions(&mut positions, replace, &mut rng) {
                    row[j] = rng.random::<f64>() - frame[j];
                }
            }
            for row in pre.chunks_exact_mut(hidden).take(rows) {
                row.copy_from_slice(&base);
            }
            let pre = &mut pre[..rows * hidden];
            gemm(
                &diff,
                Layout::row_major(rows, inputs),
                model.w1(),
                w1_t,
                1.0,
                pre,
            );
            sigmoid_in_place(pre);
            let recon = &mut recon[..rows * inputs];
            gemm(
                pre,
                Layout::row_major(rows, hidden),
                model.w2(),
                w2_t,
                0.0,
                recon,
            );
            sigmoid_in_place(recon);
            for row in recon.chunks_exact(inputs) {
                axpy(1.0, row, out);
            }
        }
        let n = self.cfg.n_passes as f64;
        for o in out.iter_mut() {
            *o /= n;
        }
        Ok(())
    }
}

/// Re-synthesizes one normalized frame: the mean of `n_passes` forward passes,
/// each over a freshly re-randomized copy of the frame.
pub fn resynthesize_frame(
    model: &Autoencoder,
    frame: &[f64],
    cfg: &ResynthConfig,
    frame_index: usize,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; model.input_len()];
    Resynthesizer::new(model, *cfg).frame_into(frame, frame_index, &mut out)?;
    Ok(out)
}

/// Re-synthesizes every frame of `frames`.
pub fn resynthesize_frames(
    model: &Autoencoder,
    frames: &FrameMatrix,
    cfg: &ResynthConfig,
    exec: &dyn FrameExecutor,
) -> Result<FrameMatrix> {
    if frames.frame_len() != model.input_len() {
        return Err(Error::LengthMismatch {
            expected: model.input_len(),
            actual: frames.frame_len(),
        });
    }
    let resynth = Resynthesizer::new(model, *cfg);
    let mut out = frames.clone();
    let src = frames.as_slice();
    let len = frames.frame_len();
    exec.for_each_row(out.as_mut_slice(), len, &|i, row| {
        resynth
            .frame_into(&src[i * len..(i + 1) * len], i, row)
            .expect("frame lengths checked above");
    });
    Ok(out)
}

/// Subtracts the mean frame from every frame, cancelling output units that
/// are active regardless of input. Returns the mean that was removed.
pub fn subtract_mean_frame(frames: &mut FrameMatrix) -> Vec<f64> {
    let mean = frames.mean_frame();
    for f in frames.frames_mut() {
        for (x, m) in f.iter_mut().zip(&mean) {
            *x -= m;
        }
    }
    mean
}

/// Restores a degraded raw-amplitude signal, single-threaded.
pub fn correct(
    model: &Autoencoder,
    degraded: &AudioSignal,
    cfg: &ResynthConfig,
    hop: usize,
) -> Result<AudioSignal> {
    correct_with(model, degraded, cfg, hop, &Sequential)
}

/// Full restoration pipeline:
///
/// 1. normalize with the model's training statistics, clipping to `[0, 1]`;
/// 2. frame at the model's frame length and `hop`;
/// 3. re-synthesize every frame;
/// 4. subtract the mean frame;
/// 5. overlap-add with coverage-count normalization;
/// 6. remove DC over the covered region;
/// 7. rescale to raw amplitude by `2 · half_range` (no offset: the result
///    is zero-mean by construction).
///
/// The output has the input's length; samples past the last full frame are
/// zero.
pub fn correct_with(
    model: &Autoencoder,
    degraded: &AudioSignal,
    cfg: &ResynthConfig,
    hop: usize,
    exec: &dyn FrameExecutor,
) -> Result<AudioSignal> {
    let frame_len = model.frame_len();
    if degraded.len() < frame_len {
        return Err(Error::SignalTooShort {
            len: degraded.len(),
            frame_len,
        });
    }
    let normalized = audio::normalize(degraded, model.norm());
    let frames = framing::frame(&normalized, frame_len, hop)?;
    let mut corrected = resynthesize_frames(model, &frames, cfg, exec)?;
    subtract_mean_frame(&mut corrected);
    let mut out = framing::overlap_add(&corrected).into_samples();
    let covered = corrected.covered_len();
    let dc = out[..covered].iter().sum::<f64>() / covered as f64;
    let scale = 2.0 * model.norm().half_range();
    for x in &mut out[..covered] {
        *x = (*x - dc) * scale;
    }
    Ok(degraded.with_samples(out))
}

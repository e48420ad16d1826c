//! Three-layer sigmoid autoencoder trained by per-example SGD.
//!
//! The hidden layer computes `h = σ(W1·x + b1)` and the output layer
//! `y = σ(W2·h)`. The output layer has no bias term at all. Training
//! minimizes the per-frame mean squared error `L = (1/n) Σ (yᵢ − xᵢ)²`, one
//! frame at a time.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Uniform};

use crate::audio::NormParams;
use crate::error::{Error, Result};
use crate::framing::FrameMatrix;
use crate::rng::{self, stream};
use crate::vecops::{axpy, matvec, sigmoid_in_place};

/// Learning rate used when none is given.
pub const DEFAULT_LEARNING_RATE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder {
    input_len: usize,
    hidden_len: usize,
    /// `hidden_len × input_len`, row-major.
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// `input_len × hidden_len`, row-major.
    w2: Vec<f64>,
    norm: NormParams,
}

/// Gradients of the reconstruction loss. There is deliberately no entry for
/// an output bias: the layer does not have one.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: 600,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "learning rate",
                reason: "must be finite and non-negative",
            });
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter {
                name: "epochs",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Mean squared reconstruction error of each epoch, in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossHistory(pub Vec<f64>);

impl LossHistory {
    pub fn epochs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<f64> {
        self.0.last().copied()
    }
}

/// Per-call buffers for the forward and backward passes.
#[derive(Debug, Clone)]
pub struct Workspace {
    hidden: Vec<f64>,
    output: Vec<f64>,
    delta_out: Vec<f64>,
    delta_hidden: Vec<f64>,
}

impl Workspace {
    pub fn new(model: &Autoencoder) -> Self {
        Self {
            hidden: vec![0.0; model.hidden_len],
            output: vec![0.0; model.input_len],
            delta_out: vec![0.0; model.input_len],
            delta_hidden: vec![0.0; model.hidden_len],
        }
    }

    pub fn hidden(&self) -> &[f64] {
        &self.hidden
    }

    pub fn output(&self) -> &[f64] {
        &self.output
    }
}

impl Autoencoder {
    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero hidden
    /// biases. Identical seeds give bit-identical models.
    pub fn init(input_len: usize, hidden_len: usize, seed: u64) -> Result<Self> {
        if input_len == 0 || hidden_len == 0 {
            return Err(Error::ZeroDimension);
        }
        let size = input_len
            .checked_mul(hidden_len)
            .ok_or(Error::ZeroDimension)?;
        let bound = glorot_bound(input_len, hidden_len);
        let dist = Uniform::new_inclusive(-bound, bound).expect("finite positive bound");
        let mut rng = rng::seeded(seed, stream::INIT);
        let w1 = (0..size).map(|_| dist.sample(&mut rng)).collect();
        let w2 = (0..size).map(|_| dist.sample(&mut rng)).collect();
        Ok(Self {
            input_len,
            hidden_len,
            w1,
            b1: vec![0.0; hidden_len],
            w2,
            norm: NormParams::unit(),
        })
    }

    /// Assembles a model from raw parameters, checking shapes and finiteness.
    pub fn from_parts(
        input_len: usize,
        hidden_len: usize,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        norm: NormParams,
    ) -> Result<Self> {
        if input_len == 0 || hidden_len == 0 {
            return Err(Error::ZeroDimension);
        }
        let size = input_len * hidden_len;
        for (len, expected) in [(w1.len(), size), (b1.len(), hidden_len), (w2.len(), size)] {
            if len != expected {
                return Err(Error::LengthMismatch {
                    expected,
                    actual: len,
                });
            }
        }
        if !w1.iter().chain(&b1).chain(&w2).all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: "must be finite",
            });
        }
        Ok(Self {
            input_len,
            hidden_len,
            w1,
            b1,
            w2,
            norm,
        })
    }

    pub fn with_norm(mut self, norm: NormParams) -> Self {
        self.norm = norm;
        self
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn hidden_len(&self) -> usize {
        self.hidden_len
    }

    pub fn output_len(&self) -> usize {
        self.input_len
    }

    /// Frame length the model consumes; always equal to `input_len`.
    pub fn frame_len(&self) -> usize {
        self.input_len
    }

    pub fn norm(&self) -> &NormParams {
        &self.norm
    }

    pub fn w1(&self) -> &[f64] {
        &self.w1
    }

    pub fn b1(&self) -> &[f64] {
        &self.b1
    }

    pub fn w2(&self) -> &[f64] {
        &self.w2
    }

    pub fn w1_mut(&mut self) -> &mut [f64] {
        &mut self.w1
    }

    pub fn b1_mut(&mut self) -> &mut [f64] {
        &mut self.b1
    }

    pub fn w2_mut(&mut self) -> &mut [f64] {
        &mut self.w2
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.input_len {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.input_len,
                actual: x.len(),
            })
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut ws = Workspace::new(self);
        self.forward_with(x, &mut ws);
        Ok(ws.output)
    }

    /// Forward pass into `ws`; `x` must have `input_len` samples.
    pub fn forward_with(&self, x: &[f64], ws: &mut Workspace) {
        debug_assert_eq!(x.len(), self.input_len);
        matvec(&self.w1, x, &mut ws.hidden);
        axpy(1.0, &self.b1, &mut ws.hidden);
        sigmoid_in_place(&mut ws.hidden);
        matvec(&self.w2, &ws.hidden, &mut ws.output);
        sigmoid_in_place(&mut ws.output);
    }

    /// Mean squared error `(1/L) Σ (yᵢ − xᵢ)²` for one frame.
    pub fn loss(&self, x: &[f64]) -> Result<f64> {
        let y = self.forward(x)?;
        Ok(y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / self.input_len as f64)
    }

    /// Derivative of the loss with respect to output `i` is `scale · (yᵢ − xᵢ)`.
    fn error_scale(&self) -> f64 {
        2.0 / self.input_len as f64
    }

    /// Backward pass after `forward_with`: fills the output and hidden deltas
    /// from the weights as they are now.
    fn deltas(&self, x: &[f64], ws: &mut Workspace) {
        let scale = self.error_scale();
        for ((d, &y), &t) in ws.delta_out.iter_mut().zip(&ws.output).zip(x) {
            *d = scale * (y - t) * y * (1.0 - y);
        }
        ws.delta_hidden.fill(0.0);
        for (row, &d) in self.w2.chunks_exact(self.hidden_len).zip(&ws.delta_out) {
            axpy(d, row, &mut ws.delta_hidden);
        }
        for (dh, &h) in ws.delta_hidden.iter_mut().zip(&ws.hidden) {
            *dh *= h * (1.0 - h);
        }
    }

    /// Exact gradients of the reconstruction loss for one frame.
    pub fn backprop(&self, x: &[f64]) -> Result<Gradients> {
        self.check_input(x)?;
        let mut ws = Workspace::new(self);
        self.forward_with(x, &mut ws);
        self.deltas(x, &mut ws);
        let mut g = Gradients {
            w1: vec![0.0; self.w1.len()],
            b1: ws.delta_hidden.clone(),
            w2: vec![0.0; self.w2.len()],
        };
        for (row, &d) in g.w2.chunks_exact_mut(self.hidden_len).zip(&ws.delta_out) {
            axpy(d, &ws.hidden, row);
        }
        for (row, &d) in g.w1.chunks_exact_mut(self.input_len).zip(&ws.delta_hidden) {
            axpy(d, x, row);
        }
        Ok(g)
    }

    /// `w ← w − lr · g` for every parameter.
    pub fn apply(&mut self, g: &Gradients, learning_rate: f64) {
        axpy(-learning_rate, &g.w1, &mut self.w1);
        axpy(-learning_rate, &g.b1, &mut self.b1);
        axpy(-learning_rate, &g.w2, &mut self.w2);
    }

    /// One SGD update on a single frame without materializing the gradient
    /// matrices. Returns the frame's squared error `Σ (yᵢ − xᵢ)²` measured
    /// before the update.
    pub fn sgd_step(&mut self, x: &[f64], learning_rate: f64, ws: &mut Workspace) -> f64 {
        self.forward_with(x, ws);
        let scale = self.error_scale();
        let mut sq_err = 0.0;
        for ((d, &y), &t) in ws.delta_out.iter_mut().zip(&ws.output).zip(x) {
            sq_err += (y - t) * (y - t);
            *d = scale * (y - t) * y * (1.0 - y);
        }
        // one sweep over W2: read the old row into the hidden delta, then update it
        ws.delta_hidden.fill(0.0);
        for (row, &d) in self.w2.chunks_exact_mut(self.hidden_len).zip(&ws.delta_out) {
            let step = -learning_rate * d;
            for ((dh, w), &h) in ws
                .delta_hidden
                .iter_mut()
                .zip(row.iter_mut())
                .zip(&ws.hidden)
            {
                *dh += d * *w;
                *w += step * h;
            }
        }
        for (dh, &h) in ws.delta_hidden.iter_mut().zip(&ws.hidden) {
            *dh *= h * (1.0 - h);
        }
        for (row, &d) in self
            .w1
            .chunks_exact_mut(self.input_len)
            .zip(&ws.delta_hidden)
        {
            axpy(-learning_rate * d, x, row);
        }
        axpy(-learning_rate, &ws.delta_hidden, &mut self.b1);
        sq_err
    }
}

pub(crate) fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    libm::sqrt(6.0 / (fan_in + fan_out) as f64)
}

/// Trains on every frame once per epoch, one update per frame. Frame order is
/// reshuffled each epoch from `cfg.seed` unless shuffling is off.
pub fn train(
    model: Autoencoder,
    frames: &FrameMatrix,
    cfg: &TrainConfig,
) -> Result<(Autoencoder, LossHistory)> {
    train_with_progress(model, frames, cfg, |_, _| {})
}

/// Like [`train`], calling `on_epoch(epoch, mean_loss)` after each sweep.
pub fn train_with_progress(
    mut model: Autoencoder,
    frames: &FrameMatrix,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<(Autoencoder, LossHistory)> {
    cfg.validate()?;
    if frames.frame_len() != model.input_len {
        return Err(Error::LengthMismatch {
            expected: model.input_len,
            actual: frames.frame_len(),
        });
    }
    if frames.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mut rng = rng::seeded(cfg.seed, stream::SHUFFLE);
    let mut order: Vec<usize> = (0..frames.len()).collect();
    let mut ws = Workspace::new(&model);
    let mut history = Vec::with_capacity(cfg.epochs);
    let denom = (frames.len() * frames.frame_len()) as f64;
    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut total = 0.0;
        for &i in &order {
            total += model.sgd_step(frames.frame(i), cfg.learning_rate, &mut ws);
        }
        let mse = total / denom;
        if !mse.is_finite() || !model.b1.iter().all(|b| b.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
        history.push(mse);
        on_epoch(epoch, mse);
    }
    Ok((model, LossHistory(history)))
}

/// Mean squared reconstruction error over all frames, without training.
pub fn evaluate(model: &Autoencoder, frames: &FrameMatrix) -> Result<f64> {
    if frames.frame_len() != model.input_len {
        return Err(Error::LengthMismatch {
            expected: model.input_len,
            actual: frames.frame_len(),
        });
    }
    let mut ws = Workspace::new(model);
    let mut total = 0.0;
    for f in frames.frames() {
        model.forward_with(f, &mut ws);
        total += ws
            .output
            .iter()
            .zip(f)
            .map(|(y, t)| (y - t) * (y - t))
            .sum::<f64>();
    }
    Ok(total / frames.as_slice().len() as f64)
}

//! Deep-transform audio error correction.
//!
//! A fully connected sigmoid autoencoder is trained to reproduce clean speech
//! frames. The trained network is then used as a convolutive transform: every
//! overlapping frame of a degraded signal is pushed through it many times,
//! each time with fresh random corruption, and the averaged outputs are
//! overlap-added back into a restored waveform.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command-line
//! front end and thread-pool execution live in the `dtransform` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod audio;
pub mod codec;
pub mod degrade;
mod error;
pub mod exec;
pub mod experiment;
pub mod framing;
pub mod metrics;
pub mod neural;
pub mod resample;
pub mod resynth;
pub mod synth;

mod rng;
mod vecops;

pub use audio::{AudioSignal, NormParams};
pub use degrade::DegradeSpec;
pub use error::{Error, FormatError, Result};
pub use exec::{FrameExecutor, Sequential};
pub use experiment::SweepRecord;
pub use framing::FrameMatrix;
pub use metrics::SdrReport;
pub use neural::{Autoencoder, Gradients, LossHistory, TrainConfig};
pub use resynth::ResynthConfig;

//! 16-bit PCM WAV input and output.

use std::io;
use std::path::Path;

use dtransform_core::AudioSignal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("{0}: no such file")]
    NotFound(String),
    #[error("{path}: unsupported encoding ({detail}); only integer PCM is accepted")]
    UnsupportedEncoding { path: String, detail: String },
    #[error("{0}: audio data is empty")]
    Empty(String),
    #[error("{path}: {source}")]
    Malformed {
        path: String,
        #[source]
        source: hound::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

fn describe(path: &Path) -> String {
    path.display().to_string()
}

/// Reads integer PCM at any bit depth, averaging channels to mono and
/// scaling so that full-scale negative maps to −1.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioSignal, WavError> {
    let path = path.as_ref();
    let name = describe(path);
    if !path.exists() {
        return Err(WavError::NotFound(name));
    }
    let mut reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(source) => WavError::Io {
            path: name.clone(),
            source,
        },
        hound::Error::Unsupported => WavError::UnsupportedEncoding {
            path: name.clone(),
            detail: "format code not recognized".into(),
        },
        source => WavError::Malformed {
            path: name.clone(),
            source,
        },
    })?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(WavError::UnsupportedEncoding {
            path: name,
            detail: format!("{}-bit floating point", spec.bits_per_sample),
        });
    }
    let channels = usize::from(spec.channels.max(1));
    let full_scale = f64::from(1u32 << (spec.bits_per_sample - 1));
    let raw: Vec<i32> = reader
        .samples::<i32>()
        .collect::<Result<_, _>>()
        .map_err(|source| WavError::Malformed {
            path: name.clone(),
            source,
        })?;
    if raw.len() < channels {
        return Err(WavError::Empty(name));
    }
    let samples = raw
        .chunks_exact(channels)
        .map(|frame| {
            frame.iter().map(|&s| f64::from(s)).sum::<f64>() / (channels as f64 * full_scale)
        })
        .collect();
    AudioSignal::new(samples, spec.sample_rate).map_err(|_| WavError::UnsupportedEncoding {
        path: describe(path),
        detail: "zero sample rate".into(),
    })
}

/// Quantizes one sample to 16 bits, clipping to `[-1, 1]` first.
pub fn quantize(x: f64) -> i16 {
    (x.clamp(-1.0, 1.0) * 32768.0)
        .round()
        .clamp(-32768.0, 32767.0) as i16
}

/// Writes 16-bit PCM mono.
pub fn write_wav(signal: &AudioSignal, path: impl AsRef<Path>) -> Result<(), WavError> {
    let path = path.as_ref();
    let name = describe(path);
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate_hz(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let wrap = |e: hound::Error| match e {
        hound::Error::IoError(source) => WavError::Io {
            path: name.clone(),
            source,
        },
        source => WavError::Malformed {
            path: name.clone(),
            source,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(wrap)?;
    let mut buffered = writer.get_i16_writer(signal.len() as u32);
    for &x in signal.samples() {
        buffered.write_sample(quantize(x));
    }
    buffered.flush().map_err(wrap)?;
    writer.finalize().map_err(wrap)
}

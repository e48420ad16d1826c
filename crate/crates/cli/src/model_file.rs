use std::fs;
use std::io;
use std::path::Path;

use dtransform_core::{Autoencoder, FormatError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: String,
        #[source]
        source: FormatError,
    },
}

pub fn save(model: &Autoencoder, path: impl AsRef<Path>) -> Result<(), ModelFileError> {
    let path = path.as_ref();
    fs::write(path, model.to_bytes()).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<Autoencoder, ModelFileError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Autoencoder::from_bytes(&bytes).map_err(|source| ModelFileError::Format {
        path: path.display().to_string(),
        source,
    })
}

//! File formats, thread-pool execution and the `dtransform` command line
//! around [`dtransform_core`].

pub mod cli;
pub mod model_file;
pub mod parallel;
pub mod records;
pub mod wav;

pub use dtransform_core as core;

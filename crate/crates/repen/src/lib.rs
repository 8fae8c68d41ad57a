//! File formats, synthetic data, experiment protocols and the `repen`
//! command-line tool built on [`repen_core`].

pub mod config;
mod error;
pub mod eval;
pub mod io;
pub mod parallel;
pub mod pipeline;
pub mod scale;
pub mod synth;

pub use error::{Error, Result};
pub use repen_core;

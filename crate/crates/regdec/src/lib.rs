//! File formats, parallel drivers, experiments and the `regdec` command line
//! on top of [`regdec_core`].

pub mod cli;
pub mod error;
pub mod experiment;
pub mod io;
pub mod parallel;
pub mod render;
pub mod report;

pub use error::{Error, Result};

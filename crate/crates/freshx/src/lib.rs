//! File formats, parallel pipeline, synthetic benchmarks and the command line
//! for filtered time series feature extraction.
//!
//! The algorithms live in [`freshx_core`]; this crate adds everything that
//! needs the standard library.

pub mod cli;
pub mod config;
pub mod ingest;
pub mod pipeline;
pub mod synth;

pub use freshx_core;

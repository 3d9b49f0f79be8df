//! File formats, logs and the command line around `coopsearch-core`.

pub mod bench;
pub mod cli;
pub mod config;
pub mod output;
pub mod stats;

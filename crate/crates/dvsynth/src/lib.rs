//! File formats and the command-line driver for `dvsynth-core`.

pub mod aiger;
pub mod cli;
pub mod dump;
pub mod hoa;
pub mod spec_format;

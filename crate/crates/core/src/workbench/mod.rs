//! File formats, synthetic data, campaign simulation and the command line.

pub mod campaign;
pub mod cli;
pub mod io;
pub mod rng;
pub mod synth;

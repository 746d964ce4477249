//! Secure access selection for satellite-terrestrial IoT.
//!
//! Orbit geometry, eavesdropping-aware secrecy capacity, M/M/1 queuing delay
//! and an evolutionary game over satellite shares, plus the benchmark
//! strategies and an experiment harness that sweeps population sizes.

pub mod channel;
pub mod error;
pub mod game;
pub mod geometry;
pub mod harness;
pub mod queueing;
pub mod secrecy;
pub mod strategies;

pub use error::{Error, Result};

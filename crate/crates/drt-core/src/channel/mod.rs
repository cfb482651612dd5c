//! Channel-level outputs built on top of traced rays.

pub mod doppler;
pub mod profile;
pub mod runner;

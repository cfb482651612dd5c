//! Dynamic ray tracing for moving radio environments.
//!
//! The engine traces multipath geometry once per coherence interval and then
//! advances every ray analytically: each interaction point carries position,
//! velocity and acceleration, so intermediate instants need no re-trace.
//! On top of the geometry sit UTD/Fresnel field evaluation, per-ray Doppler,
//! and power/delay/Doppler channel profiles.

pub mod math;
pub mod kinematics;
pub mod error;
pub mod scene;
pub mod geom;
pub mod path;
pub mod drt;
pub mod rt;
pub mod em;
pub mod channel;
pub mod validate;

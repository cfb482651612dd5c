//! Per-ray Doppler from interaction-point kinematics.
//!
//! Each hop TX -> Q1 -> ... -> RX re-emits the wave from a moving point, so
//! the received frequency is the chained product of one Doppler ratio per
//! segment. Because every interaction point carries an analytic velocity,
//! no phase differentiation across time steps is needed.

use crate::path::{RayPath, SPEED_OF_LIGHT};

/// Received carrier frequency for a wave of `f0` hertz sent along `path`.
///
/// Segment `i` runs from vertex `i` to vertex `i+1` with unit vector `k`;
/// the moving receiver of that segment scales the frequency by
/// `(c - v_next . k) / (c - v_prev . k)`.
pub fn received_frequency(path: &RayPath, f0: f64) -> f64 {
    let mut f = f0;
    for w in path.vertices.windows(2) {
        let k = (w[1].position - w[0].position).normalized();
        f *= (SPEED_OF_LIGHT - w[1].velocity.dot(k)) / (SPEED_OF_LIGHT - w[0].velocity.dot(k));
    }
    f
}

/// Doppler shift of the path, hertz.
pub fn doppler_shift(path: &RayPath, f0: f64) -> f64 {
    received_frequency(path, f0) - f0
}

/// First-order Doppler from the analytic path-length rate, hertz. Agrees
/// with [`doppler_shift`] to order `v/c`; kept as an independent check.
pub fn doppler_from_length_rate(path: &RayPath, f0: f64) -> f64 {
    -f0 / SPEED_OF_LIGHT * path.length_rate()
}

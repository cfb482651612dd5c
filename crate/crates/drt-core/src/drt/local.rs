//! Closed-form interaction-point kinematics in the wall / edge local frame.
//!
//! The wall case assumes the reflecting plane is `y = 0` with source and
//! receiver on the positive side; the edge case assumes the edge lies on the
//! local z axis. Moving geometry is handled by the caller through the
//! relative-motion frame sandwich, so everything here treats the geometry as
//! at rest.

use crate::error::PathError;
use crate::kinematics::KinematicState;
use crate::math::Vec3;

/// Denominator threshold below which the geometry is degenerate and the path
/// must be expired instead of extrapolated through the singularity.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Position, velocity and acceleration of one sliding coordinate of the
/// reflection point, from the in-axis and off-axis coordinates of source and
/// receiver. `p*` are coordinates along the wall (x or z), `y*` the heights
/// above the plane.
#[allow(clippy::too_many_arguments)]
fn sliding_coordinate(
    p_t: f64, y_t: f64, p_r: f64, y_r: f64,
    vp_t: f64, vy_t: f64, vp_r: f64, vy_r: f64,
    ap_t: f64, ay_t: f64, ap_r: f64, ay_r: f64,
) -> (f64, f64, f64) {
    let u = p_r - p_t;
    let d = y_t + y_r;
    let du = vp_r - vp_t;
    let dy = vy_t;
    let dd = vy_t + vy_r;
    let ddu = ap_r - ap_t;
    let ddy = ay_t;
    let ddd = ay_t + ay_r;

    let g = u * y_t / d;
    let dg = (du * y_t + u * dy) / d - u * y_t * dd / (d * d);
    let ddg = (ddu * y_t + 2.0 * du * dy + u * ddy) / d
        - (2.0 * (du * y_t + u * dy) * dd + u * y_t * ddd) / (d * d)
        + 2.0 * u * y_t * dd * dd / (d * d * d);

    (p_t + g, vp_t + dg, ap_t + ddg)
}

/// Full reflection-point kinematics in the wall frame (`y = 0` plane).
///
/// Both endpoints must be on the positive-y side; the y components of the
/// result are identically zero (the point slides in-plane).
pub fn reflection_point_local(
    tx: &KinematicState,
    rx: &KinematicState,
) -> Result<KinematicState, PathError> {
    let yt = tx.position.y;
    let yr = rx.position.y;
    if yt < -DEGENERACY_EPS || yr < -DEGENERACY_EPS {
        return Err(PathError::BehindPlane);
    }
    if yt + yr <= DEGENERACY_EPS {
        return Err(PathError::Degenerate("terminals on the reflecting plane".into()));
    }
    let (qx, vx, ax) = sliding_coordinate(
        tx.position.x, yt, rx.position.x, yr,
        tx.velocity.x, tx.velocity.y, rx.velocity.x, rx.velocity.y,
        tx.acceleration.x, tx.acceleration.y, rx.acceleration.x, rx.acceleration.y,
    );
    let (qz, vz, az) = sliding_coordinate(
        tx.position.z, yt, rx.position.z, yr,
        tx.velocity.z, tx.velocity.y, rx.velocity.z, rx.velocity.y,
        tx.acceleration.z, tx.acceleration.y, rx.acceleration.z, rx.acceleration.y,
    );
    Ok(KinematicState {
        position: Vec3::new(qx, 0.0, qz),
        velocity: Vec3::new(vx, 0.0, vz),
        acceleration: Vec3::new(ax, 0.0, az),
        reference_time: tx.reference_time,
    })
}

/// Full diffraction-point kinematics in the edge frame (edge on the z axis).
///
/// Velocity and acceleration are constrained to the z axis; the x and y
/// components are identically zero.
pub fn diffraction_point_local(
    tx: &KinematicState,
    rx: &KinematicState,
) -> Result<KinematicState, PathError> {
    let dist = |s: &KinematicState| (s.position.x * s.position.x + s.position.y * s.position.y).sqrt();
    let d_t = dist(tx);
    let d_r = dist(rx);
    if d_t <= DEGENERACY_EPS || d_r <= DEGENERACY_EPS || d_t + d_r <= DEGENERACY_EPS {
        return Err(PathError::Degenerate("terminal on the edge line".into()));
    }
    // First and second time derivatives of the 2D distances.
    let d_dot = |s: &KinematicState, d: f64| (s.position.x * s.velocity.x + s.position.y * s.velocity.y) / d;
    let d_ddot = |s: &KinematicState, d: f64, dd: f64| {
        (s.velocity.x * s.velocity.x
            + s.velocity.y * s.velocity.y
            + s.position.x * s.acceleration.x
            + s.position.y * s.acceleration.y)
            / d
            - dd * dd / d
    };
    let dt1 = d_dot(tx, d_t);
    let dr1 = d_dot(rx, d_r);
    let dt2 = d_ddot(tx, d_t, dt1);
    let dr2 = d_ddot(rx, d_r, dr1);

    let sum = d_t + d_r;
    let sum1 = dt1 + dr1;
    let w = d_r / sum;
    // w' and w'' via n = dR'·dT − dR·dT'.
    let n = dr1 * d_t - d_r * dt1;
    let n1 = dr2 * d_t - d_r * dt2;
    let w1 = n / (sum * sum);
    let w2 = n1 / (sum * sum) - 2.0 * n * sum1 / (sum * sum * sum);

    let zeta = tx.position.z - rx.position.z;
    let zeta1 = tx.velocity.z - rx.velocity.z;
    let zeta2 = tx.acceleration.z - rx.acceleration.z;

    let zq = rx.position.z + w * zeta;
    let vz = rx.velocity.z + w1 * zeta + w * zeta1;
    let az = rx.acceleration.z + w2 * zeta + 2.0 * w1 * zeta1 + w * zeta2;

    Ok(KinematicState {
        position: Vec3::new(0.0, 0.0, zq),
        velocity: Vec3::new(0.0, 0.0, vz),
        acceleration: Vec3::new(0.0, 0.0, az),
        reference_time: tx.reference_time,
    })
}

//! Rigid-body kinematics, moving reference frames and second-order motion
//! extrapolation.
//!
//! Everything here is a pure function on immutable values; the same
//! primitives serve the tracer, the analytic extrapolation core and the
//! finite-difference oracles.

use crate::math::{RotationMatrix, Vec3};

/// Position, velocity and acceleration of a point at a reference time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    /// Reference time the state is anchored to, seconds.
    pub reference_time: f64,
}

impl KinematicState {
    pub fn at_rest(position: Vec3) -> Self {
        KinematicState {
            position,
            velocity: Vec3::ZERO,
            acceleration: Vec3::ZERO,
            reference_time: 0.0,
        }
    }

    pub fn new(position: Vec3, velocity: Vec3, acceleration: Vec3, reference_time: f64) -> Self {
        KinematicState { position, velocity, acceleration, reference_time }
    }

    /// Second-order Taylor advance of the full state by `dt` seconds.
    ///
    /// Negative `dt` extrapolates backward (used by the oracles).
    pub fn advanced(&self, dt: f64) -> KinematicState {
        KinematicState {
            position: taylor_extrapolate(self, dt),
            velocity: self.velocity + self.acceleration * dt,
            acceleration: self.acceleration,
            reference_time: self.reference_time + dt,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.velocity.is_finite() && self.acceleration.is_finite()
    }
}

/// Position extrapolated by `r + v dt + a dt²/2`; exact for constant
/// acceleration.
pub fn taylor_extrapolate(state: &KinematicState, dt: f64) -> Vec3 {
    state.position + state.velocity * dt + state.acceleration * (0.5 * dt * dt)
}

/// Roto-translational motion of a rigid body: translation velocity and
/// acceleration of the rotation center, plus a fixed rotation axis with
/// scalar angular speed and angular acceleration.
///
/// Angular acceleration is constant over the extrapolation window and the
/// axis does not precess.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub translation_velocity: Vec3,
    pub translation_acceleration: Vec3,
    pub rotation_center: Vec3,
    /// Unit rotation axis (right-hand rule).
    pub rotation_axis: Vec3,
    /// rad/s
    pub angular_speed: f64,
    /// rad/s²
    pub angular_acceleration: f64,
}

impl RigidMotion {
    pub const STATIC: RigidMotion = RigidMotion {
        translation_velocity: Vec3::ZERO,
        translation_acceleration: Vec3::ZERO,
        rotation_center: Vec3::ZERO,
        rotation_axis: Vec3::Z,
        angular_speed: 0.0,
        angular_acceleration: 0.0,
    };

    pub fn translating(v: Vec3) -> Self {
        RigidMotion { translation_velocity: v, ..RigidMotion::STATIC }
    }

    pub fn is_static(&self) -> bool {
        self.translation_velocity == Vec3::ZERO
            && self.translation_acceleration == Vec3::ZERO
            && self.angular_speed == 0.0
            && self.angular_acceleration == 0.0
    }

    /// Accumulated rotation angle after `dt` seconds.
    pub fn rotation_angle(&self, dt: f64) -> f64 {
        self.angular_speed * dt + 0.5 * self.angular_acceleration * dt * dt
    }

    /// Instantaneous angular velocity vector at `t0 + dt`.
    pub fn omega_at(&self, dt: f64) -> Vec3 {
        self.rotation_axis * (self.angular_speed + self.angular_acceleration * dt)
    }

    pub fn omega_dot(&self) -> Vec3 {
        self.rotation_axis * self.angular_acceleration
    }

    /// Rotation matrix and rotation-center position at `t0 + dt`.
    pub fn pose_at(&self, dt: f64) -> (RotationMatrix, Vec3) {
        let rot = RotationMatrix::from_axis_angle(self.rotation_axis, self.rotation_angle(dt));
        let center = self.rotation_center
            + self.translation_velocity * dt
            + self.translation_acceleration * (0.5 * dt * dt);
        (rot, center)
    }

    /// Position at `t0 + dt` of a body point located at `p0` at `t0`.
    pub fn point_at(&self, p0: Vec3, dt: f64) -> Vec3 {
        let (rot, center) = self.pose_at(dt);
        center + rot.apply(p0 - self.rotation_center)
    }

    /// Instantaneous velocity of the body point currently located at `q`
    /// (global coordinates, evaluated at `t0 + dt`).
    pub fn velocity_at(&self, q: Vec3, dt: f64) -> Vec3 {
        let (_, center) = self.pose_at(dt);
        self.translation_velocity
            + self.translation_acceleration * dt
            + self.omega_at(dt).cross(q - center)
    }

    /// Instantaneous acceleration of the body point currently located at `q`.
    pub fn acceleration_at(&self, q: Vec3, dt: f64) -> Vec3 {
        let (_, center) = self.pose_at(dt);
        let r = q - center;
        let omega = self.omega_at(dt);
        self.translation_acceleration + self.omega_dot().cross(r) + omega.cross(omega.cross(r))
    }

    /// Full kinematic state of the body point at `p0` (its position at `t0`)
    /// evaluated at `t0 + dt`.
    pub fn point_state_at(&self, p0: Vec3, dt: f64, t0: f64) -> KinematicState {
        let q = self.point_at(p0, dt);
        KinematicState {
            position: q,
            velocity: self.velocity_at(q, dt),
            acceleration: self.acceleration_at(q, dt),
            reference_time: t0 + dt,
        }
    }
}

/// Velocity of a rigid-body point `q`: translation plus `ω × (q − center)`.
pub fn rigid_point_velocity(motion: &RigidMotion, q: Vec3) -> Vec3 {
    motion.velocity_at(q, 0.0)
}

/// Relative velocity seen by an observer co-rotating with the body:
/// `v − v_Π − ω × r` with `r` the position relative to the rotation center.
/// Components are still expressed along the global axes.
pub fn relative_velocity(v_global: Vec3, motion: &RigidMotion, r_local: Vec3) -> Vec3 {
    v_global - motion.translation_velocity - motion.omega_at(0.0).cross(r_local)
}

/// Relative acceleration in the co-rotating frame, removing Euler, Coriolis
/// and centrifugal terms. `v_rel` must come from [`relative_velocity`].
pub fn relative_acceleration(
    a_global: Vec3,
    motion: &RigidMotion,
    r_local: Vec3,
    v_rel: Vec3,
) -> Vec3 {
    let omega = motion.omega_at(0.0);
    a_global
        - motion.translation_acceleration
        - motion.omega_dot().cross(r_local)
        - 2.0 * omega.cross(v_rel)
        - omega.cross(omega.cross(r_local))
}

/// Inverse of [`relative_velocity`].
pub fn inverse_relative_velocity(v_rel: Vec3, motion: &RigidMotion, r_local: Vec3) -> Vec3 {
    v_rel + motion.translation_velocity + motion.omega_at(0.0).cross(r_local)
}

/// Inverse of [`relative_acceleration`].
pub fn inverse_relative_acceleration(
    a_rel: Vec3,
    motion: &RigidMotion,
    r_local: Vec3,
    v_rel: Vec3,
) -> Vec3 {
    let omega = motion.omega_at(0.0);
    a_rel
        + motion.translation_acceleration
        + motion.omega_dot().cross(r_local)
        + 2.0 * omega.cross(v_rel)
        + omega.cross(omega.cross(r_local))
}

/// Reference frame rigidly attached to a moving body, captured at one
/// evaluation instant.
///
/// `basis` columns are the local axes expressed in global coordinates, so
/// `basis.apply` maps local components to global components. The origin is a
/// body-fixed point; `origin_velocity`/`origin_acceleration` are its global
/// kinematics, and `omega`/`omega_dot` the body's instantaneous rotation.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    pub origin: Vec3,
    pub basis: RotationMatrix,
    pub origin_velocity: Vec3,
    pub origin_acceleration: Vec3,
    pub omega: Vec3,
    pub omega_dot: Vec3,
}

impl LocalFrame {
    /// Frame with the given origin/axes attached to a body whose motion is
    /// `motion`, evaluated `dt` seconds past the motion's reference time.
    /// The origin must already be at its instantaneous (posed) position.
    pub fn attached(origin: Vec3, basis: RotationMatrix, motion: &RigidMotion, dt: f64) -> Self {
        LocalFrame {
            origin,
            basis,
            origin_velocity: motion.velocity_at(origin, dt),
            origin_acceleration: motion.acceleration_at(origin, dt),
            omega: motion.omega_at(dt),
            omega_dot: motion.omega_dot(),
        }
    }

    pub fn static_frame(origin: Vec3, basis: RotationMatrix) -> Self {
        LocalFrame {
            origin,
            basis,
            origin_velocity: Vec3::ZERO,
            origin_acceleration: Vec3::ZERO,
            omega: Vec3::ZERO,
            omega_dot: Vec3::ZERO,
        }
    }

    pub fn point_to_local(&self, p: Vec3) -> Vec3 {
        self.basis.apply_transpose(p - self.origin)
    }

    pub fn point_to_global(&self, p_local: Vec3) -> Vec3 {
        self.origin + self.basis.apply(p_local)
    }

    pub fn vector_to_local(&self, v: Vec3) -> Vec3 {
        self.basis.apply_transpose(v)
    }

    pub fn vector_to_global(&self, v_local: Vec3) -> Vec3 {
        self.basis.apply(v_local)
    }

    /// Transforms a global kinematic state into the co-moving frame:
    /// coordinate transform for the position, relative-motion transform for
    /// velocity and acceleration, all components along the local axes.
    pub fn state_to_local(&self, s: &KinematicState) -> KinematicState {
        let r = s.position - self.origin;
        // Non-rotating frames skip the Coriolis/centripetal terms entirely;
        // they are the common case and the cross products are the bulk of
        // the flops here.
        if self.omega == Vec3::ZERO && self.omega_dot == Vec3::ZERO {
            return KinematicState {
                position: self.basis.apply_transpose(r),
                velocity: self.basis.apply_transpose(s.velocity - self.origin_velocity),
                acceleration: self
                    .basis
                    .apply_transpose(s.acceleration - self.origin_acceleration),
                reference_time: s.reference_time,
            };
        }
        let v_rel = s.velocity - self.origin_velocity - self.omega.cross(r);
        let a_rel = s.acceleration
            - self.origin_acceleration
            - self.omega_dot.cross(r)
            - 2.0 * self.omega.cross(v_rel)
            - self.omega.cross(self.omega.cross(r));
        KinematicState {
            position: self.basis.apply_transpose(r),
            velocity: self.basis.apply_transpose(v_rel),
            acceleration: self.basis.apply_transpose(a_rel),
            reference_time: s.reference_time,
        }
    }

    /// Inverse of [`Self::state_to_local`].
    pub fn state_to_global(&self, s: &KinematicState) -> KinematicState {
        let r = self.basis.apply(s.position);
        let v_rel = self.basis.apply(s.velocity);
        let a_rel = self.basis.apply(s.acceleration);
        if self.omega == Vec3::ZERO && self.omega_dot == Vec3::ZERO {
            return KinematicState {
                position: self.origin + r,
                velocity: v_rel + self.origin_velocity,
                acceleration: a_rel + self.origin_acceleration,
                reference_time: s.reference_time,
            };
        }
        KinematicState {
            position: self.origin + r,
            velocity: v_rel + self.origin_velocity + self.omega.cross(r),
            acceleration: a_rel
                + self.origin_acceleration
                + self.omega_dot.cross(r)
                + 2.0 * self.omega.cross(v_rel)
                + self.omega.cross(self.omega.cross(r)),
            reference_time: s.reference_time,
        }
    }
}

//! Ray/segment vs polygon predicates and obstruction testing.

use crate::math::Vec3;
use crate::scene::{FaceId, PosedFace, GEOM_EPS};

/// Mirror image of `p` across the plane of `face`.
pub fn mirror_point(p: Vec3, face: &PosedFace) -> Vec3 {
    p - face.normal * (2.0 * face.signed_distance(p))
}

/// Projects onto the two coordinates least aligned with the normal.
fn dominant_axes(normal: Vec3) -> (usize, usize) {
    let ax = normal.x.abs();
    let ay = normal.y.abs();
    let az = normal.z.abs();
    if ax >= ay && ax >= az {
        (1, 2)
    } else if ay >= az {
        (0, 2)
    } else {
        (0, 1)
    }
}

/// Point-in-polygon test for a point already on the face plane.
///
/// `tol` expands (`> 0`) or shrinks (`< 0`) the polygon by a distance margin
/// around its boundary, so "on the polygon to eps" and "strictly interior"
/// are both expressible.
pub fn point_in_polygon(face: &PosedFace, p: Vec3, tol: f64) -> bool {
    let (u, v) = dominant_axes(face.normal);
    let px = p[u];
    let py = p[v];
    let n = face.vertices.len();
    let mut inside = false;
    for i in 0..n {
        let a = face.vertices[i];
        let b = face.vertices[(i + 1) % n];
        let (ax, ay) = (a[u], a[v]);
        let (bx, by) = (b[u], b[v]);
        if (ay > py) != (by > py) {
            let x_cross = ax + (py - ay) / (by - ay) * (bx - ax);
            if px < x_cross {
                inside = !inside;
            }
        }
    }
    if tol == 0.0 {
        return inside;
    }
    let d = boundary_distance(face, p);
    if tol > 0.0 {
        inside || d <= tol
    } else {
        inside && d >= -tol
    }
}

/// 3D distance from `p` to the polygon's boundary segments.
pub fn boundary_distance(face: &PosedFace, p: Vec3) -> f64 {
    let n = face.vertices.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = face.vertices[i];
        let b = face.vertices[(i + 1) % n];
        let ab = b - a;
        let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
        best = best.min((a + ab * t).distance(p));
    }
    best
}

/// Intersection of segment `a -> b` with the face plane, as the segment
/// parameter, when the segment properly crosses the plane.
pub fn segment_plane_param(a: Vec3, b: Vec3, face: &PosedFace) -> Option<f64> {
    let da = face.signed_distance(a);
    let db = face.signed_distance(b);
    let denom = da - db;
    if denom.abs() < 1e-15 {
        return None;
    }
    let t = da / denom;
    if t.is_finite() {
        Some(t)
    } else {
        None
    }
}

/// Fraction of the segment interior treated as excluded near the endpoints
/// when testing for obstruction, so a segment that merely starts or ends on
/// a surface does not count as blocked by it.
const OBSTRUCTION_T_EPS: f64 = 1e-7;

/// Returns the first face (lowest id) strictly blocking the open segment
/// `a -> b`, ignoring faces listed in `skip`.
pub fn obstructing_face(a: Vec3, b: Vec3, faces: &[PosedFace], skip: &[FaceId]) -> Option<FaceId> {
    let mut hit: Option<FaceId> = None;
    for face in faces {
        if skip.contains(&face.id) {
            continue;
        }
        let Some(t) = segment_plane_param(a, b, face) else { continue };
        if t <= OBSTRUCTION_T_EPS || t >= 1.0 - OBSTRUCTION_T_EPS {
            continue;
        }
        let p = a + (b - a) * t;
        if point_in_polygon(face, p, -GEOM_EPS) {
            match hit {
                Some(prev) if prev <= face.id => {}
                _ => hit = Some(face.id),
            }
        }
    }
    hit
}

/// True when no scene face blocks the open segment.
pub fn segment_clear(a: Vec3, b: Vec3, faces: &[PosedFace], skip: &[FaceId]) -> bool {
    obstructing_face(a, b, faces, skip).is_none()
}

//! Total-field continuity across shadow and reflection boundaries.
//!
//! When the receiver crosses the incidence shadow boundary of a wedge, the
//! line-of-sight ray appears/disappears abruptly; the diffracted ray must
//! jump by the opposite amount so the total received power stays continuous.
//! Same at the reflection boundary for the specular ray.

use drt_core::drt::SolveContext;
use drt_core::em::field::{path_field, received_power_w, watts_to_dbm, CVec3};
use drt_core::math::Vec3;
use drt_core::path::RayPath;
use drt_core::rt::{trace_snapshot, TraceConfig};
use drt_core::scene::{parse_scene, Scene};

/// Thin vertical slab: x in [0,2], y in [-20,0], z in [-10,10]. The
/// silhouette edge for a transmitter on the upper-left is the top-right
/// corner line (2, 0, z).
fn wedge_scene() -> Scene {
    parse_scene(
        "scene t0 0\nGEOMETRY\nmaterial metal pec\n\
         object block material metal closed\n  box 1 -10 0  2 20 20\n\
         DYNAMICS\nterminal TX pos -30 6 0 freq 3e9 power 1\nterminal RX pos 10 10 0 freq 3e9\nEND\n",
    )
    .unwrap()
}

const EDGE_POINT: Vec3 = Vec3 { x: 2.0, y: 0.0, z: 0.0 };

fn rot_xy(v: Vec3, a: f64) -> Vec3 {
    Vec3::new(v.x * a.cos() - v.y * a.sin(), v.x * a.sin() + v.y * a.cos(), v.z)
}

fn paths_at(pos: Vec3, config: &TraceConfig) -> Vec<RayPath> {
    let mut scene = wedge_scene();
    scene.rx.kinematics.position = pos;
    trace_snapshot(&scene, 0.0, config, None)
}

/// Received power with the receiver placed at `pos`, all rays summed
/// coherently.
fn power_dbm_at(pos: Vec3) -> f64 {
    let mut scene = wedge_scene();
    scene.rx.kinematics.position = pos;
    let paths = trace_snapshot(&scene, 0.0, &TraceConfig::default(), None);
    assert!(!paths.is_empty(), "no paths at {pos:?}");
    let ctx = SolveContext::new(&scene, 0.0);
    let mut total = CVec3::ZERO;
    for p in &paths {
        total = total.add(path_field(&ctx, p).unwrap());
    }
    watts_to_dbm(received_power_w(total, scene.tx.carrier_hz))
}

/// Power just either side of the boundary azimuth, receiver on a 25 m arc
/// around the edge.
fn straddle(boundary_dir: Vec3, half_step_deg: f64) -> (f64, f64) {
    let base = boundary_dir.normalized();
    let h = half_step_deg.to_radians();
    let p_plus = power_dbm_at(EDGE_POINT + rot_xy(base, h) * 25.0);
    let p_minus = power_dbm_at(EDGE_POINT + rot_xy(base, -h) * 25.0);
    (p_plus, p_minus)
}

#[test]
fn incidence_shadow_boundary_is_continuous() {
    // Shadow boundary: ray from TX grazing the silhouette edge.
    let sb = EDGE_POINT - Vec3::new(-30.0, 6.0, 0.0);
    let (a, b) = straddle(sb, 0.01);
    assert!((a - b).abs() < 0.1, "power jump across ISB: {a:.3} vs {b:.3} dBm");

    // Sanity: the sweep really crosses the LoS boundary.
    let h = 0.01f64.to_radians();
    let base = sb.normalized();
    let cfg = TraceConfig::default();
    let lit = paths_at(EDGE_POINT + rot_xy(base, h) * 25.0, &cfg);
    let shadow = paths_at(EDGE_POINT + rot_xy(base, -h) * 25.0, &cfg);
    let has_los = |ps: &[RayPath]| ps.iter().any(|p| p.is_los());
    assert!(has_los(&lit) && !has_los(&shadow), "sweep does not straddle the LoS boundary");
    // And without the diffracted ray the jump would be macroscopic.
    let p_lit: f64 = watts_to_dbm(
        lit.iter().filter(|p| p.is_los()).map(|p| {
            let mut scene = wedge_scene();
            scene.rx.kinematics.position = EDGE_POINT + rot_xy(base, h) * 25.0;
            let ctx = SolveContext::new(&scene, 0.0);
            received_power_w(path_field(&ctx, p).unwrap(), 3e9)
        }).sum(),
    );
    assert!(p_lit.is_finite());
}

#[test]
fn reflection_boundary_is_continuous() {
    // Specular boundary off the top face (y = 0): ray from the mirrored
    // transmitter grazing the same edge. Only the rays involved in the
    // boundary are summed (specular + edge ray); the other rays vary
    // smoothly and would only add ordinary spatial fading between the two
    // probe points.
    let rb = EDGE_POINT - Vec3::new(-30.0, -6.0, 0.0);
    let base = rb.normalized();
    let h = 0.01f64.to_radians();
    let boundary_power = |pos: Vec3| {
        let mut scene = wedge_scene();
        scene.rx.kinematics.position = pos;
        let paths = trace_snapshot(&scene, 0.0, &TraceConfig::default(), None);
        let ctx = SolveContext::new(&scene, 0.0);
        let mut total = CVec3::ZERO;
        for p in paths.iter().filter(|p| {
            let l = p.label(&scene);
            l == "D[block/e5]" || (p.interactions.len() == 1 && l.starts_with('R'))
        }) {
            total = total.add(path_field(&ctx, p).unwrap());
        }
        watts_to_dbm(received_power_w(total, scene.tx.carrier_hz))
    };
    let a = boundary_power(EDGE_POINT + rot_xy(base, h) * 25.0);
    let b = boundary_power(EDGE_POINT + rot_xy(base, -h) * 25.0);
    assert!((a - b).abs() < 0.1, "power jump across RSB: {a:.3} vs {b:.3} dBm");

    // Sanity: the specular ray exists on exactly one side.
    let h = 0.01f64.to_radians();
    let base = rb.normalized();
    let cfg = TraceConfig::default();
    let above = paths_at(EDGE_POINT + rot_xy(base, h) * 25.0, &cfg);
    let below = paths_at(EDGE_POINT + rot_xy(base, -h) * 25.0, &cfg);
    let has_refl = |ps: &[RayPath]| {
        ps.iter().any(|p| {
            p.interactions.len() == 1
                && matches!(p.interactions[0], drt_core::path::InteractionKind::Reflection(_))
        })
    };
    assert!(
        has_refl(&above) != has_refl(&below),
        "sweep does not straddle the specular boundary"
    );
}

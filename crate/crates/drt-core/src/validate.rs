//! Self-check harness: randomized finite-difference oracles for the
//! analytic kinematics, frame transforms and Doppler chain.
//!
//! Every analytic velocity is checked against a central difference of the
//! analytically solved positions, and every acceleration against a second
//! difference, over seeded random configurations of moving walls, wedges
//! and terminals. The harness is deterministic for a given seed so failing
//! cases can be replayed exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::doppler::{doppler_from_length_rate, doppler_shift};
use crate::drt::{solve_structure, SolveContext};
use crate::kinematics::{KinematicState, RigidMotion};
use crate::math::{RotationMatrix, Vec3};
use crate::path::InteractionKind;
use crate::scene::{
    derive_edges, Antenna, EdgeId, Face, FaceId, Material, Scene, SceneObject, Terminal,
    TerminalRole,
};

/// Step for velocity central differences, seconds.
const H_VEL: f64 = 1e-6;
/// Step for acceleration second differences, seconds.
const H_ACC: f64 = 1e-4;

/// Deliberate errors that can be injected to prove the oracles have teeth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Flip the sign of the Coriolis term in the frame-transform check.
    CoriolisSign,
}

#[derive(Debug, Clone)]
pub struct CategoryReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    /// Case index and configuration of the worst offender.
    pub worst_case: usize,
    pub worst_detail: String,
}

impl CategoryReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub seed: u64,
    pub categories: Vec<CategoryReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.categories.iter().all(|c| c.passed())
    }

    /// Plain-text report, deterministic for a given seed.
    pub fn render(&self) -> String {
        let mut out = format!("validation seed {}\n", self.seed);
        for c in &self.categories {
            out.push_str(&format!(
                "{:<26} cases {:>5}  max_rel {:.3e}  tol {:.0e}  {}\n",
                c.name,
                c.cases,
                c.max_rel_error,
                c.tolerance,
                if c.passed() { "pass" } else { "FAIL" }
            ));
            if !c.passed() {
                out.push_str(&format!("  worst case {}: {}\n", c.worst_case, c.worst_detail));
            }
        }
        out.push_str(if self.passed() { "result pass\n" } else { "result FAIL\n" });
        out
    }
}

fn rand_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if let Some(u) = v.try_normalized(1e-3) {
            return u;
        }
    }
}

fn rand_vec(rng: &mut impl Rng, max: f64) -> Vec3 {
    rand_unit(rng) * rng.gen_range(0.0..max)
}

fn rand_basis(rng: &mut impl Rng) -> RotationMatrix {
    RotationMatrix::from_axis_angle(rand_unit(rng), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Random rigid motion; `case` cycles through static, translating, rotating
/// and fully general so all regimes are always covered.
fn rand_motion(rng: &mut impl Rng, case: usize, center: Vec3) -> RigidMotion {
    let translating = case % 4 == 1 || case % 4 == 3;
    let rotating = case % 4 >= 2;
    let mut m = RigidMotion::STATIC;
    if translating {
        m.translation_velocity = rand_vec(rng, 10.0);
        m.translation_acceleration = rand_vec(rng, 5.0);
    }
    if rotating {
        m.rotation_center = center + rand_vec(rng, 2.0);
        m.rotation_axis = rand_unit(rng);
        m.angular_speed = rng.gen_range(-1.0..1.0);
        m.angular_acceleration = rng.gen_range(-0.5..0.5);
    }
    m
}

fn rand_terminal(rng: &mut impl Rng, id: &str, role: TerminalRole, pos: Vec3) -> Terminal {
    Terminal {
        id: id.into(),
        role,
        kinematics: KinematicState::new(pos, rand_vec(rng, 10.0), rand_vec(rng, 5.0), 0.0),
        antenna: Antenna::Isotropic,
        carrier_hz: 3e9,
        power_w: 1.0,
    }
}

fn scene_with(object: SceneObject, tx: Terminal, rx: Terminal) -> Scene {
    Scene {
        materials: vec![Material {
            name: "m".into(),
            eps_r: 5.0,
            sigma: 0.01,
            scattering: 0.0,
            perfect_conductor: false,
        }],
        objects: vec![object],
        tx,
        rx,
        t0: 0.0,
    }
}

/// One reflecting wall with random pose and motion, terminals on its
/// positive side. The wall is oversized relative to the terminal envelope
/// so the reflection point never walks off the polygon within the
/// differencing stencil, but kept small in absolute terms: the second
/// difference divides position roundoff by h², so every meter of coordinate
/// magnitude costs oracle resolution.
fn reflection_scene(rng: &mut impl Rng, case: usize) -> Scene {
    let c = rand_vec(rng, 5.0);
    let b = rand_basis(rng);
    let half = 30.0;
    let verts: Vec<Vec3> = [(-half, -half), (half, -half), (half, half), (-half, half)]
        .iter()
        .map(|&(x, z)| c + b.apply(Vec3::new(x, 0.0, z)))
        .collect();
    // Wind so the normal is the local +y axis.
    let face = Face::new(vec![verts[0], verts[3], verts[2], verts[1]], 0).unwrap();
    let side = if face.normal.dot(b.apply(Vec3::Y)) > 0.0 { 1.0 } else { -1.0 };
    let place = |rng: &mut dyn rand::RngCore| {
        c + b.apply(Vec3::new(
            rng.gen_range(-8.0..8.0),
            side * rng.gen_range(6.0..20.0),
            rng.gen_range(-8.0..8.0),
        ))
    };
    let tx_pos = place(rng);
    let rx_pos = place(rng);
    let object = SceneObject {
        id: "wall".into(),
        edges: derive_edges(std::slice::from_ref(&face)),
        faces: vec![face],
        motion: rand_motion(rng, case, c),
        closed: false,
    };
    let tx = rand_terminal(rng, "TX", TerminalRole::Tx, tx_pos);
    let rx = rand_terminal(rng, "RX", TerminalRole::Rx, rx_pos);
    scene_with(object, tx, rx)
}

/// A long right-angle wedge with random pose and motion; terminals sit in
/// the exterior region on opposite sides of the face-A plane so the least
/// path wraps around the edge.
fn wedge_scene(rng: &mut impl Rng, case: usize) -> Scene {
    let c = rand_vec(rng, 5.0);
    let b = rand_basis(rng);
    let p = |x: f64, y: f64, z: f64| c + b.apply(Vec3::new(x, y, z));
    let half = 30.0;
    // Material occupies the local quadrant {x>0, y<0}; the shared edge is
    // the local z axis with a 270 degree exterior.
    let face_a = Face::new(
        vec![p(0., 0., -half), p(0., 0., half), p(60., 0., half), p(60., 0., -half)],
        0,
    )
    .unwrap();
    let face_b = Face::new(
        vec![p(0., 0., -half), p(0., -60., -half), p(0., -60., half), p(0., 0., half)],
        0,
    )
    .unwrap();
    let faces = vec![face_a, face_b];
    let object = SceneObject {
        id: "wedge".into(),
        edges: derive_edges(&faces),
        faces,
        motion: rand_motion(rng, case, c),
        closed: false,
    };
    assert_eq!(object.edges.len(), 1, "wedge must derive exactly one edge");
    let placed = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| {
        let phi = rng.gen_range(lo.to_radians()..hi.to_radians());
        let rad = rng.gen_range(8.0..20.0);
        p(rad * phi.cos(), rad * phi.sin(), rng.gen_range(-8.0..8.0))
    };
    let tx_pos = placed(rng, 20.0, 110.0);
    let rx_pos = placed(rng, 160.0, 250.0);
    let tx = rand_terminal(rng, "TX", TerminalRole::Tx, tx_pos);
    let rx = rand_terminal(rng, "RX", TerminalRole::Rx, rx_pos);
    scene_with(object, tx, rx)
}

/// Relative error with a 1 m/s (resp. m/s²) floor so static configurations
/// do not divide by zero.
fn rel_err(analytic: Vec3, fd: Vec3) -> f64 {
    (analytic - fd).norm() / fd.norm().max(1.0)
}

struct Accumulator {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max: f64,
    worst_case: usize,
    worst_detail: String,
}

impl Accumulator {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Accumulator { name, tolerance, cases: 0, max: 0.0, worst_case: 0, worst_detail: String::new() }
    }

    fn record(&mut self, case: usize, err: f64, detail: impl Fn() -> String) {
        self.cases += 1;
        if err > self.max {
            self.max = err;
            self.worst_case = case;
            self.worst_detail = detail();
        }
    }

    fn finish(self) -> CategoryReport {
        CategoryReport {
            name: self.name,
            cases: self.cases,
            max_rel_error: self.max,
            tolerance: self.tolerance,
            worst_case: self.worst_case,
            worst_detail: self.worst_detail,
        }
    }
}

/// Solves one structure at t and t±h and compares the analytic vertex
/// kinematics with finite differences of the solved positions.
fn check_structure(
    scene: &Scene,
    structure: &[InteractionKind],
    t: f64,
    case: usize,
    vel: &mut Accumulator,
    acc: &mut Accumulator,
    dop: &mut Accumulator,
) {
    let solve = |tt: f64| {
        let ctx = SolveContext::new(scene, tt);
        solve_structure(&ctx, structure)
    };
    let (Ok(mid), Ok(vp), Ok(vm)) = (solve(t), solve(t + H_VEL), solve(t - H_VEL)) else {
        return;
    };
    let (Ok(ap), Ok(am)) = (solve(t + H_ACC), solve(t - H_ACC)) else { return };
    let detail = || format!("{structure:?} t={t} tx={:?} rx={:?}", scene.tx.kinematics, scene.rx.kinematics);
    for i in 0..mid.vertices.len() {
        let v_fd = (vp.vertices[i].position - vm.vertices[i].position) * (0.5 / H_VEL);
        vel.record(case, rel_err(mid.vertices[i].velocity, v_fd), detail);
        let a_fd = (ap.vertices[i].position - 2.0 * mid.vertices[i].position
            + am.vertices[i].position)
            * (1.0 / (H_ACC * H_ACC));
        acc.record(case, rel_err(mid.vertices[i].acceleration, a_fd), detail);
    }
    // Doppler: exact per-segment product against the path-length rate, both
    // from the same analytic kinematics, and against a length difference.
    let f0 = scene.tx.carrier_hz;
    let fd_rate = doppler_from_length_rate(&mid, f0);
    let fd_diff = -f0 / crate::path::SPEED_OF_LIGHT * (vp.length - vm.length) * (0.5 / H_VEL);
    let analytic = doppler_shift(&mid, f0);
    let denom = fd_diff.abs().max(1.0);
    let err = ((analytic - fd_rate).abs()).max((analytic - fd_diff).abs()) / denom;
    dop.record(case, err, detail);
}

/// Frame-transform check: a random global state observed from a co-moving
/// wall frame; the local velocity/acceleration must differentiate the local
/// position trajectory. `fault` perturbs the analytic value to prove the
/// oracle catches sign errors.
fn check_frame(
    scene: &Scene,
    t: f64,
    case: usize,
    fault: Fault,
    rng: &mut impl Rng,
    vel: &mut Accumulator,
    acc: &mut Accumulator,
) {
    let state = KinematicState::new(rand_vec(rng, 20.0), rand_vec(rng, 10.0), rand_vec(rng, 5.0), t);
    let frame_at = |tt: f64| {
        let ctx = SolveContext::new(scene, tt);
        let face = ctx.faces[0].clone();
        ctx.wall_frame(&face)
    };
    let frame = frame_at(t);
    let mut local = frame.state_to_local(&state);
    if fault == Fault::CoriolisSign {
        // A flipped Coriolis sign shifts the relative acceleration by
        // 2 * (2 omega x v_rel).
        let omega_l = frame.vector_to_local(frame.omega);
        local.acceleration = local.acceleration + 4.0 * omega_l.cross(local.velocity);
    }
    let local_pos = |h: f64| frame_at(t + h).point_to_local(state.advanced(h).position);
    let detail = || format!("frame case t={t} state={state:?}");
    let v_fd = (local_pos(H_VEL) - local_pos(-H_VEL)) * (0.5 / H_VEL);
    vel.record(case, rel_err(local.velocity, v_fd), detail);
    let a_fd = (local_pos(H_ACC) - 2.0 * local.position + local_pos(-H_ACC)) * (1.0 / (H_ACC * H_ACC));
    acc.record(case, rel_err(local.acceleration, a_fd), detail);
}

/// Runs the full oracle suite: `cases` random configurations per geometry
/// kind, deterministic for a given `seed`.
pub fn run_validation(seed: u64, cases: usize, fault: Fault) -> ValidationReport {
    let mut refl_v = Accumulator::new("reflection_velocity", 1e-6);
    let mut refl_a = Accumulator::new("reflection_acceleration", 1e-5);
    let mut diff_v = Accumulator::new("diffraction_velocity", 1e-6);
    let mut diff_a = Accumulator::new("diffraction_acceleration", 1e-5);
    let mut rel_v = Accumulator::new("relative_velocity", 1e-6);
    let mut rel_a = Accumulator::new("relative_acceleration", 1e-5);
    let mut dop = Accumulator::new("doppler_product", 1e-4);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let t = rng.gen_range(0.0..0.3);

        let scene = reflection_scene(&mut rng, case);
        let structure = [InteractionKind::Reflection(FaceId { object: 0, face: 0 })];
        check_structure(&scene, &structure, t, case, &mut refl_v, &mut refl_a, &mut dop);
        check_frame(&scene, t, case, fault, &mut rng, &mut rel_v, &mut rel_a);

        let scene = wedge_scene(&mut rng, case);
        let structure = [InteractionKind::Diffraction(EdgeId { object: 0, edge: 0 })];
        check_structure(&scene, &structure, t, case, &mut diff_v, &mut diff_a, &mut dop);
    }

    ValidationReport {
        seed,
        categories: vec![
            refl_v.finish(),
            refl_a.finish(),
            diff_v.finish(),
            diff_a.finish(),
            rel_v.finish(),
            rel_a.finish(),
            dop.finish(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_suite_passes() {
        let r = run_validation(7, 50, Fault::None);
        assert!(r.passed(), "{}", r.render());
        // Every category must actually have run cases.
        for c in &r.categories {
            assert!(c.cases >= 50, "{} ran {} cases", c.name, c.cases);
        }
    }

    #[test]
    fn coriolis_sign_error_is_caught() {
        let r = run_validation(7, 20, Fault::CoriolisSign);
        let cat = r.categories.iter().find(|c| c.name == "relative_acceleration").unwrap();
        assert!(!cat.passed(), "injected Coriolis sign error went undetected");
        // Only the frame-transform acceleration should trip.
        for c in &r.categories {
            if c.name != "relative_acceleration" {
                assert!(c.passed(), "{} failed unexpectedly", c.name);
            }
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_validation(42, 30, Fault::None);
        let b = run_validation(42, 30, Fault::None);
        assert_eq!(a.render(), b.render());
    }
}

//! Analytic prolongation of ray paths: closed-form position, velocity and
//! acceleration of every interaction point at an arbitrary evaluation time,
//! without re-running the tracer.
//!
//! Moving walls and edges are handled by a frame sandwich: transform the
//! endpoint kinematics into a frame rigidly attached to the geometry (where
//! the static-geometry formulas of [`local`] apply), solve there, and
//! transform back.

pub mod local;

use crate::error::PathError;
use crate::geom::{obstructing_face, point_in_polygon};
use crate::kinematics::{KinematicState, LocalFrame};
use crate::math::RotationMatrix;
use crate::path::{InteractionKind, RayPath, TileSet};
use crate::scene::{EdgeId, FaceId, PosedEdge, PosedFace, Scene, GEOM_EPS};

/// Everything needed to solve and validate paths at one evaluation instant.
pub struct SolveContext<'s> {
    pub scene: &'s Scene,
    /// Absolute evaluation time.
    pub t: f64,
    /// Offset from the scene reference time.
    pub dt: f64,
    pub faces: Vec<PosedFace>,
    pub edges: Vec<PosedEdge>,
    pub tx: KinematicState,
    pub rx: KinematicState,
    pub tiles: Option<&'s TileSet>,
    /// Start of each object's faces in `faces` (the posing order).
    face_start: Vec<usize>,
    /// Per-face / per-edge frames, built on first use; every candidate and
    /// every extrapolated structure at this instant shares them.
    wall_frames: std::cell::OnceCell<Vec<LocalFrame>>,
    edge_frames: std::cell::OnceCell<Vec<LocalFrame>>,
}

impl<'s> SolveContext<'s> {
    pub fn new(scene: &'s Scene, t: f64) -> Self {
        Self::with_tiles(scene, t, None)
    }

    pub fn with_tiles(scene: &'s Scene, t: f64, tiles: Option<&'s TileSet>) -> Self {
        let (tx, rx) = scene.terminals_at(t);
        let mut faces = Vec::new();
        let mut edges = Vec::new();
        let mut face_start = Vec::with_capacity(scene.objects.len());
        for (i, obj) in scene.objects.iter().enumerate() {
            let (posed_f, posed_e) = scene.pose_at(i, t).expect("valid object index");
            face_start.push(faces.len());
            faces.extend(posed_f);
            for e in posed_e {
                if obj.edges[e.id.edge].diffraction_enabled {
                    edges.push(e);
                }
            }
        }
        SolveContext {
            scene,
            t,
            dt: t - scene.t0,
            faces,
            edges,
            tx,
            rx,
            tiles,
            face_start,
            wall_frames: std::cell::OnceCell::new(),
            edge_frames: std::cell::OnceCell::new(),
        }
    }

    pub fn face(&self, id: FaceId) -> &PosedFace {
        &self.faces[self.face_start[id.object] + id.face]
    }

    pub fn edge(&self, id: EdgeId) -> Option<&PosedEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Frame rigidly attached to a posed wall, y axis along the outward
    /// normal so the wall lies on the local plane y = 0.
    pub fn wall_frame(&self, face: &PosedFace) -> LocalFrame {
        let frames = self.wall_frames.get_or_init(|| {
            self.faces
                .iter()
                .map(|f| {
                    let basis = Scene::face_basis(f);
                    let motion = &self.scene.objects[f.id.object].motion;
                    LocalFrame::attached(f.vertices[0], basis, motion, self.dt)
                })
                .collect()
        });
        frames[self.face_start[face.id.object] + face.id.face]
    }

    /// Frame rigidly attached to a posed edge, z axis along the edge so the
    /// edge lies on the local z axis through the origin.
    pub fn edge_frame(&self, edge: &PosedEdge) -> LocalFrame {
        let frames = self.edge_frames.get_or_init(|| {
            self.edges
                .iter()
                .map(|e| {
                    let z = e.unit;
                    let x = z.any_perpendicular();
                    let y = z.cross(x);
                    let basis = RotationMatrix::from_columns(x, y, z);
                    let motion = &self.scene.objects[e.id.object].motion;
                    LocalFrame::attached(e.start, basis, motion, self.dt)
                })
                .collect()
        });
        let idx = self
            .edges
            .iter()
            .position(|e| e.id == edge.id)
            .expect("edge belongs to this context");
        frames[idx]
    }

    /// Kinematic state of a scattering tile centroid at the evaluation time.
    pub fn tile_state(&self, id: crate::scene::TileId) -> Result<KinematicState, PathError> {
        let tiles = self
            .tiles
            .ok_or_else(|| PathError::Degenerate("no tile set available".into()))?;
        let tile = tiles
            .get(id)
            .ok_or_else(|| PathError::Degenerate("unknown tile".into()))?;
        let motion = &self.scene.objects[id.object].motion;
        Ok(motion.point_state_at(tile.centroid, self.dt, self.scene.t0))
    }
}

/// Image of a source (terminal or deeper image) across a possibly moving
/// wall: mirrored position, and velocity/acceleration from the sign flip of
/// the normal components in the co-moving frame mapped back to the global
/// observer.
pub fn image_source_kinematics(source: &KinematicState, frame: &LocalFrame) -> KinematicState {
    let mut local = frame.state_to_local(source);
    local.position.y = -local.position.y;
    local.velocity.y = -local.velocity.y;
    local.acceleration.y = -local.acceleration.y;
    frame.state_to_global(&local)
}

/// Reflection-point kinematics on a possibly moving wall, global frame.
pub fn reflection_point_kinematics(
    source: &KinematicState,
    receiver: &KinematicState,
    face: &PosedFace,
    frame: &LocalFrame,
) -> Result<KinematicState, PathError> {
    let s = frame.state_to_local(source);
    let r = frame.state_to_local(receiver);
    let q_local = local::reflection_point_local(&s, &r)?;
    let q = frame.state_to_global(&q_local);
    if !point_in_polygon(face, q.position, GEOM_EPS) {
        return Err(PathError::LeftGeometry("face polygon"));
    }
    Ok(q)
}

/// Diffraction-point kinematics on a possibly moving edge, global frame.
pub fn diffraction_point_kinematics(
    source: &KinematicState,
    receiver: &KinematicState,
    edge: &PosedEdge,
    frame: &LocalFrame,
) -> Result<KinematicState, PathError> {
    let s = frame.state_to_local(source);
    let r = frame.state_to_local(receiver);
    let q_local = local::diffraction_point_local(&s, &r)?;
    let len = (edge.end - edge.start).norm();
    if q_local.position.z < -GEOM_EPS || q_local.position.z > len + GEOM_EPS {
        return Err(PathError::LeftGeometry("edge segment"));
    }
    Ok(frame.state_to_global(&q_local))
}

/// Longest interaction chain the stack-allocated solver accepts; the
/// enumeration budget stays well under this.
const MAX_CHAIN: usize = 8;

/// Solves the geometry and kinematics of one path structure at the context's
/// evaluation time. Does not test obstruction; see [`validate_path`].
pub fn solve_structure(
    ctx: &SolveContext,
    interactions: &[InteractionKind],
) -> Result<RayPath, PathError> {
    if interactions.len() > MAX_CHAIN {
        return Err(PathError::Degenerate("interaction chain too long".into()));
    }
    let mut states = [None::<KinematicState>; MAX_CHAIN];

    // Scatter points are body-fixed: resolve them first, then solve each
    // stretch between fixed endpoints independently.
    for (i, item) in interactions.iter().enumerate() {
        if let InteractionKind::Scatter(tid) = item {
            states[i] = Some(ctx.tile_state(*tid)?);
        }
    }
    let mut start = 0usize; // index into interactions, start of current stretch
    let mut source = ctx.tx;
    for i in 0..=interactions.len() {
        let at_end = i == interactions.len();
        let is_fixed = !at_end && states[i].is_some();
        if !at_end && !is_fixed {
            continue;
        }
        let receiver = if at_end { ctx.rx } else { states[i].unwrap() };
        solve_stretch(ctx, &source, &receiver, &interactions[start..i], &mut states[start..i])?;
        if !at_end {
            source = states[i].unwrap();
            start = i + 1;
        }
    }

    let mut vertices = Vec::with_capacity(interactions.len() + 2);
    vertices.push(ctx.tx);
    vertices.extend(states[..interactions.len()].iter().map(|s| s.unwrap()));
    vertices.push(ctx.rx);
    Ok(RayPath::assemble(interactions.to_vec(), vertices, ctx.t))
}

/// Solves a stretch of reflections with at most one diffraction between two
/// endpoints of known kinematics, by image construction and back-tracking,
/// writing the interaction-point states into `out`.
fn solve_stretch(
    ctx: &SolveContext,
    source: &KinematicState,
    receiver: &KinematicState,
    items: &[InteractionKind],
    out: &mut [Option<KinematicState>],
) -> Result<(), PathError> {
    if items.is_empty() {
        return Ok(());
    }
    let wall = |id: FaceId| {
        let face = ctx.face(id);
        let frame = ctx.wall_frame(face);
        (face, frame)
    };
    let diff_idx = items
        .iter()
        .position(|i| matches!(i, InteractionKind::Diffraction(_)));

    // Forward image chain of the source through the walls before the
    // diffraction (or all of them): src_images[i] is the effective source
    // illuminating interaction i.
    let forward_limit = diff_idx.unwrap_or(items.len());
    let mut src_images = [*source; MAX_CHAIN + 1];
    for (k, item) in items.iter().take(forward_limit).enumerate() {
        let InteractionKind::Reflection(fid) = item else {
            return Err(PathError::Degenerate("unsupported interaction order".into()));
        };
        let (_, frame) = wall(*fid);
        src_images[k + 1] = image_source_kinematics(&src_images[k], &frame);
    }

    let states = out;

    if let Some(j) = diff_idx {
        // Backward image chain of the receiver through the walls after the
        // diffraction: rcv_images[m] is the effective receiver seen from
        // interaction m.
        let mut rcv_images = [*receiver; MAX_CHAIN + 1];
        for m in (j + 1..items.len()).rev() {
            let InteractionKind::Reflection(fid) = items[m] else {
                return Err(PathError::Degenerate("multiple diffractions per stretch".into()));
            };
            let (_, frame) = wall(fid);
            rcv_images[m] = image_source_kinematics(&rcv_images[m + 1], &frame);
        }
        let InteractionKind::Diffraction(eid) = items[j] else { unreachable!() };
        let edge = ctx
            .edge(eid)
            .ok_or_else(|| PathError::Degenerate("unknown edge".into()))?;
        let frame = ctx.edge_frame(edge);
        let qd = diffraction_point_kinematics(&src_images[j], &rcv_images[j + 1], edge, &frame)?;
        states[j] = Some(qd);
        // Back-track the source side toward the source.
        for i in (0..j).rev() {
            let InteractionKind::Reflection(fid) = items[i] else { unreachable!() };
            let (face, frame) = wall(fid);
            let recv = states[i + 1].unwrap();
            states[i] = Some(reflection_point_kinematics(&src_images[i], &recv, face, &frame)?);
        }
        // And the receiver side away from the diffraction point.
        for m in j + 1..items.len() {
            let InteractionKind::Reflection(fid) = items[m] else { unreachable!() };
            let (face, frame) = wall(fid);
            let src = states[m - 1].unwrap();
            states[m] = Some(reflection_point_kinematics(&src, &rcv_images[m + 1], face, &frame)?);
        }
    } else {
        // Pure reflections: back-track from the receiver, each solved point
        // becoming the virtual receiver of the previous wall.
        for i in (0..items.len()).rev() {
            let InteractionKind::Reflection(fid) = items[i] else {
                return Err(PathError::Degenerate("unsupported interaction order".into()));
            };
            let (face, frame) = wall(fid);
            let recv = if i + 1 == items.len() { *receiver } else { states[i + 1].unwrap() };
            states[i] = Some(reflection_point_kinematics(&src_images[i], &recv, face, &frame)?);
        }
    }
    Ok(())
}

/// Faces a segment endpoint legitimately touches, excluded from its
/// obstruction test. Appends to a fixed skip buffer, returning the new count.
fn touched_faces(
    ctx: &SolveContext,
    item: Option<&InteractionKind>,
    skip: &mut [FaceId; 4],
    mut n: usize,
) -> usize {
    match item {
        None => {}
        Some(InteractionKind::Reflection(f)) => {
            skip[n] = *f;
            n += 1;
        }
        Some(InteractionKind::Diffraction(e)) => {
            let obj = e.object;
            let edge = &ctx.scene.objects[obj].edges[e.edge];
            skip[n] = FaceId { object: obj, face: edge.faces.0 };
            skip[n + 1] = FaceId { object: obj, face: edge.faces.1 };
            n += 2;
        }
        Some(InteractionKind::Scatter(t)) => {
            skip[n] = FaceId { object: t.object, face: t.face };
            n += 1;
        }
    }
    n
}

/// Checks that no segment of a solved path is blocked by scene geometry.
pub fn validate_obstruction(ctx: &SolveContext, path: &RayPath) -> Result<(), PathError> {
    for s in 0..path.vertices.len() - 1 {
        let a = path.vertices[s].position;
        let b = path.vertices[s + 1].position;
        let mut skip = [FaceId { object: 0, face: 0 }; 4];
        let mut n = 0;
        if s > 0 {
            n = touched_faces(ctx, path.interactions.get(s - 1), &mut skip, n);
        }
        n = touched_faces(ctx, path.interactions.get(s), &mut skip, n);
        if obstructing_face(a, b, &ctx.faces, &skip[..n]).is_some() {
            return Err(PathError::Obstructed(s));
        }
    }
    Ok(())
}

/// Checks that a solved path is still physically valid at the context time:
/// every interaction point on its geometry primitive and every segment
/// unobstructed. Returns the first failure.
pub fn validate_path(ctx: &SolveContext, path: &RayPath) -> Result<(), PathError> {
    for (i, item) in path.interactions.iter().enumerate() {
        let p = path.vertices[i + 1].position;
        match item {
            InteractionKind::Reflection(fid) => {
                let face = ctx.face(*fid);
                if face.signed_distance(p).abs() > 1e-6 || !point_in_polygon(face, p, GEOM_EPS) {
                    return Err(PathError::LeftGeometry("face polygon"));
                }
            }
            InteractionKind::Diffraction(eid) => {
                let edge = ctx
                    .edge(*eid)
                    .ok_or(PathError::LeftGeometry("edge segment"))?;
                let d = edge.unit.cross(p - edge.start).norm();
                let z = (p - edge.start).dot(edge.unit);
                let len = (edge.end - edge.start).norm();
                if d > 1e-6 || z < -GEOM_EPS || z > len + GEOM_EPS {
                    return Err(PathError::LeftGeometry("edge segment"));
                }
            }
            InteractionKind::Scatter(_) => {}
        }
    }
    validate_obstruction(ctx, path)
}

/// Result of prolonging one path structure to a new instant.
#[derive(Debug, Clone)]
pub struct Extrapolated<'a> {
    pub structure: &'a [InteractionKind],
    pub result: Result<RayPath, PathError>,
}

/// Prolongs every path of a `t0` snapshot to the context's evaluation time.
/// Paths that fail to solve or validate are flagged expired (carrying the
/// failure reason), never silently dropped; no new paths are fabricated.
/// Geometric containment (point on face, on edge) is already enforced by
/// the solver, so validation here only re-tests obstruction.
pub fn extrapolate_paths<'a>(
    ctx: &SolveContext,
    structures: &'a [Vec<InteractionKind>],
) -> Vec<Extrapolated<'a>> {
    structures
        .iter()
        .map(|s| {
            let result = solve_structure(ctx, s)
                .and_then(|p| validate_obstruction(ctx, &p).map(|_| p));
            Extrapolated { structure: s, result }
        })
        .collect()
}

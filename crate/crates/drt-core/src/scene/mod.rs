//! Dynamic environment database: polyhedral objects with materials and
//! rigid-body motions, plus the two radio terminals.
//!
//! The database has two parts: the geometry at the reference time `t0` and
//! the dynamics (per-object motion, per-terminal kinematics). A `Scene` is
//! immutable after parsing and shared read-only across threads.

mod parse;

pub use parse::parse_scene;

use crate::error::SceneError;
use crate::kinematics::{KinematicState, RigidMotion};
use crate::math::{RotationMatrix, Vec3};

/// Coplanarity / on-surface tolerance, meters.
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Relative permittivity; ignored for perfect conductors.
    pub eps_r: f64,
    /// Conductivity, S/m.
    pub sigma: f64,
    /// Effective-Roughness scattering coefficient, 0 disables diffuse scatter.
    pub scattering: f64,
    pub perfect_conductor: bool,
}

impl Material {
    pub fn validate(&self) -> Result<(), SceneError> {
        if !self.perfect_conductor && self.eps_r < 1.0 {
            return Err(SceneError::Invalid(format!(
                "material '{}': eps_r must be >= 1",
                self.name
            )));
        }
        if self.sigma < 0.0 || !(0.0..=1.0).contains(&self.scattering) {
            return Err(SceneError::Invalid(format!(
                "material '{}': sigma must be >= 0 and scattering in [0,1]",
                self.name
            )));
        }
        Ok(())
    }
}

/// Planar polygon with outward normal, stored at its `t0` pose.
#[derive(Debug, Clone)]
pub struct Face {
    pub vertices: Vec<Vec3>,
    pub normal: Vec3,
    pub material: usize,
}

impl Face {
    /// Builds a face from an ordered vertex ring; the normal follows the
    /// winding (counter-clockwise seen from outside).
    pub fn new(vertices: Vec<Vec3>, material: usize) -> Result<Self, SceneError> {
        if vertices.len() < 3 {
            return Err(SceneError::Invalid(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        // Newell's method.
        let mut n = Vec3::ZERO;
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            n.x += (a.y - b.y) * (a.z + b.z);
            n.y += (a.z - b.z) * (a.x + b.x);
            n.z += (a.x - b.x) * (a.y + b.y);
        }
        let normal = n
            .try_normalized(1e-12)
            .ok_or_else(|| SceneError::Invalid("degenerate polygon (zero area)".into()))?;
        let face = Face { vertices, normal, material };
        face.check_coplanar()?;
        Ok(face)
    }

    fn check_coplanar(&self) -> Result<(), SceneError> {
        let p0 = self.vertices[0];
        for v in &self.vertices {
            if (*v - p0).dot(self.normal).abs() > GEOM_EPS {
                return Err(SceneError::Invalid("polygon vertices not coplanar".into()));
            }
        }
        Ok(())
    }

    pub fn centroid(&self) -> Vec3 {
        let mut c = Vec3::ZERO;
        for v in &self.vertices {
            c += *v;
        }
        c / self.vertices.len() as f64
    }

    pub fn area(&self) -> f64 {
        let p0 = self.vertices[0];
        let mut a = 0.0;
        for i in 1..self.vertices.len() - 1 {
            a += (self.vertices[i] - p0).cross(self.vertices[i + 1] - p0).norm() * 0.5;
        }
        a
    }
}

/// Straight edge shared by two faces of an object.
#[derive(Debug, Clone)]
pub struct Edge {
    pub start: Vec3,
    pub end: Vec3,
    /// Indices of the two adjacent faces within the owning object.
    pub faces: (usize, usize),
    /// Interior (material-side) wedge angle, rad.
    pub wedge_angle: f64,
    /// Unit edge vector from start to end.
    pub unit: Vec3,
    /// Diffraction is only meaningful for exterior wedges.
    pub diffraction_enabled: bool,
}

#[derive(Debug, Clone)]
pub struct SceneObject {
    pub id: String,
    pub faces: Vec<Face>,
    pub edges: Vec<Edge>,
    pub motion: RigidMotion,
    /// `true` when the face set encloses a volume; open wall sets are allowed
    /// so street canyons can be expressed as slabs.
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalRole {
    Tx,
    Rx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Antenna {
    Isotropic,
    /// Half-wave dipole oriented along the global z axis.
    HalfWaveDipole,
}

#[derive(Debug, Clone)]
pub struct Terminal {
    pub id: String,
    pub role: TerminalRole,
    pub kinematics: KinematicState,
    pub antenna: Antenna,
    pub carrier_hz: f64,
    /// Transmit power, W; only meaningful for the TX.
    pub power_w: f64,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub materials: Vec<Material>,
    pub objects: Vec<SceneObject>,
    pub tx: Terminal,
    pub rx: Terminal,
    pub t0: f64,
}

/// Face identity across the scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId {
    pub object: usize,
    pub face: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub object: usize,
    pub edge: usize,
}

/// Triangular diffuse-scattering tile derived from a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileId {
    pub object: usize,
    pub face: usize,
    pub tile: usize,
}

/// A face polygon mapped to its pose at some evaluation time.
#[derive(Debug, Clone)]
pub struct PosedFace {
    pub id: FaceId,
    pub vertices: Vec<Vec3>,
    pub normal: Vec3,
    pub material: usize,
}

impl PosedFace {
    /// Signed distance of `p` from the face plane (positive on the outward side).
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.vertices[0]).dot(self.normal)
    }

    pub fn centroid(&self) -> Vec3 {
        let mut c = Vec3::ZERO;
        for v in &self.vertices {
            c += *v;
        }
        c / self.vertices.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct PosedEdge {
    pub id: EdgeId,
    pub start: Vec3,
    pub end: Vec3,
    pub unit: Vec3,
    pub faces: (usize, usize),
    pub wedge_angle: f64,
}

impl Scene {
    /// Full validation of all invariants; called by the parser.
    pub fn validate(&self) -> Result<(), SceneError> {
        for m in &self.materials {
            m.validate()?;
        }
        let mut seen = std::collections::HashSet::new();
        for obj in &self.objects {
            if !seen.insert(obj.id.clone()) {
                return Err(SceneError::DuplicateId(obj.id.clone()));
            }
            if obj.faces.is_empty() {
                return Err(SceneError::Invalid(format!("object '{}' has no faces", obj.id)));
            }
            let axis_norm = obj.motion.rotation_axis.norm();
            if (axis_norm - 1.0).abs() > 1e-12 {
                return Err(SceneError::Invalid(format!(
                    "object '{}': rotation axis must be a unit vector",
                    obj.id
                )));
            }
            for (fi, f) in obj.faces.iter().enumerate() {
                f.check_coplanar().map_err(|_| {
                    SceneError::Invalid(format!(
                        "object '{}' face {}: vertices not coplanar",
                        obj.id, fi
                    ))
                })?;
                if f.material >= self.materials.len() {
                    return Err(SceneError::Invalid(format!(
                        "object '{}' face {}: material index out of range",
                        obj.id, fi
                    )));
                }
            }
        }
        if self.tx.carrier_hz <= 0.0 || self.rx.carrier_hz <= 0.0 {
            return Err(SceneError::Invalid("carrier frequency must be positive".into()));
        }
        if self.tx.power_w <= 0.0 {
            return Err(SceneError::Invalid("TX power must be positive".into()));
        }
        Ok(())
    }

    /// Geometry of one object's faces and edges mapped to time `t`
    /// (`t` is absolute; poses advance from `t0`).
    pub fn pose_at(&self, object: usize, t: f64) -> Result<(Vec<PosedFace>, Vec<PosedEdge>), SceneError> {
        let obj = self
            .objects
            .get(object)
            .ok_or_else(|| SceneError::UnknownObject(format!("#{object}")))?;
        let dt = t - self.t0;
        let (rot, center) = obj.motion.pose_at(dt);
        let map = |p: Vec3| center + rot.apply(p - obj.motion.rotation_center);
        let faces = obj
            .faces
            .iter()
            .enumerate()
            .map(|(fi, f)| PosedFace {
                id: FaceId { object, face: fi },
                vertices: f.vertices.iter().map(|v| map(*v)).collect(),
                normal: rot.apply(f.normal),
                material: f.material,
            })
            .collect();
        let edges = obj
            .edges
            .iter()
            .enumerate()
            .map(|(ei, e)| PosedEdge {
                id: EdgeId { object, edge: ei },
                start: map(e.start),
                end: map(e.end),
                unit: rot.apply(e.unit),
                faces: e.faces,
                wedge_angle: e.wedge_angle,
            })
            .collect();
        Ok((faces, edges))
    }

    /// All faces of all objects posed at time `t`.
    pub fn posed_faces(&self, t: f64) -> Vec<PosedFace> {
        let mut out = Vec::new();
        for i in 0..self.objects.len() {
            let (faces, _) = self.pose_at(i, t).expect("valid index");
            out.extend(faces);
        }
        out
    }

    /// All diffraction-enabled edges posed at time `t`.
    pub fn posed_edges(&self, t: f64) -> Vec<PosedEdge> {
        let mut out = Vec::new();
        for (i, obj) in self.objects.iter().enumerate() {
            let (_, edges) = self.pose_at(i, t).expect("valid index");
            for e in edges {
                if obj.edges[e.id.edge].diffraction_enabled {
                    out.push(e);
                }
            }
        }
        out
    }

    /// TX/RX kinematic states advanced to time `t`.
    pub fn terminals_at(&self, t: f64) -> (KinematicState, KinematicState) {
        let dt = t - self.t0;
        (self.tx.kinematics.advanced(dt), self.rx.kinematics.advanced(dt))
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    pub fn material_of(&self, fid: FaceId) -> &Material {
        &self.materials[self.objects[fid.object].faces[fid.face].material]
    }

    /// Local frame basis for a posed face: y axis along the outward normal,
    /// x and z spanning the wall plane (right-handed).
    pub fn face_basis(face: &PosedFace) -> RotationMatrix {
        let y = face.normal;
        let x = (face.vertices[1] - face.vertices[0]).normalized();
        let z = x.cross(y);
        RotationMatrix::from_columns(x, y, z)
    }
}

/// Derives the edge list of an object from face adjacency: two faces sharing
/// a vertex pair form a wedge. Diffraction is enabled for exterior wedges
/// (material dihedral below pi).
pub fn derive_edges(faces: &[Face]) -> Vec<Edge> {
    let mut edges = Vec::new();
    let close = |a: Vec3, b: Vec3| a.distance(b) < GEOM_EPS;
    for i in 0..faces.len() {
        for j in (i + 1)..faces.len() {
            let fa = &faces[i];
            let fb = &faces[j];
            // Collect the shared vertex pair, if any.
            let mut shared = Vec::new();
            for va in &fa.vertices {
                if fb.vertices.iter().any(|vb| close(*va, *vb)) {
                    shared.push(*va);
                }
            }
            if shared.len() != 2 {
                continue;
            }
            let (s, e) = (shared[0], shared[1]);
            let Some(unit) = (e - s).try_normalized(GEOM_EPS) else { continue };
            // In-plane tangents pointing from the edge into each face.
            let mid = (s + e) * 0.5;
            let toward = |f: &Face| {
                let c = f.centroid();
                let d = c - mid;
                (d - unit * d.dot(unit)).try_normalized(1e-12)
            };
            let (Some(ta), Some(tb)) = (toward(fa), toward(fb)) else { continue };
            // Interior dihedral: angle between the half planes measured through
            // the material side (opposite the outward normals).
            let cosg = ta.dot(tb).clamp(-1.0, 1.0);
            let gamma = cosg.acos();
            let exterior_bisector = (fa.normal + fb.normal).try_normalized(1e-9);
            let interior = match exterior_bisector {
                // If the tangent bisector points along the outward normals the
                // gap between the faces is on the exterior side.
                Some(nb) if (ta + tb).dot(nb) > 0.0 => 2.0 * std::f64::consts::PI - gamma,
                _ => gamma,
            };
            let exterior = 2.0 * std::f64::consts::PI - interior;
            edges.push(Edge {
                start: s,
                end: e,
                faces: (i, j),
                wedge_angle: interior,
                unit,
                diffraction_enabled: exterior > std::f64::consts::PI + 1e-9,
            });
        }
    }
    edges
}

/// Serializes a scene back to the text format; `parse(serialize(s))` yields
/// an identical scene.
pub fn serialize_scene(scene: &Scene) -> String {
    let mut out = String::new();
    let f = |x: f64| format!("{x:?}");
    out.push_str(&format!("scene t0 {}\n\nGEOMETRY\n", f(scene.t0)));
    for m in &scene.materials {
        if m.perfect_conductor {
            out.push_str(&format!("material {} pec scatter {}\n", m.name, f(m.scattering)));
        } else {
            out.push_str(&format!(
                "material {} eps_r {} sigma {} scatter {}\n",
                m.name,
                f(m.eps_r),
                f(m.sigma),
                f(m.scattering)
            ));
        }
    }
    for obj in &scene.objects {
        let kind = if obj.closed { "closed" } else { "open" };
        out.push_str(&format!(
            "object {} material {} {}\n",
            obj.id, scene.materials[obj.faces[0].material].name, kind
        ));
        for face in &obj.faces {
            out.push_str("  face");
            for v in &face.vertices {
                out.push_str(&format!(" {} {} {}", f(v.x), f(v.y), f(v.z)));
            }
            out.push('\n');
        }
    }
    out.push_str("\nDYNAMICS\n");
    for obj in &scene.objects {
        let m = &obj.motion;
        if m.is_static() {
            continue;
        }
        out.push_str(&format!(
            "motion {} vel {} {} {} acc {} {} {} rot center {} {} {} axis {} {} {} omega {} alpha {}\n",
            obj.id,
            f(m.translation_velocity.x),
            f(m.translation_velocity.y),
            f(m.translation_velocity.z),
            f(m.translation_acceleration.x),
            f(m.translation_acceleration.y),
            f(m.translation_acceleration.z),
            f(m.rotation_center.x),
            f(m.rotation_center.y),
            f(m.rotation_center.z),
            f(m.rotation_axis.x),
            f(m.rotation_axis.y),
            f(m.rotation_axis.z),
            f(m.angular_speed),
            f(m.angular_acceleration)
        ));
    }
    for term in [&scene.tx, &scene.rx] {
        let k = &term.kinematics;
        let ant = match term.antenna {
            Antenna::Isotropic => "iso",
            Antenna::HalfWaveDipole => "dipole",
        };
        out.push_str(&format!(
            "terminal {} pos {} {} {} vel {} {} {} acc {} {} {} freq {} power {} antenna {}\n",
            term.id,
            f(k.position.x),
            f(k.position.y),
            f(k.position.z),
            f(k.velocity.x),
            f(k.velocity.y),
            f(k.velocity.z),
            f(k.acceleration.x),
            f(k.acceleration.y),
            f(k.acceleration.z),
            f(term.carrier_hz),
            f(term.power_w),
            ant
        ));
    }
    out.push_str("END\n");
    out
}

//! Ray path representation shared by the tracer and the analytic
//! extrapolation core.

use crate::kinematics::KinematicState;
use crate::math::Vec3;
use crate::scene::{EdgeId, Face, FaceId, Scene, TileId};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One interaction along a ray's polygonal chain.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum InteractionKind {
    Reflection(FaceId),
    Diffraction(EdgeId),
    Scatter(TileId),
}

impl InteractionKind {
    pub fn label(&self, scene: &Scene) -> String {
        match self {
            InteractionKind::Reflection(f) => {
                format!("R[{}/f{}]", scene.objects[f.object].id, f.face)
            }
            InteractionKind::Diffraction(e) => {
                format!("D[{}/e{}]", scene.objects[e.object].id, e.edge)
            }
            InteractionKind::Scatter(t) => {
                format!("S[{}/f{}/t{}]", scene.objects[t.object].id, t.face, t.tile)
            }
        }
    }
}

/// Polygonal chain TX -> interaction points -> RX with per-vertex kinematics
/// at one evaluation instant.
#[derive(Debug, Clone)]
pub struct RayPath {
    pub interactions: Vec<InteractionKind>,
    /// `[TX, interaction points ..., RX]`, same order as `interactions`.
    pub vertices: Vec<KinematicState>,
    /// Evaluation time, absolute seconds.
    pub time: f64,
    /// Total unfolded length, m.
    pub length: f64,
    /// Propagation delay, s.
    pub delay: f64,
}

impl RayPath {
    pub fn assemble(
        interactions: Vec<InteractionKind>,
        vertices: Vec<KinematicState>,
        time: f64,
    ) -> Self {
        let length: f64 = vertices
            .windows(2)
            .map(|w| (w[1].position - w[0].position).norm())
            .sum();
        RayPath { interactions, vertices, time, length, delay: length / SPEED_OF_LIGHT }
    }

    pub fn is_los(&self) -> bool {
        self.interactions.is_empty()
    }

    /// Stable human-readable identity of the path's structure.
    pub fn label(&self, scene: &Scene) -> String {
        if self.is_los() {
            return "LoS".to_string();
        }
        self.interactions
            .iter()
            .map(|i| i.label(scene))
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Total path length differentiated in time analytically:
    /// `dL/dt = sum over segments of (v_b - v_a) . k̂`.
    pub fn length_rate(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| {
                let k = (w[1].position - w[0].position).normalized();
                (w[1].velocity - w[0].velocity).dot(k)
            })
            .sum()
    }
}

/// Triangular diffuse-scattering tile, anchored to its parent face at `t0`.
#[derive(Debug, Clone)]
pub struct Tile {
    pub id: TileId,
    /// Centroid at the scene reference time.
    pub centroid: Vec3,
    pub area: f64,
    /// Triangle vertices at `t0` (kept for area bookkeeping and tests).
    pub corners: [Vec3; 3],
}

/// All scattering tiles of a scene, generated once per run.
#[derive(Debug, Clone, Default)]
pub struct TileSet {
    pub tiles: Vec<Tile>,
    index: std::collections::HashMap<TileId, usize>,
}

/// Maximum tile side length, m.
pub const TILE_MAX_SIZE: f64 = 5.0;

impl TileSet {
    /// Tiles every face whose material has a non-zero scattering coefficient.
    pub fn build(scene: &Scene) -> Self {
        let mut tiles = Vec::new();
        for (oi, obj) in scene.objects.iter().enumerate() {
            for (fi, face) in obj.faces.iter().enumerate() {
                if scene.materials[face.material].scattering <= 0.0 {
                    continue;
                }
                for (ti, tri) in triangulate(face, TILE_MAX_SIZE).into_iter().enumerate() {
                    let centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
                    let area = (tri[1] - tri[0]).cross(tri[2] - tri[0]).norm() * 0.5;
                    tiles.push(Tile {
                        id: TileId { object: oi, face: fi, tile: ti },
                        centroid,
                        area,
                        corners: tri,
                    });
                }
            }
        }
        let index = tiles.iter().enumerate().map(|(i, t)| (t.id, i)).collect();
        TileSet { tiles, index }
    }

    pub fn get(&self, id: TileId) -> Option<&Tile> {
        self.index.get(&id).map(|&i| &self.tiles[i])
    }
}

/// Fan-triangulates a convex face and splits triangles until no side exceeds
/// `max_size`; the triangles partition the face exactly.
fn triangulate(face: &Face, max_size: f64) -> Vec<[Vec3; 3]> {
    let mut queue: Vec<[Vec3; 3]> = Vec::new();
    let p0 = face.vertices[0];
    for i in 1..face.vertices.len() - 1 {
        queue.push([p0, face.vertices[i], face.vertices[i + 1]]);
    }
    let mut out = Vec::new();
    while let Some(tri) = queue.pop() {
        let sides = [
            (tri[1] - tri[0]).norm(),
            (tri[2] - tri[1]).norm(),
            (tri[0] - tri[2]).norm(),
        ];
        let (imax, &longest) = sides
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        if longest <= max_size {
            out.push(tri);
            continue;
        }
        // Split the longest side at its midpoint.
        let (a, b, c) = match imax {
            0 => (tri[0], tri[1], tri[2]),
            1 => (tri[1], tri[2], tri[0]),
            _ => (tri[2], tri[0], tri[1]),
        };
        let m = (a + b) * 0.5;
        queue.push([a, m, c]);
        queue.push([m, b, c]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiles_partition_face_area() {
        let face = Face::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(22.0, 0.0, 0.0),
                Vec3::new(22.0, 0.0, 7.0),
                Vec3::new(0.0, 0.0, 7.0),
            ],
            0,
        )
        .unwrap();
        let tris = triangulate(&face, TILE_MAX_SIZE);
        let total: f64 = tris
            .iter()
            .map(|t| (t[1] - t[0]).cross(t[2] - t[0]).norm() * 0.5)
            .sum();
        assert!((total - face.area()).abs() / face.area() < 1e-6);
        for t in &tris {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                assert!(a.distance(b) <= TILE_MAX_SIZE + 1e-12);
            }
        }
    }
}

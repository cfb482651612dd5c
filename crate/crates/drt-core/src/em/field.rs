//! Complex field evaluation along a solved ray path.
//!
//! Fields are peak-amplitude phasors in V/m: a transmitter of power `P` and
//! gain `G` produces `|E| = sqrt(60 P G) / d` in free space. Polarization is
//! carried as a complex 3-vector through every interaction.

use num_complex::Complex64;

use crate::drt::SolveContext;
use crate::em::fresnel::reflection_coefficients;
use crate::em::scatter::scatter_amplitude_factor;
use crate::em::utd::WedgeDiffraction;
use crate::error::PathError;
use crate::math::Vec3;
use crate::path::{InteractionKind, RayPath, SPEED_OF_LIGHT};
use crate::scene::{Antenna, FaceId};

/// Complex-valued 3-vector (field phasor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec3 {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl CVec3 {
    pub const ZERO: CVec3 = CVec3 {
        x: Complex64::new(0.0, 0.0),
        y: Complex64::new(0.0, 0.0),
        z: Complex64::new(0.0, 0.0),
    };

    pub fn from_real(v: Vec3) -> Self {
        CVec3 { x: v.x.into(), y: v.y.into(), z: v.z.into() }
    }

    pub fn add(self, o: CVec3) -> CVec3 {
        CVec3 { x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }

    pub fn scale(self, s: Complex64) -> CVec3 {
        CVec3 { x: self.x * s, y: self.y * s, z: self.z * s }
    }

    pub fn scale_re(self, s: f64) -> CVec3 {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Projection onto a real unit vector.
    pub fn dot_real(self, v: Vec3) -> Complex64 {
        self.x * v.x + self.y * v.y + self.z * v.z
    }

    /// Euclidean magnitude of the phasor vector.
    pub fn norm(self) -> f64 {
        (self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()).sqrt()
    }

    /// Component perpendicular to a real unit vector.
    pub fn reject(self, k: Vec3) -> CVec3 {
        let along = self.dot_real(k);
        self.add(CVec3::from_real(k).scale(-along))
    }
}

/// Power gain toward `dir` (unit vector, global frame).
pub fn antenna_gain(antenna: &Antenna, dir: Vec3) -> f64 {
    match antenna {
        Antenna::Isotropic => 1.0,
        Antenna::HalfWaveDipole => {
            let cos_t = dir.z.clamp(-1.0, 1.0);
            let sin_t = (1.0 - cos_t * cos_t).sqrt();
            if sin_t < 1e-9 {
                return 0.0;
            }
            let f = (std::f64::consts::FRAC_PI_2 * cos_t).cos() / sin_t;
            1.64 * f * f
        }
    }
}

/// Reflects a field phasor at a planar interface.
///
/// `k_in` is the unit propagation direction, `normal` the surface normal
/// (either orientation). Returns the reflected field and the reflected
/// propagation direction.
pub fn reflect_field(
    e: CVec3,
    k_in: Vec3,
    normal: Vec3,
    gamma_te: Complex64,
    gamma_tm: Complex64,
) -> (CVec3, Vec3) {
    // Orient the normal against the incident ray.
    let n = if k_in.dot(normal) > 0.0 { -normal } else { normal };
    let k_out = k_in - n * (2.0 * k_in.dot(n));
    let cross = k_in.cross(n);
    if cross.norm() < 1e-9 {
        // Normal incidence: the TE/TM split is degenerate; any in-plane
        // basis works and both coefficients coincide up to the sign flip of
        // the parallel unit vector, so use TE on the full tangential field.
        return (e.reject(n).scale(gamma_te), k_out);
    }
    let e_perp = cross.normalized();
    let par_in = e_perp.cross(k_in);
    let par_out = e_perp.cross(k_out);
    let reflected = CVec3::from_real(e_perp)
        .scale(gamma_te * e.dot_real(e_perp))
        .add(CVec3::from_real(par_out).scale(gamma_tm * e.dot_real(par_in)));
    (reflected, k_out)
}

fn launch_polarization(k: Vec3) -> Vec3 {
    let v = Vec3::Z - k * k.z;
    if v.norm() > 1e-9 {
        v.normalized()
    } else {
        k.any_perpendicular()
    }
}

/// Field phasor arriving at the receiver along one path, antenna gains on
/// both ends folded in (the transmit gain as power, the receive gain as a
/// `sqrt` amplitude weight so coherent sums stay meaningful).
pub fn path_field(ctx: &SolveContext, path: &RayPath) -> Result<CVec3, PathError> {
    let freq = ctx.scene.tx.carrier_hz;
    let lambda = SPEED_OF_LIGHT / freq;
    let k_wave = 2.0 * std::f64::consts::PI / lambda;

    let pos: Vec<Vec3> = path.vertices.iter().map(|v| v.position).collect();
    let nseg = pos.len() - 1;
    let seg_len: Vec<f64> = (0..nseg).map(|i| (pos[i + 1] - pos[i]).norm()).collect();
    let seg_dir: Vec<Vec3> = (0..nseg).map(|i| (pos[i + 1] - pos[i]) / seg_len[i]).collect();
    let span = |a: usize, b: usize| seg_len[a..b].iter().sum::<f64>();

    let g_tx = antenna_gain(&ctx.scene.tx.antenna, seg_dir[0]);
    let e0 = (60.0 * ctx.scene.tx.power_w * g_tx).sqrt();
    let mut e = CVec3::from_real(launch_polarization(seg_dir[0])).scale_re(e0);

    // Index of the vertex currently acting as the spherical-wave source and
    // whether spreading to the receiver is already folded in (diffraction
    // handles its own spreading).
    let mut source_vertex = 0usize;
    let mut spreading_done = false;

    for (i, item) in path.interactions.iter().enumerate() {
        let vtx = i + 1; // interaction vertex index
        match item {
            InteractionKind::Reflection(fid) => {
                let face = ctx.face(*fid);
                let mat = &ctx.scene.materials[face.material];
                let cos_t = seg_dir[vtx - 1].dot(face.normal).abs();
                let (g_te, g_tm) = reflection_coefficients(mat, freq, cos_t);
                let (er, _) = reflect_field(e, seg_dir[vtx - 1], face.normal, g_te, g_tm);
                e = er;
            }
            InteractionKind::Diffraction(eid) => {
                let edge = ctx.edge(*eid).ok_or(PathError::LeftGeometry("edge"))?;
                let face0 = ctx.face(FaceId { object: eid.object, face: edge.faces.0 });
                let face_n = ctx.face(FaceId { object: eid.object, face: edge.faces.1 });
                let q = pos[vtx];
                let s_in = seg_dir[vtx - 1];
                let s_out = seg_dir[vtx];
                let eu = edge.unit;

                // 0-face tangent: direction from the edge into face 0.
                let t0 = {
                    let v = face0.centroid() - q;
                    (v - eu * v.dot(eu)).normalized()
                };
                let n0 = face0.normal;
                let azimuth = |d: Vec3| {
                    let p = d - eu * d.dot(eu);
                    let a = p.dot(n0).atan2(p.dot(t0));
                    if a < 0.0 { a + 2.0 * std::f64::consts::PI } else { a }
                };
                let phi_inc = azimuth(-s_in);
                let phi_dif = azimuth(s_out);

                let cos_b = s_in.dot(eu).clamp(-1.0, 1.0);
                let beta0 = cos_b.acos();
                let s_pre = span(source_vertex, vtx);
                let s_post = span(vtx, nseg);
                let sin_b2 = 1.0 - cos_b * cos_b;
                let distance_l = s_pre * s_post / (s_pre + s_post) * sin_b2;

                // Interior wedge angle is the material side; the coefficient
                // wants the exterior span as a multiple of pi.
                let interior = ctx.scene.objects[eid.object].edges[eid.edge].wedge_angle;
                let n_param = (2.0 * std::f64::consts::PI - interior) / std::f64::consts::PI;

                let (d_soft, d_hard) = WedgeDiffraction {
                    n: n_param,
                    phi_inc,
                    phi_dif,
                    beta0,
                    distance_l,
                    wavenumber: k_wave,
                    freq_hz: freq,
                    face0: &ctx.scene.materials[face0.material],
                    face_n: &ctx.scene.materials[face_n.material],
                }
                .coefficients();

                // Edge-fixed polarization bases on both sides.
                let phi_hat_in = eu.cross(s_in).normalized();
                let beta_hat_in = phi_hat_in.cross(s_in);
                let phi_hat_out = eu.cross(s_out).normalized();
                let beta_hat_out = phi_hat_out.cross(s_out);

                let eb = e.dot_real(beta_hat_in);
                let ep = e.dot_real(phi_hat_in);
                let spread = (s_pre / (s_post * (s_pre + s_post))).sqrt() / s_pre;
                // The leading minus of the coefficient already accounts for
                // the edge-fixed dyadic sign.
                e = CVec3::from_real(beta_hat_out)
                    .scale(d_soft * eb)
                    .add(CVec3::from_real(phi_hat_out).scale(d_hard * ep))
                    .scale_re(spread);
                spreading_done = true;
            }
            InteractionKind::Scatter(tid) => {
                let tiles = ctx.tiles.ok_or(PathError::LeftGeometry("tile set"))?;
                let tile = tiles.get(*tid).ok_or(PathError::LeftGeometry("tile"))?;
                let face = ctx.face(FaceId { object: tid.object, face: tid.face });
                let mat = &ctx.scene.materials[face.material];
                let cos_i = seg_dir[vtx - 1].dot(face.normal).abs();
                let cos_s = seg_dir[vtx].dot(face.normal).abs();
                let factor = scatter_amplitude_factor(mat.scattering, tile.area, cos_i, cos_s);
                let r_in = span(source_vertex, vtx);
                // The tile re-radiates with the incident polarization
                // projected transverse to the outgoing direction.
                e = e.reject(seg_dir[vtx]).scale_re(factor / r_in);
                source_vertex = vtx;
            }
        }
    }

    if !spreading_done {
        e = e.scale_re(1.0 / span(source_vertex, nseg));
    }
    // Carrier phase over the full unfolded length.
    e = e.scale(Complex64::from_polar(1.0, -k_wave * path.length));

    let arrival = seg_dir[nseg - 1];
    let g_rx = antenna_gain(&ctx.scene.rx.antenna, -arrival);
    Ok(e.scale_re(g_rx.sqrt()))
}

/// Received power for a coherently summed field phasor, in watts.
pub fn received_power_w(e_total: CVec3, freq_hz: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / freq_hz;
    e_total.norm().powi(2) * lambda * lambda / (960.0 * std::f64::consts::PI.powi(2))
}

pub fn watts_to_dbm(p: f64) -> f64 {
    10.0 * (p * 1e3).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rt::{trace_snapshot, TraceConfig};
    use crate::scene::parse_scene;

    #[test]
    fn free_space_matches_friis() {
        let scene = parse_scene(
            "scene t0 0\nGEOMETRY\nDYNAMICS\n\
             terminal TX pos 0 0 0 freq 3e9 power 1\nterminal RX pos 120 0 0 freq 3e9\nEND\n",
        )
        .unwrap();
        let paths = trace_snapshot(&scene, 0.0, &TraceConfig::default(), None);
        assert_eq!(paths.len(), 1);
        let ctx = SolveContext::new(&scene, 0.0);
        let e = path_field(&ctx, &paths[0]).unwrap();
        let p = received_power_w(e, 3e9);
        let lambda = SPEED_OF_LIGHT / 3e9;
        let friis = 1.0 * (lambda / (4.0 * std::f64::consts::PI * 120.0)).powi(2);
        assert!((p - friis).abs() / friis < 1e-12);
    }

    #[test]
    fn pec_reflection_cancels_tangential_field() {
        // Oblique incidence on a PEC plane: at the surface the tangential
        // components of incident + reflected fields must vanish for any
        // incoming polarization.
        let k_in = Vec3::new(1.0, -2.0, 0.3).normalized();
        let n = Vec3::Y;
        for pol in [
            Vec3::Z,
            Vec3::new(0.3, 0.2, -0.4),
            Vec3::new(-1.0, 0.5, 2.0),
        ] {
            // Make the incident field transverse to k.
            let ei_v = (pol - k_in * pol.dot(k_in)).normalized();
            let ei = CVec3::from_real(ei_v);
            let (er, k_out) = reflect_field(
                ei,
                k_in,
                n,
                Complex64::new(-1.0, 0.0),
                Complex64::new(1.0, 0.0),
            );
            // Reflected field stays transverse.
            assert!(er.dot_real(k_out).norm() < 1e-12);
            let total = ei.add(er);
            // Tangential components (x and z on the y=0 plane).
            assert!(total.dot_real(Vec3::X).norm() < 1e-12, "pol {pol:?}");
            assert!(total.dot_real(Vec3::Z).norm() < 1e-12, "pol {pol:?}");
        }
    }

    #[test]
    fn single_reflection_has_image_distance_spreading() {
        // PEC wall: |E| of the reflected ray equals free space over the
        // unfolded length.
        let scene = parse_scene(
            "scene t0 0\nGEOMETRY\nmaterial m pec scatter 0\n\
             object wall material m open\n  face -50 0 -50  -50 0 50  50 0 50  50 0 -50\n\
             DYNAMICS\nterminal TX pos 0 2 0 freq 3e9 power 1\nterminal RX pos 4 4 0 freq 3e9\nEND\n",
        )
        .unwrap();
        let paths = trace_snapshot(&scene, 0.0, &TraceConfig::default(), None);
        let refl = paths.iter().find(|p| p.interactions.len() == 1).unwrap();
        let ctx = SolveContext::new(&scene, 0.0);
        let e = path_field(&ctx, refl).unwrap();
        let expected = (60.0f64).sqrt() / refl.length;
        assert!((e.norm() - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn dipole_gain_pattern() {
        assert!((antenna_gain(&Antenna::HalfWaveDipole, Vec3::X) - 1.64).abs() < 1e-12);
        assert_eq!(antenna_gain(&Antenna::HalfWaveDipole, Vec3::Z), 0.0);
        let slant = Vec3::new(1.0, 0.0, 1.0).normalized();
        let g = antenna_gain(&Antenna::HalfWaveDipole, slant);
        assert!(g > 0.0 && g < 1.64);
    }
}

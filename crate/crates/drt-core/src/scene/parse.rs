//! Line-oriented text format for the dynamic environment database.
//!
//! Two top-level sections mirror the database split:
//!
//! ```text
//! scene t0 0
//! GEOMETRY
//! material concrete eps_r 5 sigma 0.01 scatter 0
//! material metal pec
//! object left_wall material concrete open
//!   face 0 0 0  1000 0 0  1000 0 10  0 0 10
//! object bus material metal closed
//!   box 100 0 1.6  12 2.5 3.2
//! DYNAMICS
//! motion bus vel -30kmh 0 0
//! terminal TX pos 0 -13 1.75 vel 50kmh 0 0 freq 3e9 power 1 antenna iso
//! terminal RX pos 200 13 1.75 vel -36kmh 0 0 freq 3e9
//! END
//! ```
//!
//! Units are SI; scalar literals accept the suffixes `kmh` (converted to m/s)
//! and `deg` (converted to rad). `#` starts a comment.

use super::*;
use crate::error::SceneError;

struct Cursor<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<&'a str, SceneError> {
        let t = self.tokens.get(self.pos).copied().ok_or_else(|| {
            SceneError::Syntax { line: self.line, message: "unexpected end of line".into() }
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).copied()
    }

    fn done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn scalar(&mut self) -> Result<f64, SceneError> {
        let t = self.next()?;
        parse_scalar(t).ok_or_else(|| SceneError::Syntax {
            line: self.line,
            message: format!("expected a number, got '{t}'"),
        })
    }

    fn vec3(&mut self) -> Result<Vec3, SceneError> {
        Ok(Vec3::new(self.scalar()?, self.scalar()?, self.scalar()?))
    }

    fn expect(&mut self, kw: &str) -> Result<(), SceneError> {
        let t = self.next()?;
        if t != kw {
            return Err(SceneError::Syntax {
                line: self.line,
                message: format!("expected '{kw}', got '{t}'"),
            });
        }
        Ok(())
    }

    fn err(&self, message: impl Into<String>) -> SceneError {
        SceneError::Syntax { line: self.line, message: message.into() }
    }
}

/// Parses a scalar literal with optional `kmh` or `deg` unit suffix.
pub fn parse_scalar(token: &str) -> Option<f64> {
    if let Some(num) = token.strip_suffix("kmh") {
        return num.parse::<f64>().ok().map(|v| v / 3.6);
    }
    if let Some(num) = token.strip_suffix("deg") {
        return num.parse::<f64>().ok().map(|v| v.to_radians());
    }
    token.parse::<f64>().ok()
}

/// Axis-aligned box as 6 outward-wound faces, used by the `box` shorthand.
pub fn box_faces(center: Vec3, size: Vec3, material: usize) -> Result<Vec<Face>, String> {
    if size.x <= 0.0 || size.y <= 0.0 || size.z <= 0.0 {
        return Err(format!("box size must be positive, got {:?}", size));
    }
    let h = size * 0.5;
    let v = |sx: f64, sy: f64, sz: f64| center + Vec3::new(sx * h.x, sy * h.y, sz * h.z);
    let quads = [
        // -x, +x, -y, +y, -z, +z
        [v(-1., -1., -1.), v(-1., -1., 1.), v(-1., 1., 1.), v(-1., 1., -1.)],
        [v(1., -1., -1.), v(1., 1., -1.), v(1., 1., 1.), v(1., -1., 1.)],
        [v(-1., -1., -1.), v(1., -1., -1.), v(1., -1., 1.), v(-1., -1., 1.)],
        [v(-1., 1., -1.), v(-1., 1., 1.), v(1., 1., 1.), v(1., 1., -1.)],
        [v(-1., -1., -1.), v(-1., 1., -1.), v(1., 1., -1.), v(1., -1., -1.)],
        [v(-1., -1., 1.), v(1., -1., 1.), v(1., 1., 1.), v(-1., 1., 1.)],
    ];
    quads
        .iter()
        .map(|q| Face::new(q.to_vec(), material).map_err(|e| e.to_string()))
        .collect()
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Geometry,
    Dynamics,
}

struct PendingObject {
    id: String,
    material: usize,
    closed: bool,
    faces: Vec<Face>,
    line: usize,
}

/// Parses and validates a scene from its text form.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let mut t0 = 0.0;
    let mut materials: Vec<Material> = Vec::new();
    let mut objects: Vec<SceneObject> = Vec::new();
    let mut pending: Option<PendingObject> = None;
    let mut terminals: Vec<Terminal> = Vec::new();
    let mut section = Section::Preamble;

    let flush =
        |pending: &mut Option<PendingObject>, objects: &mut Vec<SceneObject>| -> Result<(), SceneError> {
            if let Some(p) = pending.take() {
                if p.faces.is_empty() {
                    return Err(SceneError::Syntax {
                        line: p.line,
                        message: format!("object '{}' has no faces", p.id),
                    });
                }
                let edges = derive_edges(&p.faces);
                objects.push(SceneObject {
                    id: p.id,
                    faces: p.faces,
                    edges,
                    motion: RigidMotion::STATIC,
                    closed: p.closed,
                });
            }
            Ok(())
        };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cur = Cursor { tokens: line.split_whitespace().collect(), pos: 0, line: lineno + 1 };
        let head = cur.next()?;
        match head {
            "scene" => {
                cur.expect("t0")?;
                t0 = cur.scalar()?;
            }
            "GEOMETRY" => section = Section::Geometry,
            "DYNAMICS" => {
                flush(&mut pending, &mut objects)?;
                section = Section::Dynamics;
            }
            "END" => break,
            "material" if section == Section::Geometry => {
                let name = cur.next()?.to_string();
                let mut m = Material {
                    name,
                    eps_r: 1.0,
                    sigma: 0.0,
                    scattering: 0.0,
                    perfect_conductor: false,
                };
                while !cur.done() {
                    match cur.next()? {
                        "pec" => m.perfect_conductor = true,
                        "eps_r" => m.eps_r = cur.scalar()?,
                        "sigma" => m.sigma = cur.scalar()?,
                        "scatter" => m.scattering = cur.scalar()?,
                        other => return Err(cur.err(format!("unknown material key '{other}'"))),
                    }
                }
                materials.push(m);
            }
            "object" if section == Section::Geometry => {
                flush(&mut pending, &mut objects)?;
                let id = cur.next()?.to_string();
                cur.expect("material")?;
                let mname = cur.next()?;
                let material = materials
                    .iter()
                    .position(|m| m.name == mname)
                    .ok_or_else(|| cur.err(format!("unknown material '{mname}'")))?;
                let closed = match cur.peek() {
                    Some("closed") => true,
                    Some("open") | None => false,
                    Some(other) => return Err(cur.err(format!("expected open/closed, got '{other}'"))),
                };
                pending = Some(PendingObject { id, material, closed, faces: Vec::new(), line: cur.line });
            }
            "face" if section == Section::Geometry => {
                let p = pending.as_mut().ok_or_else(|| cur.err("'face' outside an object"))?;
                let mut verts = Vec::new();
                while !cur.done() {
                    verts.push(cur.vec3()?);
                }
                let face = Face::new(verts, p.material).map_err(|e| SceneError::Syntax {
                    line: cur.line,
                    message: format!("object '{}': {e}", p.id),
                })?;
                p.faces.push(face);
            }
            "box" if section == Section::Geometry => {
                let p = pending.as_mut().ok_or_else(|| cur.err("'box' outside an object"))?;
                let center = cur.vec3()?;
                let size = cur.vec3()?;
                let faces = box_faces(center, size, p.material)
                    .map_err(|e| SceneError::Syntax { line: cur.line, message: e })?;
                p.faces.extend(faces);
                p.closed = true;
            }
            "motion" if section == Section::Dynamics => {
                let id = cur.next()?.to_string();
                let idx = objects
                    .iter()
                    .position(|o| o.id == id)
                    .ok_or_else(|| cur.err(format!("unknown object '{id}'")))?;
                let m = &mut objects[idx].motion;
                while !cur.done() {
                    match cur.next()? {
                        "vel" => m.translation_velocity = cur.vec3()?,
                        "acc" => m.translation_acceleration = cur.vec3()?,
                        "rot" => loop {
                            match cur.peek() {
                                Some("center") => {
                                    cur.next()?;
                                    m.rotation_center = cur.vec3()?;
                                }
                                Some("axis") => {
                                    cur.next()?;
                                    let axis = cur.vec3()?;
                                    m.rotation_axis = axis.try_normalized(1e-12).ok_or_else(
                                        || cur.err("rotation axis must be non-zero"),
                                    )?;
                                }
                                Some("omega") => {
                                    cur.next()?;
                                    m.angular_speed = cur.scalar()?;
                                }
                                Some("alpha") => {
                                    cur.next()?;
                                    m.angular_acceleration = cur.scalar()?;
                                }
                                _ => break,
                            }
                        },
                        other => return Err(cur.err(format!("unknown motion key '{other}'"))),
                    }
                }
            }
            "terminal" if section == Section::Dynamics => {
                let id = cur.next()?.to_string();
                let role = match id.as_str() {
                    "TX" => TerminalRole::Tx,
                    "RX" => TerminalRole::Rx,
                    other => return Err(cur.err(format!("terminal id must be TX or RX, got '{other}'"))),
                };
                let mut kin = KinematicState::at_rest(Vec3::ZERO);
                kin.reference_time = t0;
                let mut carrier_hz = 0.0;
                let mut power_w = 1.0;
                let mut antenna = Antenna::Isotropic;
                while !cur.done() {
                    match cur.next()? {
                        "pos" => kin.position = cur.vec3()?,
                        "vel" => kin.velocity = cur.vec3()?,
                        "acc" => kin.acceleration = cur.vec3()?,
                        "freq" => carrier_hz = cur.scalar()?,
                        "power" => power_w = cur.scalar()?,
                        "antenna" => {
                            antenna = match cur.next()? {
                                "iso" => Antenna::Isotropic,
                                "dipole" => Antenna::HalfWaveDipole,
                                other => return Err(cur.err(format!("unknown antenna '{other}'"))),
                            }
                        }
                        other => return Err(cur.err(format!("unknown terminal key '{other}'"))),
                    }
                }
                terminals.push(Terminal { id, role, kinematics: kin, antenna, carrier_hz, power_w });
            }
            other => {
                return Err(cur.err(format!("unexpected token '{other}'")));
            }
        }
    }
    flush(&mut pending, &mut objects)?;

    let tx_count = terminals.iter().filter(|t| t.role == TerminalRole::Tx).count();
    let rx_count = terminals.iter().filter(|t| t.role == TerminalRole::Rx).count();
    if tx_count != 1 || rx_count != 1 {
        return Err(SceneError::Invalid(format!(
            "scene needs exactly one TX and one RX (got {tx_count} TX, {rx_count} RX)"
        )));
    }
    let tx = terminals.iter().find(|t| t.role == TerminalRole::Tx).unwrap().clone();
    let rx = terminals.iter().find(|t| t.role == TerminalRole::Rx).unwrap().clone();
    // RX shares the TX carrier when not set explicitly.
    let rx = Terminal {
        carrier_hz: if rx.carrier_hz > 0.0 { rx.carrier_hz } else { tx.carrier_hz },
        ..rx
    };
    let scene = Scene { materials, objects, tx, rx, t0 };
    scene.validate()?;
    Ok(scene)
}

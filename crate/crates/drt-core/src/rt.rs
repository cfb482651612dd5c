//! Conventional image-based snapshot ray tracer.
//!
//! Enumerates candidate path structures (line of sight, multi-bounce
//! reflections, single diffraction and single diffuse scattering, plus
//! single-reflection combinations) for a frozen scene pose and keeps the
//! geometrically valid, unobstructed ones. Candidate geometry is solved by
//! the same closed forms used for extrapolation, so a traced snapshot is
//! bit-consistent with an extrapolation evaluated at the same instant.

use crate::drt::{solve_structure, validate_path, SolveContext};
use crate::path::{InteractionKind, RayPath, TileSet};
use crate::scene::Scene;

#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    /// Maximum specular bounces for pure-reflection paths.
    pub max_reflections: usize,
    pub enable_diffraction: bool,
    pub enable_scattering: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        // The interaction budget: up to 2 reflections, 1 diffraction,
        // 1 diffuse scatter; diffraction and scatter combine with at most
        // one reflection and not with each other.
        TraceConfig { max_reflections: 2, enable_diffraction: true, enable_scattering: true }
    }
}

/// Runs a full trace at time `t`. Output is deterministic: sorted by delay,
/// then by interaction labels.
pub fn trace_snapshot(
    scene: &Scene,
    t: f64,
    config: &TraceConfig,
    tiles: Option<&TileSet>,
) -> Vec<RayPath> {
    let ctx = SolveContext::with_tiles(scene, t, tiles);
    let mut structures: Vec<Vec<InteractionKind>> = vec![Vec::new()];

    // Pure reflection sequences, depth-first, no immediate wall repeats.
    let face_ids: Vec<_> = ctx.faces.iter().map(|f| f.id).collect();
    let mut stack: Vec<Vec<InteractionKind>> = face_ids
        .iter()
        .map(|f| vec![InteractionKind::Reflection(*f)])
        .collect();
    while let Some(seq) = stack.pop() {
        if seq.len() < config.max_reflections {
            let last = match seq.last() {
                Some(InteractionKind::Reflection(f)) => *f,
                _ => unreachable!(),
            };
            for f in &face_ids {
                if *f != last {
                    let mut next = seq.clone();
                    next.push(InteractionKind::Reflection(*f));
                    stack.push(next);
                }
            }
        }
        structures.push(seq);
    }

    if config.enable_diffraction {
        for e in &ctx.edges {
            structures.push(vec![InteractionKind::Diffraction(e.id)]);
            if config.max_reflections >= 1 {
                for f in &face_ids {
                    if f.object == e.id.object {
                        continue; // the wedge's own faces cannot pre/post reflect its ray
                    }
                    structures.push(vec![
                        InteractionKind::Reflection(*f),
                        InteractionKind::Diffraction(e.id),
                    ]);
                    structures.push(vec![
                        InteractionKind::Diffraction(e.id),
                        InteractionKind::Reflection(*f),
                    ]);
                }
            }
        }
    }

    if config.enable_scattering {
        if let Some(ts) = tiles {
            for tile in &ts.tiles {
                structures.push(vec![InteractionKind::Scatter(tile.id)]);
                if config.max_reflections >= 1 {
                    for f in &face_ids {
                        if f.object == tile.id.object && f.face == tile.id.face {
                            continue;
                        }
                        structures.push(vec![
                            InteractionKind::Reflection(*f),
                            InteractionKind::Scatter(tile.id),
                        ]);
                        structures.push(vec![
                            InteractionKind::Scatter(tile.id),
                            InteractionKind::Reflection(*f),
                        ]);
                    }
                }
            }
        }
    }

    let mut paths: Vec<RayPath> = structures
        .into_iter()
        .filter_map(|s| {
            let path = solve_structure(&ctx, &s).ok()?;
            validate_path(&ctx, &path).ok()?;
            Some(path)
        })
        .collect();
    paths.sort_by(|a, b| {
        a.delay
            .partial_cmp(&b.delay)
            .unwrap()
            .then_with(|| a.label(scene).cmp(&b.label(scene)))
    });
    paths
}

//! Time-stepped channel runs: dynamic extrapolation vs. brute-force
//! re-tracing.

use std::time::Instant;

use crate::channel::doppler::doppler_shift;
use crate::drt::{extrapolate_paths, SolveContext};
use crate::em::field::{path_field, received_power_w, CVec3};
use crate::geom::segment_clear;
use crate::path::{InteractionKind, RayPath, TileSet};
use crate::rt::{trace_snapshot, TraceConfig};
use crate::scene::Scene;

/// Multipath-lifetime handling: how long one traced geometry stays in use.
#[derive(Debug, Clone)]
pub enum TcMode {
    /// Re-trace on a fixed interval, seconds.
    Interval(f64),
    /// Re-trace at the given absolute times (the run start is always an
    /// implicit trace point).
    Schedule(Vec<f64>),
    /// Re-trace when a path expires or the line-of-sight state flips, but at
    /// least every `max` seconds.
    Auto { max: f64 },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub t_start: f64,
    pub span: f64,
    pub step: f64,
    pub tc: TcMode,
    pub trace: TraceConfig,
}

#[derive(Debug, Clone)]
pub struct RayRecord {
    pub label: String,
    pub delay: f64,
    pub length: f64,
    pub power_w: f64,
    pub doppler_hz: f64,
    pub field: CVec3,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    /// True when this step performed a full trace.
    pub retraced: bool,
    pub rays: Vec<RayRecord>,
    /// Coherent sum over rays.
    pub total_power_w: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunTiming {
    pub trace_s: f64,
    pub extrapolate_s: f64,
    pub field_s: f64,
    pub trace_count: usize,
    pub step_count: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub snapshots: Vec<Snapshot>,
    pub timing: RunTiming,
}

fn snapshot_from_paths(ctx: &SolveContext, paths: &[RayPath], retraced: bool) -> Snapshot {
    let f0 = ctx.scene.tx.carrier_hz;
    let mut rays = Vec::with_capacity(paths.len());
    let mut total = CVec3::ZERO;
    for p in paths {
        let Ok(field) = path_field(ctx, p) else { continue };
        total = total.add(field);
        rays.push(RayRecord {
            label: p.label(ctx.scene),
            delay: p.delay,
            length: p.length,
            power_w: received_power_w(field, f0),
            doppler_hz: doppler_shift(p, f0),
            field,
        });
    }
    Snapshot { t: ctx.t, retraced, rays, total_power_w: received_power_w(total, f0) }
}

fn time_grid(cfg: &RunConfig) -> Vec<f64> {
    let n = (cfg.span / cfg.step).round() as usize;
    (0..=n).map(|i| cfg.t_start + i as f64 * cfg.step).collect()
}

/// Brute force: full trace at every step. Steps are independent, so they
/// run on the current rayon pool; per-phase times are summed across workers.
pub fn run_rt(scene: &Scene, cfg: &RunConfig) -> RunResult {
    use rayon::prelude::*;
    let tiles = cfg.trace.enable_scattering.then(|| TileSet::build(scene));
    let per_step: Vec<(Snapshot, f64, f64)> = time_grid(cfg)
        .par_iter()
        .map(|&t| {
            let t0 = Instant::now();
            let paths = trace_snapshot(scene, t, &cfg.trace, tiles.as_ref());
            let trace_s = t0.elapsed().as_secs_f64();
            let ctx = SolveContext::with_tiles(scene, t, tiles.as_ref());
            let tf = Instant::now();
            let snap = snapshot_from_paths(&ctx, &paths, true);
            (snap, trace_s, tf.elapsed().as_secs_f64())
        })
        .collect();
    let mut timing = RunTiming::default();
    let mut snapshots = Vec::with_capacity(per_step.len());
    for (snap, trace_s, field_s) in per_step {
        timing.trace_s += trace_s;
        timing.field_s += field_s;
        timing.trace_count += 1;
        timing.step_count += 1;
        snapshots.push(snap);
    }
    RunResult { snapshots, timing }
}

/// Dynamic run: trace once per lifetime interval, advance analytically in
/// between.
pub fn run_drt(scene: &Scene, cfg: &RunConfig) -> RunResult {
    let tiles = cfg.trace.enable_scattering.then(|| TileSet::build(scene));
    let mut timing = RunTiming::default();
    let mut snapshots = Vec::new();

    let mut structures: Vec<Vec<InteractionKind>> = Vec::new();
    let mut had_los = false;
    let mut last_trace = f64::NEG_INFINITY;

    for t in time_grid(cfg) {
        let ctx = SolveContext::with_tiles(scene, t, tiles.as_ref());
        let mut retrace = match &cfg.tc {
            TcMode::Interval(tc) | TcMode::Auto { max: tc } => t - last_trace >= tc - 1e-12,
            TcMode::Schedule(times) => {
                !last_trace.is_finite()
                    || times.iter().any(|&tt| tt > last_trace + 1e-12 && tt <= t + 1e-12)
            }
        };

        let mut live: Option<Vec<RayPath>> = None;
        if !retrace {
            let te = Instant::now();
            let extrapolated = extrapolate_paths(&ctx, &structures);
            let mut paths = Vec::with_capacity(extrapolated.len());
            let mut expired = false;
            for e in extrapolated {
                match e.result {
                    Ok(p) => paths.push(p),
                    Err(_) => expired = true,
                }
            }
            if let TcMode::Auto { .. } = cfg.tc {
                let los_now = segment_clear(ctx.tx.position, ctx.rx.position, &ctx.faces, &[]);
                if expired || los_now != had_los {
                    retrace = true;
                }
            }
            timing.extrapolate_s += te.elapsed().as_secs_f64();
            if !retrace {
                live = Some(paths);
            }
        }

        let paths = match live {
            Some(p) => p,
            None => {
                let t0 = Instant::now();
                let traced = trace_snapshot(scene, t, &cfg.trace, tiles.as_ref());
                timing.trace_s += t0.elapsed().as_secs_f64();
                timing.trace_count += 1;
                last_trace = t;
                structures = traced.iter().map(|p| p.interactions.clone()).collect();
                had_los = traced.iter().any(|p| p.is_los());
                traced
            }
        };

        let tf = Instant::now();
        let retraced = (t - last_trace).abs() < 1e-15;
        snapshots.push(snapshot_from_paths(&ctx, &paths, retraced));
        timing.field_s += tf.elapsed().as_secs_f64();
        timing.step_count += 1;
    }
    RunResult { snapshots, timing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    fn moving_scene() -> Scene {
        parse_scene(
            "scene t0 0\nGEOMETRY\nmaterial c eps_r 5 sigma 0.01\n\
             object wall material c open\n  face -200 0 -50  -200 0 50  200 0 50  200 0 -50\n\
             DYNAMICS\n\
             terminal TX pos -40 10 0 vel 10 0 0 freq 3e9 power 1\n\
             terminal RX pos 40 20 0 vel -5 0 0 freq 3e9\nEND\n",
        )
        .unwrap()
    }

    #[test]
    fn drt_matches_rt_between_retraces() {
        let scene = moving_scene();
        let cfg = RunConfig {
            t_start: 0.0,
            span: 1.0,
            step: 0.05,
            tc: TcMode::Interval(0.5),
            trace: TraceConfig::default(),
        };
        let drt = run_drt(&scene, &cfg);
        let rt = run_rt(&scene, &cfg);
        assert_eq!(drt.snapshots.len(), rt.snapshots.len());
        for (a, b) in drt.snapshots.iter().zip(&rt.snapshots) {
            assert_eq!(a.rays.len(), b.rays.len(), "at t={}", a.t);
            // Constant velocities: quadratic extrapolation is exact, so the
            // coherent power matches to rounding.
            let pa = 10.0 * a.total_power_w.log10();
            let pb = 10.0 * b.total_power_w.log10();
            assert!((pa - pb).abs() < 1e-9, "at t={}: {pa} vs {pb}", a.t);
        }
        assert_eq!(drt.timing.trace_count, 3); // t = 0, 0.5, 1.0
        assert_eq!(rt.timing.trace_count, 21);
    }

    #[test]
    fn doppler_continuous_across_retrace() {
        let scene = moving_scene();
        let cfg = RunConfig {
            t_start: 0.0,
            span: 1.0,
            step: 0.05,
            tc: TcMode::Interval(0.25),
            trace: TraceConfig::default(),
        };
        let drt = run_drt(&scene, &cfg);
        let mut prev: Option<f64> = None;
        for s in &drt.snapshots {
            let los = s.rays.iter().find(|r| r.label == "LoS").unwrap();
            if let Some(p) = prev {
                assert!((los.doppler_hz - p).abs() < 5.0, "Doppler jump at t={}", s.t);
            }
            prev = Some(los.doppler_hz);
        }
    }
}

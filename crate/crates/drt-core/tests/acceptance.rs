//! End-to-end acceptance gates. Each test prints one pass/fail line so the
//! whole gate can be read off `cargo test --test acceptance -- --nocapture`.

use std::time::Instant;

use drt_core::channel::doppler::doppler_shift;
use drt_core::channel::profile::error_map;
use drt_core::channel::runner::{run_drt, run_rt, RunConfig, TcMode};
use drt_core::drt::{solve_structure, SolveContext};
use drt_core::em::field::{path_field, received_power_w, watts_to_dbm, CVec3};
use drt_core::math::Vec3;
use drt_core::path::{InteractionKind, TileSet, SPEED_OF_LIGHT};
use drt_core::rt::{trace_snapshot, TraceConfig};
use drt_core::scene::{parse_scene, Scene};
use drt_core::validate::{run_validation, Fault};

fn report(criterion: usize, name: &str, ok: bool) {
    println!("criterion {criterion} ({name}): {}", if ok { "pass" } else { "FAIL" });
    assert!(ok, "criterion {criterion} ({name}) failed");
}

fn scene_file(name: &str) -> Scene {
    let path = format!("{}/../../scenes/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_scene(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))).unwrap()
}

/// 1. Analytic interaction-point kinematics vs finite differences over
/// seeded random moving-geometry configurations.
#[test]
fn kinematics_oracle_suite() {
    let start = Instant::now();
    // 500 wall + 500 wedge configurations = 1000 random geometries.
    let r = run_validation(42, 500, Fault::None);
    let ok = r.passed() && r.categories.iter().map(|c| c.cases).sum::<usize>() >= 1000;
    let in_time = start.elapsed().as_secs_f64() < 120.0;
    if !ok {
        eprintln!("{}", r.render());
    }
    report(1, "kinematics oracle suite", ok && in_time);
}

/// 2. Extrapolated power equals snapshot re-tracing in the street canyon
/// while the multipath structure holds.
#[test]
fn canyon_drt_equals_rt() {
    let scene = scene_file("canyon.scn");
    let cfg = RunConfig {
        t_start: 0.0,
        span: 5.0,
        step: 0.01,
        tc: TcMode::Interval(0.2),
        trace: TraceConfig { max_reflections: 2, enable_diffraction: true, enable_scattering: false },
    };
    let drt = run_drt(&scene, &cfg);
    let rt = run_rt(&scene, &cfg);
    let map = error_map(&drt, &rt);
    let deltas: Vec<f64> = map.iter().filter_map(|c| c.delta_db).collect();
    let max_abs = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    println!(
        "  canyon: max |dP| {max_abs:.3e} dB over {} structure-matching steps",
        deltas.len()
    );
    report(2, "canyon DRT vs RT equivalence", deltas.len() >= 300 && max_abs < 1e-3);
}

/// 3. Line-of-sight Doppler changes sign exactly at the closest approach.
#[test]
fn los_doppler_sign_flip() {
    let scene = parse_scene(
        "scene t0 0\nGEOMETRY\nmaterial c eps_r 5 sigma 0.01\n\
         object wall material c open\n  face -200 -200 -20  200 -200 -20  200 -200 20  -200 -200 20\n\
         DYNAMICS\n\
         terminal TX pos -50 -5 0 vel 10 0 0 freq 3e9 power 1\n\
         terminal RX pos 50 5 0 vel -10 0 0 freq 3e9\nEND\n",
    )
    .unwrap();
    let cfg = RunConfig {
        t_start: 0.0,
        span: 10.0,
        step: 0.01,
        tc: TcMode::Interval(1.0),
        trace: TraceConfig::default(),
    };
    let run = run_drt(&scene, &cfg);
    let los: Vec<(f64, f64, f64)> = run
        .snapshots
        .iter()
        .map(|s| {
            let r = s.rays.iter().find(|r| r.label == "LoS").expect("LoS present");
            (s.t, r.length, r.doppler_hz)
        })
        .collect();
    let t_min = los
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    let ok = los.iter().all(|&(t, _, fd)| {
        if t < t_min - cfg.step {
            fd > 0.0
        } else if t > t_min + cfg.step {
            fd < 0.0
        } else {
            true
        }
    });
    println!("  closest approach at t = {t_min:.2} s");
    report(3, "LoS Doppler sign flip at closest approach", ok);
}

fn bus_side_reflection_doppler(scene: &Scene, t: f64) -> f64 {
    let bus = scene.object_index("bus").unwrap();
    let paths = trace_snapshot(scene, t, &TraceConfig::default(), None);
    let path = paths
        .iter()
        .find(|p| {
            p.interactions.len() == 1
                && matches!(p.interactions[0], InteractionKind::Reflection(f) if f.object == bus)
        })
        .expect("bus side reflection present");
    doppler_shift(path, scene.tx.carrier_hz)
}

/// 4. A swerving (rotating) bus turns the near-zero side-reflection Doppler
/// into a large positive shift, matching the phase-derivative oracle.
#[test]
fn rotating_bus_doppler() {
    // Pinned from the phase-derivative oracle on this geometry.
    const EXPECTED_HZ: f64 = 34.93;
    let rotating = scene_file("canyon_rotating_bus.scn");
    let mut straight = rotating.clone();
    let bus = straight.object_index("bus").unwrap();
    straight.objects[bus].motion.angular_speed = 0.0;

    let fd_straight = bus_side_reflection_doppler(&straight, 0.0);
    let fd_rot = bus_side_reflection_doppler(&rotating, 0.0);

    // Phase-derivative oracle: central difference of the extrapolated path
    // length.
    let structure = {
        let paths = trace_snapshot(&rotating, 0.0, &TraceConfig::default(), None);
        paths
            .iter()
            .find(|p| {
                p.interactions.len() == 1
                    && matches!(p.interactions[0], InteractionKind::Reflection(f) if f.object == bus)
            })
            .unwrap()
            .interactions
            .clone()
    };
    let h = 1e-3;
    let len_at = |t: f64| {
        let ctx = SolveContext::new(&rotating, t);
        solve_structure(&ctx, &structure).unwrap().length
    };
    let oracle = -rotating.tx.carrier_hz / SPEED_OF_LIGHT * (len_at(h) - len_at(-h)) / (2.0 * h);

    println!(
        "  straight {fd_straight:.2} Hz, rotating {fd_rot:.2} Hz, oracle {oracle:.2} Hz"
    );
    let ok = fd_straight.abs() < 2.0
        && fd_rot > 0.0
        && (fd_rot - oracle).abs() < 0.1
        && (fd_rot - EXPECTED_HZ).abs() < 0.5;
    report(4, "rotating-bus Doppler", ok);
}

/// 5. Closed-form Doppler product vs the path-length-rate oracle for every
/// traced path type, including a rotating obstacle and diffuse scattering.
#[test]
fn doppler_product_vs_phase_oracle() {
    let scene = parse_scene(
        "scene t0 0\nGEOMETRY\n\
         material concrete eps_r 5 sigma 0.01 scatter 0.4\nmaterial metal pec\n\
         object south material concrete open\n  face -30 -12 0  -30 -12 8  30 -12 8  30 -12 0\n\
         object north material concrete open\n  face -30 12 0  30 12 0  30 12 8  -30 12 8\n\
         object bus material metal closed\n  box 8 6 1.6  10 2.4 3.2\n\
         DYNAMICS\n\
         motion bus vel -8 0 0 rot center 8 6 0 axis 0 0 1 omega 0.3\n\
         terminal TX pos -15 -6 1.7 vel 12 0.5 0 freq 3e9 power 1\n\
         terminal RX pos 18 -3 1.7 vel -9 -0.3 0 freq 3e9\nEND\n",
    )
    .unwrap();
    let tiles = TileSet::build(&scene);
    let config = TraceConfig {
        max_reflections: 2,
        enable_diffraction: true,
        enable_scattering: true,
    };
    let t = 0.1;
    let paths = trace_snapshot(&scene, t, &config, Some(&tiles));
    assert!(!paths.is_empty());

    let mut has = [false; 5]; // los, 1 refl, 2 refl, diffraction, scatter
    let h = 1e-6;
    let mut max_rel = 0.0f64;
    let f0 = scene.tx.carrier_hz;
    for p in &paths {
        let kinds = &p.interactions;
        match kinds.len() {
            0 => has[0] = true,
            1 if matches!(kinds[0], InteractionKind::Reflection(_)) => has[1] = true,
            2 if kinds.iter().all(|k| matches!(k, InteractionKind::Reflection(_))) => {
                has[2] = true
            }
            _ => {}
        }
        if kinds.iter().any(|k| matches!(k, InteractionKind::Diffraction(_))) {
            has[3] = true;
        }
        if kinds.iter().any(|k| matches!(k, InteractionKind::Scatter(_))) {
            has[4] = true;
        }
        let len_at = |tt: f64| {
            let ctx = SolveContext::with_tiles(&scene, tt, Some(&tiles));
            solve_structure(&ctx, kinds).unwrap().length
        };
        let oracle = -f0 / SPEED_OF_LIGHT * (len_at(t + h) - len_at(t - h)) / (2.0 * h);
        let analytic = doppler_shift(p, f0);
        let rel = (analytic - oracle).abs() / oracle.abs().max(1.0);
        max_rel = max_rel.max(rel);
    }
    println!(
        "  {} paths, max rel error {max_rel:.3e}, coverage {has:?}",
        paths.len()
    );
    report(
        5,
        "Doppler product vs phase oracle",
        has.iter().all(|&b| b) && max_rel < 1e-4,
    );
}

/// 6. Dynamic extrapolation beats per-step re-tracing by at least 10x on a
/// 1000-step canyon run with two refreshes, single-threaded.
#[test]
fn drt_speedup() {
    let scene = scene_file("canyon.scn");
    let cfg = RunConfig {
        t_start: 0.0,
        span: 5.0,
        step: 0.005,
        tc: TcMode::Schedule(vec![0.0, 2.5]),
        trace: TraceConfig { max_reflections: 2, enable_diffraction: false, enable_scattering: false },
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let (drt_s, rt_s, traces) = pool.install(|| {
        let t0 = Instant::now();
        let drt = run_drt(&scene, &cfg);
        let drt_s = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let rt = run_rt(&scene, &cfg);
        (drt_s, t1.elapsed().as_secs_f64(), (drt.timing.trace_count, rt.timing.trace_count))
    });
    println!(
        "  drt {drt_s:.3} s ({} traces) vs rt {rt_s:.3} s ({} traces): {:.1}x",
        traces.0,
        traces.1,
        rt_s / drt_s
    );
    report(6, "DRT speed-up >= 10x", traces.1 >= 1000 && rt_s >= 10.0 * drt_s);
}

/// 7. Total field continuity across the shadow boundary of a building
/// corner (0.02 degree straddle).
#[test]
fn shadow_boundary_continuity() {
    let base_scene = "scene t0 0\nGEOMETRY\nmaterial metal pec\n\
         object block material metal closed\n  box 1 -10 0  2 20 20\n\
         DYNAMICS\nterminal TX pos -30 6 0 freq 3e9 power 1\nterminal RX pos 10 10 0 freq 3e9\nEND\n";
    let edge_point = Vec3::new(2.0, 0.0, 0.0);
    let power_dbm_at = |pos: Vec3| {
        let mut scene = parse_scene(base_scene).unwrap();
        scene.rx.kinematics.position = pos;
        let paths = trace_snapshot(&scene, 0.0, &TraceConfig::default(), None);
        let ctx = SolveContext::new(&scene, 0.0);
        let mut total = CVec3::ZERO;
        for p in &paths {
            total = total.add(path_field(&ctx, p).unwrap());
        }
        watts_to_dbm(received_power_w(total, scene.tx.carrier_hz))
    };
    // Direction from the silhouette edge along the grazing LoS ray.
    let sb = (edge_point - Vec3::new(-30.0, 6.0, 0.0)).normalized();
    let rot = |v: Vec3, a: f64| {
        Vec3::new(v.x * a.cos() - v.y * a.sin(), v.x * a.sin() + v.y * a.cos(), v.z)
    };
    let h = 0.01f64.to_radians();
    let lit = power_dbm_at(edge_point + rot(sb, h) * 25.0);
    let shadow = power_dbm_at(edge_point + rot(sb, -h) * 25.0);
    println!("  lit {lit:.3} dBm vs shadow {shadow:.3} dBm");
    report(7, "UTD shadow-boundary continuity", (lit - shadow).abs() < 0.1);
}

/// 8. Seeded runs are byte-identical: the CLI emits the same CSVs twice.
#[test]
fn deterministic_outputs() {
    let bin = env!("CARGO_BIN_EXE_drt");
    let scene = format!("{}/../../scenes/canyon.scn", env!("CARGO_MANIFEST_DIR"));
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = std::process::Command::new(bin)
            .args([
                "run", "--scene", &scene, "--mode", "compare", "--span", "0.5", "--step",
                "0.01", "--tc", "0,0.25", "--seed", "42", "--threads", "1", "--out",
            ])
            .arg(d.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    // timing.csv is wall-clock and exempt from byte determinism.
    let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv") && n != "timing.csv")
        .collect();
    names.sort();
    assert!(names.len() >= 9, "expected full output set, got {names:?}");
    let ok = names.iter().all(|n| {
        let a = std::fs::read(dirs[0].path().join(n)).unwrap();
        let b = std::fs::read(dirs[1].path().join(n)).unwrap();
        a == b
    });
    // And the validation report is reproducible too.
    let out = |_| {
        std::process::Command::new(bin)
            .args(["validate", "--seed", "42", "--cases", "20"])
            .output()
            .unwrap()
            .stdout
    };
    let reports_match = out(0) == out(1);
    println!("  {} CSVs compared", names.len());
    report(8, "seeded runs byte-identical", ok && reports_match);
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use drt_core::channel::profile::{
    build_pdfp, build_pdp, error_map, power_to_csv, rays_to_csv, DEFAULT_DELAY_BIN_S,
    DEFAULT_DOPPLER_BIN_HZ, DEFAULT_TIME_BIN_S,
};
use drt_core::channel::runner::{run_drt, run_rt, RunConfig, RunResult, TcMode};
use drt_core::rt::TraceConfig;
use drt_core::scene::{parse_scene, Scene};
use drt_core::validate::{run_validation, Fault};

#[derive(Parser)]
#[command(name = "drt", about = "Dynamic ray tracing channel simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scene over time and emit channel profiles.
    Run(RunArgs),
    /// Run the randomized finite-difference oracle suite.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// One trace per lifetime interval, analytic extrapolation in between.
    Drt,
    /// Full snapshot trace at every step.
    Rt,
    /// Both, plus a step-by-step error map.
    Compare,
}

#[derive(Args)]
struct RunArgs {
    /// Scene file.
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, value_enum, default_value = "drt")]
    mode: Mode,
    /// Simulated span, seconds.
    #[arg(long, default_value_t = 5.0)]
    span: f64,
    /// Time step, seconds.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Lifetime handling: "auto", a single refresh interval in seconds, or a
    /// comma list of absolute refresh times (e.g. "0,3").
    #[arg(long, default_value = "auto")]
    tc: String,
    #[arg(long, default_value_t = 2)]
    max_reflections: usize,
    /// Enable edge diffraction.
    #[arg(long, default_value = "on")]
    diffraction: OnOff,
    /// Enable diffuse scattering.
    #[arg(long, default_value = "off")]
    scattering: OnOff,
    /// Doppler bin width for the power-Doppler profile, Hz.
    #[arg(long, default_value_t = DEFAULT_DOPPLER_BIN_HZ)]
    doppler_bin: f64,
    /// Time bin width for profile grids, seconds.
    #[arg(long, default_value_t = DEFAULT_TIME_BIN_S)]
    time_bin: f64,
    /// Delay bin width for the power-delay profile, seconds.
    #[arg(long, default_value_t = DEFAULT_DELAY_BIN_S)]
    delay_bin: f64,
    /// Worker threads (0 = hardware parallelism; 1 for benchmarking).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Seed recorded in the manifest; all run outputs are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

impl From<OnOff> for bool {
    fn from(v: OnOff) -> bool {
        v == OnOff::On
    }
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random configurations per geometry kind.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// Inject a known error to prove the oracles detect it.
    #[arg(long, hide = true)]
    inject_coriolis_sign_error: bool,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn parse_tc(spec: &str, span: f64) -> Result<TcMode, String> {
    if spec == "auto" {
        return Ok(TcMode::Auto { max: span });
    }
    let values: Result<Vec<f64>, _> = spec.split(',').map(str::trim).map(str::parse).collect();
    let values = values.map_err(|e| format!("bad --tc '{spec}': {e}"))?;
    match values.as_slice() {
        [] => Err("empty --tc".into()),
        [interval] if *interval > 0.0 && spec.find(',').is_none() => {
            Ok(TcMode::Interval(*interval))
        }
        _ => Ok(TcMode::Schedule(values)),
    }
}

fn load_scene(path: &Path) -> Result<Scene, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(_) => {
            eprintln!("scene not found: {}", path.display());
            return Err(ExitCode::from(2));
        }
    };
    parse_scene(&text).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::FAILURE
    })
}

fn write_file(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<String>) -> Result<(), ExitCode> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| {
        eprintln!("cannot write {}: {e}", path.display());
        ExitCode::FAILURE
    })?;
    outputs.push(name.to_string());
    Ok(())
}

fn timing_csv(label: &str, r: &RunResult) -> String {
    format!(
        "run,phase,seconds,count\n{label},trace,{:.6},{}\n{label},extrapolate,{:.6},{}\n{label},field,{:.6},{}\n",
        r.timing.trace_s,
        r.timing.trace_count,
        r.timing.extrapolate_s,
        r.timing.step_count,
        r.timing.field_s,
        r.timing.step_count,
    )
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let scene = match load_scene(&args.scene) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if args.step <= 0.0 || args.span < args.step {
        eprintln!("need step > 0 and span >= step");
        return ExitCode::FAILURE;
    }
    let tc = match parse_tc(&args.tc, args.span) {
        Ok(tc) => tc,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let threads = if args.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        args.threads
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .ok();

    let cfg = RunConfig {
        t_start: scene.t0,
        span: args.span,
        step: args.step,
        tc,
        trace: TraceConfig {
            max_reflections: args.max_reflections,
            enable_diffraction: args.diffraction.into(),
            enable_scattering: args.scattering.into(),
        },
    };

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("cannot create {}: {e}", args.out.display());
        return ExitCode::FAILURE;
    }
    let mut outputs = Vec::new();
    let dir = &args.out;

    let emit = |run: &RunResult, prefix: &str, outputs: &mut Vec<String>| -> Result<(), ExitCode> {
        write_file(dir, &format!("{prefix}rays.csv"), &rays_to_csv(run), outputs)?;
        write_file(dir, &format!("{prefix}power.csv"), &power_to_csv(run), outputs)?;
        let pdp = build_pdp(run, args.time_bin, args.delay_bin);
        write_file(dir, &format!("{prefix}pdp.csv"), &pdp.to_csv("t_s", "delay_s"), outputs)?;
        let pdfp = build_pdfp(run, args.time_bin, args.doppler_bin);
        write_file(dir, &format!("{prefix}pdfp.csv"), &pdfp.to_csv("t_s", "doppler_hz"), outputs)?;
        Ok(())
    };

    let result = (|| -> Result<(), ExitCode> {
        let timing;
        match args.mode {
            Mode::Drt => {
                let run = run_drt(&scene, &cfg);
                emit(&run, "", &mut outputs)?;
                timing = timing_csv("drt", &run);
                println!(
                    "drt: {} steps, {} traces, trace {:.3}s extrapolate {:.3}s field {:.3}s",
                    run.timing.step_count,
                    run.timing.trace_count,
                    run.timing.trace_s,
                    run.timing.extrapolate_s,
                    run.timing.field_s
                );
            }
            Mode::Rt => {
                let run = run_rt(&scene, &cfg);
                emit(&run, "", &mut outputs)?;
                timing = timing_csv("rt", &run);
                println!(
                    "rt: {} steps, {} traces, trace {:.3}s field {:.3}s",
                    run.timing.step_count, run.timing.trace_count, run.timing.trace_s, run.timing.field_s
                );
            }
            Mode::Compare => {
                let drt = run_drt(&scene, &cfg);
                let rt = run_rt(&scene, &cfg);
                emit(&drt, "drt_", &mut outputs)?;
                emit(&rt, "rt_", &mut outputs)?;
                let map = error_map(&drt, &rt);
                let mut csv = String::from("t_s,power_drt_dbm,power_rt_dbm,delta_db,structures_match\n");
                let mut max_abs: f64 = 0.0;
                let mut mismatches = 0usize;
                for c in &map {
                    let delta = c
                        .delta_db
                        .map(|d| format!("{d:.9e}"))
                        .unwrap_or_default();
                    csv.push_str(&format!(
                        "{:.9e},{:.6},{:.6},{},{}\n",
                        c.t,
                        c.power_a_dbm,
                        c.power_b_dbm,
                        delta,
                        u8::from(c.structures_match)
                    ));
                    if let Some(d) = c.delta_db {
                        max_abs = max_abs.max(d.abs());
                    } else {
                        mismatches += 1;
                    }
                }
                write_file(dir, "error_map.csv", &csv, &mut outputs)?;
                timing = format!("{}{}", timing_csv("drt", &drt), timing_csv("rt", &rt).lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
                println!(
                    "compare: max |dP| = {max_abs:.3e} dB over {} matching steps ({mismatches} structural mismatches); drt {:.3}s vs rt {:.3}s trace time",
                    map.len() - mismatches,
                    drt.timing.trace_s,
                    rt.timing.trace_s
                );
            }
        }
        write_file(dir, "timing.csv", &timing, &mut outputs)?;
        Ok(())
    })();
    if let Err(code) = result {
        return code;
    }

    let manifest = serde_json::json!({
        "command": "run",
        "scene": args.scene.display().to_string(),
        "mode": match args.mode { Mode::Drt => "drt", Mode::Rt => "rt", Mode::Compare => "compare" },
        "span_s": args.span,
        "step_s": args.step,
        "tc": args.tc,
        "max_reflections": args.max_reflections,
        "diffraction": bool::from(args.diffraction),
        "scattering": bool::from(args.scattering),
        "doppler_bin_hz": args.doppler_bin,
        "time_bin_s": args.time_bin,
        "delay_bin_s": args.delay_bin,
        "threads": threads,
        "seed": args.seed,
        "outputs": outputs,
    });
    let text = format!("{:#}\n", manifest);
    if let Err(e) = std::fs::write(args.out.join("manifest.json"), text) {
        eprintln!("cannot write manifest: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

fn cmd_validate(args: ValidateArgs) -> ExitCode {
    let fault = if args.inject_coriolis_sign_error { Fault::CoriolisSign } else { Fault::None };
    let report = run_validation(args.seed, args.cases, fault);
    let text = report.render();
    print!("{text}");
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

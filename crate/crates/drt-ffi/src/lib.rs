//! C ABI for the dynamic ray tracing engine.
//!
//! All entry points return a `DrtStatus`; on failure the thread-local
//! message from [`drt_last_error`] describes what went wrong. Handles are
//! opaque and must be released with the matching `_free` function. Pointers
//! returned for strings stay valid until their owning handle is freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use drt_core::channel::runner::{run_drt, run_rt, RunConfig, RunResult, TcMode};
use drt_core::rt::TraceConfig;
use drt_core::scene::{parse_scene, Scene};
use drt_core::validate::{run_validation, Fault};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrtStatus {
    Ok = 0,
    /// Null pointer or otherwise invalid argument.
    InvalidArgument = 1,
    /// Scene text failed to parse or validate.
    SceneError = 2,
    /// Simulation failed.
    RunError = 3,
    /// Index out of range.
    OutOfRange = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: DrtStatus, msg: impl Into<Vec<u8>>) -> DrtStatus {
    set_error(msg);
    status
}

/// Message for the most recent failure on this thread; empty string if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn drt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Opaque parsed scene.
pub struct DrtScene(Scene);

/// Opaque simulation result.
pub struct DrtResult {
    result: RunResult,
    /// NUL-terminated copies of the ray labels, indexed like the rays.
    labels: Vec<Vec<CString>>,
}

/// Simulation settings. `tc_interval_s <= 0` selects automatic lifetime
/// handling (re-trace on path expiry or line-of-sight change).
#[repr(C)]
pub struct DrtRunConfig {
    pub span_s: f64,
    pub step_s: f64,
    pub tc_interval_s: f64,
    pub max_reflections: u32,
    pub enable_diffraction: bool,
    pub enable_scattering: bool,
    /// Full snapshot trace at every step instead of extrapolation.
    pub brute_force: bool,
}

/// One time step of a result.
#[repr(C)]
pub struct DrtStepInfo {
    pub t_s: f64,
    pub total_power_w: f64,
    pub ray_count: usize,
    /// 1 when this step ran a full trace, 0 when extrapolated.
    pub retraced: u8,
}

/// One ray of one time step.
#[repr(C)]
pub struct DrtRayInfo {
    pub delay_s: f64,
    pub length_m: f64,
    pub power_w: f64,
    pub doppler_hz: f64,
}

/// Parses a scene from NUL-terminated text into a new handle.
#[no_mangle]
pub unsafe extern "C" fn drt_scene_parse(
    text: *const c_char,
    out: *mut *mut DrtScene,
) -> DrtStatus {
    if text.is_null() || out.is_null() {
        return fail(DrtStatus::InvalidArgument, "null pointer");
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return fail(DrtStatus::InvalidArgument, "scene text is not UTF-8");
    };
    match parse_scene(text) {
        Ok(scene) => {
            *out = Box::into_raw(Box::new(DrtScene(scene)));
            DrtStatus::Ok
        }
        Err(e) => {
            *out = ptr::null_mut();
            fail(DrtStatus::SceneError, e.to_string())
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn drt_scene_free(scene: *mut DrtScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Runs a simulation. The returned handle must be freed with
/// [`drt_result_free`].
#[no_mangle]
pub unsafe extern "C" fn drt_run(
    scene: *const DrtScene,
    config: *const DrtRunConfig,
    out: *mut *mut DrtResult,
) -> DrtStatus {
    if scene.is_null() || config.is_null() || out.is_null() {
        return fail(DrtStatus::InvalidArgument, "null pointer");
    }
    let scene = &(*scene).0;
    let c = &*config;
    if !(c.step_s > 0.0) || c.span_s < c.step_s {
        return fail(DrtStatus::InvalidArgument, "need step > 0 and span >= step");
    }
    let cfg = RunConfig {
        t_start: scene.t0,
        span: c.span_s,
        step: c.step_s,
        tc: if c.tc_interval_s > 0.0 {
            TcMode::Interval(c.tc_interval_s)
        } else {
            TcMode::Auto { max: c.span_s }
        },
        trace: TraceConfig {
            max_reflections: c.max_reflections as usize,
            enable_diffraction: c.enable_diffraction,
            enable_scattering: c.enable_scattering,
        },
    };
    let result = if c.brute_force { run_rt(scene, &cfg) } else { run_drt(scene, &cfg) };
    let labels = result
        .snapshots
        .iter()
        .map(|s| {
            s.rays
                .iter()
                .map(|r| CString::new(r.label.as_str()).unwrap_or_default())
                .collect()
        })
        .collect();
    *out = Box::into_raw(Box::new(DrtResult { result, labels }));
    DrtStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn drt_result_free(result: *mut DrtResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of time steps in a result.
#[no_mangle]
pub unsafe extern "C" fn drt_result_step_count(result: *const DrtResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (&*result).result.snapshots.len()
}

#[no_mangle]
pub unsafe extern "C" fn drt_result_step(
    result: *const DrtResult,
    step: usize,
    out: *mut DrtStepInfo,
) -> DrtStatus {
    if result.is_null() || out.is_null() {
        return fail(DrtStatus::InvalidArgument, "null pointer");
    }
    let Some(s) = (&*result).result.snapshots.get(step) else {
        return fail(DrtStatus::OutOfRange, format!("step {step} out of range"));
    };
    *out = DrtStepInfo {
        t_s: s.t,
        total_power_w: s.total_power_w,
        ray_count: s.rays.len(),
        retraced: u8::from(s.retraced),
    };
    DrtStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn drt_result_ray(
    result: *const DrtResult,
    step: usize,
    ray: usize,
    out: *mut DrtRayInfo,
) -> DrtStatus {
    if result.is_null() || out.is_null() {
        return fail(DrtStatus::InvalidArgument, "null pointer");
    }
    let Some(r) = (&*result)
        .result
        .snapshots
        .get(step)
        .and_then(|s| s.rays.get(ray))
    else {
        return fail(DrtStatus::OutOfRange, format!("ray {step}/{ray} out of range"));
    };
    *out = DrtRayInfo {
        delay_s: r.delay,
        length_m: r.length,
        power_w: r.power_w,
        doppler_hz: r.doppler_hz,
    };
    DrtStatus::Ok
}

/// Interaction label of one ray (e.g. "LoS", "R[bus/f2]"); valid until the
/// result is freed. Null when out of range.
#[no_mangle]
pub unsafe extern "C" fn drt_result_ray_label(
    result: *const DrtResult,
    step: usize,
    ray: usize,
) -> *const c_char {
    if result.is_null() {
        return ptr::null();
    }
    (&*result)
        .labels
        .get(step)
        .and_then(|s| s.get(ray))
        .map(|c| c.as_ptr())
        .unwrap_or(ptr::null())
}

/// Runs the seeded finite-difference oracle suite; returns Ok when every
/// category is within tolerance. The rendered report is available through
/// [`drt_last_error`] in both cases.
#[no_mangle]
pub extern "C" fn drt_validate(seed: u64, cases: usize) -> DrtStatus {
    let report = run_validation(seed, cases, Fault::None);
    let passed = report.passed();
    set_error(report.render());
    if passed {
        DrtStatus::Ok
    } else {
        DrtStatus::RunError
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENE: &str = "scene t0 0\nGEOMETRY\nmaterial c eps_r 5 sigma 0.01\n\
        object wall material c open\n  face -50 0 -20  -50 0 20  50 0 20  50 0 -20\n\
        DYNAMICS\nterminal TX pos -10 10 0 vel 5 0 0 freq 3e9 power 1\n\
        terminal RX pos 10 15 0 freq 3e9\nEND\n\0";

    #[test]
    fn round_trip_through_c_abi() {
        unsafe {
            let mut scene: *mut DrtScene = ptr::null_mut();
            let st = drt_scene_parse(SCENE.as_ptr().cast(), &mut scene);
            assert_eq!(st, DrtStatus::Ok);
            let cfg = DrtRunConfig {
                span_s: 0.1,
                step_s: 0.05,
                tc_interval_s: 0.0,
                max_reflections: 2,
                enable_diffraction: true,
                enable_scattering: false,
                brute_force: false,
            };
            let mut result: *mut DrtResult = ptr::null_mut();
            assert_eq!(drt_run(scene, &cfg, &mut result), DrtStatus::Ok);
            assert_eq!(drt_result_step_count(result), 3);
            let mut step = DrtStepInfo { t_s: 0.0, total_power_w: 0.0, ray_count: 0, retraced: 0 };
            assert_eq!(drt_result_step(result, 0, &mut step), DrtStatus::Ok);
            assert!(step.ray_count >= 2 && step.total_power_w > 0.0 && step.retraced == 1);
            let mut ray = DrtRayInfo { delay_s: 0.0, length_m: 0.0, power_w: 0.0, doppler_hz: 0.0 };
            assert_eq!(drt_result_ray(result, 0, 0, &mut ray), DrtStatus::Ok);
            assert!(ray.delay_s > 0.0);
            let label = drt_result_ray_label(result, 0, 0);
            assert!(!label.is_null());
            assert_eq!(CStr::from_ptr(label).to_str().unwrap(), "LoS");
            assert_eq!(drt_result_step(result, 99, &mut step), DrtStatus::OutOfRange);
            assert!(!CStr::from_ptr(drt_last_error()).to_bytes().is_empty());
            drt_result_free(result);
            drt_scene_free(scene);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut scene: *mut DrtScene = ptr::null_mut();
            assert_eq!(drt_scene_parse(ptr::null(), &mut scene), DrtStatus::InvalidArgument);
            assert_eq!(
                drt_scene_parse("not a scene\0".as_ptr().cast(), &mut scene),
                DrtStatus::SceneError
            );
            assert!(scene.is_null());
            drt_scene_free(ptr::null_mut());
            drt_result_free(ptr::null_mut());
        }
    }
}

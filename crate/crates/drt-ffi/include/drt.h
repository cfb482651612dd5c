#ifndef DRT_H
#define DRT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DrtStatus {
  DrtStatus_Ok = 0,
  /**
   * Null pointer or otherwise invalid argument.
   */
  DrtStatus_InvalidArgument = 1,
  /**
   * Scene text failed to parse or validate.
   */
  DrtStatus_SceneError = 2,
  /**
   * Simulation failed.
   */
  DrtStatus_RunError = 3,
  /**
   * Index out of range.
   */
  DrtStatus_OutOfRange = 4,
} DrtStatus;

/**
 * Opaque simulation result.
 */
typedef struct DrtResult DrtResult;

/**
 * Opaque parsed scene.
 */
typedef struct DrtScene DrtScene;

/**
 * Simulation settings. `tc_interval_s <= 0` selects automatic lifetime
 * handling (re-trace on path expiry or line-of-sight change).
 */
typedef struct DrtRunConfig {
  double span_s;
  double step_s;
  double tc_interval_s;
  uint32_t max_reflections;
  bool enable_diffraction;
  bool enable_scattering;
  /**
   * Full snapshot trace at every step instead of extrapolation.
   */
  bool brute_force;
} DrtRunConfig;

/**
 * One time step of a result.
 */
typedef struct DrtStepInfo {
  double t_s;
  double total_power_w;
  uintptr_t ray_count;
  /**
   * 1 when this step ran a full trace, 0 when extrapolated.
   */
  uint8_t retraced;
} DrtStepInfo;

/**
 * One ray of one time step.
 */
typedef struct DrtRayInfo {
  double delay_s;
  double length_m;
  double power_w;
  double doppler_hz;
} DrtRayInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty string if none.
 * Valid until the next failing call on the same thread.
 */
const char *drt_last_error(void);

/**
 * Parses a scene from NUL-terminated text into a new handle.
 */
enum DrtStatus drt_scene_parse(const char *text, struct DrtScene **out);

void drt_scene_free(struct DrtScene *scene);

/**
 * Runs a simulation. The returned handle must be freed with
 * [`drt_result_free`].
 */
enum DrtStatus drt_run(const struct DrtScene *scene,
                       const struct DrtRunConfig *config,
                       struct DrtResult **out);

void drt_result_free(struct DrtResult *result);

/**
 * Number of time steps in a result.
 */
uintptr_t drt_result_step_count(const struct DrtResult *result);

enum DrtStatus drt_result_step(const struct DrtResult *result,
                               uintptr_t step,
                               struct DrtStepInfo *out);

enum DrtStatus drt_result_ray(const struct DrtResult *result,
                              uintptr_t step,
                              uintptr_t ray,
                              struct DrtRayInfo *out);

/**
 * Interaction label of one ray (e.g. "LoS", "R[bus/f2]"); valid until the
 * result is freed. Null when out of range.
 */
const char *drt_result_ray_label(const struct DrtResult *result, uintptr_t step, uintptr_t ray);

/**
 * Runs the seeded finite-difference oracle suite; returns Ok when every
 * category is within tolerance. The rendered report is available through
 * [`drt_last_error`] in both cases.
 */
enum DrtStatus drt_validate(uint64_t seed, uintptr_t cases);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DRT_H */

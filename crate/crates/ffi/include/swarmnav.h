#ifndef SWARMNAV_H
#define SWARMNAV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwarmnavStatus {
  SWARMNAV_STATUS_OK = 0,
  SWARMNAV_STATUS_NULL_POINTER = 1,
  SWARMNAV_STATUS_INVALID_UTF8 = 2,
  SWARMNAV_STATUS_CONFIG = 3,
  SWARMNAV_STATUS_INVALID_INPUT = 4,
  SWARMNAV_STATUS_INSUFFICIENT_HISTORY = 5,
  SWARMNAV_STATUS_DEGENERATE = 6,
  SWARMNAV_STATUS_FINISHED = 7,
  SWARMNAV_STATUS_BUFFER_TOO_SMALL = 8,
  SWARMNAV_STATUS_INTERNAL = 9,
} SwarmnavStatus;

// Outcome of a simulation so far.
typedef enum SwarmnavRunState {
  SWARMNAV_RUN_STATE_RUNNING = 0,
  SWARMNAV_RUN_STATE_SUCCESS = 1,
  SWARMNAV_RUN_STATE_COLLISION = 2,
  SWARMNAV_RUN_STATE_TIMEOUT = 3,
} SwarmnavRunState;

// Opaque simulation handle.
typedef struct SwarmnavSim SwarmnavSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *swarmnav_last_error(void);

// Builds a simulation from scenario text, using the seed in the text.
//
// # Safety
// `toml_text` must be a NUL-terminated string and `out` a valid pointer.
enum SwarmnavStatus swarmnav_sim_new(const char *toml_text, struct SwarmnavSim **out);

// Builds a simulation from scenario text with `seed` overriding the text.
//
// # Safety
// As for [`swarmnav_sim_new`].
enum SwarmnavStatus swarmnav_sim_new_with_seed(const char *toml_text,
                                               uint64_t seed,
                                               struct SwarmnavSim **out);

// # Safety
// `sim` must come from `swarmnav_sim_new*` and not be used afterwards.
// Null is ignored.
void swarmnav_sim_free(struct SwarmnavSim *sim);

// Advances one step. `out_state` may be null.
//
// # Safety
// `sim` must be a live handle; `out_state` null or valid.
enum SwarmnavStatus swarmnav_sim_step(struct SwarmnavSim *sim, enum SwarmnavRunState *out_state);

// Steps until the run ends. Calling it on a finished run is not an error.
//
// # Safety
// As for [`swarmnav_sim_step`].
enum SwarmnavStatus swarmnav_sim_run(struct SwarmnavSim *sim, enum SwarmnavRunState *out_state);

// # Safety
// `sim` must be a live handle and `out_state` valid.
enum SwarmnavStatus swarmnav_sim_state(const struct SwarmnavSim *sim,
                                       enum SwarmnavRunState *out_state);

// Number of agents, or 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
size_t swarmnav_sim_agent_count(const struct SwarmnavSim *sim);

// Steps taken so far, or 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
uint64_t swarmnav_sim_step_index(const struct SwarmnavSim *sim);

// Copies current positions, ascending by agent id, into `xy` as
// `x0, y0, x1, y1, ...`. `len` is the buffer length in doubles and must be
// at least twice the agent count.
//
// # Safety
// `sim` must be a live handle and `xy` valid for `len` writes.
enum SwarmnavStatus swarmnav_sim_positions(const struct SwarmnavSim *sim, double *xy, size_t len);

// The latest step record as one line of JSON, in the same format as the
// step log. Release it with [`swarmnav_string_free`].
//
// # Safety
// `sim` must be a live handle and `out` valid.
enum SwarmnavStatus swarmnav_sim_last_record_json(const struct SwarmnavSim *sim, char **out);

// # Safety
// `s` must come from this library and not be used afterwards. Null is
// ignored.
void swarmnav_string_free(char *s);

// Path persistence of a newest-first path of `n_points` points.
//
// # Safety
// `xy` must be valid for `2 * n_points` reads and `out` for one write.
enum SwarmnavStatus swarmnav_path_persistence(const double *xy, size_t n_points, double *out);

// Path similarity of two newest-first paths.
//
// # Safety
// `a` and `b` must be valid for `2 * na` and `2 * nb` reads, `out` for
// one write.
enum SwarmnavStatus swarmnav_path_similarity(const double *a,
                                             size_t na,
                                             const double *b,
                                             size_t nb,
                                             double *out);

// Avoidance term for one obstacle point. Each pointer addresses an
// `[x, y]` pair.
//
// # Safety
// `self_pos`, `obstacle`, and `u_prev` must be valid for two reads and
// `out` for two writes.
enum SwarmnavStatus swarmnav_avoid_one(const double *self_pos,
                                       const double *obstacle,
                                       const double *u_prev,
                                       double radius,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWARMNAV_H */

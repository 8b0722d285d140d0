/* SPDX-License-Identifier: Apache-2.0 */
#ifndef BODYAUTH_H
#define BODYAUTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BODYAUTH_BUILDING)
#    define BA_API __declspec(dllexport)
#  else
#    define BA_API __declspec(dllimport)
#  endif
#else
#  define BA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Every fallible call returns a ba_status. On failure the calling thread's
 * last error message is set and any output handle is left untouched.
 * Handles are opaque and owned by the caller; free them with the matching
 * *_free function (passing NULL is allowed).
 */
typedef enum ba_status {
  BA_OK = 0,
  BA_ERR_INVALID_ARGUMENT = 1,
  BA_ERR_PARSE = 2,
  BA_ERR_IO = 3,
  BA_ERR_INSUFFICIENT_DATA = 4,
  BA_ERR_DIMENSION_MISMATCH = 5,
  BA_ERR_DOMAIN = 6,
  BA_ERR_INTERNAL = 100
} ba_status;

typedef struct ba_scene ba_scene;
typedef struct ba_series ba_series;
typedef struct ba_profile ba_profile;
typedef struct ba_auth_report ba_auth_report;
typedef struct ba_session ba_session;
typedef struct ba_eval_report ba_eval_report;

BA_API const char* ba_version(void);
/* Message of the last failed call on this thread; "" if none. */
BA_API const char* ba_last_error(void);
BA_API const char* ba_status_name(ba_status status);

/* ---- scenes and synthesis ---------------------------------------------- */

BA_API ba_status ba_scene_load(const char* path, ba_scene** out);
BA_API ba_status ba_scene_parse(const char* text, ba_scene** out);
BA_API ba_status ba_scene_set_seed(ba_scene* scene, uint64_t seed);
BA_API void ba_scene_free(ba_scene* scene);

BA_API ba_status ba_synthesize(const ba_scene* scene, double duration_s, ba_series** out);

/* ---- CSI series ---------------------------------------------------------- */

BA_API ba_status ba_series_load_csv(const char* path, ba_series** out);
BA_API ba_status ba_series_save_csv(const ba_series* series, const char* path);
BA_API size_t ba_series_frames(const ba_series* series);
BA_API size_t ba_series_subcarriers(const ba_series* series);
BA_API double ba_series_rate_hz(const ba_series* series);
BA_API void ba_series_free(ba_series* series);

/* ---- registration -------------------------------------------------------- */

typedef struct ba_register_options {
  size_t periods;     /* default 4 */
  double period_secs; /* default 30 */
  double retain;      /* PCA variance fraction, default 0.9 */
  double window_s;    /* default 1 */
  int filter_order;   /* default 5 */
  double cutoff_hz;   /* default 1 */
} ba_register_options;

BA_API void ba_register_options_init(ba_register_options* options);

/* Uses the first periods * period_secs seconds of the series. */
BA_API ba_status ba_register(const ba_series* series, const ba_register_options* options, ba_profile** out);

BA_API ba_status ba_profile_load(const char* path, ba_profile** out);
BA_API ba_status ba_profile_save(const ba_profile* profile, const char* path);
BA_API size_t ba_profile_periods(const ba_profile* profile);
BA_API size_t ba_profile_dimension(const ba_profile* profile);
BA_API size_t ba_profile_input_dimension(const ba_profile* profile);
BA_API ba_status ba_profile_period_info(const ba_profile* profile, size_t index, size_t* sample_count,
                                        double* threshold);
BA_API void ba_profile_free(ba_profile* profile);

/* ---- authentication ------------------------------------------------------ */

typedef struct ba_window_decision {
  size_t index;
  int accepted;
  double best_score;
  size_t best_period; /* 0-based */
} ba_window_decision;

/* One decision per whole window of the series. */
BA_API ba_status ba_authenticate(const ba_profile* profile, const ba_series* series, ba_auth_report** out);
BA_API size_t ba_auth_report_windows(const ba_auth_report* report);
BA_API ba_status ba_auth_report_window(const ba_auth_report* report, size_t index, ba_window_decision* out);
BA_API double ba_auth_report_acceptance_rate(const ba_auth_report* report);
BA_API void ba_auth_report_free(ba_auth_report* report);

/* ---- streaming session ---------------------------------------------------- */

typedef enum ba_phase { BA_PHASE_LOCKED = 0, BA_PHASE_REGISTERING = 1, BA_PHASE_MONITORING = 2 } ba_phase;

typedef struct ba_session_config {
  size_t periods;
  double period_secs;
  double auth_interval_s;
  double rate_hz;
  double window_s;
  int filter_order;
  double cutoff_hz;
  double retain;
  double max_gap_s;
  int update_enabled;
} ba_session_config;

BA_API void ba_session_config_init(ba_session_config* config);
BA_API ba_status ba_session_config_load(const char* path, ba_session_config* out);

BA_API ba_status ba_session_create(const ba_session_config* config, ba_session** out);
BA_API ba_status ba_session_login(ba_session* session, int64_t ts_us);
BA_API ba_status ba_session_ingest(ba_session* session, int64_t ts_us, const double* amplitudes,
                                   const double* phases, size_t subcarriers);
/* Accepts the CSV header or a data row; `row` is the 1-based line number. */
BA_API ba_status ba_session_ingest_csv_line(ba_session* session, const char* line, size_t row);
BA_API ba_status ba_session_tick(ba_session* session, int64_t now_us);
BA_API ba_status ba_session_end(ba_session* session, int64_t ts_us);
BA_API ba_phase ba_session_phase(const ba_session* session);
BA_API size_t ba_session_dropped_frames(const ba_session* session);
BA_API size_t ba_session_out_of_order_frames(const ba_session* session);
/* Returns 1 and sets *line to "ts_us EVENT detail" (valid until the next
   call on this session), or 0 when no event is pending. */
BA_API int ba_session_poll_event(ba_session* session, const char** line);
BA_API void ba_session_free(ba_session* session);

/* ---- evaluation ---------------------------------------------------------- */

typedef struct ba_eval_options {
  size_t periods;
  double period_secs;
  double interval_min;
  double retain;
  int update_enabled;
} ba_eval_options;

BA_API void ba_eval_options_init(ba_eval_options* options);

/* Every *.csv in `dir` is one subject (registration followed by monitoring),
   labelled by its file stem and processed in name order. */
BA_API ba_status ba_evaluate_dir(const char* dir, const ba_eval_options* options, ba_eval_report** out);
BA_API ba_status ba_evaluate_series(const ba_series* const* subjects, const char* const* labels, size_t count,
                                    const ba_eval_options* options, ba_eval_report** out);
BA_API double ba_eval_report_mii(const ba_eval_report* report);
BA_API double ba_eval_report_maa(const ba_eval_report* report);
BA_API double ba_eval_report_mdp(const ba_eval_report* report);
BA_API size_t ba_eval_report_subjects(const ba_eval_report* report);
BA_API ba_status ba_eval_report_save(const ba_eval_report* report, const char* path);
BA_API void ba_eval_report_free(ba_eval_report* report);

/* ---- latency ------------------------------------------------------------- */

typedef struct ba_bench_result {
  size_t iterations;
  double filter_median_ms, filter_max_ms;
  double features_median_ms, features_max_ms;
  double match_median_ms, match_max_ms;
} ba_bench_result;

/* Registers a profile from the series (4 periods of up to 30 s, at least 10
   windows each) and times the three stages on its first window. */
BA_API ba_status ba_bench(const ba_series* series, size_t iterations, ba_bench_result* out);

#ifdef __cplusplus
}
#endif

#endif /* BODYAUTH_H */

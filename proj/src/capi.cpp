// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/bodyauth.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "bodyauth/bench.hpp"
#include "bodyauth/body_model.hpp"
#include "bodyauth/csi.hpp"
#include "bodyauth/error.hpp"
#include "bodyauth/features.hpp"
#include "bodyauth/matcher.hpp"
#include "bodyauth/metrics.hpp"
#include "bodyauth/profile_io.hpp"
#include "bodyauth/scene_config.hpp"
#include "bodyauth/session.hpp"

struct ba_scene {
  bodyauth::Scene scene;
};
struct ba_series {
  bodyauth::CsiSeries series;
};
struct ba_profile {
  bodyauth::RegisteredProfile profile;
};
struct ba_auth_report {
  std::vector<ba_window_decision> windows;
};
struct ba_session {
  bodyauth::Session session;
  std::size_t subcarriers = 0;
  std::vector<bodyauth::SessionEvent> pending;
  std::size_t next = 0;
  std::string current;
};
struct ba_eval_report {
  bodyauth::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

ba_status to_status(bodyauth::ErrorCode code) {
  using bodyauth::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BA_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return BA_ERR_PARSE;
    case ErrorCode::Io: return BA_ERR_IO;
    case ErrorCode::InsufficientData: return BA_ERR_INSUFFICIENT_DATA;
    case ErrorCode::DimensionMismatch: return BA_ERR_DIMENSION_MISMATCH;
    case ErrorCode::Domain: return BA_ERR_DOMAIN;
  }
  return BA_ERR_INTERNAL;
}

template <class F>
ba_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return BA_OK;
  } catch (const bodyauth::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return BA_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) bodyauth::fail(bodyauth::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

bodyauth::FeatureConfig feature_config(double window_s, int order, double cutoff_hz, double rate_hz) {
  bodyauth::FeatureConfig f;
  f.window_s = window_s;
  f.filter.order = order;
  f.filter.cutoff_hz = cutoff_hz;
  f.filter.rate_hz = rate_hz;
  return f;
}

bodyauth::EvalConfig eval_config(const ba_eval_options* o, double rate_hz) {
  ba_eval_options defaults;
  ba_eval_options_init(&defaults);
  if (!o) o = &defaults;
  bodyauth::EvalConfig c;
  c.periods = o->periods;
  c.period_secs = o->period_secs;
  c.interval_min = o->interval_min;
  c.retain = o->retain;
  c.update_enabled = o->update_enabled != 0;
  c.features.filter.rate_hz = rate_hz;
  if (c.periods < 1) bodyauth::fail(bodyauth::ErrorCode::InvalidArgument, "periods must be >= 1");
  if (!(c.interval_min > 0.0)) bodyauth::fail(bodyauth::ErrorCode::InvalidArgument, "interval must be positive");
  return c;
}

ba_status evaluate(const std::vector<const bodyauth::CsiSeries*>& loaded, const std::vector<std::string>& labels,
                   const std::vector<std::string>& paths, const ba_eval_options* options, ba_eval_report** out) {
  return guarded([&] {
    require(out, "out");
    const auto count = std::max(loaded.size(), paths.size());
    if (count < 2) bodyauth::fail(bodyauth::ErrorCode::InsufficientData, "evaluation needs at least 2 subjects");
    std::vector<bodyauth::SubjectData> subjects;
    bodyauth::StageTimings timings;
    bodyauth::EvalConfig config;
    for (std::size_t i = 0; i < count; ++i) {
      // Files are loaded one at a time; only their window features are kept.
      bodyauth::CsiSeries from_file;
      const bodyauth::CsiSeries* series = nullptr;
      if (i < loaded.size()) {
        series = loaded[i];
      } else {
        from_file = bodyauth::load_csv(paths[i]);
        series = &from_file;
      }
      config = eval_config(options, series->rate_hz());
      subjects.push_back(bodyauth::prepare_subject(labels[i], *series, config, &timings));
    }
    auto report = std::make_unique<ba_eval_report>();
    report->report = bodyauth::run_evaluation(subjects, config, &timings);
    *out = report.release();
  });
}

}  // namespace

extern "C" {

const char* ba_version(void) { return "1.0.0"; }
const char* ba_last_error(void) { return g_last_error.c_str(); }

const char* ba_status_name(ba_status status) {
  switch (status) {
    case BA_OK: return "ok";
    case BA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BA_ERR_PARSE: return "parse error";
    case BA_ERR_IO: return "i/o error";
    case BA_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case BA_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case BA_ERR_DOMAIN: return "domain error";
    case BA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ba_status ba_scene_load(const char* path, ba_scene** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ba_scene{bodyauth::load_scene(path)};
  });
}

ba_status ba_scene_parse(const char* text, ba_scene** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new ba_scene{bodyauth::parse_scene(text)};
  });
}

ba_status ba_scene_set_seed(ba_scene* scene, uint64_t seed) {
  return guarded([&] {
    require(scene, "scene");
    scene->scene.seed = seed;
  });
}

void ba_scene_free(ba_scene* scene) { delete scene; }

ba_status ba_synthesize(const ba_scene* scene, double duration_s, ba_series** out) {
  return guarded([&] {
    require(scene, "scene");
    require(out, "out");
    *out = new ba_series{bodyauth::synthesize_csi(scene->scene, duration_s)};
  });
}

ba_status ba_series_load_csv(const char* path, ba_series** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ba_series{bodyauth::load_csv(path)};
  });
}

ba_status ba_series_save_csv(const ba_series* series, const char* path) {
  return guarded([&] {
    require(series, "series");
    require(path, "path");
    bodyauth::save_csv(path, series->series);
  });
}

size_t ba_series_frames(const ba_series* series) { return series ? series->series.size() : 0; }
size_t ba_series_subcarriers(const ba_series* series) { return series ? series->series.subcarriers() : 0; }
double ba_series_rate_hz(const ba_series* series) { return series ? series->series.rate_hz() : 0.0; }
void ba_series_free(ba_series* series) { delete series; }

void ba_register_options_init(ba_register_options* o) {
  if (!o) return;
  o->periods = 4;
  o->period_secs = 30.0;
  o->retain = 0.9;
  o->window_s = 1.0;
  o->filter_order = 5;
  o->cutoff_hz = 1.0;
}

ba_status ba_register(const ba_series* series, const ba_register_options* options, ba_profile** out) {
  return guarded([&] {
    require(series, "series");
    require(out, "out");
    ba_register_options o;
    ba_register_options_init(&o);
    if (options) o = *options;
    if (o.periods < 1) bodyauth::fail(bodyauth::ErrorCode::InvalidArgument, "periods must be >= 1");
    const auto& s = series->series;
    const auto features = feature_config(o.window_s, o.filter_order, o.cutoff_hz, s.rate_hz());
    const auto window = bodyauth::frames_per_window(s.rate_hz(), o.window_s);
    const auto per_period = static_cast<std::size_t>(std::llround(o.period_secs / o.window_s));
    const auto needed = o.periods * per_period * window;
    if (s.size() < needed)
      bodyauth::fail(bodyauth::ErrorCode::InsufficientData,
                     "registration needs " + std::to_string(static_cast<double>(needed) / s.rate_hz()) +
                         " s of CSI, input has " + std::to_string(s.duration_s()) + " s");
    const auto windows = bodyauth::series_features(s.slice(0, needed), features);
    std::vector<std::vector<bodyauth::FeatureVector>> periods(o.periods);
    for (std::size_t p = 0; p < o.periods; ++p)
      periods[p].assign(windows.begin() + static_cast<std::ptrdiff_t>(p * per_period),
                        windows.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_period));
    bodyauth::RegisterOptions ro;
    ro.retain = o.retain;
    ro.period_secs = o.period_secs;
    ro.features = features;
    ro.created_at_us = s.timestamp_us(needed - 1);
    *out = new ba_profile{bodyauth::register_profile(periods, ro)};
  });
}

ba_status ba_profile_load(const char* path, ba_profile** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ba_profile{bodyauth::load_profile(path)};
  });
}

ba_status ba_profile_save(const ba_profile* profile, const char* path) {
  return guarded([&] {
    require(profile, "profile");
    require(path, "path");
    bodyauth::save_profile(path, profile->profile);
  });
}

size_t ba_profile_periods(const ba_profile* p) { return p ? p->profile.t() : 0; }
size_t ba_profile_dimension(const ba_profile* p) { return p ? p->profile.dimension() : 0; }
size_t ba_profile_input_dimension(const ba_profile* p) { return p ? p->profile.input_dimension() : 0; }

ba_status ba_profile_period_info(const ba_profile* profile, size_t index, size_t* sample_count, double* threshold) {
  return guarded([&] {
    require(profile, "profile");
    if (index >= profile->profile.t())
      bodyauth::fail(bodyauth::ErrorCode::InvalidArgument, "period index out of range");
    const auto& period = profile->profile.periods[index];
    if (sample_count) *sample_count = period.sample_count;
    if (threshold) *threshold = period.threshold;
  });
}

void ba_profile_free(ba_profile* profile) { delete profile; }

ba_status ba_authenticate(const ba_profile* profile, const ba_series* series, ba_auth_report** out) {
  return guarded([&] {
    require(profile, "profile");
    require(series, "series");
    require(out, "out");
    const auto& p = profile->profile;
    const auto expected = p.input_dimension();
    const auto got = bodyauth::feature_dimension(series->series.subcarriers());
    if (expected != got)
      bodyauth::fail(bodyauth::ErrorCode::DimensionMismatch,
                     "profile expects " + std::to_string(expected) + " features, stream yields " +
                         std::to_string(got) + " (" + std::to_string(series->series.subcarriers()) + " subcarriers)");
    auto features = p.features;
    features.filter.rate_hz = series->series.rate_hz();
    auto report = std::make_unique<ba_auth_report>();
    for (const auto& f : bodyauth::series_features(series->series, features)) {
      const auto d = bodyauth::authenticate(p, f);
      report->windows.push_back({f.window_id, d.accepted ? 1 : 0, d.best_score, d.best_period});
    }
    *out = report.release();
  });
}

size_t ba_auth_report_windows(const ba_auth_report* r) { return r ? r->windows.size() : 0; }

ba_status ba_auth_report_window(const ba_auth_report* report, size_t index, ba_window_decision* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (index >= report->windows.size()) bodyauth::fail(bodyauth::ErrorCode::InvalidArgument, "window out of range");
    *out = report->windows[index];
  });
}

double ba_auth_report_acceptance_rate(const ba_auth_report* r) {
  if (!r || r->windows.empty()) return 0.0;
  const auto accepted = std::count_if(r->windows.begin(), r->windows.end(), [](const auto& w) { return w.accepted; });
  return static_cast<double>(accepted) / static_cast<double>(r->windows.size());
}

void ba_auth_report_free(ba_auth_report* report) { delete report; }

void ba_session_config_init(ba_session_config* c) {
  if (!c) return;
  const bodyauth::SessionConfig d;
  c->periods = d.periods;
  c->period_secs = d.period_secs;
  c->auth_interval_s = d.auth_interval_s;
  c->rate_hz = d.rate_hz;
  c->window_s = d.features.window_s;
  c->filter_order = d.features.filter.order;
  c->cutoff_hz = d.features.filter.cutoff_hz;
  c->retain = d.retain;
  c->max_gap_s = d.max_gap_s;
  c->update_enabled = d.update_enabled ? 1 : 0;
}

ba_status ba_session_config_load(const char* path, ba_session_config* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const auto c = bodyauth::load_session_config(path);
    out->periods = c.periods;
    out->period_secs = c.period_secs;
    out->auth_interval_s = c.auth_interval_s;
    out->rate_hz = c.rate_hz;
    out->window_s = c.features.window_s;
    out->filter_order = c.features.filter.order;
    out->cutoff_hz = c.features.filter.cutoff_hz;
    out->retain = c.retain;
    out->max_gap_s = c.max_gap_s;
    out->update_enabled = c.update_enabled ? 1 : 0;
  });
}

ba_status ba_session_create(const ba_session_config* config, ba_session** out) {
  return guarded([&] {
    require(out, "out");
    ba_session_config c;
    ba_session_config_init(&c);
    if (config) c = *config;
    bodyauth::SessionConfig sc;
    sc.periods = c.periods;
    sc.period_secs = c.period_secs;
    sc.auth_interval_s = c.auth_interval_s;
    sc.rate_hz = c.rate_hz;
    sc.retain = c.retain;
    sc.max_gap_s = c.max_gap_s;
    sc.update_enabled = c.update_enabled != 0;
    sc.features = feature_config(c.window_s, c.filter_order, c.cutoff_hz, c.rate_hz);
    *out = new ba_session{bodyauth::Session(sc), 0, {}, 0, {}};
  });
}

ba_status ba_session_login(ba_session* session, int64_t ts_us) {
  return guarded([&] {
    require(session, "session");
    session->session.on_primary_login(ts_us);
  });
}

ba_status ba_session_ingest(ba_session* session, int64_t ts_us, const double* amplitudes, const double* phases,
                            size_t subcarriers) {
  return guarded([&] {
    require(session, "session");
    require(amplitudes, "amplitudes");
    require(phases, "phases");
    bodyauth::CsiFrame f{ts_us, {amplitudes, amplitudes + subcarriers}, {phases, phases + subcarriers}};
    session->session.ingest_frame(f);
  });
}

ba_status ba_session_ingest_csv_line(ba_session* session, const char* line, size_t row) {
  return guarded([&] {
    require(session, "session");
    require(line, "line");
    const std::string_view text(line);
    if (text.starts_with("ts_us")) {
      session->subcarriers = bodyauth::parse_csv_header(text);
      return;
    }
    if (session->subcarriers == 0)
      bodyauth::fail(bodyauth::ErrorCode::Parse, "line " + std::to_string(row) + ": data before CSV header");
    session->session.ingest_frame(bodyauth::parse_csv_row(text, session->subcarriers, row));
  });
}

ba_status ba_session_tick(ba_session* session, int64_t now_us) {
  return guarded([&] {
    require(session, "session");
    session->session.tick(now_us);
  });
}

ba_status ba_session_end(ba_session* session, int64_t ts_us) {
  return guarded([&] {
    require(session, "session");
    session->session.end_of_stream(ts_us);
  });
}

ba_phase ba_session_phase(const ba_session* session) {
  if (!session) return BA_PHASE_LOCKED;
  switch (session->session.phase()) {
    case bodyauth::Phase::Locked: return BA_PHASE_LOCKED;
    case bodyauth::Phase::Registering: return BA_PHASE_REGISTERING;
    case bodyauth::Phase::Monitoring: return BA_PHASE_MONITORING;
  }
  return BA_PHASE_LOCKED;
}

size_t ba_session_dropped_frames(const ba_session* s) { return s ? s->session.dropped_frames() : 0; }
size_t ba_session_out_of_order_frames(const ba_session* s) { return s ? s->session.out_of_order_frames() : 0; }

int ba_session_poll_event(ba_session* session, const char** line) {
  if (!session || !line) return 0;
  if (session->next >= session->pending.size()) {
    session->pending = session->session.drain_events();
    session->next = 0;
    if (session->pending.empty()) return 0;
  }
  session->current = bodyauth::format_event(session->pending[session->next++]);
  *line = session->current.c_str();
  return 1;
}

void ba_session_free(ba_session* session) { delete session; }

void ba_eval_options_init(ba_eval_options* o) {
  if (!o) return;
  const bodyauth::EvalConfig d;
  o->periods = d.periods;
  o->period_secs = d.period_secs;
  o->interval_min = d.interval_min;
  o->retain = d.retain;
  o->update_enabled = d.update_enabled ? 1 : 0;
}

ba_status ba_evaluate_dir(const char* dir, const ba_eval_options* options, ba_eval_report** out) {
  std::vector<std::string> paths, labels;
  const auto listed = guarded([&] {
    require(dir, "dir");
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) bodyauth::fail(bodyauth::ErrorCode::Io, std::string("not a directory: ") + dir);
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".csv") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) labels.push_back(fs::path(p).stem().string());
  });
  if (listed != BA_OK) return listed;
  return evaluate({}, labels, paths, options, out);
}

ba_status ba_evaluate_series(const ba_series* const* subjects, const char* const* labels, size_t count,
                             const ba_eval_options* options, ba_eval_report** out) {
  std::vector<const bodyauth::CsiSeries*> loaded;
  std::vector<std::string> names;
  const auto checked = guarded([&] {
    require(subjects, "subjects");
    for (size_t i = 0; i < count; ++i) {
      require(subjects[i], "subject");
      loaded.push_back(&subjects[i]->series);
      names.push_back(labels && labels[i] ? labels[i] : "subject" + std::to_string(i + 1));
    }
  });
  if (checked != BA_OK) return checked;
  return evaluate(loaded, names, {}, options, out);
}

double ba_eval_report_mii(const ba_eval_report* r) { return r ? r->report.mii_minutes : 0.0; }
double ba_eval_report_maa(const ba_eval_report* r) { return r ? r->report.maa : 0.0; }
double ba_eval_report_mdp(const ba_eval_report* r) { return r ? r->report.mdp : 0.0; }
size_t ba_eval_report_subjects(const ba_eval_report* r) { return r ? r->report.labels.size() : 0; }

ba_status ba_eval_report_save(const ba_eval_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    std::ofstream out(path, std::ios::binary);
    if (!out) bodyauth::fail(bodyauth::ErrorCode::Io, std::string("cannot write '") + path + "'");
    out << bodyauth::report_to_json(report->report);
  });
}

void ba_eval_report_free(ba_eval_report* report) { delete report; }

ba_status ba_bench(const ba_series* series, size_t iterations, ba_bench_result* out) {
  return guarded([&] {
    require(series, "series");
    require(out, "out");
    if (iterations < 10) bodyauth::fail(bodyauth::ErrorCode::InvalidArgument, "bench needs at least 10 iterations");
    const auto& s = series->series;
    bodyauth::FeatureConfig features;
    features.filter.rate_hz = s.rate_hz();
    const auto window = bodyauth::frames_per_window(s.rate_hz(), features.window_s);
    constexpr std::size_t periods = 4;
    const auto per_period = std::min<std::size_t>(30, bodyauth::window_count(s, features.window_s) / periods);
    if (per_period < bodyauth::kMinPeriodSamples)
      bodyauth::fail(bodyauth::ErrorCode::InsufficientData,
                     "bench needs at least " + std::to_string(periods * bodyauth::kMinPeriodSamples) +
                         " s of CSI to build a profile");
    const auto windows = bodyauth::series_features(s.slice(0, periods * per_period * window), features);
    std::vector<std::vector<bodyauth::FeatureVector>> grouped(periods);
    for (std::size_t p = 0; p < periods; ++p)
      grouped[p].assign(windows.begin() + static_cast<std::ptrdiff_t>(p * per_period),
                        windows.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_period));
    bodyauth::RegisterOptions ro;
    ro.features = features;
    ro.period_secs = static_cast<double>(per_period) * features.window_s;
    const auto profile = bodyauth::register_profile(grouped, ro);
    const auto r = bodyauth::bench_stages(s.slice(0, window), profile, iterations);
    *out = {r.iterations,       r.filter.median_ms, r.filter.max_ms, r.features.median_ms,
            r.features.max_ms, r.match.median_ms,  r.match.max_ms};
  });
}

}  // extern "C"

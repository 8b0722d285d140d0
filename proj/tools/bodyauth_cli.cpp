// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library exclusively through the C API.

#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bodyauth/bodyauth.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct DomainFailure {
  std::string message;
};

struct UsageFailure {
  std::string message;
};

void check(ba_status status, const std::string& context) {
  if (status != BA_OK) throw DomainFailure{context + ": " + ba_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Scene = Handle<ba_scene, ba_scene_free>;
using Series = Handle<ba_series, ba_series_free>;
using Profile = Handle<ba_profile, ba_profile_free>;
using AuthReport = Handle<ba_auth_report, ba_auth_report_free>;
using Session = Handle<ba_session, ba_session_free>;
using EvalReport = Handle<ba_eval_report, ba_eval_report_free>;

void require_nonempty_file(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw DomainFailure{"cannot open '" + path + "'"};
  if (size == 0) throw UsageFailure{"input '" + path + "' is empty"};
}

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("BODYAUTH_SEED");
  if (!env || !*env) return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageFailure{"BODYAUTH_SEED must be an unsigned integer"};
  return v;
}

std::optional<std::int64_t> leading_timestamp(const std::string& line) {
  std::int64_t ts = 0;
  const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), ts);
  if (ec != std::errc{} || ptr == line.data()) return std::nullopt;
  return ts;
}

void print_events(ba_session* session) {
  const char* line = nullptr;
  while (ba_session_poll_event(session, &line)) std::cout << line << '\n';
}

struct SynthArgs {
  std::string scene, out;
  double duration = 0.0;
  std::optional<std::uint64_t> seed;
};

int synth(const SynthArgs& a) {
  Scene scene;
  check(ba_scene_load(a.scene.c_str(), scene.out()), "scene '" + a.scene + "'");
  auto seed = a.seed;
  if (const auto env = seed_from_env()) seed = env;
  if (seed) check(ba_scene_set_seed(scene.get(), *seed), "seed");
  Series series;
  check(ba_synthesize(scene.get(), a.duration, series.out()), "synthesis");
  check(ba_series_save_csv(series.get(), a.out.c_str()), "write");
  std::cout << "wrote " << ba_series_frames(series.get()) << " frames x " << ba_series_subcarriers(series.get())
            << " subcarriers to " << a.out << '\n';
  return kExitOk;
}

struct RegisterArgs {
  std::string in, out;
  std::size_t periods = 4;
  double period_secs = 30.0;
  double retain = 0.9;
};

int register_cmd(const RegisterArgs& a) {
  require_nonempty_file(a.in);
  Series series;
  check(ba_series_load_csv(a.in.c_str(), series.out()), "input '" + a.in + "'");
  ba_register_options o;
  ba_register_options_init(&o);
  o.periods = a.periods;
  o.period_secs = a.period_secs;
  o.retain = a.retain;
  Profile profile;
  check(ba_register(series.get(), &o, profile.out()), "registration");
  check(ba_profile_save(profile.get(), a.out.c_str()), "write");
  std::cout << "registered t=" << ba_profile_periods(profile.get()) << " k=" << ba_profile_dimension(profile.get())
            << '\n';
  for (std::size_t p = 0; p < ba_profile_periods(profile.get()); ++p) {
    std::size_t n = 0;
    double threshold = 0.0;
    check(ba_profile_period_info(profile.get(), p, &n, &threshold), "profile");
    char buf[128];
    std::snprintf(buf, sizeof buf, "period %zu: n=%zu threshold=%.6g", p + 1, n, threshold);
    std::cout << buf << '\n';
  }
  return kExitOk;
}

struct AuthArgs {
  std::string profile, in;
};

int auth(const AuthArgs& a) {
  require_nonempty_file(a.in);
  Profile profile;
  check(ba_profile_load(a.profile.c_str(), profile.out()), "profile '" + a.profile + "'");
  Series series;
  check(ba_series_load_csv(a.in.c_str(), series.out()), "input '" + a.in + "'");
  AuthReport report;
  check(ba_authenticate(profile.get(), series.get(), report.out()), "authentication");
  const auto windows = ba_auth_report_windows(report.get());
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < windows; ++i) {
    ba_window_decision d;
    check(ba_auth_report_window(report.get(), i, &d), "report");
    accepted += d.accepted ? 1 : 0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu %.6g %zu %s", d.index, d.best_score, d.best_period + 1,
                  d.accepted ? "ACCEPT" : "REJECT");
    std::cout << buf << '\n';
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "acceptance_rate %.4f (%zu/%zu)", ba_auth_report_acceptance_rate(report.get()),
                accepted, windows);
  std::cout << buf << '\n';
  return kExitOk;
}

struct RunArgs {
  std::string config, in;
};

int run(const RunArgs& a) {
  ba_session_config config;
  check(ba_session_config_load(a.config.c_str(), &config), "config '" + a.config + "'");
  Session session;
  check(ba_session_create(&config, session.out()), "session");

  std::ifstream file;
  std::istream* in = &std::cin;
  if (a.in != "-") {
    file.open(a.in, std::ios::binary);
    if (!file) throw DomainFailure{"cannot open '" + a.in + "'"};
    in = &file;
  }

  std::string line;
  std::size_t row = 0, malformed = 0;
  std::optional<std::int64_t> last_ts;
  bool logged_in = false;
  while (std::getline(*in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto ts = leading_timestamp(line);
    if (ts && !logged_in) {
      // The primary login is stubbed: it happens at the first frame.
      check(ba_session_login(session.get(), *ts), "login");
      logged_in = true;
    }
    if (ba_session_ingest_csv_line(session.get(), line.c_str(), row) != BA_OK) {
      ++malformed;
      std::cerr << "skipping " << ba_last_error() << '\n';
      continue;
    }
    if (ts) {
      last_ts = ts;
      check(ba_session_tick(session.get(), *ts), "tick");
    }
    print_events(session.get());
  }
  check(ba_session_end(session.get(), last_ts.value_or(0)), "end of stream");
  print_events(session.get());
  std::cerr << "frames: malformed=" << malformed << " dropped=" << ba_session_dropped_frames(session.get())
            << " out_of_order=" << ba_session_out_of_order_frames(session.get()) << '\n';
  return kExitOk;
}

struct EvaluateArgs {
  std::string subjects, report;
  double interval_min = 5.0;
  std::size_t periods = 4;
  double period_secs = 30.0;
  bool no_update = false;
};

int evaluate(const EvaluateArgs& a) {
  ba_eval_options o;
  ba_eval_options_init(&o);
  o.interval_min = a.interval_min;
  o.periods = a.periods;
  o.period_secs = a.period_secs;
  o.update_enabled = a.no_update ? 0 : 1;
  EvalReport report;
  check(ba_evaluate_dir(a.subjects.c_str(), &o, report.out()), "evaluation");
  check(ba_eval_report_save(report.get(), a.report.c_str()), "write");
  char buf[160];
  std::snprintf(buf, sizeof buf, "subjects %zu\nmii_minutes %.2f\nmaa %.4f\nmdp %.4f",
                ba_eval_report_subjects(report.get()), ba_eval_report_mii(report.get()),
                ba_eval_report_maa(report.get()), ba_eval_report_mdp(report.get()));
  std::cout << buf << '\n';
  return kExitOk;
}

struct BenchArgs {
  std::string in;
  std::size_t iters = 1000;
};

int bench(const BenchArgs& a) {
  require_nonempty_file(a.in);
  Series series;
  check(ba_series_load_csv(a.in.c_str(), series.out()), "input '" + a.in + "'");
  ba_bench_result r;
  check(ba_bench(series.get(), a.iters, &r), "bench");
  char buf[256];
  std::printf("%-10s %12s %12s\n", "stage", "median_ms", "max_ms");
  std::snprintf(buf, sizeof buf, "%-10s %12.4f %12.4f\n%-10s %12.4f %12.4f\n%-10s %12.4f %12.4f\n%-10s %12.4f %12.4f",
                "filter", r.filter_median_ms, r.filter_max_ms, "features", r.features_median_ms, r.features_max_ms,
                "match", r.match_median_ms, r.match_max_ms, "total",
                r.filter_median_ms + r.features_median_ms + r.match_median_ms,
                r.filter_max_ms + r.features_max_ms + r.match_max_ms);
  std::cout << buf << "\niterations " << r.iterations << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contactless continuous authentication from Wi-Fi CSI"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ba_version());

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a CSI CSV capture from a scene file");
  synth_cmd->add_option("--scene", synth_args.scene, "Scene configuration")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_args.out, "Output CSV")->required();
  synth_cmd->add_option("--duration", synth_args.duration, "Seconds of capture")->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth_args.seed, "RNG seed (BODYAUTH_SEED overrides)");

  RegisterArgs register_args;
  auto* register_sub = app.add_subcommand("register", "Register a user profile from a CSI capture");
  register_sub->add_option("--in", register_args.in, "Input CSV")->required()->check(CLI::ExistingFile);
  register_sub->add_option("--out", register_args.out, "Profile output")->required();
  register_sub->add_option("--periods", register_args.periods, "Recording periods")->check(CLI::Range(1, 1000));
  register_sub->add_option("--period-secs", register_args.period_secs, "Seconds per period")
      ->check(CLI::PositiveNumber);
  register_sub->add_option("--retain", register_args.retain, "PCA variance fraction")->check(CLI::Range(0.0, 1.0));

  AuthArgs auth_args;
  auto* auth_cmd = app.add_subcommand("auth", "Authenticate every 1 s window of a capture");
  auth_cmd->add_option("--profile", auth_args.profile, "Profile file")->required()->check(CLI::ExistingFile);
  auth_cmd->add_option("--in", auth_args.in, "Input CSV")->required()->check(CLI::ExistingFile);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Drive the session state machine over a frame stream");
  run_cmd->add_option("--config", run_args.config, "Session configuration")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--in", run_args.in, "Input CSV or - for standard input")->required();

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a directory of per-subject captures");
  eval_cmd->add_option("--subjects", eval_args.subjects, "Directory of CSV files")->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--interval-min", eval_args.interval_min, "Minutes between authentications")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--report", eval_args.report, "Report output")->required();
  eval_cmd->add_option("--periods", eval_args.periods, "Registration periods")->check(CLI::Range(1, 1000));
  eval_cmd->add_option("--period-secs", eval_args.period_secs, "Seconds per period")->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--no-update", eval_args.no_update, "Disable profile updates");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Time the filter, feature and match stages on a 1 s window");
  bench_cmd->add_option("--in", bench_args.in, "Input CSV")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--iters", bench_args.iters, "Repetitions (>= 10)")->check(CLI::Range(10, 100000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return synth(synth_args);
    if (register_sub->parsed()) return register_cmd(register_args);
    if (auth_cmd->parsed()) return auth(auth_args);
    if (run_cmd->parsed()) return run(run_args);
    if (eval_cmd->parsed()) return evaluate(eval_args);
    if (bench_cmd->parsed()) return bench(bench_args);
  } catch (const UsageFailure& e) {
    std::cerr << "usage error: " << e.message << '\n';
    return kExitUsage;
  } catch (const DomainFailure& e) {
    std::cerr << "error: " << e.message << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

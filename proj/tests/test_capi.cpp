// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bodyauth/bodyauth.h"

namespace {

std::string scene_text(const std::string& preset, std::uint64_t seed) {
  return "[scene]\nseed = " + std::to_string(seed) + "\n[body.0]\npreset = " + preset + "\n";
}

ba_series* synth(const std::string& preset, std::uint64_t seed, double seconds) {
  ba_scene* scene = nullptr;
  REQUIRE(ba_scene_parse(scene_text(preset, seed).c_str(), &scene) == BA_OK);
  ba_series* series = nullptr;
  REQUIRE(ba_synthesize(scene, seconds, &series) == BA_OK);
  ba_scene_free(scene);
  return series;
}

double acceptance(const ba_profile* profile, const ba_series* series) {
  ba_auth_report* report = nullptr;
  REQUIRE(ba_authenticate(profile, series, &report) == BA_OK);
  const double rate = ba_auth_report_acceptance_rate(report);
  ba_auth_report_free(report);
  return rate;
}

struct Scratch {
  std::filesystem::path dir;
  Scratch() {
    dir = std::filesystem::temp_directory_path() / ("bodyauth_capi_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  std::string file(const char* name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("status reporting") {
  CHECK(std::string(ba_version()).size() > 0);
  CHECK(std::string(ba_status_name(BA_ERR_IO)) == "i/o error");
  ba_scene* scene = nullptr;
  CHECK(ba_scene_parse("[scene]\nrate_hz = 50\nwhat = 1\n", &scene) == BA_ERR_PARSE);
  CHECK(scene == nullptr);
  CHECK(std::string(ba_last_error()).find("line 3") != std::string::npos);
  CHECK(ba_scene_load("/nonexistent/scene.ini", &scene) == BA_ERR_IO);
  CHECK(ba_scene_parse(nullptr, &scene) == BA_ERR_INVALID_ARGUMENT);
  CHECK(ba_series_frames(nullptr) == 0);
  ba_series_free(nullptr);
  ba_scene_free(nullptr);
}

TEST_CASE("synthesis and CSV round trip") {
  Scratch tmp;
  ba_series* a = synth("default", 5, 4.0);
  CHECK(ba_series_frames(a) == 200);
  CHECK(ba_series_subcarriers(a) == 30);
  CHECK(ba_series_rate_hz(a) == 50.0);
  REQUIRE(ba_series_save_csv(a, tmp.file("a.csv").c_str()) == BA_OK);
  ba_series* b = nullptr;
  REQUIRE(ba_series_load_csv(tmp.file("a.csv").c_str(), &b) == BA_OK);
  CHECK(ba_series_frames(b) == 200);
  CHECK(ba_series_rate_hz(b) == doctest::Approx(50.0));
  REQUIRE(ba_series_save_csv(b, tmp.file("b.csv").c_str()) == BA_OK);
  std::ifstream fa(tmp.file("a.csv")), fb(tmp.file("b.csv"));
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());

  std::ofstream(tmp.file("bad.csv")) << "ts_us,a1,p1\n0,1.0,0.1\n20000,1.0\n";
  ba_series* bad = nullptr;
  CHECK(ba_series_load_csv(tmp.file("bad.csv").c_str(), &bad) == BA_ERR_PARSE);
  CHECK(std::string(ba_last_error()).find("line 3") != std::string::npos);
  ba_series_free(a);
  ba_series_free(b);
}

TEST_CASE("register, authenticate and persist") {
  Scratch tmp;
  ba_series* own = synth("default", 1, 150.0);
  ba_series* impostor = synth("synthetic:5", 2, 60.0);

  ba_register_options options;
  ba_register_options_init(&options);
  CHECK(options.periods == 4);
  CHECK(options.period_secs == 30.0);
  ba_profile* profile = nullptr;
  REQUIRE(ba_register(own, &options, &profile) == BA_OK);
  CHECK(ba_profile_periods(profile) == 4);
  CHECK(ba_profile_input_dimension(profile) == 480);
  CHECK(ba_profile_dimension(profile) > 0);
  for (std::size_t p = 0; p < 4; ++p) {
    std::size_t n = 0;
    double threshold = 0;
    REQUIRE(ba_profile_period_info(profile, p, &n, &threshold) == BA_OK);
    CHECK(n == 30);
    CHECK(threshold > 0.0);
  }
  std::size_t n = 0;
  double threshold = 0;
  CHECK(ba_profile_period_info(profile, 4, &n, &threshold) == BA_ERR_INVALID_ARGUMENT);

  CHECK(acceptance(profile, own) >= 0.9);
  CHECK(acceptance(profile, impostor) <= 0.2);

  REQUIRE(ba_profile_save(profile, tmp.file("p.json").c_str()) == BA_OK);
  ba_profile* loaded = nullptr;
  REQUIRE(ba_profile_load(tmp.file("p.json").c_str(), &loaded) == BA_OK);
  ba_auth_report* r1 = nullptr;
  ba_auth_report* r2 = nullptr;
  REQUIRE(ba_authenticate(profile, impostor, &r1) == BA_OK);
  REQUIRE(ba_authenticate(loaded, impostor, &r2) == BA_OK);
  REQUIRE(ba_auth_report_windows(r1) == 60);
  for (std::size_t i = 0; i < 60; ++i) {
    ba_window_decision d1, d2;
    REQUIRE(ba_auth_report_window(r1, i, &d1) == BA_OK);
    REQUIRE(ba_auth_report_window(r2, i, &d2) == BA_OK);
    CHECK(d1.index == i);
    CHECK(d1.accepted == d2.accepted);
    CHECK(d1.best_score == d2.best_score);
    CHECK(d1.best_period == d2.best_period);
  }
  ba_auth_report_free(r1);
  ba_auth_report_free(r2);

  SUBCASE("short input names both durations") {
    ba_series* short_series = synth("default", 3, 30.0);
    ba_profile* none = nullptr;
    CHECK(ba_register(short_series, &options, &none) == BA_ERR_INSUFFICIENT_DATA);
    const std::string msg = ba_last_error();
    CHECK(msg.find("120") != std::string::npos);
    CHECK(msg.find("30") != std::string::npos);
    options.periods = 2;
    options.period_secs = 15;
    CHECK(ba_register(short_series, &options, &none) == BA_OK);
    CHECK(ba_profile_periods(none) == 2);
    ba_profile_free(none);
    ba_series_free(short_series);
  }
  ba_profile_free(loaded);
  ba_profile_free(profile);
  ba_series_free(own);
  ba_series_free(impostor);
}

TEST_CASE("session through CSV lines") {
  Scratch tmp;
  ba_series* own = synth("default", 4, 180.0);
  REQUIRE(ba_series_save_csv(own, tmp.file("own.csv").c_str()) == BA_OK);

  ba_session_config config;
  ba_session_config_init(&config);
  config.auth_interval_s = 20;
  ba_session* session = nullptr;
  REQUIRE(ba_session_create(&config, &session) == BA_OK);
  CHECK(ba_session_phase(session) == BA_PHASE_LOCKED);
  REQUIRE(ba_session_login(session, 0) == BA_OK);
  CHECK(ba_session_phase(session) == BA_PHASE_REGISTERING);

  std::ifstream in(tmp.file("own.csv"));
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> events;
  while (std::getline(in, line)) {
    ++row;
    REQUIRE(ba_session_ingest_csv_line(session, line.c_str(), row) == BA_OK);
    if (row > 1) REQUIRE(ba_session_tick(session, std::stoll(line.substr(0, line.find(',')))) == BA_OK);
    const char* ev = nullptr;
    while (ba_session_poll_event(session, &ev)) events.emplace_back(ev);
  }
  CHECK(ba_session_ingest_csv_line(session, "12,1,2", row + 1) == BA_ERR_PARSE);
  CHECK(ba_session_phase(session) == BA_PHASE_MONITORING);
  REQUIRE(events.size() >= 2);
  CHECK(events[0].find(" REGISTERED ") != std::string::npos);
  std::size_t ok = 0;
  for (const auto& e : events) ok += e.find(" AUTH_OK ") != std::string::npos ? 1 : 0;
  CHECK(ok == 3);

  std::vector<double> amps(30, 1.0), phases(30, 0.0);
  CHECK(ba_session_ingest(session, 1, amps.data(), phases.data(), 30) == BA_OK);
  CHECK(ba_session_out_of_order_frames(session) == 1);
  ba_session_free(session);
  ba_series_free(own);

  ba_session_config bad;
  ba_session_config_init(&bad);
  bad.periods = 0;
  CHECK(ba_session_create(&bad, &session) == BA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("evaluation and bench") {
  std::vector<ba_series*> owned;
  for (int i = 0; i < 3; ++i) owned.push_back(synth("synthetic:" + std::to_string(10 + i), 50 + i, 100.0));
  ba_eval_options options;
  ba_eval_options_init(&options);
  options.periods = 2;
  options.period_secs = 20;
  options.interval_min = 0.5;
  const char* labels[] = {"a", "b", "c"};
  std::vector<const ba_series*> subjects(owned.begin(), owned.end());
  ba_eval_report* report = nullptr;
  REQUIRE(ba_evaluate_series(subjects.data(), labels, 3, &options, &report) == BA_OK);
  CHECK(ba_eval_report_subjects(report) == 3);
  CHECK(ba_eval_report_maa(report) >= 0.0);
  CHECK(ba_eval_report_mdp(report) >= 0.85);
  CHECK(ba_eval_report_mii(report) == doctest::Approx(1.0));
  ba_eval_report_free(report);
  CHECK(ba_evaluate_series(subjects.data(), labels, 1, &options, &report) == BA_ERR_INSUFFICIENT_DATA);

  ba_bench_result bench;
  REQUIRE(ba_bench(owned[0], 10, &bench) == BA_OK);
  CHECK(bench.iterations == 10);
  CHECK(bench.filter_median_ms > 0.0);
  CHECK(bench.filter_max_ms >= bench.filter_median_ms);
  CHECK(ba_bench(owned[0], 5, &bench) == BA_ERR_INVALID_ARGUMENT);
  for (auto* s : owned) ba_series_free(s);
}

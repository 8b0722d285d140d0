// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "bodyauth/error.hpp"
#include "bodyauth/pipeline.hpp"

namespace bodyauth {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::size_t windows_per_interval(const EvalConfig& config) {
  const auto w = static_cast<std::size_t>(std::llround(config.interval_min * 60.0 / config.features.window_s));
  if (w == 0) fail(ErrorCode::InvalidArgument, "interval is shorter than one window");
  return w;
}

std::size_t windows_per_period(const EvalConfig& config) {
  return static_cast<std::size_t>(std::llround(config.period_secs / config.features.window_s));
}

// Majority vote over one interval; ties pass.
bool interval_passes(const RegisteredProfile& profile, const Eigen::MatrixXd& transformed) {
  std::size_t accepted = 0;
  for (Eigen::Index r = 0; r < transformed.rows(); ++r)
    if (decide(profile.periods, transformed.row(r).transpose()).accepted) ++accepted;
  return 2 * accepted >= static_cast<std::size_t>(transformed.rows());
}

}  // namespace

InterruptionHistogram InterruptionHistogram::grid(double interval_min, double horizon_min) {
  if (!(interval_min > 0.0) || !(horizon_min >= interval_min))
    fail(ErrorCode::InvalidArgument, "histogram grid needs 0 < interval <= horizon");
  const double bins = horizon_min / interval_min;
  if (std::abs(bins - std::round(bins)) > 1e-9) fail(ErrorCode::InvalidArgument, "horizon must be a multiple of interval");
  InterruptionHistogram h;
  h.interval_min = interval_min;
  h.counts.assign(static_cast<std::size_t>(std::llround(bins)), 0);
  return h;
}

std::size_t InterruptionHistogram::subjects() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t InterruptionHistogram::bin_of(double t_min) const {
  const double k = t_min / interval_min - 1.0;
  const auto bin = std::llround(k);
  if (std::abs(k - static_cast<double>(bin)) > 1e-9 || bin < 0 || bin >= static_cast<long long>(counts.size()))
    fail(ErrorCode::InvalidArgument, "time " + std::to_string(t_min) + " min is not on the interruption grid");
  return static_cast<std::size_t>(bin);
}

double mean_interruption_interval(const InterruptionHistogram& h) {
  const auto n = h.subjects();
  if (n == 0) fail(ErrorCode::InsufficientData, "histogram has no subjects");
  double acc = 0.0;
  for (std::size_t k = 0; k < h.bins(); ++k) acc += static_cast<double>(h.counts[k]) * h.time_at(k);
  return acc / static_cast<double>(n);
}

double subject_accuracy(double t_min, const InterruptionHistogram& grid) {
  const auto bin = grid.bin_of(t_min);
  if (bin + 1 == grid.bins()) return 1.0;
  const double t = grid.time_at(bin);
  return (t - grid.time_at(0)) / t;
}

double mean_auth_accuracy(const InterruptionHistogram& h) {
  const auto n = h.subjects();
  if (n == 0) fail(ErrorCode::InsufficientData, "histogram has no subjects");
  const double first = h.time_at(0);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < h.bins(); ++k) {
    const double t = h.time_at(k);
    acc += static_cast<double>(h.counts[k]) * (t - first) / t;
  }
  acc += static_cast<double>(h.counts.back());
  return acc / static_cast<double>(n);
}

double mean_defending_precision(const ConfusionMatrix& c) {
  if (c.n < 2) fail(ErrorCode::InsufficientData, "defending precision needs at least 2 subjects");
  double acc = 0.0;
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < c.n; ++j) {
      if (i == j) continue;
      const double p = c.at(i, j);
      if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "confusion entries must lie in [0, 1]");
      acc += p;
    }
  return 1.0 - acc / static_cast<double>(c.n * (c.n - 1));
}

LatencySummary summarize_latency(std::vector<double> samples_ms) {
  if (samples_ms.empty()) return {};
  std::sort(samples_ms.begin(), samples_ms.end());
  const auto n = samples_ms.size();
  const double median = n % 2 ? samples_ms[n / 2] : 0.5 * (samples_ms[n / 2 - 1] + samples_ms[n / 2]);
  return {median, samples_ms.back()};
}

SubjectData prepare_subject(std::string label, const CsiSeries& stream, const EvalConfig& config,
                            StageTimings* timings) {
  if (stream.empty()) fail(ErrorCode::InsufficientData, "subject '" + label + "' has an empty stream");
  const auto length = frames_per_window(stream.rate_hz(), config.features.window_s);
  const auto total = stream.size() / length;
  const auto registration = config.periods * windows_per_period(config);
  if (total < registration + windows_per_interval(config))
    fail(ErrorCode::InsufficientData, "subject '" + label + "': stream of " + std::to_string(stream.duration_s()) +
                                          " s is shorter than registration plus one interval");
  SubjectData out;
  out.label = std::move(label);
  for (std::size_t w = 0; w < total; ++w) {
    const auto frames = stream.slice(w * length, length);
    const auto t0 = Clock::now();
    const auto processed = sanitize(frames, config.features.filter);
    const auto t1 = Clock::now();
    auto features = extract_stats(processed, w);
    if (timings) {
      timings->features_ms.push_back(elapsed_ms(t1));
      timings->filter_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    (w < registration ? out.registration : out.monitoring).push_back(std::move(features));
  }
  return out;
}

EvalReport run_evaluation(std::span<const SubjectData> subjects, const EvalConfig& config,
                          const StageTimings* timings) {
  const auto n = subjects.size();
  if (n < 2) fail(ErrorCode::InsufficientData, "evaluation needs at least 2 subjects");
  const auto per_interval = windows_per_interval(config);
  const auto per_period = windows_per_period(config);
  std::size_t intervals = SIZE_MAX;
  for (const auto& s : subjects) intervals = std::min(intervals, s.monitoring.size() / per_interval);
  if (intervals == 0) fail(ErrorCode::InsufficientData, "a monitoring stream is shorter than one interval");

  EvalReport report;
  report.histogram = InterruptionHistogram::grid(config.interval_min, config.interval_min * static_cast<double>(intervals));
  report.confusion = ConfusionMatrix(n);
  std::vector<double> match_ms;

  // Raw monitoring windows of every subject, interval by interval.
  std::vector<Eigen::MatrixXd> monitoring;
  for (const auto& s : subjects) {
    monitoring.push_back(to_matrix(std::span(s.monitoring).first(intervals * per_interval)));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& subject = subjects[i];
    report.labels.push_back(subject.label);
    if (subject.registration.size() < config.periods * per_period)
      fail(ErrorCode::InsufficientData, "subject '" + subject.label + "' has too few registration windows");
    std::vector<std::vector<FeatureVector>> periods(config.periods);
    for (std::size_t p = 0; p < config.periods; ++p)
      periods[p].assign(subject.registration.begin() + static_cast<std::ptrdiff_t>(p * per_period),
                        subject.registration.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_period));
    RegisterOptions options;
    options.retain = config.retain;
    options.period_secs = config.period_secs;
    options.features = config.features;
    const auto registered = register_profile(periods, options);

    // Legal user: stop at the first failed interval.
    auto profile = registered;
    double first_interruption = report.histogram.horizon();
    for (std::size_t k = 0; k < intervals; ++k) {
      const auto rows = monitoring[i].middleRows(static_cast<Eigen::Index>(k * per_interval),
                                                 static_cast<Eigen::Index>(per_interval));
      const auto t0 = Clock::now();
      const auto transformed = transform_rows(profile, rows);
      const bool pass = interval_passes(profile, transformed);
      match_ms.push_back(elapsed_ms(t0) / static_cast<double>(per_interval));
      if (!pass) {
        first_interruption = report.histogram.time_at(k);
        break;
      }
      if (config.update_enabled) {
        const auto latest = std::span(subject.monitoring).subspan(k * per_interval, per_interval);
        profile = update(profile, latest).profile;
      }
    }
    report.first_interruption_min.push_back(first_interruption);
    report.histogram.add(first_interruption);

    // Adversaries against the freshly registered profile.
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto transformed = transform_rows(registered, monitoring[j]);
      std::size_t accepted = 0;
      for (std::size_t k = 0; k < intervals; ++k)
        if (interval_passes(registered, transformed.middleRows(static_cast<Eigen::Index>(k * per_interval),
                                                               static_cast<Eigen::Index>(per_interval))))
          ++accepted;
      report.confusion.at(i, j) = static_cast<double>(accepted) / static_cast<double>(intervals);
    }
  }

  report.mii_minutes = mean_interruption_interval(report.histogram);
  report.maa = mean_auth_accuracy(report.histogram);
  report.mdp = mean_defending_precision(report.confusion);
  if (timings) {
    report.filter_latency = summarize_latency(timings->filter_ms);
    report.features_latency = summarize_latency(timings->features_ms);
  }
  report.match_latency = summarize_latency(std::move(match_ms));
  return report;
}

std::string report_to_json(const EvalReport& r) {
  using nlohmann::json;
  json histogram = json::object();
  for (std::size_t k = 0; k < r.histogram.bins(); ++k) {
    char key[32];
    std::snprintf(key, sizeof key, "%g", r.histogram.time_at(k));
    histogram[key] = r.histogram.counts[k];
  }
  json confusion = json::array();
  for (std::size_t i = 0; i < r.confusion.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < r.confusion.n; ++j) row.push_back(i == j ? json(nullptr) : json(r.confusion.at(i, j)));
    confusion.push_back(row);
  }
  const json doc = {
      {"mii_minutes", r.mii_minutes},
      {"maa", r.maa},
      {"mdp", r.mdp},
      {"interval_min", r.histogram.interval_min},
      {"subjects", r.labels},
      {"first_interruption_min", r.first_interruption_min},
      {"histogram", histogram},
      {"confusion", confusion},
      {"latency_ms",
       {{"filter", r.filter_latency.median_ms},
        {"features", r.features_latency.median_ms},
        {"match", r.match_latency.median_ms}}},
      {"latency_max_ms",
       {{"filter", r.filter_latency.max_ms},
        {"features", r.features_latency.max_ms},
        {"match", r.match_latency.max_ms}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace bodyauth

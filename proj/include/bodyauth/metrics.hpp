// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "bodyauth/csi.hpp"
#include "bodyauth/features.hpp"
#include "bodyauth/matcher.hpp"

namespace bodyauth {

// First-interruption counts on the grid interval, 2*interval, ..., horizon.
// Subjects never interrupted are counted at the horizon.
struct InterruptionHistogram {
  double interval_min = 5.0;
  std::vector<std::size_t> counts;  // counts[k] is for t = (k + 1) * interval_min

  static InterruptionHistogram grid(double interval_min = 5.0, double horizon_min = 60.0);

  std::size_t bins() const { return counts.size(); }
  double time_at(std::size_t bin) const { return static_cast<double>(bin + 1) * interval_min; }
  double horizon() const { return time_at(bins() - 1); }
  std::size_t subjects() const;
  std::size_t bin_of(double t_min) const;  // throws if t is off the grid
  void add(double t_min) { ++counts[bin_of(t_min)]; }
};

// Row i is the registered subject, column j the adversary; p(i, j) is the
// fraction of j's attempts accepted. The diagonal is ignored.
struct ConfusionMatrix {
  std::size_t n = 0;
  std::vector<double> cells;

  explicit ConfusionMatrix(std::size_t subjects = 0) : n(subjects), cells(subjects * subjects, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return cells[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return cells[i * n + j]; }
};

double mean_interruption_interval(const InterruptionHistogram& h);

// (t - first) / t below the horizon, 1 at the horizon.
double subject_accuracy(double t_min, const InterruptionHistogram& grid = InterruptionHistogram::grid());

double mean_auth_accuracy(const InterruptionHistogram& h);
double mean_defending_precision(const ConfusionMatrix& c);

struct LatencySummary {
  double median_ms = 0.0;
  double max_ms = 0.0;
};
LatencySummary summarize_latency(std::vector<double> samples_ms);

// Per-window wall times of the three processing stages.
struct StageTimings {
  std::vector<double> filter_ms;
  std::vector<double> features_ms;
  std::vector<double> match_ms;
};

// Raw per-window features of one subject, split into the registration
// recording and the monitoring stream that follows it.
struct SubjectData {
  std::string label;
  std::vector<FeatureVector> registration;
  std::vector<FeatureVector> monitoring;
};

struct EvalConfig {
  std::size_t periods = 4;
  double period_secs = 30.0;
  double interval_min = 5.0;
  double retain = 0.9;
  bool update_enabled = true;
  FeatureConfig features;
};

// The first periods * period_secs seconds of `stream` become the registration
// windows, the remainder the monitoring windows.
SubjectData prepare_subject(std::string label, const CsiSeries& stream, const EvalConfig& config,
                            StageTimings* timings = nullptr);

struct EvalReport {
  double mii_minutes = 0.0;
  double maa = 0.0;
  double mdp = 0.0;
  InterruptionHistogram histogram;
  ConfusionMatrix confusion;
  std::vector<std::string> labels;
  std::vector<double> first_interruption_min;
  LatencySummary filter_latency;
  LatencySummary features_latency;
  LatencySummary match_latency;
};

// Registers every subject, authenticates its own monitoring stream once per
// interval (majority vote over the interval's windows, ties pass) until the
// first failure, and tests every other subject's intervals against the
// freshly registered profile. All subjects are evaluated over the shortest
// common number of intervals.
EvalReport run_evaluation(std::span<const SubjectData> subjects, const EvalConfig& config = {},
                          const StageTimings* timings = nullptr);

std::string report_to_json(const EvalReport& report);

}  // namespace bodyauth

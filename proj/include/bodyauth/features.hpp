// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "bodyauth/csi.hpp"
#include "bodyauth/pipeline.hpp"

namespace bodyauth {

enum class Statistic : int { Mean, Max, Min, MeanAbsDeviation, InterquartileRange, Rms, Skewness, Kurtosis };
inline constexpr std::size_t kStatisticCount = 8;
inline constexpr std::size_t kChannelCount = 2;  // amplitude, phase difference

std::string_view statistic_name(Statistic s);

// 8 * subcarriers * 2 statistics of one window. values[feature_index(s, k, c)]
// holds statistic s of subcarrier k on channel c (0 amplitude, 1 phase diff).
struct FeatureVector {
  std::vector<double> values;
  std::size_t window_id = 0;
};

constexpr std::size_t feature_dimension(std::size_t subcarriers) {
  return kStatisticCount * subcarriers * kChannelCount;
}
constexpr std::size_t feature_index(Statistic s, std::size_t subcarrier, std::size_t channel,
                                    std::size_t subcarriers) {
  return (static_cast<std::size_t>(s) * subcarriers + subcarrier) * kChannelCount + channel;
}

// Population moments of one track, all eight statistics in enum order.
std::array<double, kStatisticCount> track_statistics(std::span<const double> x);

// Non-overlapping windows of `window_s` seconds; a trailing partial window is
// dropped. Window w keeps amplitudes of frames [wL, (w+1)L) and the L-1 phase
// differences internal to those frames.
std::vector<ProcessedSeries> window(const ProcessedSeries& series, double window_s = 1.0);

FeatureVector extract_stats(const ProcessedSeries& window, std::size_t window_id = 0);

struct FeatureConfig {
  FilterSpec filter;
  double window_s = 1.0;
};

// Raw frames of one window each; the trailing partial window is dropped.
std::size_t frames_per_window(double rate_hz, double window_s);
std::size_t window_count(const CsiSeries& series, double window_s = 1.0);

// The full per-window pipeline: each window of raw frames is sanitized on its
// own, then summarised by extract_stats.
FeatureVector window_features(const CsiSeries& frames, const FeatureConfig& config, std::size_t window_id = 0);
std::vector<FeatureVector> series_features(const CsiSeries& series, const FeatureConfig& config = {});

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> samples);
Eigen::VectorXd to_vector(const FeatureVector& v);

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;       // k x d, orthonormal rows
  Eigen::VectorXd variances;   // per retained component
  double retain = 0.9;
  double retained_fraction = 0.0;

  std::size_t input_dimension() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t components() const { return static_cast<std::size_t>(basis.rows()); }
};

// Rows of `samples` are observations. Keeps the smallest k whose cumulative
// variance fraction reaches `retain`; each component's largest-magnitude entry
// is made positive.
PcaModel fit_pca(const Eigen::MatrixXd& samples, double retain = 0.9);

Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& v);
Eigen::MatrixXd project_rows(const PcaModel& model, const Eigen::MatrixXd& samples);
Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& reduced);

struct Normalizer {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  std::size_t dimension() const { return static_cast<std::size_t>(min.size()); }
};

Normalizer fit_normalizer(const Eigen::MatrixXd& samples);

// Affine map of [min, max] onto [-1, 1], clamped; zero-range dimensions map to 0.
Eigen::VectorXd apply_normalizer(const Normalizer& norm, const Eigen::VectorXd& v);
Eigen::MatrixXd apply_normalizer_rows(const Normalizer& norm, const Eigen::MatrixXd& samples);

}  // namespace bodyauth

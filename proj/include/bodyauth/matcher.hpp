// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bodyauth/features.hpp"

namespace bodyauth {

inline constexpr double kVarianceFloor = 1e-6;
inline constexpr std::size_t kMinPeriodSamples = 10;

// Diagonal Gaussian over one registration period's transformed samples.
struct PeriodModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // floored at kVarianceFloor
  double threshold = 0.0;
  std::size_t sample_count = 0;

  std::size_t dimension() const { return static_cast<std::size_t>(mean.size()); }
};

// Mean per-dimension Gaussian log density, i.e. the log of the m-th root of
// the product of densities.
double log_score(const PeriodModel& period, const Eigen::VectorXd& sample);
double score(const PeriodModel& period, const Eigen::VectorXd& sample);

// Rows are samples. The threshold is the ceil(quantile * n)-th largest score
// among the period's own samples.
PeriodModel fit_period(const Eigen::MatrixXd& samples, double quantile = 0.9,
                       double variance_floor = kVarianceFloor);

std::size_t threshold_rank(std::size_t n, double quantile = 0.9);

struct AuthDecision {
  bool accepted = false;
  std::vector<double> per_period_scores;
  std::size_t best_period = 0;  // largest score relative to its threshold
  double best_score = 0.0;
};

// Accepts iff some period scores at or above its own threshold.
AuthDecision decide(std::span<const PeriodModel> periods, const Eigen::VectorXd& sample);

struct RegisteredProfile {
  std::vector<PeriodModel> periods;
  PcaModel pca;
  Normalizer normalizer;
  FeatureConfig features;
  double period_secs = 30.0;
  std::int64_t created_at_us = 0;  // stream time of the last registration frame

  std::size_t t() const { return periods.size(); }
  std::size_t input_dimension() const { return pca.input_dimension(); }
  std::size_t dimension() const { return pca.components(); }
};

struct RegisterOptions {
  double retain = 0.9;
  double quantile = 0.9;
  double variance_floor = kVarianceFloor;
  double period_secs = 30.0;
  FeatureConfig features;
  std::int64_t created_at_us = 0;
};

// Fits PCA and the normalizer on the union of all periods, then one
// PeriodModel per period on the transformed samples.
RegisteredProfile register_profile(const std::vector<std::vector<FeatureVector>>& period_samples,
                                   const RegisterOptions& options = {});

// PCA projection followed by normalization.
Eigen::VectorXd transform(const RegisteredProfile& profile, const FeatureVector& raw);
Eigen::MatrixXd transform_rows(const RegisteredProfile& profile, const Eigen::MatrixXd& raw);

AuthDecision authenticate(const RegisteredProfile& profile, const FeatureVector& raw);

struct UpdateOutcome {
  RegisteredProfile profile;
  bool updated = false;
  std::string warning;
};

// Replaces the oldest period with one fitted on `latest` through the frozen
// PCA and normalizer. Fewer than kMinPeriodSamples samples leave the profile
// unchanged and set a warning.
UpdateOutcome update(const RegisteredProfile& profile, std::span<const FeatureVector> latest,
                     double quantile = 0.9, double variance_floor = kVarianceFloor);

}  // namespace bodyauth

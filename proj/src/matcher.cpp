// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "bodyauth/error.hpp"

namespace bodyauth {

double log_score(const PeriodModel& period, const Eigen::VectorXd& sample) {
  if (sample.size() != period.mean.size())
    fail(ErrorCode::DimensionMismatch, "sample dimension " + std::to_string(sample.size()) + " does not match model " +
                                           std::to_string(period.mean.size()));
  const auto m = period.mean.size();
  if (m == 0) fail(ErrorCode::DimensionMismatch, "empty period model");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double var = period.variance(j);
    const double d = sample(j) - period.mean(j);
    acc += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
  }
  return acc / static_cast<double>(m);
}

double score(const PeriodModel& period, const Eigen::VectorXd& sample) { return std::exp(log_score(period, sample)); }

std::size_t threshold_rank(std::size_t n, double quantile) {
  const auto rank = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(rank, 1, n);
}

PeriodModel fit_period(const Eigen::MatrixXd& samples, double quantile, double variance_floor) {
  const auto n = static_cast<std::size_t>(samples.rows());
  if (n < kMinPeriodSamples)
    fail(ErrorCode::InsufficientData, "a period needs at least " + std::to_string(kMinPeriodSamples) +
                                          " samples, got " + std::to_string(n));
  if (!(variance_floor > 0.0)) fail(ErrorCode::InvalidArgument, "variance floor must be positive");
  PeriodModel model;
  model.sample_count = n;
  model.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - model.mean.transpose();
  model.variance = (centered.array().square().colwise().sum() / static_cast<double>(n)).transpose();
  model.variance = model.variance.cwiseMax(variance_floor);

  std::vector<double> self(n);
  for (std::size_t i = 0; i < n; ++i) self[i] = score(model, samples.row(static_cast<Eigen::Index>(i)).transpose());
  std::sort(self.begin(), self.end(), std::greater<>());
  model.threshold = self[threshold_rank(n, quantile) - 1];
  return model;
}

AuthDecision decide(std::span<const PeriodModel> periods, const Eigen::VectorXd& sample) {
  if (periods.empty()) fail(ErrorCode::InvalidArgument, "profile has no periods");
  AuthDecision d;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < periods.size(); ++p) {
    const double s = score(periods[p], sample);
    d.per_period_scores.push_back(s);
    if (s >= periods[p].threshold) d.accepted = true;
    const double margin = std::log(s) - std::log(periods[p].threshold);
    if (p == 0 || margin > best_margin) {
      best_margin = margin;
      d.best_period = p;
      d.best_score = s;
    }
  }
  return d;
}

RegisteredProfile register_profile(const std::vector<std::vector<FeatureVector>>& period_samples,
                                   const RegisterOptions& options) {
  if (period_samples.empty()) fail(ErrorCode::InvalidArgument, "registration needs at least one period");
  std::vector<FeatureVector> all;
  std::vector<std::size_t> sizes;
  for (std::size_t p = 0; p < period_samples.size(); ++p) {
    if (period_samples[p].size() < kMinPeriodSamples)
      fail(ErrorCode::InsufficientData, "period " + std::to_string(p + 1) + " has " +
                                            std::to_string(period_samples[p].size()) + " samples; at least " +
                                            std::to_string(kMinPeriodSamples) + " are required");
    all.insert(all.end(), period_samples[p].begin(), period_samples[p].end());
    sizes.push_back(period_samples[p].size());
  }
  RegisteredProfile profile;
  profile.features = options.features;
  profile.period_secs = options.period_secs;
  profile.created_at_us = options.created_at_us;

  const Eigen::MatrixXd raw = to_matrix(all);
  profile.pca = fit_pca(raw, options.retain);
  const Eigen::MatrixXd reduced = project_rows(profile.pca, raw);
  profile.normalizer = fit_normalizer(reduced);
  const Eigen::MatrixXd normalized = apply_normalizer_rows(profile.normalizer, reduced);

  Eigen::Index row = 0;
  for (auto n : sizes) {
    const auto count = static_cast<Eigen::Index>(n);
    profile.periods.push_back(fit_period(normalized.middleRows(row, count), options.quantile, options.variance_floor));
    row += count;
  }
  return profile;
}

Eigen::VectorXd transform(const RegisteredProfile& profile, const FeatureVector& raw) {
  return apply_normalizer(profile.normalizer, project(profile.pca, to_vector(raw)));
}

Eigen::MatrixXd transform_rows(const RegisteredProfile& profile, const Eigen::MatrixXd& raw) {
  return apply_normalizer_rows(profile.normalizer, project_rows(profile.pca, raw));
}

AuthDecision authenticate(const RegisteredProfile& profile, const FeatureVector& raw) {
  return decide(profile.periods, transform(profile, raw));
}

UpdateOutcome update(const RegisteredProfile& profile, std::span<const FeatureVector> latest, double quantile,
                     double variance_floor) {
  UpdateOutcome out{profile, false, {}};
  if (latest.size() < kMinPeriodSamples) {
    out.warning = "update skipped: " + std::to_string(latest.size()) + " samples, need " +
                  std::to_string(kMinPeriodSamples);
    return out;
  }
  const Eigen::MatrixXd transformed = transform_rows(profile, to_matrix(latest));
  auto period = fit_period(transformed, quantile, variance_floor);
  out.profile.periods.erase(out.profile.periods.begin());
  out.profile.periods.push_back(std::move(period));
  out.updated = true;
  return out;
}

}  // namespace bodyauth

// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/features.hpp"

#include <algorithm>
#include <cmath>

#include "bodyauth/error.hpp"

namespace bodyauth {
namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_dimension(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " + std::to_string(want) + ", got " +
                                           std::to_string(got));
}

}  // namespace

std::string_view statistic_name(Statistic s) {
  switch (s) {
    case Statistic::Mean: return "mean";
    case Statistic::Max: return "max";
    case Statistic::Min: return "min";
    case Statistic::MeanAbsDeviation: return "mad";
    case Statistic::InterquartileRange: return "iqr";
    case Statistic::Rms: return "rms";
    case Statistic::Skewness: return "skewness";
    case Statistic::Kurtosis: return "kurtosis";
  }
  return "?";
}

std::array<double, kStatisticCount> track_statistics(std::span<const double> x) {
  if (x.empty()) fail(ErrorCode::InsufficientData, "statistics of an empty window");
  const auto n = static_cast<double>(x.size());
  double sum = 0.0, sum_sq = 0.0, peak = 0.0;
  double hi = x[0], lo = x[0];
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
    hi = std::max(hi, v);
    lo = std::min(lo, v);
    peak = std::max(peak, std::abs(v));
  }
  const double mean = sum / n;
  double mad = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    mad += std::abs(d);
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  mad /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

  // Variance at rounding level is treated as a constant window.
  const double tiny = 1e-10 * peak;
  const bool flat = m2 <= tiny * tiny;
  const double skew = flat ? 0.0 : m3 / std::pow(m2, 1.5);
  const double kurt = flat ? 0.0 : m4 / (m2 * m2);
  return {mean, hi, lo, mad, iqr, std::sqrt(sum_sq / n), skew, kurt};
}

std::size_t frames_per_window(double rate_hz, double window_s) {
  const auto frames = static_cast<std::size_t>(std::llround(rate_hz * window_s));
  if (frames < 8) fail(ErrorCode::InvalidArgument, "a window must hold at least 8 samples");
  return frames;
}

std::size_t window_count(const CsiSeries& series, double window_s) {
  return series.size() / frames_per_window(series.rate_hz(), window_s);
}

std::vector<ProcessedSeries> window(const ProcessedSeries& series, double window_s) {
  if (series.frames() == 0 || series.subcarriers() == 0)
    fail(ErrorCode::InsufficientData, "cannot window an empty series");
  const auto length = frames_per_window(series.rate_hz, window_s);
  const auto count = series.frames() / length;
  std::vector<ProcessedSeries> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    ProcessedSeries win;
    win.rate_hz = series.rate_hz;
    const auto first = static_cast<std::ptrdiff_t>(w * length);
    const auto len = static_cast<std::ptrdiff_t>(length);
    for (std::size_t k = 0; k < series.subcarriers(); ++k) {
      const auto& a = series.filtered_amplitudes[k];
      const auto& p = series.filtered_phase_diffs[k];
      win.filtered_amplitudes.emplace_back(a.begin() + first, a.begin() + first + len);
      win.filtered_phase_diffs.emplace_back(p.begin() + first, p.begin() + first + len - 1);
    }
    out.push_back(std::move(win));
  }
  return out;
}

FeatureVector extract_stats(const ProcessedSeries& win, std::size_t window_id) {
  const auto subcarriers = win.subcarriers();
  if (subcarriers == 0 || win.filtered_phase_diffs.size() != subcarriers)
    fail(ErrorCode::InvalidArgument, "window has no subcarriers or mismatched channels");
  FeatureVector out;
  out.window_id = window_id;
  out.values.assign(feature_dimension(subcarriers), 0.0);
  for (std::size_t k = 0; k < subcarriers; ++k) {
    const std::array<const std::vector<double>*, kChannelCount> tracks = {&win.filtered_amplitudes[k],
                                                                           &win.filtered_phase_diffs[k]};
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const auto stats = track_statistics(*tracks[c]);
      for (std::size_t s = 0; s < kStatisticCount; ++s)
        out.values[feature_index(static_cast<Statistic>(s), k, c, subcarriers)] = stats[s];
    }
  }
  for (double v : out.values)
    if (!std::isfinite(v)) fail(ErrorCode::Domain, "non-finite feature in window " + std::to_string(window_id));
  return out;
}

FeatureVector window_features(const CsiSeries& frames, const FeatureConfig& config, std::size_t window_id) {
  return extract_stats(sanitize(frames, config.filter), window_id);
}

std::vector<FeatureVector> series_features(const CsiSeries& series, const FeatureConfig& config) {
  if (series.empty()) fail(ErrorCode::InsufficientData, "cannot extract features from an empty series");
  const auto length = frames_per_window(series.rate_hz(), config.window_s);
  const auto count = series.size() / length;
  std::vector<FeatureVector> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) out.push_back(window_features(series.slice(w * length, length), config, w));
  return out;
}

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> samples) {
  if (samples.empty()) return {};
  const auto d = samples.front().values.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].values.size() != d) fail(ErrorCode::DimensionMismatch, "feature vectors differ in dimension");
    m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(samples[i].values.data(),
                                                                                static_cast<Eigen::Index>(d));
  }
  return m;
}

Eigen::VectorXd to_vector(const FeatureVector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.values.data(), static_cast<Eigen::Index>(v.values.size()));
}

PcaModel fit_pca(const Eigen::MatrixXd& samples, double retain) {
  if (samples.rows() < 2) fail(ErrorCode::InsufficientData, "PCA needs at least 2 samples");
  if (!(retain > 0.0 && retain <= 1.0)) fail(ErrorCode::InvalidArgument, "retain fraction must lie in (0, 1]");
  PcaModel model;
  model.retain = retain;
  model.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd variances = svd.singularValues().array().square() / static_cast<double>(samples.rows() - 1);
  const double total = variances.sum();
  if (!(total > 0.0)) fail(ErrorCode::Domain, "all samples are identical; no component to retain");

  Eigen::Index k = 0;
  double cumulative = 0.0;
  while (k < variances.size()) {
    cumulative += variances(k++);
    if (cumulative >= retain * total - 1e-12 * total) break;
  }
  model.retained_fraction = cumulative / total;
  model.variances = variances.head(k);
  model.basis = svd.matrixV().leftCols(k).transpose();
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::Index arg = 0;
    model.basis.row(r).cwiseAbs().maxCoeff(&arg);
    if (model.basis(r, arg) < 0.0) model.basis.row(r) *= -1.0;
  }
  return model;
}

Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& v) {
  check_dimension(v.size(), model.mean.size(), "PCA projection");
  // Plain dot products so batch and single-sample projections round identically.
  const Eigen::VectorXd centered = v - model.mean;
  Eigen::VectorXd out(model.basis.rows());
  for (Eigen::Index r = 0; r < model.basis.rows(); ++r) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < centered.size(); ++c) acc += model.basis(r, c) * centered(c);
    out(r) = acc;
  }
  return out;
}

Eigen::MatrixXd project_rows(const PcaModel& model, const Eigen::MatrixXd& samples) {
  check_dimension(samples.cols(), model.mean.size(), "PCA projection");
  Eigen::MatrixXd out(samples.rows(), model.basis.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) out.row(i) = project(model, samples.row(i).transpose()).transpose();
  return out;
}

Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& reduced) {
  check_dimension(reduced.size(), model.basis.rows(), "PCA reconstruction");
  return model.mean + model.basis.transpose() * reduced;
}

Normalizer fit_normalizer(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 1) fail(ErrorCode::InsufficientData, "normalizer needs at least 1 sample");
  return {samples.colwise().minCoeff().transpose(), samples.colwise().maxCoeff().transpose()};
}

Eigen::VectorXd apply_normalizer(const Normalizer& norm, const Eigen::VectorXd& v) {
  check_dimension(v.size(), norm.min.size(), "normalizer");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double range = norm.max(j) - norm.min(j);
    out(j) = range > 0.0 ? std::clamp(2.0 * (v(j) - norm.min(j)) / range - 1.0, -1.0, 1.0) : 0.0;
  }
  return out;
}

Eigen::MatrixXd apply_normalizer_rows(const Normalizer& norm, const Eigen::MatrixXd& samples) {
  Eigen::MatrixXd out(samples.rows(), samples.cols());
  for (Eigen::Index i = 0; i < samples.rows(); ++i)
    out.row(i) = apply_normalizer(norm, samples.row(i).transpose()).transpose();
  return out;
}

}  // namespace bodyauth

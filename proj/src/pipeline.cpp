// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bodyauth/error.hpp"

namespace bodyauth {
namespace {

using cd = std::complex<double>;

void run_sections(std::span<const Biquad> sections, std::vector<double>& x) {
  if (x.empty()) return;
  const double x0 = x.front();
  for (const auto& s : sections) {
    // Steady state for a constant input x0; each section has unit DC gain.
    double z1 = (1.0 - s.b0) * x0;
    double z2 = (s.b2 - s.a2) * x0;
    for (double& v : x) {
      const double in = v;
      const double y = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * y + z2;
      z2 = s.b2 * in - s.a2 * y;
      v = y;
    }
  }
}

}  // namespace

void FilterSpec::validate() const {
  if (order < 1) fail(ErrorCode::InvalidArgument, "filter order must be >= 1");
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) fail(ErrorCode::InvalidArgument, "filter rate must be positive");
  if (!(cutoff_hz > 0.0)) fail(ErrorCode::InvalidArgument, "cutoff must be positive");
  if (!(cutoff_hz < rate_hz / 2.0))
    fail(ErrorCode::InvalidArgument, "cutoff " + std::to_string(cutoff_hz) + " Hz is not below Nyquist (" +
                                         std::to_string(rate_hz / 2.0) + " Hz)");
}

ButterworthLowpass::ButterworthLowpass(const FilterSpec& spec) : spec_(spec) {
  spec.validate();
  const int n = spec.order;
  const double fs2 = 2.0 * spec.rate_hz;
  const double warped = fs2 * std::tan(std::numbers::pi * spec.cutoff_hz / spec.rate_hz);
  // Upper-half-plane analog poles; conjugates are implied by each biquad.
  for (int k = 0; k < n / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n);
    const cd s = warped * std::polar(1.0, theta);
    const cd z = (fs2 + s) / (fs2 - s);
    Biquad q;
    q.a1 = -2.0 * z.real();
    q.a2 = std::norm(z);
    const double g = (1.0 + q.a1 + q.a2) / 4.0;
    q.b0 = g;
    q.b1 = 2.0 * g;
    q.b2 = g;
    sections_.push_back(q);
  }
  if (n % 2 == 1) {
    const double z = (fs2 - warped) / (fs2 + warped);
    Biquad q;
    q.a1 = -z;
    const double g = (1.0 + q.a1) / 2.0;
    q.b0 = g;
    q.b1 = g;
    sections_.push_back(q);
  }
}

std::vector<std::complex<double>> ButterworthLowpass::poles() const {
  std::vector<cd> out;
  for (const auto& s : sections_) {
    if (s.a2 == 0.0) {
      out.emplace_back(-s.a1, 0.0);
      continue;
    }
    const cd disc = std::sqrt(cd(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    out.push_back((-s.a1 + disc) / 2.0);
    out.push_back((-s.a1 - disc) / 2.0);
  }
  return out;
}

std::complex<double> ButterworthLowpass::response(double freq_hz) const {
  const cd zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / spec_.rate_hz);
  cd h = 1.0;
  for (const auto& s : sections_)
    h *= (s.b0 + zinv * (s.b1 + zinv * s.b2)) / (1.0 + zinv * (s.a1 + zinv * s.a2));
  return h;
}

std::vector<double> ButterworthLowpass::filter(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  run_sections(sections_, y);
  return y;
}

std::vector<double> ButterworthLowpass::filtfilt(std::span<const double> x) const {
  const auto pad = static_cast<std::size_t>(3 * spec_.order);
  if (x.size() <= pad)
    fail(ErrorCode::InsufficientData, "series of " + std::to_string(x.size()) + " samples is too short; need more than " +
                                          std::to_string(pad));
  const auto n = x.size();
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  run_sections(sections_, ext);
  std::reverse(ext.begin(), ext.end());
  run_sections(sections_, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

ButterworthLowpass design_butterworth(const FilterSpec& spec) { return ButterworthLowpass(spec); }

std::vector<double> filter_series(std::span<const double> series, const ButterworthLowpass& filter) {
  return filter.filtfilt(series);
}

std::vector<double> filter_series(std::span<const double> series, const FilterSpec& spec) {
  return filter_series(series, ButterworthLowpass(spec));
}

double wrap_to_pi(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(radians, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

std::vector<double> phase_difference(std::span<const double> phases) {
  if (phases.size() < 2) fail(ErrorCode::InsufficientData, "phase differencing needs at least 2 samples");
  std::vector<double> out(phases.size() - 1);
  for (std::size_t t = 0; t + 1 < phases.size(); ++t) out[t] = wrap_to_pi(phases[t + 1] - phases[t]);
  return out;
}

ProcessedSeries sanitize(const CsiSeries& series, const FilterSpec& spec) {
  if (series.empty()) fail(ErrorCode::InsufficientData, "cannot sanitize an empty series");
  FilterSpec at_rate = spec;
  at_rate.rate_hz = series.rate_hz();
  const ButterworthLowpass filter(at_rate);
  ProcessedSeries out;
  out.rate_hz = series.rate_hz();
  out.filtered_amplitudes.reserve(series.subcarriers());
  out.filtered_phase_diffs.reserve(series.subcarriers());
  for (std::size_t k = 0; k < series.subcarriers(); ++k) {
    out.filtered_amplitudes.push_back(filter.filtfilt(series.amplitude_track(k)));
    out.filtered_phase_diffs.push_back(filter.filtfilt(phase_difference(series.phase_track(k))));
  }
  return out;
}

}  // namespace bodyauth

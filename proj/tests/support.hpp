// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and independent reference implementations for the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bodyauth/body_model.hpp"
#include "bodyauth/csi.hpp"

namespace testsupport {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLightSpeed = 299792458.0;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("bodyauth_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Brute-force statistics written independently of the library: sorting for
// quantiles, two-pass central moments.
struct ReferenceStats {
  double mean, max, min, mad, iqr, rms, skew, kurt;
};

inline double reference_quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline ReferenceStats reference_stats(const std::vector<double>& x) {
  ReferenceStats r{};
  const double n = static_cast<double>(x.size());
  double sum = 0.0, sq = 0.0;
  r.max = -INFINITY;
  r.min = INFINITY;
  for (double v : x) {
    sum += v;
    sq += v * v;
    r.max = std::max(r.max, v);
    r.min = std::min(r.min, v);
  }
  r.mean = sum / n;
  r.rms = std::sqrt(sq / n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, abs_dev = 0.0;
  for (double v : x) {
    const double d = v - r.mean;
    abs_dev += std::abs(d);
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  r.mad = abs_dev / n;
  r.iqr = reference_quantile(x, 0.75) - reference_quantile(x, 0.25);
  r.skew = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
  r.kurt = m2 > 0 ? m4 / (m2 * m2) : 0.0;
  return r;
}

// A scene with one person between transmitter and receiver.
inline bodyauth::Scene person_scene(std::uint64_t subject_seed, std::uint64_t noise_seed) {
  return bodyauth::default_scene(bodyauth::synthetic_subject(subject_seed, "s" + std::to_string(subject_seed)),
                                 noise_seed);
}

inline bodyauth::CsiSeries person_capture(std::uint64_t subject_seed, std::uint64_t noise_seed, double seconds) {
  return bodyauth::synthesize_csi(person_scene(subject_seed, noise_seed), seconds);
}

// Concatenates b after a, shifting b's timestamps to continue a's clock.
inline bodyauth::CsiSeries concatenate(const bodyauth::CsiSeries& a, const bodyauth::CsiSeries& b) {
  bodyauth::CsiSeries out(a.subcarriers(), a.rate_hz());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a.frame(i));
  const std::int64_t step = static_cast<std::int64_t>(std::llround(1e6 / a.rate_hz()));
  const std::int64_t shift = a.size() == 0 ? 0 : a.frame(a.size() - 1).timestamp_us + step;
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto f = b.frame(i);
    f.timestamp_us += shift;
    out.push_back(f);
  }
  return out;
}

}  // namespace testsupport

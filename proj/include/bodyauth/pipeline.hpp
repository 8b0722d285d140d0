// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bodyauth/csi.hpp"

namespace bodyauth {

struct FilterSpec {
  int order = 5;
  double cutoff_hz = 1.0;
  double rate_hz = 50.0;

  void validate() const;
};

// Second-order section in transposed direct form II, a0 = 1. First-order
// sections have b2 = a2 = 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Digital low-pass Butterworth as a cascade of sections, each normalised to
// unit gain at DC.
class ButterworthLowpass {
 public:
  explicit ButterworthLowpass(const FilterSpec& spec);

  const FilterSpec& spec() const noexcept { return spec_; }
  std::span<const Biquad> sections() const noexcept { return sections_; }
  std::vector<std::complex<double>> poles() const;

  std::complex<double> response(double freq_hz) const;
  double gain(double freq_hz) const { return std::abs(response(freq_hz)); }

  // Causal filtering with internal state starting at the steady state for
  // x[0] (so a constant input passes through unchanged).
  std::vector<double> filter(std::span<const double> x) const;

  // Zero-phase forward-backward filtering with odd reflection of 3*order
  // samples at both ends. Requires x.size() > 3*order.
  std::vector<double> filtfilt(std::span<const double> x) const;

 private:
  FilterSpec spec_;
  std::vector<Biquad> sections_;
};

ButterworthLowpass design_butterworth(const FilterSpec& spec);

std::vector<double> filter_series(std::span<const double> series, const FilterSpec& spec);
std::vector<double> filter_series(std::span<const double> series, const ButterworthLowpass& filter);

// Wraps to (-pi, pi].
double wrap_to_pi(double radians);

// out[t] = wrap(phases[t+1] - phases[t]); size N-1.
std::vector<double> phase_difference(std::span<const double> phases);

struct ProcessedSeries {
  double rate_hz = 50.0;
  std::vector<std::vector<double>> filtered_amplitudes;   // [subcarrier][frame]
  std::vector<std::vector<double>> filtered_phase_diffs;  // [subcarrier][frame - 1]

  std::size_t subcarriers() const { return filtered_amplitudes.size(); }
  std::size_t frames() const { return filtered_amplitudes.empty() ? 0 : filtered_amplitudes.front().size(); }
};

// Low-pass filtered amplitudes and low-pass filtered phase differences per
// subcarrier. The filter is designed at the series' own packet rate with the
// order and cutoff of `spec`.
ProcessedSeries sanitize(const CsiSeries& series, const FilterSpec& spec = {});

}  // namespace bodyauth

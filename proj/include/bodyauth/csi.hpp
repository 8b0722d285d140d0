// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bodyauth {

inline constexpr std::size_t kDefaultSubcarriers = 30;

struct CsiFrame {
  std::int64_t timestamp_us = 0;
  std::vector<double> amplitudes;
  std::vector<double> phases;  // radians
};

// A run of CSI frames at a nominal packet rate. Storage is frame-major and
// contiguous; a series of N frames over S subcarriers holds N*S amplitudes.
class CsiSeries {
 public:
  CsiSeries() = default;
  CsiSeries(std::size_t subcarriers, double rate_hz);

  std::size_t subcarriers() const noexcept { return subcarriers_; }
  double rate_hz() const noexcept { return rate_hz_; }
  std::size_t size() const noexcept { return timestamps_.size(); }
  bool empty() const noexcept { return timestamps_.empty(); }
  double duration_s() const noexcept { return static_cast<double>(size()) / rate_hz_; }

  // Enforces matching array lengths, non-negative amplitudes and strictly
  // increasing timestamps.
  void push_back(std::int64_t timestamp_us, std::span<const double> amplitudes,
                 std::span<const double> phases);
  void push_back(const CsiFrame& frame) { push_back(frame.timestamp_us, frame.amplitudes, frame.phases); }

  std::int64_t timestamp_us(std::size_t frame) const { return timestamps_[frame]; }
  std::span<const double> amplitudes(std::size_t frame) const {
    return {amplitudes_.data() + frame * subcarriers_, subcarriers_};
  }
  std::span<const double> phases(std::size_t frame) const {
    return {phases_.data() + frame * subcarriers_, subcarriers_};
  }
  CsiFrame frame(std::size_t i) const;

  // Frames [first, first + count) as a new series with the same rate.
  CsiSeries slice(std::size_t first, std::size_t count) const;

  // Time series of one subcarrier across all frames.
  std::vector<double> amplitude_track(std::size_t subcarrier) const;
  std::vector<double> phase_track(std::size_t subcarrier) const;

  friend bool operator==(const CsiSeries&, const CsiSeries&) = default;

 private:
  std::size_t subcarriers_ = kDefaultSubcarriers;
  double rate_hz_ = 50.0;
  std::vector<std::int64_t> timestamps_;
  std::vector<double> amplitudes_;
  std::vector<double> phases_;
};

// CSV exchange format:
//   header  ts_us,a1,...,aS,p1,...,pS
//   rows    one frame each, LF-terminated
std::string csv_header(std::size_t subcarriers);

// Subcarrier count implied by a header line; throws ErrorCode::Parse if the
// header does not follow the layout above.
std::size_t parse_csv_header(std::string_view line);

// Parses one data row. `row` is the 1-based line number used in diagnostics.
CsiFrame parse_csv_row(std::string_view line, std::size_t subcarriers, std::size_t row);

void write_csv_row(std::ostream& out, std::int64_t timestamp_us, std::span<const double> amplitudes,
                   std::span<const double> phases);

void write_csv(std::ostream& out, const CsiSeries& series);
void save_csv(const std::string& path, const CsiSeries& series);

// Reads a whole CSV stream. The nominal rate is taken from the median
// timestamp step unless `rate_hz` is given (> 0).
CsiSeries read_csv(std::istream& in, double rate_hz = 0.0);
CsiSeries load_csv(const std::string& path, double rate_hz = 0.0);

}  // namespace bodyauth

// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/csi.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "bodyauth/error.hpp"

namespace bodyauth {

CsiSeries::CsiSeries(std::size_t subcarriers, double rate_hz) : subcarriers_(subcarriers), rate_hz_(rate_hz) {
  if (subcarriers == 0) fail(ErrorCode::InvalidArgument, "series needs at least one subcarrier");
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) fail(ErrorCode::InvalidArgument, "packet rate must be positive");
}

void CsiSeries::push_back(std::int64_t timestamp_us, std::span<const double> amplitudes,
                          std::span<const double> phases) {
  if (amplitudes.size() != subcarriers_ || phases.size() != subcarriers_)
    fail(ErrorCode::DimensionMismatch, "frame has " + std::to_string(amplitudes.size()) + " amplitudes and " +
                                           std::to_string(phases.size()) + " phases, series expects " +
                                           std::to_string(subcarriers_));
  if (!timestamps_.empty() && timestamp_us <= timestamps_.back())
    fail(ErrorCode::InvalidArgument, "timestamps must strictly increase");
  for (double a : amplitudes)
    if (!(a >= 0.0) || !std::isfinite(a)) fail(ErrorCode::InvalidArgument, "amplitudes must be finite and non-negative");
  for (double p : phases)
    if (!std::isfinite(p)) fail(ErrorCode::InvalidArgument, "phases must be finite");
  timestamps_.push_back(timestamp_us);
  amplitudes_.insert(amplitudes_.end(), amplitudes.begin(), amplitudes.end());
  phases_.insert(phases_.end(), phases.begin(), phases.end());
}

CsiFrame CsiSeries::frame(std::size_t i) const {
  const auto a = amplitudes(i);
  const auto p = phases(i);
  return {timestamps_[i], {a.begin(), a.end()}, {p.begin(), p.end()}};
}

CsiSeries CsiSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) fail(ErrorCode::InvalidArgument, "slice exceeds series length");
  CsiSeries out(subcarriers_, rate_hz_);
  out.timestamps_.assign(timestamps_.begin() + first, timestamps_.begin() + first + count);
  const auto lo = first * subcarriers_;
  const auto hi = (first + count) * subcarriers_;
  out.amplitudes_.assign(amplitudes_.begin() + lo, amplitudes_.begin() + hi);
  out.phases_.assign(phases_.begin() + lo, phases_.begin() + hi);
  return out;
}

std::vector<double> CsiSeries::amplitude_track(std::size_t subcarrier) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = amplitudes_[i * subcarriers_ + subcarrier];
  return out;
}

std::vector<double> CsiSeries::phase_track(std::size_t subcarrier) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = phases_[i * subcarriers_ + subcarrier];
  return out;
}

std::string csv_header(std::size_t subcarriers) {
  std::string h = "ts_us";
  for (std::size_t k = 1; k <= subcarriers; ++k) h += ",a" + std::to_string(k);
  for (std::size_t k = 1; k <= subcarriers; ++k) h += ",p" + std::to_string(k);
  return h;
}

std::size_t parse_csv_header(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 3 || columns % 2 == 0) fail(ErrorCode::Parse, "line 1: malformed CSI header");
  const auto subcarriers = (columns - 1) / 2;
  if (line != csv_header(subcarriers))
    fail(ErrorCode::Parse, "line 1: expected header '" + csv_header(subcarriers) + "'");
  return subcarriers;
}

CsiFrame parse_csv_row(std::string_view line, std::size_t subcarriers, std::size_t row) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto where = [row] { return "line " + std::to_string(row) + ": "; };
  const auto expected = 1 + 2 * subcarriers;
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns != expected)
    fail(ErrorCode::Parse, where() + "expected " + std::to_string(expected) + " columns, found " +
                               std::to_string(columns));
  CsiFrame f;
  f.amplitudes.resize(subcarriers);
  f.phases.resize(subcarriers);
  const char* p = line.data();
  const char* end = line.data() + line.size();
  auto next_field = [&](std::size_t column) {
    const char* stop = std::find(p, end, ',');
    std::string_view field(p, static_cast<std::size_t>(stop - p));
    p = stop == end ? end : stop + 1;
    if (field.empty()) fail(ErrorCode::Parse, where() + "empty field in column " + std::to_string(column + 1));
    return field;
  };
  {
    const auto field = next_field(0);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), f.timestamp_us);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      fail(ErrorCode::Parse, where() + "bad timestamp '" + std::string(field) + "'");
  }
  for (std::size_t c = 1; c < expected; ++c) {
    const auto field = next_field(c);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
      fail(ErrorCode::Parse, where() + "bad number '" + std::string(field) + "' in column " + std::to_string(c + 1));
    if (c <= subcarriers) {
      if (v < 0.0) fail(ErrorCode::Parse, where() + "negative amplitude in column " + std::to_string(c + 1));
      f.amplitudes[c - 1] = v;
    } else {
      f.phases[c - 1 - subcarriers] = v;
    }
  }
  return f;
}

void write_csv_row(std::ostream& out, std::int64_t timestamp_us, std::span<const double> amplitudes,
                   std::span<const double> phases) {
  char buf[32];
  out << timestamp_us;
  for (double a : amplitudes) {
    std::snprintf(buf, sizeof buf, ",%.10g", a);
    out << buf;
  }
  for (double p : phases) {
    std::snprintf(buf, sizeof buf, ",%.10g", p);
    out << buf;
  }
  out << '\n';
}

void write_csv(std::ostream& out, const CsiSeries& series) {
  out << csv_header(series.subcarriers()) << '\n';
  for (std::size_t i = 0; i < series.size(); ++i)
    write_csv_row(out, series.timestamp_us(i), series.amplitudes(i), series.phases(i));
}

void save_csv(const std::string& path, const CsiSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  write_csv(out, series);
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

CsiSeries read_csv(std::istream& in, double rate_hz) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Parse, "empty CSI input");
  const auto subcarriers = parse_csv_header(line);
  std::vector<CsiFrame> frames;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    frames.push_back(parse_csv_row(line, subcarriers, row));
  }
  if (frames.empty()) fail(ErrorCode::Parse, "CSI input has no data rows");
  if (rate_hz <= 0.0) {
    if (frames.size() < 2) fail(ErrorCode::Parse, "cannot infer packet rate from a single frame");
    std::vector<std::int64_t> steps;
    steps.reserve(frames.size() - 1);
    for (std::size_t i = 1; i < frames.size(); ++i) steps.push_back(frames[i].timestamp_us - frames[i - 1].timestamp_us);
    std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
    const auto step = steps[steps.size() / 2];
    if (step <= 0) fail(ErrorCode::Parse, "timestamps must strictly increase");
    rate_hz = 1e6 / static_cast<double>(step);
  }
  CsiSeries series(subcarriers, rate_hz);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    try {
      series.push_back(frames[i]);
    } catch (const Error& e) {
      fail(ErrorCode::Parse, "frame " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return series;
}

CsiSeries load_csv(const std::string& path, double rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  return read_csv(in, rate_hz);
}

}  // namespace bodyauth

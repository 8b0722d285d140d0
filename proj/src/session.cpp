// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/session.hpp"

#include <cmath>

#include "bodyauth/error.hpp"
#include "bodyauth/keyvalue.hpp"

namespace bodyauth {
namespace {

std::int64_t to_us(double seconds) { return static_cast<std::int64_t>(std::llround(seconds * 1e6)); }

std::size_t frames_for(double seconds, double rate_hz) {
  return static_cast<std::size_t>(std::llround(seconds * rate_hz));
}

bool frame_is_valid(const CsiFrame& f, std::size_t subcarriers) {
  if (subcarriers == 0 || f.amplitudes.size() != subcarriers || f.phases.size() != subcarriers) return false;
  for (double a : f.amplitudes)
    if (!(a >= 0.0) || !std::isfinite(a)) return false;
  for (double p : f.phases)
    if (!std::isfinite(p)) return false;
  return true;
}

}  // namespace

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Locked: return "Locked";
    case Phase::Registering: return "Registering";
    case Phase::Monitoring: return "Monitoring";
  }
  return "?";
}

std::string_view event_name(EventKind k) {
  switch (k) {
    case EventKind::Registered: return "REGISTERED";
    case EventKind::AuthOk: return "AUTH_OK";
    case EventKind::LockedOut: return "LOCKED_OUT";
    case EventKind::Warn: return "WARN";
  }
  return "?";
}

std::string format_event(const SessionEvent& e) {
  auto line = std::to_string(e.ts_us) + " " + std::string(event_name(e.kind));
  if (!e.detail.empty()) line += " " + e.detail;
  return line;
}

void SessionConfig::validate() const {
  if (periods < 1) fail(ErrorCode::InvalidArgument, "session needs at least one period");
  if (!(rate_hz > 0.0)) fail(ErrorCode::InvalidArgument, "rate must be positive");
  FilterSpec spec = features.filter;
  spec.rate_hz = rate_hz;
  spec.validate();
  const auto window = frames_per_window(rate_hz, features.window_s);
  if (window <= static_cast<std::size_t>(3 * spec.order + 1))
    fail(ErrorCode::InvalidArgument, "window is too short for the filter order");
  if (frames_for(period_secs, rate_hz) / window < kMinPeriodSamples)
    fail(ErrorCode::InvalidArgument, "a period must span at least 10 windows");
  if (!(auth_interval_s >= 2.0 * features.window_s))
    fail(ErrorCode::InvalidArgument, "auth interval must be at least two windows long");
  if (!(retain > 0.0 && retain <= 1.0)) fail(ErrorCode::InvalidArgument, "retain must lie in (0, 1]");
  if (!(max_gap_s > 0.0)) fail(ErrorCode::InvalidArgument, "max_gap_s must be positive");
}

SessionConfig parse_session_config(std::string_view text) {
  SessionConfig c;
  for (const auto& kv : parse_key_values(text)) {
    if (kv.section != "session")
      fail(ErrorCode::Parse, "line " + std::to_string(kv.line) + ": unknown section [" + kv.section + "]");
    const auto& k = kv.key;
    if (k == "periods") {
      const auto v = to_integer(kv);
      if (v < 1) fail(ErrorCode::Parse, "line " + std::to_string(kv.line) + ": periods must be >= 1");
      c.periods = static_cast<std::size_t>(v);
    } else if (k == "period_secs") c.period_secs = to_double(kv);
    else if (k == "auth_interval_s") c.auth_interval_s = to_double(kv);
    else if (k == "rate_hz") c.rate_hz = to_double(kv);
    else if (k == "window_s") c.features.window_s = to_double(kv);
    else if (k == "filter_order") c.features.filter.order = static_cast<int>(to_integer(kv));
    else if (k == "cutoff_hz") c.features.filter.cutoff_hz = to_double(kv);
    else if (k == "retain") c.retain = to_double(kv);
    else if (k == "max_gap_s") c.max_gap_s = to_double(kv);
    else if (k == "update_enabled") c.update_enabled = to_bool(kv);
    else unknown_key(kv);
  }
  c.features.filter.rate_hz = c.rate_hz;
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Parse, std::string("invalid session config: ") + e.what());
  }
  return c;
}

SessionConfig load_session_config(const std::string& path) { return parse_session_config(read_text_file(path)); }

Session::Session(SessionConfig config)
    : config_([&] {
        config.features.filter.rate_hz = config.rate_hz;
        config.validate();
        return config;
      }()),
      registration_frames_(config_.periods * frames_for(config_.period_secs, config_.rate_hz)),
      interval_frames_(frames_for(config_.auth_interval_s, config_.rate_hz)) {}

void Session::emit(std::int64_t ts, EventKind kind, std::string detail) {
  events_.push_back({ts, kind, std::move(detail)});
}

void Session::restart_registration() {
  buffer_.clear();
  last_ts_.reset();
}

void Session::on_primary_login(std::int64_t ts_us) {
  std::lock_guard lock(mutex_);
  switch (phase_) {
    case Phase::Monitoring:
      emit(ts_us, EventKind::Warn, "login ignored while monitoring");
      return;
    case Phase::Registering:
      emit(ts_us, EventKind::Warn, "login during registration; restarting registration");
      [[fallthrough]];
    case Phase::Locked:
      phase_ = Phase::Registering;
      profile_.reset();
      subcarriers_.reset();
      deferred_ = false;
      restart_registration();
      return;
  }
}

CsiSeries Session::buffered_series() const {
  CsiSeries series(buffer_.front().amplitudes.size(), config_.rate_hz);
  for (const auto& f : buffer_) series.push_back(f);
  return series;
}

void Session::finish_registration(std::int64_t ts_us) {
  const auto series = buffered_series();
  const auto windows = series_features(series, config_.features);
  const auto per_period = windows.size() / config_.periods;
  std::vector<std::vector<FeatureVector>> periods(config_.periods);
  std::string counts;
  for (std::size_t p = 0; p < config_.periods; ++p) {
    periods[p].assign(windows.begin() + static_cast<std::ptrdiff_t>(p * per_period),
                      windows.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_period));
    counts += (p ? "," : "") + std::to_string(per_period);
  }
  RegisterOptions options;
  options.retain = config_.retain;
  options.period_secs = config_.period_secs;
  options.features = config_.features;
  options.created_at_us = ts_us;
  profile_ = std::make_shared<const RegisteredProfile>(register_profile(periods, options));
  phase_ = Phase::Monitoring;
  buffer_.clear();
  next_deadline_ = ts_us + to_us(config_.auth_interval_s);
  deferred_ = false;
  emit(ts_us, EventKind::Registered,
       "t=" + std::to_string(config_.periods) + " n=" + counts + " k=" + std::to_string(profile_->dimension()));
}

void Session::ingest_frame(const CsiFrame& frame) {
  std::lock_guard lock(mutex_);
  if (phase_ == Phase::Locked) {
    ++dropped_;
    return;
  }
  if (last_ts_ && frame.timestamp_us <= *last_ts_) {
    ++out_of_order_;
    return;
  }
  if (!subcarriers_) subcarriers_ = frame.amplitudes.size();
  if (!frame_is_valid(frame, *subcarriers_)) {
    ++dropped_;
    emit(frame.timestamp_us, EventKind::Warn, "malformed frame dropped");
    return;
  }
  if (phase_ == Phase::Registering && last_ts_ && frame.timestamp_us - *last_ts_ > to_us(config_.max_gap_s)) {
    emit(frame.timestamp_us, EventKind::Warn, "frame gap during registration; restarting registration");
    restart_registration();
  }
  last_ts_ = frame.timestamp_us;
  buffer_.push_back(frame);

  if (phase_ == Phase::Registering) {
    if (buffer_.size() >= registration_frames_) {
      try {
        finish_registration(frame.timestamp_us);
      } catch (const Error& e) {
        emit(frame.timestamp_us, EventKind::Warn, std::string("registration failed: ") + e.what());
        restart_registration();
      }
    }
  } else {
    while (buffer_.size() > interval_frames_) buffer_.pop_front();
  }
}

void Session::tick(std::int64_t now_us) {
  std::lock_guard lock(mutex_);
  if (phase_ != Phase::Monitoring || now_us < next_deadline_) return;

  const auto window = frames_per_window(config_.rate_hz, config_.features.window_s);
  if (buffer_.size() < 2 * window) {
    if (!deferred_)
      emit(now_us, EventKind::Warn,
           "authentication deferred: " + std::to_string(buffer_.size()) + " frames buffered");
    deferred_ = true;
    return;
  }
  deferred_ = false;

  const auto features = series_features(buffered_series(), config_.features);
  std::size_t accepted = 0;
  for (const auto& f : features)
    if (authenticate(*profile_, f).accepted) ++accepted;
  const auto detail = "accepted=" + std::to_string(accepted) + "/" + std::to_string(features.size());
  buffer_.clear();

  if (2 * accepted < features.size()) {
    phase_ = Phase::Locked;
    profile_.reset();
    emit(now_us, EventKind::LockedOut, detail);
    return;
  }
  emit(now_us, EventKind::AuthOk, detail);
  if (config_.update_enabled) {
    auto outcome = update(*profile_, features);
    if (outcome.updated)
      profile_ = std::make_shared<const RegisteredProfile>(std::move(outcome.profile));
    else
      emit(now_us, EventKind::Warn, outcome.warning);
  }
  const auto step = to_us(config_.auth_interval_s);
  while (next_deadline_ <= now_us) next_deadline_ += step;
}

void Session::end_of_stream(std::int64_t ts_us) {
  std::lock_guard lock(mutex_);
  if (phase_ == Phase::Registering)
    emit(ts_us, EventKind::Warn,
         "stream ended during registration after " + std::to_string(buffer_.size()) + " of " +
             std::to_string(registration_frames_) + " frames; no profile");
}

Phase Session::phase() const {
  std::lock_guard lock(mutex_);
  return phase_;
}

std::shared_ptr<const RegisteredProfile> Session::profile() const {
  std::lock_guard lock(mutex_);
  return profile_;
}

std::optional<std::int64_t> Session::next_auth_deadline() const {
  std::lock_guard lock(mutex_);
  if (phase_ != Phase::Monitoring) return std::nullopt;
  return next_deadline_;
}

std::size_t Session::dropped_frames() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

std::size_t Session::out_of_order_frames() const {
  std::lock_guard lock(mutex_);
  return out_of_order_;
}

std::vector<SessionEvent> Session::drain_events() {
  std::lock_guard lock(mutex_);
  std::vector<SessionEvent> out;
  out.swap(events_);
  return out;
}

}  // namespace bodyauth

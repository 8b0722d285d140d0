// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bodyauth/csi.hpp"
#include "bodyauth/matcher.hpp"

namespace bodyauth {

enum class Phase { Locked, Registering, Monitoring };
enum class EventKind { Registered, AuthOk, LockedOut, Warn };

std::string_view phase_name(Phase p);
std::string_view event_name(EventKind k);

struct SessionEvent {
  std::int64_t ts_us = 0;
  EventKind kind = EventKind::Warn;
  std::string detail;
};

// "ts_us EVENT detail"
std::string format_event(const SessionEvent& e);

struct SessionConfig {
  std::size_t periods = 4;
  double period_secs = 30.0;
  double auth_interval_s = 300.0;
  double rate_hz = 50.0;
  double retain = 0.9;
  double max_gap_s = 1.0;  // larger gaps restart registration
  bool update_enabled = true;
  FeatureConfig features;

  void validate() const;
};

// [session] section with keys periods, period_secs, auth_interval_s, rate_hz,
// window_s, filter_order, cutoff_hz, retain, max_gap_s, update_enabled.
SessionConfig parse_session_config(std::string_view text);
SessionConfig load_session_config(const std::string& path);

// Locked -> Registering (primary login) -> Monitoring (registration complete)
// -> Locked (failed interval). Every public member is safe to call from one
// frame producer and one ticking consumer concurrently; mutations serialize on
// an internal mutex and events keep their emission order.
class Session {
 public:
  explicit Session(SessionConfig config);

  void on_primary_login(std::int64_t ts_us);
  void ingest_frame(const CsiFrame& frame);
  void tick(std::int64_t now_us);
  // Reports a registration that never completed.
  void end_of_stream(std::int64_t ts_us);

  Phase phase() const;
  std::shared_ptr<const RegisteredProfile> profile() const;
  std::optional<std::int64_t> next_auth_deadline() const;
  std::size_t dropped_frames() const;
  std::size_t out_of_order_frames() const;

  std::vector<SessionEvent> drain_events();

 private:
  void emit(std::int64_t ts, EventKind kind, std::string detail);
  void restart_registration();
  void finish_registration(std::int64_t ts_us);
  CsiSeries buffered_series() const;

  const SessionConfig config_;
  const std::size_t registration_frames_;
  const std::size_t interval_frames_;

  mutable std::mutex mutex_;
  Phase phase_ = Phase::Locked;
  std::shared_ptr<const RegisteredProfile> profile_;
  std::deque<CsiFrame> buffer_;
  std::optional<std::int64_t> last_ts_;
  std::optional<std::size_t> subcarriers_;
  std::int64_t next_deadline_ = 0;
  bool deferred_ = false;
  std::size_t dropped_ = 0;
  std::size_t out_of_order_ = 0;
  std::vector<SessionEvent> events_;
};

}  // namespace bodyauth

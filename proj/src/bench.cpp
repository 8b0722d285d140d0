// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/bench.hpp"

#include <chrono>

#include "bodyauth/error.hpp"
#include "bodyauth/pipeline.hpp"

namespace bodyauth {

BenchResult bench_stages(const CsiSeries& window_frames, const RegisteredProfile& profile, std::size_t iterations) {
  if (iterations < 1) fail(ErrorCode::InvalidArgument, "bench needs at least one iteration");
  using Clock = std::chrono::steady_clock;
  const auto ms = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  std::vector<double> filter_ms, features_ms, match_ms;
  volatile bool sink = false;
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto t0 = Clock::now();
    const auto processed = sanitize(window_frames, profile.features.filter);
    const auto t1 = Clock::now();
    const auto features = extract_stats(processed);
    const auto t2 = Clock::now();
    const auto decision = authenticate(profile, features);
    const auto t3 = Clock::now();
    sink = decision.accepted;
    filter_ms.push_back(ms(t0, t1));
    features_ms.push_back(ms(t1, t2));
    match_ms.push_back(ms(t2, t3));
  }
  (void)sink;
  return {iterations, summarize_latency(std::move(filter_ms)), summarize_latency(std::move(features_ms)),
          summarize_latency(std::move(match_ms))};
}

}  // namespace bodyauth

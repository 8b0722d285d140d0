// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bodyauth/csi.hpp"
#include "bodyauth/matcher.hpp"
#include "bodyauth/metrics.hpp"

namespace bodyauth {

struct BenchResult {
  std::size_t iterations = 0;
  LatencySummary filter;
  LatencySummary features;
  LatencySummary match;
};

// Times sanitize, extract_stats and authenticate on one window of raw frames,
// `iterations` times each.
BenchResult bench_stages(const CsiSeries& window_frames, const RegisteredProfile& profile, std::size_t iterations);

}  // namespace bodyauth

// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/body_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bodyauth/error.hpp"

namespace bodyauth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, std::string(what) + " must be finite");
}

double chord_half(double radius, double b) { return radius > b ? std::sqrt(radius * radius - b * b) : 0.0; }

}  // namespace

double AirConstants::light_speed() const { return 1.0 / std::sqrt(mu0 * eps0); }

void BodyProfile::validate() const {
  double previous = 0.0;
  for (const auto& layer : layers) {
    const auto who = "layer '" + layer.name + "' of '" + label + "': ";
    if (!(layer.radius_m > 0.0) || !std::isfinite(layer.radius_m))
      fail(ErrorCode::InvalidArgument, who + "radius must be positive");
    if (layer.radius_m <= previous) fail(ErrorCode::InvalidArgument, who + "radii must strictly increase outwards");
    if (!(layer.rel_permittivity >= 1.0) || !std::isfinite(layer.rel_permittivity))
      fail(ErrorCode::InvalidArgument, who + "relative permittivity must be >= 1");
    if (!(layer.rel_permeability > 0.0) || !std::isfinite(layer.rel_permeability))
      fail(ErrorCode::InvalidArgument, who + "relative permeability must be positive");
    if (!(layer.decay_c > 0.0 && layer.decay_c <= 1.0))
      fail(ErrorCode::InvalidArgument, who + "decay factor must lie in (0, 1]");
    previous = layer.radius_m;
  }
}

void NoiseModel::validate() const {
  for (double s : {sigma_s, sigma_b, sigma_m, amp_jitter_sigma, motion_amp})
    if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::InvalidArgument, "noise deviations must be finite and >= 0");
  require_finite(cfo_delta_t, "cfo_delta_t");
  if (!(motion_freq_hz >= 0.0 && motion_freq_hz < 1.0))
    fail(ErrorCode::InvalidArgument, "motion frequency must lie in [0, 1) Hz");
}

NoiseModel NoiseModel::none() {
  NoiseModel n;
  n.sigma_s = n.sigma_b = n.sigma_m = 0.0;
  n.cfo_delta_t = 0.0;
  n.amp_jitter_sigma = 0.0;
  n.motion_amp = 0.0;
  return n;
}

std::vector<double> Scene::default_subcarrier_offsets(std::size_t count, double bandwidth_hz) {
  std::vector<double> out(count);
  const double spacing = bandwidth_hz / static_cast<double>(count);
  const double centre = (static_cast<double>(count) - 1.0) / 2.0;
  for (std::size_t k = 0; k < count; ++k) out[k] = (static_cast<double>(k) - centre) * spacing;
  return out;
}

void Scene::validate() const {
  if (subcarrier_offsets_hz.empty()) fail(ErrorCode::InvalidArgument, "scene needs at least one subcarrier");
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) fail(ErrorCode::InvalidArgument, "carrier must be positive");
  for (double off : subcarrier_offsets_hz) {
    require_finite(off, "subcarrier offset");
    if (carrier_hz + off <= 0.0) fail(ErrorCode::InvalidArgument, "subcarrier frequency must be positive");
  }
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) fail(ErrorCode::InvalidArgument, "packet rate must be positive");
  if (!(los_path_m >= 0.0) || !std::isfinite(los_path_m)) fail(ErrorCode::InvalidArgument, "LOS path must be >= 0");
  if (!(rx_gain > 0.0) || !std::isfinite(rx_gain)) fail(ErrorCode::InvalidArgument, "rx_gain must be positive");
  if (!(air.mu0 > 0.0) || !(air.eps0 > 0.0) || !std::isfinite(air.decay_exponent))
    fail(ErrorCode::InvalidArgument, "air constants must be positive");
  for (const auto& body : bodies) {
    body.profile.validate();
    if (!(body.l1_m > 0.0) || !(body.l2_m > 0.0)) fail(ErrorCode::InvalidArgument, "body distances must be positive");
    if (!(body.offset_b_m >= 0.0)) fail(ErrorCode::InvalidArgument, "ray offset must be >= 0");
    if (!body.profile.layers.empty() && body.offset_b_m >= body.profile.outer_radius())
      fail(ErrorCode::InvalidArgument, "ray misses body '" + body.profile.label + "'");
  }
  if (bodies.empty() && los_path_m == 0.0) fail(ErrorCode::InvalidArgument, "scene has no propagation path");
  noise.validate();
}

Complex transmit_sample(double amplitude, double freq_hz, double phase0, double t_s) {
  for (double v : {amplitude, freq_hz, phase0, t_s}) require_finite(v, "transmit_sample argument");
  if (!(amplitude > 0.0) || !(freq_hz > 0.0)) fail(ErrorCode::InvalidArgument, "amplitude and frequency must be positive");
  return std::polar(amplitude, -kTwoPi * freq_hz * t_s + phase0);
}

PathLengths derive_path_lengths(const BodyProfile& profile, double offset_b_m) {
  require_finite(offset_b_m, "ray offset");
  if (offset_b_m < 0.0) fail(ErrorCode::InvalidArgument, "ray offset must be >= 0");
  if (!profile.layers.empty() && offset_b_m >= profile.outer_radius())
    fail(ErrorCode::Domain, "ray misses body: offset " + std::to_string(offset_b_m) + " m >= outer radius " +
                                std::to_string(profile.outer_radius()) + " m");
  PathLengths out;
  double inner = 0.0;
  for (const auto& layer : profile.layers) {
    const double segment = chord_half(layer.radius_m, offset_b_m) - chord_half(inner, offset_b_m);
    out.in_m.push_back(segment);
    out.out_m.push_back(segment);
    inner = layer.radius_m;
  }
  return out;
}

PathGeometry make_geometry(const BodyProfile& profile, double l1_m, double l2_m, double offset_b_m) {
  auto lengths = derive_path_lengths(profile, offset_b_m);
  return {l1_m, l2_m, offset_b_m, std::move(lengths.in_m), std::move(lengths.out_m)};
}

Complex body_coefficient(const BodyProfile& profile, const PathGeometry& geometry, double freq_hz,
                         const AirConstants& air) {
  const auto n = profile.layers.size();
  if (geometry.in_lengths_m.size() != n || geometry.out_lengths_m.size() != n)
    fail(ErrorCode::DimensionMismatch, "path lengths do not match the layer count of '" + profile.label + "'");
  double decay = 1.0;
  double delay = 0.0;  // seconds
  for (std::size_t i = 0; i < n; ++i) {
    const auto& layer = profile.layers[i];
    const double d = geometry.in_lengths_m[i] + geometry.out_lengths_m[i];
    if (d < 0.0) fail(ErrorCode::InvalidArgument, "path lengths must be >= 0");
    decay *= layer.decay_c;
    delay += d * std::sqrt(layer.rel_permeability * air.mu0 * layer.rel_permittivity * air.eps0);
  }
  return std::polar(decay, -kTwoPi * freq_hz * delay);
}

Complex air_coefficient(double l1_m, double l2_m, double freq_hz, const AirConstants& air) {
  require_finite(l1_m, "l1");
  require_finite(l2_m, "l2");
  if (l1_m <= 0.0 || l2_m <= 0.0) fail(ErrorCode::Domain, "air decay is singular at zero distance");
  const double lambda = air.light_speed() / freq_hz;
  const double c1 = lambda / (4.0 * std::numbers::pi) * std::pow(l1_m, -air.decay_exponent);
  const double c2 = lambda / (4.0 * std::numbers::pi) * std::pow(l2_m, -air.decay_exponent);
  const double delay = (l1_m + l2_m) * std::sqrt(air.mu0 * air.eps0);
  return std::polar(c1 * c2, -kTwoPi * freq_hz * delay);
}

std::vector<Complex> channel_response(const Scene& scene, const std::vector<double>& offsets_m) {
  if (scene.subcarrier_offsets_hz.empty()) fail(ErrorCode::InvalidArgument, "scene needs at least one subcarrier");
  if (offsets_m.size() != scene.bodies.size())
    fail(ErrorCode::DimensionMismatch, "one ray offset per body is required");
  std::vector<PathGeometry> geometry;
  geometry.reserve(scene.bodies.size());
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    const auto& body = scene.bodies[b];
    geometry.push_back(make_geometry(body.profile, body.l1_m, body.l2_m, offsets_m[b]));
  }
  std::vector<Complex> h;
  h.reserve(scene.subcarrier_offsets_hz.size());
  for (double offset : scene.subcarrier_offsets_hz) {
    const double f = scene.carrier_hz + offset;
    // The direct path uses the same two-hop decay form, split at its midpoint.
    Complex hk = scene.los_path_m > 0.0
                     ? air_coefficient(scene.los_path_m / 2.0, scene.los_path_m / 2.0, f, scene.air)
                     : Complex{};
    for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
      const auto& body = scene.bodies[b];
      hk += air_coefficient(body.l1_m, body.l2_m, f, scene.air) *
            body_coefficient(body.profile, geometry[b], f, scene.air);
    }
    h.push_back(hk);
  }
  return h;
}

std::vector<Complex> channel_response(const Scene& scene) {
  std::vector<double> offsets;
  for (const auto& body : scene.bodies) offsets.push_back(body.offset_b_m);
  return channel_response(scene, offsets);
}

CsiSeries synthesize_csi(const Scene& scene, double duration_s) {
  scene.validate();
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) fail(ErrorCode::InvalidArgument, "duration must be positive");
  const auto frames = static_cast<std::size_t>(std::floor(duration_s * scene.rate_hz + 1e-9));
  const auto subcarriers = scene.subcarrier_offsets_hz.size();
  const auto& noise = scene.noise;

  std::mt19937_64 rng(scene.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);

  std::vector<double> motion_phase;
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) motion_phase.push_back(uniform(rng));

  const bool moving = noise.motion_amp > 0.0 && !scene.bodies.empty();
  std::vector<double> offsets;
  for (const auto& body : scene.bodies) offsets.push_back(body.offset_b_m);
  auto h = channel_response(scene, offsets);

  CsiSeries series(subcarriers, scene.rate_hz);
  std::vector<double> amplitudes(subcarriers);
  std::vector<double> phases(subcarriers);
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / scene.rate_hz;
    if (moving) {
      for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
        const auto& body = scene.bodies[b];
        double offset = std::abs(body.offset_b_m +
                                 noise.motion_amp * std::sin(kTwoPi * noise.motion_freq_hz * t + motion_phase[b]));
        if (!body.profile.layers.empty()) offset = std::min(offset, 0.999 * body.profile.outer_radius());
        offsets[b] = offset;
      }
      h = channel_response(scene, offsets);
    }
    const double packet_error = noise.sigma_s * gauss(rng) + noise.sigma_b * gauss(rng);
    for (std::size_t k = 0; k < subcarriers; ++k) {
      const double f = scene.carrier_hz + scene.subcarrier_offsets_hz[k];
      const double jitter = 1.0 + noise.amp_jitter_sigma * gauss(rng);
      amplitudes[k] = std::max(0.0, scene.rx_gain * std::abs(h[k]) * jitter);
      const double measurement = noise.sigma_m * gauss(rng);
      phases[k] = wrap_phase(std::arg(h[k]) + packet_error + measurement + kTwoPi * f * noise.cfo_delta_t * t);
    }
    const auto ts = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 1e6 / scene.rate_hz));
    series.push_back(ts, amplitudes, phases);
  }
  return series;
}

BodyProfile default_body_profile(std::string label) {
  BodyProfile p;
  p.label = std::move(label);
  p.layers = {
      {"bone", 0.030, 10.0, 1.0, 0.85},
      {"viscera", 0.080, 42.0, 1.0, 0.70},
      {"visceral_fat", 0.100, 5.0, 1.0, 0.95},
      {"muscle", 0.130, 49.0, 1.0, 0.70},
      {"subcutaneous_fat", 0.145, 5.0, 1.0, 0.95},
      {"skin", 0.150, 36.0, 1.0, 0.90},
  };
  return p;
}

BodyProfile synthetic_subject(std::uint64_t seed, std::string label) {
  auto p = default_body_profile(std::move(label));
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double scale = 1.0 + 0.15 * u(rng);
  double previous = 0.0;
  for (auto& layer : p.layers) {
    // Layer thickness varies independently of overall build.
    const double thickness = (layer.radius_m - previous) * (1.0 + 0.2 * u(rng));
    previous = layer.radius_m;
    layer.radius_m = thickness;
    layer.rel_permittivity = std::max(1.0, layer.rel_permittivity * (1.0 + 0.2 * u(rng)));
    layer.decay_c = std::clamp(layer.decay_c * (1.0 + 0.1 * u(rng)), 0.05, 1.0);
  }
  double radius = 0.0;
  for (auto& layer : p.layers) {
    radius += layer.radius_m * scale;
    layer.radius_m = radius;
  }
  return p;
}

Scene default_scene(BodyProfile profile, std::uint64_t seed) {
  Scene s;
  s.seed = seed;
  s.bodies.push_back({std::move(profile), 1.5, 1.5, 0.0});
  return s;
}

}  // namespace bodyauth

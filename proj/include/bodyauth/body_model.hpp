// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bodyauth/csi.hpp"

namespace bodyauth {

using Complex = std::complex<double>;

struct TissueLayer {
  std::string name;
  double radius_m = 0.0;
  double rel_permittivity = 1.0;
  double rel_permeability = 1.0;
  double decay_c = 1.0;  // power decay factor applied once per traversal, in (0, 1]
};

// Concentric tissue layers, innermost first. An empty profile is a
// transparent body.
struct BodyProfile {
  std::string label;
  std::vector<TissueLayer> layers;

  // Throws ErrorCode::InvalidArgument if any layer field is out of range or
  // the radii do not strictly increase.
  void validate() const;
  double outer_radius() const { return layers.empty() ? 0.0 : layers.back().radius_m; }
};

struct PathGeometry {
  double l1_m = 1.0;         // transmitter to body
  double l2_m = 1.0;         // body to receiver
  double offset_b_m = 0.0;   // ray distance from the body centre
  std::vector<double> in_lengths_m;   // per layer, innermost first
  std::vector<double> out_lengths_m;
};

struct AirConstants {
  double mu0 = 1.25663706212e-6;    // H/m
  double eps0 = 8.8541878128e-12;   // F/m
  // Amplitude decay over one air hop is lambda / (4 pi) * l^-exponent; 1 is
  // free space.
  double decay_exponent = 1.0;

  double light_speed() const;
};

struct NoiseModel {
  double sigma_s = 0.03;            // rad, per packet
  double sigma_b = 0.03;            // rad, per packet
  double sigma_m = 0.05;            // rad, per packet and subcarrier
  double cfo_delta_t = -8e-11;      // s; phase drift is 2 pi f_k dt per second of capture
  double amp_jitter_sigma = 0.05;   // relative
  double motion_amp = 0.003;        // m, sinusoidal swing of the ray offset
  double motion_freq_hz = 0.05;

  void validate() const;
  static NoiseModel none();
};

struct SceneBody {
  BodyProfile profile;
  double l1_m = 1.5;
  double l2_m = 1.5;
  double offset_b_m = 0.0;
};

struct Scene {
  double carrier_hz = 5e9;
  std::vector<double> subcarrier_offsets_hz = default_subcarrier_offsets();
  double rate_hz = 50.0;
  double los_path_m = 3.0;  // 0 disables the direct path
  double rx_gain = 1e7;     // receiver scaling; puts amplitudes in the tens to hundreds
  std::vector<SceneBody> bodies;
  NoiseModel noise;
  AirConstants air;
  std::uint64_t seed = 1;

  void validate() const;

  // `count` evenly spaced offsets spanning `bandwidth_hz`, centred on 0.
  static std::vector<double> default_subcarrier_offsets(std::size_t count = kDefaultSubcarriers,
                                                        double bandwidth_hz = 20e6);
};

// A * exp(-j 2 pi f t + j phase0)
Complex transmit_sample(double amplitude, double freq_hz, double phase0, double t_s);

// Per-layer chord segments for a straight ray passing `offset_b_m` from the
// centre. Both sides of the chord are equal, so in == out.
struct PathLengths {
  std::vector<double> in_m;
  std::vector<double> out_m;
};
PathLengths derive_path_lengths(const BodyProfile& profile, double offset_b_m);

PathGeometry make_geometry(const BodyProfile& profile, double l1_m, double l2_m, double offset_b_m);

// prod(c_i) * exp(-j 2 pi f sum((d_i1 + d_i2) sqrt(mu_i eps_i)))
Complex body_coefficient(const BodyProfile& profile, const PathGeometry& geometry, double freq_hz,
                         const AirConstants& air = {});

// c1 * c2 * exp(-j 2 pi f (l1 + l2) sqrt(mu0 eps0)) with Friis-style decays.
Complex air_coefficient(double l1_m, double l2_m, double freq_hz, const AirConstants& air = {});

// Noiseless per-subcarrier response of the static scene.
std::vector<Complex> channel_response(const Scene& scene);

// Same, with each body's ray offset replaced by `offsets_m[i]`.
std::vector<Complex> channel_response(const Scene& scene, const std::vector<double>& offsets_m);

// Noisy CSI capture of `duration_s` seconds; bit-identical for equal scenes.
CsiSeries synthesize_csi(const Scene& scene, double duration_s);

// Six-layer torso (bone, viscera, visceral fat, muscle, subcutaneous fat,
// skin). The dielectric and decay values are rough placeholders.
BodyProfile default_body_profile(std::string label = "default");

// Deterministic perturbation of the default profile, one per seed.
BodyProfile synthetic_subject(std::uint64_t seed, std::string label);

// Single-body scene with the default geometry around `profile`.
Scene default_scene(BodyProfile profile, std::uint64_t seed = 1);

}  // namespace bodyauth

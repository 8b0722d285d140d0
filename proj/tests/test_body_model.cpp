// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bodyauth/body_model.hpp"
#include "bodyauth/error.hpp"
#include "bodyauth/scene_config.hpp"
#include "support.hpp"

using namespace bodyauth;
using testsupport::kLightSpeed;
using testsupport::kPi;

namespace {

BodyProfile one_layer(double radius, double eps, double c) {
  return BodyProfile{"one", {TissueLayer{"slab", radius, eps, 1.0, c}}};
}

double wrap(double x) { return std::remainder(x, 2.0 * kPi); }

}  // namespace

TEST_CASE("transmit_sample closed forms") {
  const auto a = transmit_sample(1.0, 123.0, 0.0, 0.0);
  CHECK(a.real() == doctest::Approx(1.0));
  CHECK(a.imag() == doctest::Approx(0.0));

  const auto b = transmit_sample(2.0, 1.0, 0.0, 0.25);
  CHECK(b.real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.imag() == doctest::Approx(-2.0));

  const double arg = -2.0 * kPi * 5e9 * 1e-9 + 0.3;
  const auto c = transmit_sample(1.0, 5e9, 0.3, 1e-9);
  CHECK(c.real() == doctest::Approx(std::cos(arg)).epsilon(1e-12));
  CHECK(c.imag() == doctest::Approx(std::sin(arg)).epsilon(1e-12));
}

TEST_CASE("chord path lengths") {
  SUBCASE("single layer through the centre") {
    const auto p = derive_path_lengths(one_layer(0.2, 40, 0.9), 0.0);
    REQUIRE(p.in_m.size() == 1);
    CHECK(p.in_m[0] == doctest::Approx(0.2));
    CHECK(p.out_m[0] == doctest::Approx(0.2));
  }
  SUBCASE("two layers split symmetrically") {
    BodyProfile two{"two", {{"core", 0.1, 40, 1, 0.9}, {"shell", 0.2, 10, 1, 0.9}}};
    const auto p = derive_path_lengths(two, 0.0);
    CHECK(p.in_m[0] == doctest::Approx(0.1));
    CHECK(p.in_m[1] == doctest::Approx(0.1));
  }
  SUBCASE("offset ray") {
    const auto p = derive_path_lengths(one_layer(0.2, 40, 0.9), 0.12);
    CHECK(p.in_m[0] == doctest::Approx(0.16));
    CHECK(p.out_m[0] == doctest::Approx(0.16));
  }
  SUBCASE("offset ray misses inner layer") {
    BodyProfile two{"two", {{"core", 0.1, 40, 1, 0.9}, {"shell", 0.2, 10, 1, 0.9}}};
    const auto p = derive_path_lengths(two, 0.12);
    CHECK(p.in_m[0] == doctest::Approx(0.0));
    CHECK(p.in_m[1] == doctest::Approx(0.16));
  }
  SUBCASE("ray outside the body") {
    CHECK_THROWS_AS(derive_path_lengths(one_layer(0.2, 40, 0.9), 0.2), Error);
    CHECK_THROWS_AS(derive_path_lengths(one_layer(0.2, 40, 0.9), 0.5), Error);
  }
}

TEST_CASE("path lengths sum to the full chord") {
  const auto profile = default_body_profile();
  for (double b : {0.0, 0.03, 0.07, 0.11, 0.149}) {
    const auto p = derive_path_lengths(profile, b);
    double total = 0.0;
    for (std::size_t i = 0; i < p.in_m.size(); ++i) total += p.in_m[i] + p.out_m[i];
    const double r = profile.outer_radius();
    CHECK(total == doctest::Approx(2.0 * std::sqrt(r * r - b * b)).epsilon(1e-12));
  }
}

TEST_CASE("body coefficient") {
  SUBCASE("transparent body") {
    BodyProfile empty{"none", {}};
    const auto c = body_coefficient(empty, make_geometry(empty, 1, 1, 0), 5e9);
    CHECK(c.real() == doctest::Approx(1.0));
    CHECK(c.imag() == doctest::Approx(0.0));
  }
  SUBCASE("pure attenuation") {
    const auto profile = one_layer(0.1, 40, 0.5);
    PathGeometry g;
    g.in_lengths_m = {0.0};
    g.out_lengths_m = {0.0};
    const auto c = body_coefficient(profile, g, 5e9);
    CHECK(c.real() == doctest::Approx(0.5));
    CHECK(c.imag() == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("closed-form phase") {
    const auto profile = one_layer(0.1, 50, 1.0);
    PathGeometry g;
    g.in_lengths_m = {0.05};
    g.out_lengths_m = {0.05};
    const auto c = body_coefficient(profile, g, 5e9);
    const double expected = wrap(-2.0 * kPi * 5e9 * 0.1 * std::sqrt(50.0) / kLightSpeed);
    CHECK(std::abs(c) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(wrap(std::arg(c) - expected)) < 1e-6);
  }
  SUBCASE("attenuation multiplies across layers") {
    const auto profile = default_body_profile();
    const auto c = body_coefficient(profile, make_geometry(profile, 1.5, 1.5, 0.0), 5e9);
    double product = 1.0;
    for (const auto& layer : profile.layers) product *= layer.decay_c;
    CHECK(std::abs(c) == doctest::Approx(product).epsilon(1e-12));
  }
}

TEST_CASE("air coefficient") {
  const double f = 5e9;
  SUBCASE("delay over 3 m") {
    const auto c = air_coefficient(1.5, 1.5, f);
    const double delay = 3.0 / kLightSpeed;
    CHECK(delay * 1e9 == doctest::Approx(10.0069).epsilon(1e-5));
    CHECK(std::abs(wrap(std::arg(c) + 2.0 * kPi * f * delay)) < 1e-6);
  }
  SUBCASE("Friis magnitudes at one metre") {
    const double lambda = kLightSpeed / f;
    CHECK(lambda == doctest::Approx(0.05996).epsilon(1e-4));
    const double single = lambda / (4.0 * kPi);
    CHECK(single == doctest::Approx(4.771e-3).epsilon(1e-3));
    CHECK(std::abs(air_coefficient(1.0, 1.0, f)) == doctest::Approx(2.276e-5).epsilon(1e-3));
  }
  SUBCASE("doubling one hop halves the magnitude") {
    const double base = std::abs(air_coefficient(1.0, 1.3, f));
    CHECK(std::abs(air_coefficient(2.0, 1.3, f)) == doctest::Approx(base / 2.0).epsilon(1e-12));
  }
  SUBCASE("zero distance is singular") { CHECK_THROWS_AS(air_coefficient(0.0, 1.0, f), Error); }
}

TEST_CASE("channel response") {
  Scene scene;
  scene.bodies.clear();
  SUBCASE("LOS only") {
    const auto h = channel_response(scene);
    REQUIRE(h.size() == 30);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const auto los = air_coefficient(1.5, 1.5, scene.carrier_hz + scene.subcarrier_offsets_hz[k]);
      CHECK(std::abs(h[k] - los) < 1e-18);
    }
  }
  SUBCASE("transparent body adds an air-only reflection") {
    scene.bodies.push_back(SceneBody{BodyProfile{"ghost", {}}, 2.0, 2.5, 0.0});
    const auto h = channel_response(scene);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double f = scene.carrier_hz + scene.subcarrier_offsets_hz[k];
      const auto expected = air_coefficient(1.5, 1.5, f) + air_coefficient(2.0, 2.5, f);
      CHECK(std::abs(h[k] - expected) < 1e-18);
    }
  }
  SUBCASE("permittivity changes every subcarrier") {
    auto a = scene;
    auto profile = default_body_profile();
    profile.layers[3].rel_permittivity = 30;
    a.bodies.push_back(SceneBody{profile, 1.5, 1.5, 0.0});
    auto b = a;
    b.bodies[0].profile.layers[3].rel_permittivity = 50;
    const auto ha = channel_response(a);
    const auto hb = channel_response(b);
    for (std::size_t k = 0; k < ha.size(); ++k) {
      const double f = a.carrier_hz + a.subcarrier_offsets_hz[k];
      const auto air = air_coefficient(1.5, 1.5, f);
      const auto direct = air * (body_coefficient(a.bodies[0].profile, make_geometry(a.bodies[0].profile, 1.5, 1.5, 0), f) -
                                 body_coefficient(b.bodies[0].profile, make_geometry(b.bodies[0].profile, 1.5, 1.5, 0), f));
      CHECK(std::abs(ha[k] - hb[k]) > 0.0);
      CHECK(std::abs(ha[k] - hb[k]) == doctest::Approx(std::abs(direct)).epsilon(1e-9));
    }
  }
}

TEST_CASE("synthesis") {
  auto scene = default_scene(default_body_profile(), 11);

  SUBCASE("frame count and timestamps") {
    const auto s = synthesize_csi(scene, 2.0);
    CHECK(s.size() == 100);
    CHECK(s.subcarriers() == 30);
    CHECK(s.timestamp_us(0) == 0);
    CHECK(s.timestamp_us(99) == 1980000);
  }
  SUBCASE("zero noise reproduces the static response") {
    scene.noise = NoiseModel::none();
    const auto s = synthesize_csi(scene, 1.0);
    const auto h = channel_response(scene);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t k = 0; k < 30; ++k) {
        CHECK(s.amplitudes(i)[k] == doctest::Approx(scene.rx_gain * std::abs(h[k])).epsilon(1e-12));
        CHECK(std::abs(wrap(s.phases(i)[k] - std::arg(h[k]))) < 1e-12);
      }
  }
  SUBCASE("deterministic under a fixed seed") {
    CHECK(synthesize_csi(scene, 3.0) == synthesize_csi(scene, 3.0));
    auto other = scene;
    other.seed = 12;
    CHECK_FALSE(synthesize_csi(scene, 3.0) == synthesize_csi(other, 3.0));
  }
  SUBCASE("pure CFO gives a linear phase ramp") {
    scene.noise = NoiseModel::none();
    scene.noise.cfo_delta_t = -5e-11;
    const auto s = synthesize_csi(scene, 4.0);
    for (std::size_t k : {0u, 14u, 29u}) {
      const double f = scene.carrier_hz + scene.subcarrier_offsets_hz[k];
      const double slope = 2.0 * kPi * f * scene.noise.cfo_delta_t / scene.rate_hz;
      // Least-squares fit of the unwrapped track against the frame index.
      const auto track = s.phase_track(k);
      std::vector<double> unwrapped{track[0]};
      for (std::size_t i = 1; i < track.size(); ++i) unwrapped.push_back(unwrapped.back() + wrap(track[i] - track[i - 1]));
      const double n = static_cast<double>(track.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < track.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += unwrapped[i];
        sxx += x * x;
        sxy += x * unwrapped[i];
      }
      const double fitted = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      CHECK(fitted == doctest::Approx(slope).epsilon(1e-9));
      const double intercept = (sy - fitted * sx) / n;
      for (std::size_t i = 0; i < track.size(); ++i)
        CHECK(std::abs(unwrapped[i] - (intercept + fitted * static_cast<double>(i))) < 1e-9);
    }
  }
  SUBCASE("phases are wrapped") {
    const auto s = synthesize_csi(scene, 5.0);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (double p : s.phases(i)) {
        CHECK(p > -kPi - 1e-12);
        CHECK(p <= kPi + 1e-12);
      }
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(synthesize_csi(scene, 0.0), Error);
    auto bad = scene;
    bad.noise.motion_freq_hz = 1.5;
    CHECK_THROWS_AS(synthesize_csi(bad, 1.0), Error);
    bad = scene;
    bad.noise.sigma_m = -1;
    CHECK_THROWS_AS(synthesize_csi(bad, 1.0), Error);
  }
}

TEST_CASE("synthetic subjects are distinct and valid") {
  const auto a = synthetic_subject(1, "a");
  const auto b = synthetic_subject(2, "b");
  CHECK_NOTHROW(a.validate());
  CHECK_NOTHROW(b.validate());
  CHECK(a.label == "a");
  CHECK(a.outer_radius() != b.outer_radius());
  const auto again = synthetic_subject(1, "a");
  CHECK(again.layers.size() == a.layers.size());
  CHECK(again.layers[2].rel_permittivity == a.layers[2].rel_permittivity);
}

TEST_CASE("profile validation") {
  CHECK_NOTHROW(default_body_profile().validate());
  BodyProfile decreasing{"bad", {{"a", 0.2, 10, 1, 0.9}, {"b", 0.1, 10, 1, 0.9}}};
  CHECK_THROWS_AS(decreasing.validate(), Error);
  CHECK_THROWS_AS(one_layer(0.1, 0.5, 0.9).validate(), Error);
  CHECK_THROWS_AS(one_layer(0.1, 10, 0.0).validate(), Error);
  CHECK_THROWS_AS(one_layer(0.1, 10, 1.2).validate(), Error);
}

TEST_CASE("scene files") {
  const char* text = R"(# two people
[scene]
carrier_hz = 5.2e9
rate_hz = 100
seed = 42
[noise]
sigma_m = 0.02
[body.0]
label = alice
preset = default
l1_m = 1.2
[body.1]
label = custom
offset_b_m = 0.01
[layer.1.0]
name = core
radius_m = 0.1
rel_permittivity = 40
decay_c = 0.8
[layer.1.1]
name = shell
radius_m = 0.2
rel_permittivity = 10
decay_c = 0.9
)";
  const auto scene = parse_scene(text);
  CHECK(scene.carrier_hz == 5.2e9);
  CHECK(scene.rate_hz == 100);
  CHECK(scene.seed == 42);
  CHECK(scene.noise.sigma_m == 0.02);
  CHECK(scene.noise.sigma_s == NoiseModel{}.sigma_s);
  REQUIRE(scene.bodies.size() == 2);
  CHECK(scene.bodies[0].profile.label == "alice");
  CHECK(scene.bodies[0].l1_m == 1.2);
  CHECK(scene.bodies[1].profile.layers.size() == 2);
  CHECK(scene.bodies[1].profile.layers[1].decay_c == 0.9);

  SUBCASE("round trip") {
    const auto again = parse_scene(format_scene(scene));
    CHECK(channel_response(again) == channel_response(scene));
    CHECK(synthesize_csi(again, 1.0) == synthesize_csi(scene, 1.0));
  }
  SUBCASE("unknown key names the line") {
    try {
      parse_scene("[scene]\nrate_hz = 50\nbogus = 1\n");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
      CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
  }
  SUBCASE("malformed input") {
    CHECK_THROWS_AS(parse_scene("[scene]\nrate_hz = fast\n"), Error);
    CHECK_THROWS_AS(parse_scene("[mystery]\nx = 1\n"), Error);
    CHECK_THROWS_AS(parse_scene("[scene]\nrate_hz = 50\nrate_hz = 60\n"), Error);
    CHECK_THROWS_AS(parse_scene("[body.1]\npreset = default\n"), Error);
    CHECK_THROWS_AS(parse_scene("[noise]\nmotion_freq_hz = 2\n"), Error);
  }
}

// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/scene_config.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <optional>

#include "bodyauth/error.hpp"
#include "bodyauth/keyvalue.hpp"

namespace bodyauth {
namespace {

struct BodyDraft {
  SceneBody body;
  std::optional<std::string> preset;
  std::map<std::size_t, TissueLayer> layers;
  int line = 0;
};

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

[[noreturn]] void bad_section(const KeyValue& kv) {
  fail(ErrorCode::Parse, "line " + std::to_string(kv.line) + ": unknown section [" + kv.section + "]");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Scene parse_scene(std::string_view text) {
  Scene scene;
  std::optional<std::size_t> subcarrier_count;
  std::optional<double> bandwidth;
  bool explicit_offsets = false;
  std::map<std::size_t, BodyDraft> bodies;

  for (const auto& kv : parse_key_values(text)) {
    const auto& s = kv.section;
    const auto& k = kv.key;
    if (s == "scene") {
      if (k == "carrier_hz") scene.carrier_hz = to_double(kv);
      else if (k == "rate_hz") scene.rate_hz = to_double(kv);
      else if (k == "los_path_m") scene.los_path_m = to_double(kv);
      else if (k == "rx_gain") scene.rx_gain = to_double(kv);
      else if (k == "seed") scene.seed = static_cast<std::uint64_t>(to_integer(kv));
      else if (k == "subcarriers") {
        const auto n = to_integer(kv);
        if (n < 1) fail(ErrorCode::Parse, "line " + std::to_string(kv.line) + ": subcarriers must be >= 1");
        subcarrier_count = static_cast<std::size_t>(n);
      } else if (k == "bandwidth_hz") bandwidth = to_double(kv);
      else if (k == "subcarrier_offsets_hz") {
        scene.subcarrier_offsets_hz = to_double_list(kv);
        explicit_offsets = true;
      } else unknown_key(kv);
    } else if (s == "air") {
      if (k == "mu0") scene.air.mu0 = to_double(kv);
      else if (k == "eps0") scene.air.eps0 = to_double(kv);
      else if (k == "decay_exponent") scene.air.decay_exponent = to_double(kv);
      else unknown_key(kv);
    } else if (s == "noise") {
      auto& n = scene.noise;
      if (k == "sigma_s") n.sigma_s = to_double(kv);
      else if (k == "sigma_b") n.sigma_b = to_double(kv);
      else if (k == "sigma_m") n.sigma_m = to_double(kv);
      else if (k == "cfo_delta_t") n.cfo_delta_t = to_double(kv);
      else if (k == "amp_jitter_sigma") n.amp_jitter_sigma = to_double(kv);
      else if (k == "motion_amp") n.motion_amp = to_double(kv);
      else if (k == "motion_freq_hz") n.motion_freq_hz = to_double(kv);
      else unknown_key(kv);
    } else if (s.starts_with("body.")) {
      const auto index = parse_index(std::string_view(s).substr(5));
      if (!index) bad_section(kv);
      auto& draft = bodies[*index];
      if (draft.line == 0) draft.line = kv.line;
      auto& b = draft.body;
      if (k == "label") b.profile.label = kv.value;
      else if (k == "l1_m") b.l1_m = to_double(kv);
      else if (k == "l2_m") b.l2_m = to_double(kv);
      else if (k == "offset_b_m") b.offset_b_m = to_double(kv);
      else if (k == "preset") draft.preset = kv.value;
      else unknown_key(kv);
    } else if (s.starts_with("layer.")) {
      const auto rest = std::string_view(s).substr(6);
      const auto dot = rest.find('.');
      if (dot == std::string_view::npos) bad_section(kv);
      const auto body_index = parse_index(rest.substr(0, dot));
      const auto layer_index = parse_index(rest.substr(dot + 1));
      if (!body_index || !layer_index) bad_section(kv);
      auto& draft = bodies[*body_index];
      if (draft.line == 0) draft.line = kv.line;
      auto& layer = draft.layers[*layer_index];
      if (k == "name") layer.name = kv.value;
      else if (k == "radius_m") layer.radius_m = to_double(kv);
      else if (k == "rel_permittivity") layer.rel_permittivity = to_double(kv);
      else if (k == "rel_permeability") layer.rel_permeability = to_double(kv);
      else if (k == "decay_c") layer.decay_c = to_double(kv);
      else unknown_key(kv);
    } else {
      bad_section(kv);
    }
  }

  if (explicit_offsets && (subcarrier_count || bandwidth))
    fail(ErrorCode::Parse, "[scene] subcarrier_offsets_hz cannot be combined with subcarriers/bandwidth_hz");
  if (!explicit_offsets)
    scene.subcarrier_offsets_hz =
        Scene::default_subcarrier_offsets(subcarrier_count.value_or(kDefaultSubcarriers), bandwidth.value_or(20e6));

  std::size_t expected = 0;
  for (auto& [index, draft] : bodies) {
    const auto where = "line " + std::to_string(draft.line) + ": body " + std::to_string(index);
    if (index != expected++) fail(ErrorCode::Parse, where + ": body indices must be contiguous from 0");
    auto& profile = draft.body.profile;
    if (draft.preset) {
      if (!draft.layers.empty()) fail(ErrorCode::Parse, where + ": preset and explicit layers are exclusive");
      const auto label = profile.label.empty() ? "body" + std::to_string(index) : profile.label;
      if (*draft.preset == "default") {
        profile = default_body_profile(label);
      } else if (draft.preset->starts_with("synthetic:")) {
        const auto seed = parse_index(std::string_view(*draft.preset).substr(10));
        if (!seed) fail(ErrorCode::Parse, where + ": bad preset '" + *draft.preset + "'");
        profile = synthetic_subject(*seed, label);
      } else {
        fail(ErrorCode::Parse, where + ": unknown preset '" + *draft.preset + "'");
      }
    } else {
      std::size_t expected_layer = 0;
      for (auto& [li, layer] : draft.layers) {
        if (li != expected_layer++) fail(ErrorCode::Parse, where + ": layer indices must be contiguous from 0");
        profile.layers.push_back(layer);
      }
    }
    scene.bodies.push_back(std::move(draft.body));
  }

  try {
    scene.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Parse, std::string("invalid scene: ") + e.what());
  }
  return scene;
}

Scene load_scene(const std::string& path) { return parse_scene(read_text_file(path)); }

std::string format_scene(const Scene& scene) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  out += "[scene]\n";
  line("carrier_hz", num(scene.carrier_hz));
  line("rate_hz", num(scene.rate_hz));
  line("los_path_m", num(scene.los_path_m));
  line("rx_gain", num(scene.rx_gain));
  line("seed", std::to_string(scene.seed));
  std::string offsets;
  for (double o : scene.subcarrier_offsets_hz) offsets += (offsets.empty() ? "" : ",") + num(o);
  line("subcarrier_offsets_hz", offsets);
  out += "\n[air]\n";
  line("mu0", num(scene.air.mu0));
  line("eps0", num(scene.air.eps0));
  line("decay_exponent", num(scene.air.decay_exponent));
  out += "\n[noise]\n";
  line("sigma_s", num(scene.noise.sigma_s));
  line("sigma_b", num(scene.noise.sigma_b));
  line("sigma_m", num(scene.noise.sigma_m));
  line("cfo_delta_t", num(scene.noise.cfo_delta_t));
  line("amp_jitter_sigma", num(scene.noise.amp_jitter_sigma));
  line("motion_amp", num(scene.noise.motion_amp));
  line("motion_freq_hz", num(scene.noise.motion_freq_hz));
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    const auto& body = scene.bodies[b];
    out += "\n[body." + std::to_string(b) + "]\n";
    line("label", body.profile.label);
    line("l1_m", num(body.l1_m));
    line("l2_m", num(body.l2_m));
    line("offset_b_m", num(body.offset_b_m));
    for (std::size_t i = 0; i < body.profile.layers.size(); ++i) {
      const auto& layer = body.profile.layers[i];
      out += "\n[layer." + std::to_string(b) + "." + std::to_string(i) + "]\n";
      line("name", layer.name);
      line("radius_m", num(layer.radius_m));
      line("rel_permittivity", num(layer.rel_permittivity));
      line("rel_permeability", num(layer.rel_permeability));
      line("decay_c", num(layer.decay_c));
    }
  }
  return out;
}

}  // namespace bodyauth

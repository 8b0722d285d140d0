// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "bodyauth/body_model.hpp"

namespace bodyauth {

// Scene files are sectioned key = value text:
//
//   [scene]      carrier_hz rate_hz los_path_m rx_gain seed
//                subcarriers bandwidth_hz | subcarrier_offsets_hz (comma list)
//   [air]        mu0 eps0 decay_exponent
//   [noise]      sigma_s sigma_b sigma_m cfo_delta_t amp_jitter_sigma
//                motion_amp motion_freq_hz
//   [body.N]     label l1_m l2_m offset_b_m preset (default | synthetic:SEED)
//   [layer.N.M]  name radius_m rel_permittivity rel_permeability decay_c
//
// Body and layer indices start at 0 and must be contiguous; layers are listed
// innermost first. Unknown sections or keys are errors.
Scene parse_scene(std::string_view text);
Scene load_scene(const std::string& path);

// Writes every field explicitly, so parse_scene(format_scene(s)) == s.
std::string format_scene(const Scene& scene);

}  // namespace bodyauth

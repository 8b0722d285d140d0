// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "bodyauth/matcher.hpp"

namespace bodyauth {

// JSON document; doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every value bit for bit.
std::string profile_to_json(const RegisteredProfile& profile);
RegisteredProfile profile_from_json(const std::string& text);

void save_profile(const std::string& path, const RegisteredProfile& profile);
RegisteredProfile load_profile(const std::string& path);

}  // namespace bodyauth

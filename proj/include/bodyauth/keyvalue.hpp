// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bodyauth {

// One `key = value` entry of a sectioned configuration file.
struct KeyValue {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

// Parses line-oriented `[section]` / `key = value` text. Blank lines and
// lines starting with '#' or ';' are ignored. Keys outside a section, lines
// without '=', and duplicate keys within a section raise ErrorCode::Parse
// naming the line.
std::vector<KeyValue> parse_key_values(std::string_view text);

// Strict scalar conversions; diagnostics carry the entry's line and key.
double to_double(const KeyValue& kv);
long long to_integer(const KeyValue& kv);
bool to_bool(const KeyValue& kv);
std::vector<double> to_double_list(const KeyValue& kv);

[[noreturn]] void unknown_key(const KeyValue& kv);

std::string read_text_file(const std::string& path);

}  // namespace bodyauth

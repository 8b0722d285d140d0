// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "bodyauth/error.hpp"

namespace bodyauth {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(const KeyValue& kv) {
  return "line " + std::to_string(kv.line) + ": [" + kv.section + "] " + kv.key;
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#' || line.front() == ';') {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected key = value");
      if (section.empty())
        fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": key outside of any section");
      KeyValue kv{section, std::string(trim(line.substr(0, eq))),
                  std::string(trim(line.substr(eq + 1))), line_no};
      if (kv.key.empty()) fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": empty key");
      if (!seen.emplace(kv.section, kv.key).second)
        fail(ErrorCode::Parse, where(kv) + ": duplicate key");
      out.push_back(std::move(kv));
    }
    if (end == text.size()) break;
  }
  return out;
}

double to_double(const KeyValue& kv) {
  double v = 0.0;
  const auto* first = kv.value.data();
  const auto* last = first + kv.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v))
    fail(ErrorCode::Parse, where(kv) + ": expected a finite number, got '" + kv.value + "'");
  return v;
}

long long to_integer(const KeyValue& kv) {
  long long v = 0;
  const auto* first = kv.value.data();
  const auto* last = first + kv.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    fail(ErrorCode::Parse, where(kv) + ": expected an integer, got '" + kv.value + "'");
  return v;
}

bool to_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
  fail(ErrorCode::Parse, where(kv) + ": expected true/false, got '" + kv.value + "'");
}

std::vector<double> to_double_list(const KeyValue& kv) {
  std::vector<double> out;
  std::stringstream ss(kv.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    KeyValue part = kv;
    part.value = std::string(trim(item));
    out.push_back(to_double(part));
  }
  if (out.empty()) fail(ErrorCode::Parse, where(kv) + ": empty list");
  return out;
}

void unknown_key(const KeyValue& kv) { fail(ErrorCode::Parse, where(kv) + ": unknown key"); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bodyauth

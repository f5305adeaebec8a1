// Copyright 2026 The qdfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdfair/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qdfair/error.hpp"

namespace qdfair {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(what + ": not a finite number: '" + t + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(what + ": not an integer: '" + t + "'");
  }
  return value;
}

Config Config::parse(std::string_view text, std::string source) {
  Config config;
  config.source_ = std::move(source);
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const std::string at = config.source_ + ":" + std::to_string(line_no);
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        throw ConfigError(at + ": malformed section header '" + body + "'");
      }
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(at + ": expected 'key = value', got '" + body + "'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError(at + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (config.values_.contains(key)) {
      throw ConfigError(at + ": duplicate key '" + key + "'");
    }
    config.values_[key] = trim(std::string_view(body).substr(eq + 1));
    config.lines_[key] = line_no;
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::string Config::where(const std::string& key) const {
  const auto it = lines_.find(key);
  if (it == lines_.end()) return source_ + ": '" + key + "'";
  return source_ + ":" + std::to_string(it->second) + ": '" + key + "'";
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

const std::string& Config::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError(source_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto value = get(key);
  return value ? parse_double(*value, where(key)) : fallback;
}

std::int64_t Config::get_int(const std::string& key,
                             std::int64_t fallback) const {
  const auto value = get(key);
  return value ? parse_int(*value, where(key)) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  const auto value = get(key);
  if (!value) return fallback;
  std::uint64_t parsed = 0;
  const auto [ptr, ec] =
      std::from_chars(value->data(), value->data() + value->size(), parsed);
  if (value->empty() || ec != std::errc() ||
      ptr != value->data() + value->size()) {
    throw ConfigError(where(key) + ": not an unsigned integer: '" + *value +
                      "'");
  }
  return parsed;
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  const auto value = get(key);
  if (!value || value->empty()) return {};
  return split(*value, ',');
}

std::map<std::string, std::string> Config::section(
    const std::string& name) const {
  std::map<std::string, std::string> out;
  const std::string prefix = name + ".";
  for (const auto& [key, value] : values_) {
    if (key.starts_with(prefix)) out[key.substr(prefix.size())] = value;
  }
  return out;
}

void Config::reject_unknown(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    bool known = false;
    for (const auto& a : allowed) known = known || a == key;
    if (!known) throw ConfigError(where(key) + ": unknown key");
  }
}

}  // namespace qdfair

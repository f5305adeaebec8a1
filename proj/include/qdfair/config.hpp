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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qdfair {

/// Flat key/value configuration.
///
/// Grammar, one entry per line:
///
///     # comment
///     key = value
///     [section]
///     key = value        (stored as "section.key")
///
/// Keys are case-sensitive; leading/trailing blanks around keys and values
/// are trimmed; a key may appear once per section. List values are
/// comma-separated. All errors are ConfigError and name the source line.
class Config {
 public:
  static Config parse(std::string_view text, std::string source = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;
  const std::string& require(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

  /// Entries of one section with the "section." prefix removed.
  std::map<std::string, std::string> section(const std::string& name) const;

  /// Throws if any key is outside allowed.
  void reject_unknown(const std::vector<std::string>& allowed) const;

  const std::string& source() const { return source_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string where(const std::string& key) const;

  std::string source_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
double parse_double(std::string_view text, const std::string& what);
std::int64_t parse_int(std::string_view text, const std::string& what);

}  // namespace qdfair

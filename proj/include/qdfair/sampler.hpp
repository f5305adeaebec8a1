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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qdfair/ingest.hpp"

namespace qdfair {

class Config;

/// Joint cells of the two protected attributes, in storage order.
enum class JointCell : std::size_t { kXaYa = 0, kXaYb = 1, kXbYa = 2, kXbYb = 3 };

inline constexpr std::size_t kJointCells = 4;

std::size_t joint_cell_of(const Dataset& d, std::size_t row);
const char* joint_cell_name(std::size_t cell);

struct CellTarget {
  std::size_t count = 0;
  double positive_rate = 0.0;
};

struct ScenarioSpec {
  enum class Mode { kCells, kStratified };

  std::string name;
  Mode mode = Mode::kCells;
  std::array<CellTarget, kJointCells> cells{};  // kCells
  std::size_t total = 0;                         // kStratified
  std::uint64_t seed = 1;

  void validate() const;

  /// Keys: name, seed, mode (cells|stratified), total, and for cells mode
  /// cell.xa_ya / cell.xa_yb / cell.xb_ya / cell.xb_yb = "<count> <rate>".
  static ScenarioSpec from_config(const Config& config);
  static ScenarioSpec load(const std::filesystem::path& path);

  /// Built-in scenarios: unbiased, male_biased, higher_male, cross_biased,
  /// adult_unbiased, adult_stratified.
  static ScenarioSpec builtin(const std::string& name);
  static std::vector<std::string> builtin_names();
};

struct GroupStats {
  std::string group;
  std::size_t cases = 0;
  std::size_t positives = 0;
  double rate() const {
    return cases ? static_cast<double>(positives) / static_cast<double>(cases)
                 : 0.0;
  }
};

struct SampleReport {
  std::array<GroupStats, 5> groups;  // All, X-A, X-B, Y-A, Y-B
  std::array<GroupStats, kJointCells> cells;

  const GroupStats& all() const { return groups[0]; }
  const GroupStats& xa() const { return groups[1]; }
  const GroupStats& xb() const { return groups[2]; }
  const GroupStats& ya() const { return groups[3]; }
  const GroupStats& yb() const { return groups[4]; }

  void print(std::ostream& out) const;
  void write_csv(std::ostream& out) const;
};

struct SampleResult {
  Dataset dataset;
  SampleReport report;
  std::vector<std::size_t> rows;  // indices into the source, ascending
};

SampleReport audit(const Dataset& dataset);

/// Draws, without replacement, the requested count of each joint cell with
/// round-half-up(count * rate) positives.
SampleResult build_scenario(const Dataset& source, const ScenarioSpec& spec);

/// Proportional allocation over the eight (joint cell, label) strata using
/// largest-remainder rounding.
SampleResult stratified_sample(const Dataset& source, std::size_t total,
                               std::uint64_t seed);

/// Dispatches on spec.mode.
SampleResult sample(const Dataset& source, const ScenarioSpec& spec);

}  // namespace qdfair

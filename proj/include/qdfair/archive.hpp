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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdfair/descriptors.hpp"
#include "qdfair/fitness.hpp"
#include "qdfair/mlp.hpp"

namespace qdfair {

struct GridSpec {
  int bins = 30;  // per dimension
  double lo = 0.0;
  double hi = 2.0;

  void validate() const;
  std::size_t cell_count() const { return static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Grid coordinates: i indexes ratio_x, j indexes ratio_y.
struct Cell {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Out-of-range descriptors fall into the edge bins.
Cell bin_index(const Descriptors& d, const GridSpec& grid);
bool is_clamped(const Descriptors& d, const GridSpec& grid);

struct Elite {
  Genome genome;
  double accuracy = 0.0;
  Descriptors descriptors;
  Cell cell;
};

struct InsertOutcome {
  enum class Kind { kNewCell, kImproved, kRejected };

  Kind kind = Kind::kRejected;
  double delta = 0.0;  // accuracy gain, > 0 only for kImproved

  bool added() const { return kind != Kind::kRejected; }
};

/// MAP-Elites grid: each cell holds the highest-accuracy genome seen there.
class Archive {
 public:
  explicit Archive(GridSpec grid = {}, std::optional<Architecture> arch = std::nullopt);

  InsertOutcome try_insert(const Genome& genome, double accuracy, const Descriptors& d);
  InsertOutcome try_insert(const Genome& genome, const Evaluation& e) {
    return try_insert(genome, e.accuracy, {e.ratio_x, e.ratio_y});
  }

  const Elite* find(Cell cell) const;
  /// Elites ordered by (i, j).
  std::vector<const Elite*> elites() const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Highest accuracy; ties go to the smaller deviation from (1, 1), then to
  /// the lower cell. Throws DataError on an empty archive.
  const Elite& best() const;
  /// Same ordering restricted to elites whose descriptors satisfy region.
  const Elite* best_in_region(const std::function<bool(const Descriptors&)>& region) const;

  const GridSpec& grid() const { return grid_; }
  const std::optional<Architecture>& architecture() const { return arch_; }

  /// Accepted insertions whose descriptors lay outside the grid range.
  std::size_t clamped_insertions() const { return clamped_insertions_; }

  std::string label_x = "ratio_x";
  std::string label_y = "ratio_y";

  friend bool operator==(const Archive& a, const Archive& b);

 private:
  friend Archive read_archive(std::istream& in, const std::string& source);

  std::size_t slot(Cell c) const {
    return static_cast<std::size_t>(c.i) * static_cast<std::size_t>(grid_.bins) + static_cast<std::size_t>(c.j);
  }

  GridSpec grid_;
  std::optional<Architecture> arch_;
  std::vector<std::optional<Elite>> cells_;
  std::size_t size_ = 0;
  std::size_t clamped_insertions_ = 0;
};

/// CSV archive file. Line 1 is a "#qdfair-archive" header of key=value cells
/// (grid, architecture, labels, counts); line 2 names the columns; then one
/// row per elite: i, j, ratio_x, ratio_y, accuracy, genome values.
void write_archive(const Archive& archive, std::ostream& out);
Archive read_archive(std::istream& in, const std::string& source = "<stream>");
void save_archive(const Archive& archive, const std::filesystem::path& path);
Archive load_archive(const std::filesystem::path& path);

}  // namespace qdfair

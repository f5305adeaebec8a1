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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace qdfair {

class Config;

struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(std::string_view name) const;  // throws if absent
  bool has_column(std::string_view name) const;
};

/// Parses comma-separated text with a header row. Fields may be wrapped in
/// double quotes; a doubled quote inside a quoted field is a literal quote.
RawTable parse_csv(std::string_view text);
RawTable load_csv(const std::filesystem::path& path);

/// Writes the header and the selected rows (all rows when rows is empty).
void write_csv(const RawTable& table, std::ostream& out,
               std::span<const std::size_t> rows = {});
void save_csv(const RawTable& table, const std::filesystem::path& path,
              std::span<const std::size_t> rows = {});

/// Splits the rows of a table into group A (predicate true) and group B.
struct GroupPredicate {
  enum class Op { kEquals, kNotEquals, kAtMost, kOneOf };

  std::string column;
  Op op = Op::kEquals;
  std::vector<std::string> values;  // kEquals/kNotEquals/kOneOf
  double threshold = 0.0;           // kAtMost

  /// "col == v", "col != v", "col <= 34" or "col in a|b|c".
  static GroupPredicate parse(std::string_view text);
  bool matches(std::string_view cell) const;
  std::string to_string() const;
};

struct SchemaSpec {
  GroupPredicate label;  // true means positive
  std::vector<std::string> label_negative;  // optional strict negative set
  std::vector<std::string> numeric_columns;
  std::vector<std::string> categorical_columns;
  GroupPredicate protected_x;  // group A (e.g. female) vs group B
  GroupPredicate protected_y;  // group A (e.g. young) vs group B
  std::string label_x = "ratio_x";  // display names for the two ratios
  std::string label_y = "ratio_y";
  int expected_features = 0;  // 0 = no expectation

  static SchemaSpec from_config(const Config& config);
  static SchemaSpec load(const std::filesystem::path& path);
  void validate(const RawTable& table) const;
};

/// Encoded numeric view of a table. Immutable once built.
struct Dataset {
  Eigen::MatrixXd features;  // n_cases x n_features
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> mask_xa;
  std::vector<std::uint8_t> mask_xb;
  std::vector<std::uint8_t> mask_ya;
  std::vector<std::uint8_t> mask_yb;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> source_rows;  // row of the originating RawTable
  std::string label_x = "ratio_x";
  std::string label_y = "ratio_y";

  std::size_t n_cases() const { return labels.size(); }
  std::size_t n_features() const {
    return static_cast<std::size_t>(features.cols());
  }

  /// Throws DataError when a structural invariant is violated.
  void validate() const;

  /// Rows in the given order; source_rows carries through.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Builds a dataset from arrays; group B masks are the complements.
  static Dataset from_arrays(Eigen::MatrixXd features,
                             std::vector<std::uint8_t> labels,
                             std::vector<std::uint8_t> mask_xa,
                             std::vector<std::uint8_t> mask_ya);
};

/// Dummy-encodes categorical columns (one column per observed value, sorted),
/// min-max scales numeric columns (constant columns become 0), and builds
/// group masks from the protected predicates.
Dataset encode(const RawTable& raw, const SchemaSpec& schema);

struct FeatureCountReport {
  bool pass = false;
  std::size_t actual = 0;
  std::size_t expected = 0;
  std::string message;
};

FeatureCountReport feature_count_check(const Dataset& dataset,
                                       std::size_t expected);

}  // namespace qdfair

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

#include "qdfair/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "qdfair/config.hpp"
#include "qdfair/error.hpp"

namespace qdfair {

std::size_t RawTable::column_index(std::string_view name) const {
  const auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end()) {
    throw ConfigError("column '" + std::string(name) + "' not in table");
  }
  return static_cast<std::size_t>(it - column_names.begin());
}

bool RawTable::has_column(std::string_view name) const {
  return std::find(column_names.begin(), column_names.end(), name) !=
         column_names.end();
}

namespace {

// Splits one logical record starting at pos. Returns false at end of input.
bool next_record(std::string_view text, std::size_t& pos,
                 std::vector<std::string>& fields, std::size_t record_no) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
      ++pos;
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started = false;
      ++pos;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      fields.push_back(std::move(field));
      return true;
    }
    field.push_back(c);
    field_started = true;
    ++pos;
  }
  if (quoted) {
    throw DataError("record " + std::to_string(record_no) +
                    ": unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return true;
}

bool needs_quotes(std::string_view cell) {
  return cell.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_cell(std::ostream& out, std::string_view cell) {
  if (!needs_quotes(cell)) {
    out << cell;
    return;
  }
  out << '"';
  for (char c : cell) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

RawTable parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  RawTable table;
  std::size_t pos = 0;
  std::vector<std::string> fields;
  if (!next_record(text, pos, fields, 0) ||
      (fields.size() == 1 && fields[0].empty())) {
    throw DataError("no header");
  }
  table.column_names = fields;
  std::size_t row_no = 0;
  while (next_record(text, pos, fields, row_no + 1)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.column_names.size()) {
      throw DataError("row " + std::to_string(row_no) + " has " +
                      std::to_string(fields.size()) + " cells, expected " +
                      std::to_string(table.column_names.size()));
    }
    table.rows.push_back(fields);
    ++row_no;
  }
  if (table.rows.empty()) throw DataError("no data rows");
  return table;
}

RawTable load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_csv(buffer.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_csv(const RawTable& table, std::ostream& out,
               std::span<const std::size_t> rows) {
  auto write_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << ',';
      write_cell(out, cells[c]);
    }
    out << '\n';
  };
  write_row(table.column_names);
  if (rows.empty()) {
    for (const auto& row : table.rows) write_row(row);
  } else {
    for (std::size_t r : rows) write_row(table.rows.at(r));
  }
}

void save_csv(const RawTable& table, const std::filesystem::path& path,
              std::span<const std::size_t> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(table, out, rows);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

GroupPredicate GroupPredicate::parse(std::string_view text) {
  struct Token {
    std::string_view spelling;
    Op op;
  };
  static constexpr Token kTokens[] = {{" == ", Op::kEquals},
                                      {" != ", Op::kNotEquals},
                                      {" <= ", Op::kAtMost},
                                      {" in ", Op::kOneOf}};
  for (const auto& token : kTokens) {
    const auto at = text.rfind(token.spelling);
    if (at == std::string_view::npos) continue;
    GroupPredicate p;
    p.column = trim(text.substr(0, at));
    p.op = token.op;
    const std::string rhs = trim(text.substr(at + token.spelling.size()));
    if (p.column.empty() || rhs.empty()) break;
    if (p.op == Op::kAtMost) {
      p.threshold = parse_double(rhs, "threshold of '" + p.column + "'");
    } else if (p.op == Op::kOneOf) {
      p.values = split(rhs, '|');
    } else {
      p.values = {rhs};
    }
    return p;
  }
  throw ConfigError("malformed predicate '" + std::string(text) +
                    "' (expected 'col == v', 'col != v', 'col <= x' or "
                    "'col in a|b')");
}

bool GroupPredicate::matches(std::string_view cell) const {
  switch (op) {
    case Op::kEquals:
      return cell == values.front();
    case Op::kNotEquals:
      return cell != values.front();
    case Op::kOneOf:
      return std::find(values.begin(), values.end(), cell) != values.end();
    case Op::kAtMost:
      return parse_double(cell, "column '" + column + "'") <= threshold;
  }
  return false;
}

std::string GroupPredicate::to_string() const {
  std::ostringstream out;
  switch (op) {
    case Op::kEquals:
      out << column << " == " << values.front();
      break;
    case Op::kNotEquals:
      out << column << " != " << values.front();
      break;
    case Op::kAtMost:
      out << column << " <= " << threshold;
      break;
    case Op::kOneOf:
      out << column << " in ";
      for (std::size_t i = 0; i < values.size(); ++i) {
        out << (i ? "|" : "") << values[i];
      }
      break;
  }
  return out.str();
}

SchemaSpec SchemaSpec::from_config(const Config& config) {
  config.reject_unknown({"label", "label_negative", "numeric", "categorical",
                         "protected_x", "protected_y", "label_x", "label_y",
                         "expected_features"});
  SchemaSpec schema;
  schema.label = GroupPredicate::parse(config.require("label"));
  schema.label_negative = config.get_list("label_negative");
  schema.numeric_columns = config.get_list("numeric");
  schema.categorical_columns = config.get_list("categorical");
  schema.protected_x = GroupPredicate::parse(config.require("protected_x"));
  schema.protected_y = GroupPredicate::parse(config.require("protected_y"));
  schema.label_x = config.get("label_x").value_or(schema.label_x);
  schema.label_y = config.get("label_y").value_or(schema.label_y);
  schema.expected_features =
      static_cast<int>(config.get_int("expected_features", 0));
  if (schema.numeric_columns.empty() && schema.categorical_columns.empty()) {
    throw ConfigError(config.source() + ": schema lists no feature columns");
  }
  for (const auto* p : {&schema.protected_x, &schema.protected_y}) {
    if (p->op == GroupPredicate::Op::kAtMost && !(p->threshold > 0)) {
      throw ConfigError(config.source() + ": age threshold must be > 0");
    }
  }
  return schema;
}

SchemaSpec SchemaSpec::load(const std::filesystem::path& path) {
  return from_config(Config::load(path));
}

void SchemaSpec::validate(const RawTable& table) const {
  std::set<std::string> seen;
  auto require_column = [&](const std::string& name, const char* role) {
    if (!table.has_column(name)) {
      throw ConfigError(std::string(role) + " column '" + name +
                        "' not in table");
    }
  };
  require_column(label.column, "label");
  require_column(protected_x.column, "protected_x");
  require_column(protected_y.column, "protected_y");
  for (const auto* list : {&numeric_columns, &categorical_columns}) {
    for (const auto& name : *list) {
      require_column(name, "feature");
      if (name == label.column) {
        throw ConfigError("label column '" + name + "' listed as a feature");
      }
      if (!seen.insert(name).second) {
        throw ConfigError("feature column '" + name + "' listed twice");
      }
    }
  }
}

void Dataset::validate() const {
  const std::size_t n = labels.size();
  if (n == 0) throw DataError("dataset has no cases");
  if (static_cast<std::size_t>(features.rows()) != n ||
      mask_xa.size() != n || mask_xb.size() != n || mask_ya.size() != n ||
      mask_yb.size() != n) {
    throw DataError("dataset arrays disagree on case count");
  }
  if (!features.allFinite()) throw DataError("non-finite feature value");
  std::size_t counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] > 1) throw DataError("label outside {0,1}");
    if ((mask_xa[i] != 0) == (mask_xb[i] != 0) ||
        (mask_ya[i] != 0) == (mask_yb[i] != 0)) {
      throw DataError("group masks are not a partition at case " +
                      std::to_string(i));
    }
    counts[0] += mask_xa[i];
    counts[1] += mask_xb[i];
    counts[2] += mask_ya[i];
    counts[3] += mask_yb[i];
  }
  static constexpr const char* kNames[] = {"X-A", "X-B", "Y-A", "Y-B"};
  for (int g = 0; g < 4; ++g) {
    if (counts[g] == 0) {
      throw DataError(std::string("group ") + kNames[g] + " is empty");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.feature_names = feature_names;
  out.label_x = label_x;
  out.label_y = label_y;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    out.features.row(static_cast<Eigen::Index>(k)) =
        features.row(static_cast<Eigen::Index>(r));
    out.labels.push_back(labels.at(r));
    out.mask_xa.push_back(mask_xa[r]);
    out.mask_xb.push_back(mask_xb[r]);
    out.mask_ya.push_back(mask_ya[r]);
    out.mask_yb.push_back(mask_yb[r]);
    out.source_rows.push_back(source_rows.empty() ? r : source_rows[r]);
  }
  return out;
}

Dataset Dataset::from_arrays(Eigen::MatrixXd features,
                             std::vector<std::uint8_t> labels,
                             std::vector<std::uint8_t> mask_xa,
                             std::vector<std::uint8_t> mask_ya) {
  Dataset d;
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.mask_xa = std::move(mask_xa);
  d.mask_ya = std::move(mask_ya);
  for (auto v : d.mask_xa) d.mask_xb.push_back(v ? 0 : 1);
  for (auto v : d.mask_ya) d.mask_yb.push_back(v ? 0 : 1);
  for (std::size_t i = 0; i < d.labels.size(); ++i) d.source_rows.push_back(i);
  for (Eigen::Index c = 0; c < d.features.cols(); ++c) {
    d.feature_names.push_back("f" + std::to_string(c));
  }
  d.validate();
  return d;
}

Dataset encode(const RawTable& raw, const SchemaSpec& schema) {
  schema.validate(raw);
  const std::size_t n = raw.rows.size();

  auto cell_at = [&](std::size_t row, std::size_t col) -> const std::string& {
    const std::string& cell = raw.rows[row][col];
    if (trim(cell).empty()) {
      throw DataError("row " + std::to_string(row) + ": missing value in '" +
                      raw.column_names[col] + "'");
    }
    return cell;
  };

  // Column plan: numeric columns first, then one dummy per category.
  struct NumericPlan {
    std::vector<double> values;
    double lo = 0, hi = 0;
  };
  std::vector<NumericPlan> numeric;
  for (const auto& name : schema.numeric_columns) {
    const std::size_t col = raw.column_index(name);
    NumericPlan plan;
    plan.values.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      const std::string& cell = cell_at(r, col);
      double v = 0.0;
      try {
        v = parse_double(cell, "column '" + name + "'");
      } catch (const ConfigError&) {
        throw DataError("row " + std::to_string(r) + ": unparseable number '" +
                        cell + "' in '" + name + "'");
      }
      plan.values.push_back(v);
    }
    const auto [lo, hi] =
        std::minmax_element(plan.values.begin(), plan.values.end());
    plan.lo = *lo;
    plan.hi = *hi;
    numeric.push_back(std::move(plan));
  }

  struct CategoricalPlan {
    std::size_t col;
    std::map<std::string, std::size_t> categories;  // value -> dummy offset
  };
  std::vector<CategoricalPlan> categorical;
  std::size_t n_features = numeric.size();
  for (const auto& name : schema.categorical_columns) {
    CategoricalPlan plan{raw.column_index(name), {}};
    for (std::size_t r = 0; r < n; ++r) plan.categories[cell_at(r, plan.col)];
    std::size_t offset = 0;
    for (auto& [value, index] : plan.categories) index = offset++;
    n_features += plan.categories.size();
    categorical.push_back(std::move(plan));
  }

  Dataset d;
  d.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n_features));
  d.label_x = schema.label_x;
  d.label_y = schema.label_y;
  for (std::size_t c = 0; c < numeric.size(); ++c) {
    d.feature_names.push_back(schema.numeric_columns[c]);
    const auto& plan = numeric[c];
    const double width = plan.hi - plan.lo;
    for (std::size_t r = 0; r < n; ++r) {
      d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          width > 0 ? (plan.values[r] - plan.lo) / width : 0.0;
    }
  }
  std::size_t base = numeric.size();
  for (std::size_t k = 0; k < categorical.size(); ++k) {
    const auto& plan = categorical[k];
    for (const auto& [value, offset] : plan.categories) {
      d.feature_names.push_back(schema.categorical_columns[k] + "=" + value);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t offset = plan.categories.at(raw.rows[r][plan.col]);
      d.features(static_cast<Eigen::Index>(r),
                 static_cast<Eigen::Index>(base + offset)) = 1.0;
    }
    base += plan.categories.size();
  }

  const std::size_t label_col = raw.column_index(schema.label.column);
  const std::size_t x_col = raw.column_index(schema.protected_x.column);
  const std::size_t y_col = raw.column_index(schema.protected_y.column);
  d.labels.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string& label = cell_at(r, label_col);
    const bool positive = schema.label.matches(label);
    if (!positive && !schema.label_negative.empty() &&
        std::find(schema.label_negative.begin(), schema.label_negative.end(),
                  label) == schema.label_negative.end()) {
      throw DataError("row " + std::to_string(r) + ": label '" + label +
                      "' is neither positive nor negative");
    }
    d.labels.push_back(positive ? 1 : 0);
    bool in_xa = false;
    bool in_ya = false;
    try {
      in_xa = schema.protected_x.matches(cell_at(r, x_col));
      in_ya = schema.protected_y.matches(cell_at(r, y_col));
    } catch (const ConfigError& e) {
      throw DataError("row " + std::to_string(r) + ": " + e.what());
    }
    d.mask_xa.push_back(in_xa ? 1 : 0);
    d.mask_xb.push_back(in_xa ? 0 : 1);
    d.mask_ya.push_back(in_ya ? 1 : 0);
    d.mask_yb.push_back(in_ya ? 0 : 1);
    d.source_rows.push_back(r);
  }
  auto require_nonempty = [&](const std::vector<std::uint8_t>& mask,
                              const GroupPredicate& p, const char* side) {
    if (std::find(mask.begin(), mask.end(), 1) == mask.end()) {
      throw DataError("protected attribute '" + p.to_string() +
                      "' produces an empty group " + side);
    }
  };
  require_nonempty(d.mask_xa, schema.protected_x, "A");
  require_nonempty(d.mask_xb, schema.protected_x, "B");
  require_nonempty(d.mask_ya, schema.protected_y, "A");
  require_nonempty(d.mask_yb, schema.protected_y, "B");
  d.validate();
  return d;
}

FeatureCountReport feature_count_check(const Dataset& dataset,
                                       std::size_t expected) {
  FeatureCountReport report;
  report.actual = dataset.n_features();
  report.expected = expected;
  report.pass = report.actual == expected;
  report.message = (report.pass ? "feature count ok: " : "feature count mismatch: ") +
                   std::to_string(report.actual) + " encoded, " +
                   std::to_string(expected) + " expected";
  return report;
}

}  // namespace qdfair

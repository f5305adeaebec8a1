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

#include "qdfair/archive.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "qdfair/config.hpp"
#include "qdfair/error.hpp"

namespace qdfair {

void GridSpec::validate() const {
  if (bins < 1) throw ConfigError("grid needs at least one bin per dimension");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("grid range needs finite lo < hi");
  }
}

namespace {

int bin_of(double value, const GridSpec& grid) {
  if (!std::isfinite(value)) throw DataError("non-finite descriptor");
  if (value <= grid.lo) return 0;
  if (value >= grid.hi) return grid.bins - 1;
  const int b = static_cast<int>(std::floor((value - grid.lo) * grid.bins / (grid.hi - grid.lo)));
  return std::min(b, grid.bins - 1);
}

// Strict weak "better than" used by best() and best_in_region().
bool better(const Elite& a, const Elite& b) {
  if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  const double da = deviation(a.descriptors);
  const double db = deviation(b.descriptors);
  if (da != db) return da < db;
  return a.cell < b.cell;
}

std::string number(double v) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, end);
}

}  // namespace

Cell bin_index(const Descriptors& d, const GridSpec& grid) {
  return {bin_of(d.ratio_x, grid), bin_of(d.ratio_y, grid)};
}

bool is_clamped(const Descriptors& d, const GridSpec& grid) {
  return d.ratio_x < grid.lo || d.ratio_x > grid.hi || d.ratio_y < grid.lo || d.ratio_y > grid.hi;
}

Archive::Archive(GridSpec grid, std::optional<Architecture> arch)
    : grid_(grid), arch_(std::move(arch)) {
  grid_.validate();
  if (arch_) arch_->validate();
  cells_.resize(grid_.cell_count());
}

InsertOutcome Archive::try_insert(const Genome& genome, double accuracy, const Descriptors& d) {
  if (!std::isfinite(accuracy)) throw DataError("non-finite accuracy");
  const Cell cell = bin_index(d, grid_);
  auto& slot_ref = cells_[slot(cell)];
  InsertOutcome outcome;
  if (!slot_ref) {
    outcome.kind = InsertOutcome::Kind::kNewCell;
    ++size_;
  } else if (accuracy > slot_ref->accuracy) {
    outcome.kind = InsertOutcome::Kind::kImproved;
    outcome.delta = accuracy - slot_ref->accuracy;
  } else {
    return outcome;
  }
  slot_ref = Elite{genome, accuracy, d, cell};
  if (is_clamped(d, grid_)) ++clamped_insertions_;
  return outcome;
}

const Elite* Archive::find(Cell cell) const {
  if (cell.i < 0 || cell.j < 0 || cell.i >= grid_.bins || cell.j >= grid_.bins) return nullptr;
  const auto& e = cells_[slot(cell)];
  return e ? &*e : nullptr;
}

std::vector<const Elite*> Archive::elites() const {
  std::vector<const Elite*> out;
  out.reserve(size_);
  for (const auto& e : cells_) {
    if (e) out.push_back(&*e);
  }
  return out;
}

const Elite& Archive::best() const {
  const Elite* found = best_in_region([](const Descriptors&) { return true; });
  if (!found) throw DataError("empty archive");
  return *found;
}

const Elite* Archive::best_in_region(const std::function<bool(const Descriptors&)>& region) const {
  const Elite* found = nullptr;
  for (const auto& e : cells_) {
    if (!e || !region(e->descriptors)) continue;
    if (!found || better(*e, *found)) found = &*e;
  }
  return found;
}

bool operator==(const Archive& a, const Archive& b) {
  if (!(a.grid_ == b.grid_) || a.arch_ != b.arch_ || a.size_ != b.size_ ||
      a.clamped_insertions_ != b.clamped_insertions_ || a.label_x != b.label_x ||
      a.label_y != b.label_y) {
    return false;
  }
  for (std::size_t s = 0; s < a.cells_.size(); ++s) {
    const auto& x = a.cells_[s];
    const auto& y = b.cells_[s];
    if (x.has_value() != y.has_value()) return false;
    if (!x) continue;
    if (x->accuracy != y->accuracy || !(x->descriptors == y->descriptors) ||
        x->cell != y->cell || x->genome.values.size() != y->genome.values.size() ||
        x->genome.values != y->genome.values) {
      return false;
    }
  }
  return true;
}

void write_archive(const Archive& archive, std::ostream& out) {
  const auto& g = archive.grid();
  std::string arch;
  double slope = 0.01;
  double threshold = 0.5;
  if (const auto& a = archive.architecture()) {
    for (std::size_t i = 0; i < a->layer_sizes.size(); ++i) {
      arch += (i ? " " : "") + std::to_string(a->layer_sizes[i]);
    }
    slope = a->leaky_slope;
    threshold = a->threshold;
  }
  out << "#qdfair-archive,version=1,bins=" << g.bins << ",lo=" << number(g.lo)
      << ",hi=" << number(g.hi) << ",arch=" << arch << ",leaky_slope=" << number(slope)
      << ",threshold=" << number(threshold) << ",label_x=" << archive.label_x
      << ",label_y=" << archive.label_y << ",elites=" << archive.size()
      << ",clamped=" << archive.clamped_insertions() << '\n';
  out << "i,j,ratio_x,ratio_y,accuracy,genome\n";
  for (const Elite* e : archive.elites()) {
    out << e->cell.i << ',' << e->cell.j << ',' << number(e->descriptors.ratio_x) << ','
        << number(e->descriptors.ratio_y) << ',' << number(e->accuracy);
    if (e->genome.size()) out << ',' << genome_to_csv_row(e->genome);
    out << '\n';
  }
}

Archive read_archive(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> DataError {
    return DataError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  ++line_no;
  if (!std::getline(in, line) || !line.starts_with("#qdfair-archive")) {
    throw fail("missing #qdfair-archive header");
  }
  std::map<std::string, std::string> header;
  const auto cells = split(line, ',');
  for (std::size_t k = 1; k < cells.size(); ++k) {
    const auto eq = cells[k].find('=');
    if (eq == std::string::npos) throw fail("malformed header cell '" + cells[k] + "'");
    header[cells[k].substr(0, eq)] = cells[k].substr(eq + 1);
  }
  auto field = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw fail(std::string("header lacks '") + key + "'");
    return it->second;
  };
  GridSpec grid;
  std::optional<Architecture> arch;
  std::size_t expected_elites = 0;
  std::size_t clamped = 0;
  try {
    if (field("version") != "1") throw fail("unsupported archive version " + field("version"));
    grid.bins = static_cast<int>(parse_int(field("bins"), "bins"));
    grid.lo = parse_double(field("lo"), "lo");
    grid.hi = parse_double(field("hi"), "hi");
    if (const std::string& a = field("arch"); !a.empty()) {
      Architecture parsed;
      for (const auto& part : split(a, ' ')) {
        parsed.layer_sizes.push_back(static_cast<int>(parse_int(part, "arch")));
      }
      parsed.leaky_slope = parse_double(field("leaky_slope"), "leaky_slope");
      parsed.threshold = parse_double(field("threshold"), "threshold");
      arch = parsed;
    }
    expected_elites = static_cast<std::size_t>(parse_int(field("elites"), "elites"));
    clamped = static_cast<std::size_t>(parse_int(field("clamped"), "clamped"));
  } catch (const ConfigError& e) {
    throw fail(e.what());
  }
  Archive archive(grid, arch);
  archive.label_x = field("label_x");
  archive.label_y = field("label_y");
  ++line_no;
  if (!std::getline(in, line) || !line.starts_with("i,j,ratio_x,ratio_y,accuracy")) {
    throw fail("missing column header");
  }
  std::optional<std::size_t> genome_len;
  if (arch) genome_len = genome_length(*arch);
  std::size_t read = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() < 5) throw fail("truncated elite row");
    Elite e;
    try {
      e.cell = {static_cast<int>(parse_int(parts[0], "i")), static_cast<int>(parse_int(parts[1], "j"))};
      e.descriptors = {parse_double(parts[2], "ratio_x"), parse_double(parts[3], "ratio_y")};
      e.accuracy = parse_double(parts[4], "accuracy");
      e.genome.values.resize(static_cast<Eigen::Index>(parts.size() - 5));
      for (std::size_t k = 5; k < parts.size(); ++k) {
        e.genome.values[static_cast<Eigen::Index>(k - 5)] = parse_double(parts[k], "genome value");
      }
    } catch (const ConfigError& err) {
      throw fail(err.what());
    }
    if (!genome_len) genome_len = e.genome.size();
    if (e.genome.size() != *genome_len) {
      throw fail("expected " + std::to_string(*genome_len) + " genome values, found " +
                 std::to_string(e.genome.size()));
    }
    if (!(bin_index(e.descriptors, grid) == e.cell)) throw fail("cell does not match descriptors");
    auto& slot_ref = archive.cells_[archive.slot(e.cell)];
    if (slot_ref) throw fail("duplicate cell");
    slot_ref = std::move(e);
    ++archive.size_;
    ++read;
  }
  if (read != expected_elites) {
    throw fail("expected " + std::to_string(expected_elites) + " elites, found " + std::to_string(read));
  }
  archive.clamped_insertions_ = clamped;
  return archive;
}

void save_archive(const Archive& archive, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_archive(archive, out);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Archive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_archive(in, path.string());
}

}  // namespace qdfair

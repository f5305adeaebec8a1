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

#include "qdfair/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "qdfair/config.hpp"
#include "qdfair/error.hpp"

namespace qdfair {

double deviation(double ratio_x, double ratio_y) {
  return std::hypot(ratio_x - 1.0, ratio_y - 1.0);
}

void FairZone::validate() const {
  if (!(lower > 0.0 && lower <= 1.0 && upper >= 1.0)) {
    throw ConfigError("fair zone needs 0 < lower <= 1 <= upper");
  }
}

bool FairZone::contains(const Descriptors& d) const {
  return lower <= d.ratio_x && d.ratio_x <= upper && lower <= d.ratio_y && d.ratio_y <= upper;
}

bool in_fair_zone(double ratio_x, double ratio_y, const FairZone& zone) {
  return zone.contains({ratio_x, ratio_y});
}

namespace {

std::string number(double v) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, end);
}

}  // namespace

std::optional<double> TradeoffReport::accuracy_gap() const {
  if (!best_fair) return std::nullopt;
  return best.accuracy - best_fair->accuracy;
}

std::optional<double> TradeoffReport::deviation_reduction() const {
  if (!best_fair) return std::nullopt;
  return best.deviation() - best_fair->deviation();
}

void TradeoffReport::print(std::ostream& out) const {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(4);
  const int w = 12;
  auto cell = [&](const std::optional<ModelSummary>& m, double ModelSummary::*field) {
    if (m) {
      out << std::setw(w) << (*m).*field;
    } else {
      out << std::setw(w) << "-";
    }
  };
  out << std::left << std::setw(w) << "" << std::right << std::setw(w) << "Best model" << std::setw(w)
      << "Best fair" << '\n';
  const std::optional<ModelSummary> best_opt = best;
  out << std::left << std::setw(w) << "Accuracy" << std::right;
  cell(best_opt, &ModelSummary::accuracy);
  cell(best_fair, &ModelSummary::accuracy);
  out << '\n' << std::left << std::setw(w) << label_x << std::right;
  cell(best_opt, &ModelSummary::ratio_x);
  cell(best_fair, &ModelSummary::ratio_x);
  out << '\n' << std::left << std::setw(w) << label_y << std::right;
  cell(best_opt, &ModelSummary::ratio_y);
  cell(best_fair, &ModelSummary::ratio_y);
  out << '\n' << std::left << std::setw(w) << "Deviation" << std::right << std::setw(w)
      << best.deviation();
  if (best_fair) {
    out << std::setw(w) << best_fair->deviation();
  } else {
    out << std::setw(w) << "-";
  }
  out << '\n';
  if (best_fair) {
    out << "Accuracy gap " << *accuracy_gap() << ", deviation reduction " << *deviation_reduction()
        << '\n';
  } else {
    out << "No elite inside the fair zone [" << zone.lower << ", " << zone.upper
        << "]; trade-off undefined\n";
  }
  if (clamped_insertions > 0) {
    out << "Note: " << clamped_insertions
        << " accepted insertions had descriptors outside the grid range and were clamped into "
           "edge bins\n";
  }
  out.flags(flags);
  out.precision(precision);
}

void TradeoffReport::write_csv(std::ostream& out) const {
  auto fair = [&](double ModelSummary::*field) {
    return best_fair ? number((*best_fair).*field) : std::string();
  };
  out << "metric,best,best_fair\n";
  out << "accuracy," << number(best.accuracy) << ',' << fair(&ModelSummary::accuracy) << '\n';
  out << "ratio_x," << number(best.ratio_x) << ',' << fair(&ModelSummary::ratio_x) << '\n';
  out << "ratio_y," << number(best.ratio_y) << ',' << fair(&ModelSummary::ratio_y) << '\n';
  out << "deviation," << number(best.deviation()) << ','
      << (best_fair ? number(best_fair->deviation()) : std::string()) << '\n';
}

TradeoffReport TradeoffReport::read_csv(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    return DataError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  ++line_no;
  if (!std::getline(in, line) || trim(line) != "metric,best,best_fair") {
    throw fail("expected header 'metric,best,best_fair'");
  }
  TradeoffReport report;
  ModelSummary fair;
  int fair_fields = 0;
  int seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3) throw fail("expected 3 cells");
    double ModelSummary::*field = nullptr;
    if (parts[0] == "accuracy") {
      field = &ModelSummary::accuracy;
    } else if (parts[0] == "ratio_x") {
      field = &ModelSummary::ratio_x;
    } else if (parts[0] == "ratio_y") {
      field = &ModelSummary::ratio_y;
    } else if (parts[0] == "deviation") {
      continue;
    } else {
      throw fail("unknown metric '" + parts[0] + "'");
    }
    try {
      report.best.*field = parse_double(parts[1], parts[0]);
      if (!parts[2].empty()) {
        fair.*field = parse_double(parts[2], parts[0]);
        ++fair_fields;
      }
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
    ++seen;
  }
  if (seen != 3) throw fail("report needs accuracy, ratio_x and ratio_y rows");
  if (fair_fields == 3) {
    report.best_fair = fair;
  } else if (fair_fields != 0) {
    throw fail("best_fair column is partially filled");
  }
  return report;
}

TradeoffReport TradeoffReport::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, path.string());
}

TradeoffReport tradeoff(const Archive& archive, const FairZone& zone) {
  zone.validate();
  TradeoffReport report;
  report.best = ModelSummary::of(archive.best());
  if (const Elite* fair = archive.best_in_region([&](const Descriptors& d) { return zone.contains(d); })) {
    report.best_fair = ModelSummary::of(*fair);
  }
  report.zone = zone;
  report.clamped_insertions = archive.clamped_insertions();
  report.label_x = archive.label_x;
  report.label_y = archive.label_y;
  return report;
}

HeatmapGrid heatmap_grid(const Archive& archive) {
  const auto bins = static_cast<std::size_t>(archive.grid().bins);
  HeatmapGrid grid(bins, std::vector<std::optional<double>>(bins));
  for (const Elite* e : archive.elites()) {
    grid[static_cast<std::size_t>(e->cell.j)][static_cast<std::size_t>(e->cell.i)] = e->accuracy;
  }
  return grid;
}

void write_heatmap_csv(const HeatmapGrid& grid, std::ostream& out) {
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (row[c]) out << number(*row[c]);
    }
    out << '\n';
  }
}

HeatmapGrid read_heatmap_csv(std::istream& in) {
  HeatmapGrid grid;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::optional<double>> row;
    for (const auto& cell : split(line, ',')) {
      row.push_back(cell.empty() ? std::nullopt : std::optional<double>(parse_double(cell, "heatmap")));
    }
    grid.push_back(std::move(row));
  }
  return grid;
}

Rgb ramp_color(double t) {
  static constexpr double kStops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 4.0;
  const int k = std::min(3, static_cast<int>(pos));
  const double f = pos - k;
  auto mix = [&](int ch) {
    return static_cast<unsigned char>(std::lround(kStops[k][ch] + f * (kStops[k + 1][ch] - kStops[k][ch])));
  };
  return {mix(0), mix(1), mix(2)};
}

void write_heatmap_ppm(const HeatmapGrid& grid, const GridSpec& spec, const FairZone& zone,
                       std::ostream& out, int cell_px) {
  const int bins = static_cast<int>(grid.size());
  const int size = bins * cell_px;
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& row : grid) {
    for (const auto& v : row) {
      if (v) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
    }
  }
  std::vector<Rgb> pixels(static_cast<std::size_t>(size) * static_cast<std::size_t>(size),
                          Rgb{255, 255, 255});
  for (int yb = 0; yb < bins; ++yb) {
    for (int xb = 0; xb < bins; ++xb) {
      const auto& v = grid[static_cast<std::size_t>(yb)][static_cast<std::size_t>(xb)];
      if (!v) continue;
      const Rgb color = ramp_color(hi > lo ? (*v - lo) / (hi - lo) : 0.5);
      const int top = (bins - 1 - yb) * cell_px;
      for (int py = top; py < top + cell_px; ++py) {
        for (int px = xb * cell_px; px < (xb + 1) * cell_px; ++px) {
          pixels[static_cast<std::size_t>(py) * size + px] = color;
        }
      }
    }
  }
  auto to_px = [&](double r) {
    const double t = (r - spec.lo) / (spec.hi - spec.lo);
    return std::clamp(static_cast<int>(std::lround(t * size)), 0, size - 1);
  };
  const int x0 = to_px(zone.lower);
  const int x1 = to_px(zone.upper);
  const int y0 = size - 1 - to_px(zone.upper);
  const int y1 = size - 1 - to_px(zone.lower);
  const Rgb red{255, 0, 0};
  for (int t = 0; t < 2; ++t) {
    for (int px = x0; px <= x1; ++px) {
      pixels[static_cast<std::size_t>(std::min(y0 + t, size - 1)) * size + px] = red;
      pixels[static_cast<std::size_t>(std::max(y1 - t, 0)) * size + px] = red;
    }
    for (int py = y0; py <= y1; ++py) {
      pixels[static_cast<std::size_t>(py) * size + std::min(x0 + t, size - 1)] = red;
      pixels[static_cast<std::size_t>(py) * size + std::max(x1 - t, 0)] = red;
    }
  }
  out << "P6\n" << size << ' ' << size << "\n255\n";
  for (const Rgb& p : pixels) {
    out.put(static_cast<char>(p.r)).put(static_cast<char>(p.g)).put(static_cast<char>(p.b));
  }
}

void heatmap_export(const Archive& archive, const std::filesystem::path& prefix, const FairZone& zone) {
  const HeatmapGrid grid = heatmap_grid(archive);
  const std::string base = prefix.string();
  {
    std::ofstream csv(base + ".csv", std::ios::binary);
    if (!csv) throw DataError("cannot write '" + base + ".csv'");
    write_heatmap_csv(grid, csv);
    if (!csv) throw DataError("write failed for '" + base + ".csv'");
  }
  std::ofstream ppm(base + ".ppm", std::ios::binary);
  if (!ppm) throw DataError("cannot write '" + base + ".ppm'");
  write_heatmap_ppm(grid, archive.grid(), zone, ppm);
  if (!ppm) throw DataError("write failed for '" + base + ".ppm'");
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson needs equal-length inputs");
  if (x.size() < 2) throw DataError("pearson needs at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y) || sxx == 0.0 || syy == 0.0) throw DataError("zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double tradeoff_correlation(std::span<const TradeoffReport> reports) {
  std::vector<double> gaps;
  std::vector<double> reductions;
  for (const auto& r : reports) {
    if (!r.best_fair) continue;
    gaps.push_back(*r.accuracy_gap());
    reductions.push_back(*r.deviation_reduction());
  }
  if (gaps.size() < 2) throw DataError("need at least 2 reports with a fair elite");
  return pearson(gaps, reductions);
}

}  // namespace qdfair

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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdfair/archive.hpp"
#include "qdfair/descriptors.hpp"

namespace qdfair {

struct ModelSummary {
  double accuracy = 0.0;
  double ratio_x = 0.0;
  double ratio_y = 0.0;

  double deviation() const { return qdfair::deviation(ratio_x, ratio_y); }
  static ModelSummary of(const Elite& e) {
    return {e.accuracy, e.descriptors.ratio_x, e.descriptors.ratio_y};
  }
};

/// Most accurate elite against the most accurate elite inside the fair zone.
struct TradeoffReport {
  ModelSummary best;
  std::optional<ModelSummary> best_fair;
  FairZone zone;
  std::size_t clamped_insertions = 0;
  std::string label_x = "ratio_x";
  std::string label_y = "ratio_y";

  std::optional<double> accuracy_gap() const;
  std::optional<double> deviation_reduction() const;

  /// Aligned table in the Best model / Best fair layout.
  void print(std::ostream& out) const;

  /// metric,best,best_fair rows: accuracy, ratio_x, ratio_y, deviation.
  /// best_fair cells are empty when no fair elite exists. Deviation is
  /// recomputed from the ratios on read.
  void write_csv(std::ostream& out) const;
  static TradeoffReport read_csv(std::istream& in, const std::string& source = "<stream>");
  static TradeoffReport load_csv(const std::filesystem::path& path);
};

TradeoffReport tradeoff(const Archive& archive, const FairZone& zone = {});

/// Best accuracy per cell; rows index ratio_y bins (ascending), columns
/// ratio_x bins.
using HeatmapGrid = std::vector<std::vector<std::optional<double>>>;

HeatmapGrid heatmap_grid(const Archive& archive);
void write_heatmap_csv(const HeatmapGrid& grid, std::ostream& out);
HeatmapGrid read_heatmap_csv(std::istream& in);

/// Binary PPM (P6). Each cell is a cell_px square; ratio_y increases upward.
/// Filled cells use a viridis-like ramp over [min, max] of the filled
/// accuracies, empty cells are white, and the fair zone is outlined in red.
void write_heatmap_ppm(const HeatmapGrid& grid, const GridSpec& spec, const FairZone& zone,
                       std::ostream& out, int cell_px = 16);

/// Writes prefix.csv and prefix.ppm.
void heatmap_export(const Archive& archive, const std::filesystem::path& prefix,
                    const FairZone& zone = {});

/// Ramp color for t in [0, 1]; luminance increases with t.
struct Rgb {
  unsigned char r, g, b;
};
Rgb ramp_color(double t);

double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation between accuracy_gap and deviation_reduction over
/// reports that have a fair elite.
double tradeoff_correlation(std::span<const TradeoffReport> reports);

}  // namespace qdfair

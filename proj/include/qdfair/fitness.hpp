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
#include <span>
#include <vector>

#include "qdfair/ingest.hpp"
#include "qdfair/mlp.hpp"

namespace qdfair {

inline constexpr double kDefaultEpsilon = 1e-9;

/// Accuracy of a classifier and the positive-prediction-rate ratios of the
/// two protected attributes.
struct Evaluation {
  double accuracy = 0.0;
  double ratio_x = 0.0;  // mean_xa / (mean_xb + epsilon)
  double ratio_y = 0.0;  // mean_ya / (mean_yb + epsilon)
  double mean_xa = 0.0;
  double mean_xb = 0.0;
  double mean_ya = 0.0;
  double mean_yb = 0.0;

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

/// Scores hard predictions against a dataset's labels and group masks.
Evaluation score_predictions(std::span<const std::uint8_t> predictions,
                             const Dataset& dataset,
                             double epsilon = kDefaultEpsilon);

/// One forward pass over the whole dataset, then score_predictions.
Evaluation evaluate(const Genome& genome, const Architecture& arch,
                    const Dataset& dataset, double epsilon = kDefaultEpsilon);

/// Evaluates every genome, spreading genomes over `workers` threads. The
/// output is in input order and does not depend on the worker count.
std::vector<Evaluation> evaluate_batch(std::span<const Genome> genomes,
                                       const Architecture& arch,
                                       const Dataset& dataset,
                                       double epsilon = kDefaultEpsilon,
                                       std::size_t workers = 1);

}  // namespace qdfair

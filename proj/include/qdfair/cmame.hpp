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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qdfair/archive.hpp"
#include "qdfair/emitter.hpp"
#include "qdfair/fitness.hpp"
#include "qdfair/ingest.hpp"

namespace qdfair {

class Config;

/// Problem-agnostic CMA-ME settings.
struct SearchConfig {
  std::size_t dimension = 0;
  std::size_t n_evaluations = 100000;
  std::size_t emitter_count = 5;
  double sigma0 = 0.5;
  std::uint64_t seed = 0;
  std::size_t patience = 5;
  std::optional<std::size_t> batch_size;
  std::optional<Eigen::VectorXd> initial_mean;  // default: zero vector

  void validate() const;
};

struct GenerationStats {
  std::size_t generation = 0;
  std::size_t evaluations = 0;
  std::size_t archive_size = 0;
  double best_accuracy = 0.0;
  std::size_t emitter = 0;
  bool restarted = false;
};

using BatchEvaluator = std::function<std::vector<Evaluation>(std::span<const Genome>)>;
using ProgressFn = std::function<void(const GenerationStats&)>;

std::vector<ImprovementEmitter> init_emitters(const SearchConfig& config);

/// Index of the emitter that has generated the fewest solutions; the lowest
/// index wins ties.
std::size_t select_emitter(std::span<const ImprovementEmitter> emitters);
std::size_t select_emitter(std::span<const std::size_t> solutions_generated);

/// Runs ask -> evaluate -> insert -> tell until exactly n_evaluations
/// candidates have been evaluated. A final partial batch is evaluated and
/// inserted but not told to its emitter. Insertions happen in candidate
/// order.
Archive search(const SearchConfig& config, const BatchEvaluator& evaluate, Archive archive,
               const ProgressFn& progress = {});

/// Classifier search over a dataset.
struct RunConfig {
  Architecture arch;
  std::size_t n_evaluations = 100000;
  std::size_t emitter_count = 5;
  double sigma0 = 0.5;
  std::uint64_t seed = 0;
  std::size_t patience = 5;
  GridSpec grid;
  double epsilon = kDefaultEpsilon;
  std::size_t workers = 1;

  SearchConfig search_config() const;
  void validate() const;

  /// Keys: arch, evals, emitters, sigma0, seed, patience, bins, range
  /// ("lo:hi"), epsilon, workers. Missing keys keep their defaults.
  static RunConfig from_config(const Config& config, const RunConfig& defaults);
  static RunConfig from_config(const Config& config);
};

Archive run(const RunConfig& config, const Dataset& dataset, const ProgressFn& progress = {});

}  // namespace qdfair

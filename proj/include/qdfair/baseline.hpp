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
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qdfair/ingest.hpp"
#include "qdfair/mlp.hpp"
#include "qdfair/rng.hpp"

namespace qdfair {

/// Full-batch gradient descent on mean binary cross-entropy.
struct TrainConfig {
  enum class Init { kGlorot, kZeros };

  double learning_rate = 0.05;
  std::size_t epochs = 500;  // 0 evaluates the initial weights
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  Init init = Init::kGlorot;

  void validate() const;
};

/// k disjoint, exhaustive, ascending index sets; each label class is dealt
/// round-robin after a seeded shuffle, so per-fold class counts differ by at
/// most one.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& dataset, std::size_t k,
                                                       std::uint64_t seed);

/// Glorot-uniform weights (r = sqrt(6 / (fan_in + fan_out))) and zero biases,
/// or all zeros.
Genome initial_genome(const Architecture& arch, TrainConfig::Init init, Rng& rng);

struct LossGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // same layout as the genome
};

LossGradient loss_and_gradient(const Genome& genome, const Architecture& arch,
                               const Eigen::MatrixXd& features, std::span<const std::uint8_t> labels);

/// Runs `epochs` gradient steps. Throws DataError naming the epoch if the
/// loss stops being finite. loss_history, if given, receives the loss before
/// every step.
Genome fit(Genome genome, const Architecture& arch, const Eigen::MatrixXd& features,
           std::span<const std::uint8_t> labels, double learning_rate, std::size_t epochs,
           std::vector<double>* loss_history = nullptr);

struct TrainResult {
  Genome genome;  // retrained on the whole dataset
  double cv_accuracy = 0.0;
  std::vector<double> fold_accuracies;
};

TrainResult train(const Dataset& dataset, const Architecture& arch, const TrainConfig& config);

}  // namespace qdfair

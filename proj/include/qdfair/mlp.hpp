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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace qdfair {

/// Feed-forward binary classifier shape: leaky-ReLU hidden layers and a
/// single sigmoid output unit.
struct Architecture {
  std::vector<int> layer_sizes;  // [n_in, h1, ..., hk, 1]
  double leaky_slope = 0.01;
  double threshold = 0.5;  // predict 1 iff probability > threshold

  std::size_t n_inputs() const { return static_cast<std::size_t>(layer_sizes.front()); }
  void validate() const;
  std::string to_string() const;  // "14,35,15,1"

  static Architecture parse(std::string_view text);

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Flat parameter vector. Layout, layer by layer: the (out x in) weight
/// matrix in row-major order, then the out biases.
struct Genome {
  Eigen::VectorXd values;

  Genome() = default;
  explicit Genome(Eigen::VectorXd v) : values(std::move(v)) {}

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }

  static Genome zeros(std::size_t n) { return Genome(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))); }
};

std::size_t genome_length(const Architecture& arch);

inline double leaky_relu(double z, double slope) { return z >= 0.0 ? z : slope * z; }

/// Logistic function kept strictly inside (0, 1).
double sigmoid(double z);

struct ForwardResult {
  Eigen::VectorXd probabilities;
  std::vector<std::uint8_t> predictions;
};

/// Vectorized forward pass over the rows of features.
ForwardResult forward(const Genome& genome, const Architecture& arch,
                      const Eigen::MatrixXd& features);

/// Shortest round-trip decimal text of each value, comma separated.
std::string genome_to_csv_row(const Genome& genome);
Genome genome_from_csv_row(std::string_view row);

void save_genome(const Genome& genome, const Architecture& arch,
                 const std::filesystem::path& path);
/// Reads a file written by save_genome; returns the stored architecture too.
Genome load_genome(const std::filesystem::path& path, Architecture* arch = nullptr);

}  // namespace qdfair

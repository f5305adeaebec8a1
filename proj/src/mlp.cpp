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

#include "qdfair/mlp.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qdfair/config.hpp"
#include "qdfair/error.hpp"

namespace qdfair {

void Architecture::validate() const {
  if (layer_sizes.size() < 2) {
    throw ConfigError("architecture needs at least an input and an output layer");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw ConfigError("architecture layer sizes must be >= 1");
  }
  if (layer_sizes.back() != 1) {
    throw ConfigError("architecture must end in a single output unit");
  }
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
    throw ConfigError("leaky slope must be in (0,1)");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("decision threshold must be in (0,1)");
  }
}

std::string Architecture::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(layer_sizes[i]);
  }
  return out;
}

Architecture Architecture::parse(std::string_view text) {
  Architecture arch;
  for (const auto& part : split(text, ',')) {
    const auto v = parse_int(part, "architecture");
    if (v < 1 || v > std::numeric_limits<int>::max()) {
      throw ConfigError("architecture layer sizes must be >= 1");
    }
    arch.layer_sizes.push_back(static_cast<int>(v));
  }
  arch.validate();
  return arch;
}

std::size_t genome_length(const Architecture& arch) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(arch.layer_sizes[l]);
    const auto out = static_cast<std::size_t>(arch.layer_sizes[l + 1]);
    total += in * out + out;
  }
  return total;
}

double sigmoid(double z) {
  double p = 0.0;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  constexpr double kLo = std::numeric_limits<double>::min();
  constexpr double kHi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return p < kLo ? kLo : (p > kHi ? kHi : p);
}

ForwardResult forward(const Genome& genome, const Architecture& arch,
                      const Eigen::MatrixXd& features) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  if (genome.size() != genome_length(arch)) {
    throw DataError("genome has " + std::to_string(genome.size()) +
                    " values, architecture " + arch.to_string() + " needs " +
                    std::to_string(genome_length(arch)));
  }
  if (static_cast<std::size_t>(features.cols()) != arch.n_inputs()) {
    throw DataError("features have " + std::to_string(features.cols()) +
                    " columns, architecture expects " +
                    std::to_string(arch.n_inputs()));
  }
  const double* cursor = genome.values.data();
  Eigen::MatrixXd activation = features;
  const std::size_t layers = arch.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const Eigen::Index in = arch.layer_sizes[l];
    const Eigen::Index out = arch.layer_sizes[l + 1];
    Eigen::Map<const RowMajor> weights(cursor, out, in);
    cursor += out * in;
    Eigen::Map<const Eigen::RowVectorXd> bias(cursor, out);
    cursor += out;
    Eigen::MatrixXd z = activation * weights.transpose();
    z.rowwise() += bias;
    if (l + 1 < layers) {
      const double slope = arch.leaky_slope;
      activation = z.cwiseMax(0.0) + slope * z.cwiseMin(0.0);
    } else {
      activation = std::move(z);
    }
  }
  ForwardResult result;
  const Eigen::Index n = features.rows();
  result.probabilities.resize(n);
  result.predictions.resize(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const double p = sigmoid(activation(r, 0));
    result.probabilities[r] = p;
    result.predictions[static_cast<std::size_t>(r)] = p > arch.threshold ? 1 : 0;
  }
  return result;
}

std::string genome_to_csv_row(const Genome& genome) {
  std::string out;
  char buffer[32];
  for (Eigen::Index i = 0; i < genome.values.size(); ++i) {
    if (i) out += ',';
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, genome.values[i]);
    out.append(buffer, end);
  }
  return out;
}

Genome genome_from_csv_row(std::string_view row) {
  const auto parts = split(row, ',');
  Eigen::VectorXd values(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    try {
      values[static_cast<Eigen::Index>(i)] = parse_double(parts[i], "genome value");
    } catch (const ConfigError& e) {
      throw DataError(std::string(e.what()) + " at position " + std::to_string(i));
    }
  }
  return Genome(std::move(values));
}

void save_genome(const Genome& genome, const Architecture& arch,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "#genome,arch=" << arch.to_string() << '\n' << genome_to_csv_row(genome) << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Genome load_genome(const std::filesystem::path& path, Architecture* arch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string header;
  std::string row;
  if (!std::getline(in, header) || !header.starts_with("#genome,arch=")) {
    throw DataError(path.string() + ":1: missing genome header");
  }
  if (!std::getline(in, row)) throw DataError(path.string() + ":2: missing genome row");
  Architecture parsed = Architecture::parse(header.substr(std::string("#genome,arch=").size()));
  Genome genome = genome_from_csv_row(row);
  if (genome.size() != genome_length(parsed)) {
    throw DataError(path.string() + ":2: genome length does not match architecture");
  }
  if (arch) *arch = parsed;
  return genome;
}

}  // namespace qdfair

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

#include "qdfair/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "qdfair/error.hpp"
#include "qdfair/fitness.hpp"

namespace qdfair {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be > 0");
  }
  if (folds < 2) throw ConfigError("folds must be >= 2");
}

std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& dataset, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw ConfigError("folds must be >= 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < dataset.n_cases(); ++i) by_class[dataset.labels[i]].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < k) {
      throw ConfigError("k = " + std::to_string(k) + " too large: label " + std::to_string(c) +
                        " has only " + std::to_string(by_class[c].size()) + " cases");
    }
  }
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t offset = 0;
  for (int c = 0; c < 2; ++c) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(std::span<std::size_t>(by_class[c]));
    for (std::size_t p = 0; p < by_class[c].size(); ++p) {
      folds[(offset + p) % k].push_back(by_class[c][p]);
    }
    offset = (offset + by_class[c].size()) % k;
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

Genome initial_genome(const Architecture& arch, TrainConfig::Init init, Rng& rng) {
  Genome g = Genome::zeros(genome_length(arch));
  if (init == TrainConfig::Init::kZeros) return g;
  Eigen::Index cursor = 0;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    const int in = arch.layer_sizes[l];
    const int out = arch.layer_sizes[l + 1];
    const double r = std::sqrt(6.0 / static_cast<double>(in + out));
    for (int w = 0; w < in * out; ++w) g.values[cursor++] = rng.uniform(-r, r);
    cursor += out;  // biases stay zero
  }
  return g;
}

LossGradient loss_and_gradient(const Genome& genome, const Architecture& arch,
                               const Eigen::MatrixXd& features, std::span<const std::uint8_t> labels) {
  if (genome.size() != genome_length(arch)) throw DataError("genome does not match architecture");
  if (static_cast<std::size_t>(features.cols()) != arch.n_inputs() ||
      static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("feature/label shape mismatch");
  }
  const std::size_t layers = arch.layer_sizes.size() - 1;
  const double n = static_cast<double>(labels.size());
  std::vector<Eigen::MatrixXd> acts{features};  // input of each layer
  std::vector<Eigen::MatrixXd> pre;             // pre-activation of each layer
  std::vector<Eigen::Index> offsets;
  Eigen::Index cursor = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const Eigen::Index in = arch.layer_sizes[l];
    const Eigen::Index out = arch.layer_sizes[l + 1];
    offsets.push_back(cursor);
    Eigen::Map<const RowMajor> w(genome.values.data() + cursor, out, in);
    Eigen::Map<const Eigen::RowVectorXd> b(genome.values.data() + cursor + out * in, out);
    cursor += out * in + out;
    Eigen::MatrixXd z = acts.back() * w.transpose();
    z.rowwise() += b;
    pre.push_back(z);
    if (l + 1 < layers) {
      const double slope = arch.leaky_slope;
      acts.push_back(z.unaryExpr([slope](double v) { return leaky_relu(v, slope); }));
    }
  }
  LossGradient result;
  result.gradient = Eigen::VectorXd::Zero(genome.values.size());
  const Eigen::MatrixXd& logits = pre.back();
  Eigen::MatrixXd delta(logits.rows(), 1);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double z = logits(r, 0);
    const double y = labels[static_cast<std::size_t>(r)];
    loss += softplus(z) - y * z;
    delta(r, 0) = (logistic(z) - y) / n;
  }
  result.loss = loss / n;
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::Index in = arch.layer_sizes[l];
    const Eigen::Index out = arch.layer_sizes[l + 1];
    Eigen::Map<RowMajor> grad_w(result.gradient.data() + offsets[l], out, in);
    Eigen::Map<Eigen::RowVectorXd> grad_b(result.gradient.data() + offsets[l] + out * in, out);
    grad_w.noalias() = delta.transpose() * acts[l];
    grad_b = delta.colwise().sum();
    if (l == 0) break;
    Eigen::Map<const RowMajor> w(genome.values.data() + offsets[l], out, in);
    Eigen::MatrixXd upstream = delta * w;
    const Eigen::MatrixXd& z_prev = pre[l - 1];
    const double slope = arch.leaky_slope;
    delta = upstream.cwiseProduct(z_prev.unaryExpr([slope](double v) { return v >= 0.0 ? 1.0 : slope; }));
  }
  return result;
}

Genome fit(Genome genome, const Architecture& arch, const Eigen::MatrixXd& features,
           std::span<const std::uint8_t> labels, double learning_rate, std::size_t epochs,
           std::vector<double>* loss_history) {
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const LossGradient lg = loss_and_gradient(genome, arch, features, labels);
    if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
      throw DataError("training diverged at epoch " + std::to_string(epoch));
    }
    if (loss_history) loss_history->push_back(lg.loss);
    genome.values -= learning_rate * lg.gradient;
  }
  if (!genome.values.allFinite()) {
    throw DataError("training diverged at epoch " + std::to_string(epochs));
  }
  return genome;
}

TrainResult train(const Dataset& dataset, const Architecture& arch, const TrainConfig& config) {
  config.validate();
  arch.validate();
  dataset.validate();
  if (dataset.n_features() != arch.n_inputs()) {
    throw ConfigError("architecture expects " + std::to_string(arch.n_inputs()) +
                      " inputs but the dataset has " + std::to_string(dataset.n_features()));
  }
  const auto folds = stratified_folds(dataset, config.folds, config.seed);
  TrainResult result;
  double total = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::vector<std::uint8_t> train_labels;
    for (std::size_t r : train_rows) train_labels.push_back(dataset.labels[r]);
    Rng rng(derive_seed(config.seed, 1000 + f));
    Genome g = fit(initial_genome(arch, config.init, rng), arch, rows_of(dataset.features, train_rows),
                   train_labels, config.learning_rate, config.epochs);
    const ForwardResult held_out = forward(g, arch, rows_of(dataset.features, folds[f]));
    std::size_t correct = 0;
    for (std::size_t k = 0; k < folds[f].size(); ++k) {
      correct += held_out.predictions[k] == dataset.labels[folds[f][k]];
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(folds[f].size());
    result.fold_accuracies.push_back(acc);
    total += acc;
  }
  result.cv_accuracy = total / static_cast<double>(folds.size());
  Rng rng(derive_seed(config.seed, 1000 + folds.size()));
  result.genome = fit(initial_genome(arch, config.init, rng), arch, dataset.features, dataset.labels,
                      config.learning_rate, config.epochs);
  return result;
}

}  // namespace qdfair

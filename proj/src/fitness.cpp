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

#include "qdfair/fitness.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "qdfair/error.hpp"

namespace qdfair {

Evaluation score_predictions(std::span<const std::uint8_t> predictions,
                             const Dataset& dataset, double epsilon) {
  const std::size_t n = dataset.n_cases();
  if (predictions.size() != n) {
    throw DataError("prediction count does not match the dataset");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  std::size_t correct = 0;
  std::size_t positives[4] = {0, 0, 0, 0};
  std::size_t sizes[4] = {0, 0, 0, 0};
  const std::uint8_t* masks[4] = {dataset.mask_xa.data(), dataset.mask_xb.data(),
                                  dataset.mask_ya.data(), dataset.mask_yb.data()};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t p = predictions[i];
    correct += p == dataset.labels[i];
    for (int g = 0; g < 4; ++g) {
      sizes[g] += masks[g][i];
      positives[g] += masks[g][i] & p;
    }
  }
  auto mean = [&](int g) {
    return sizes[g] ? static_cast<double>(positives[g]) / static_cast<double>(sizes[g]) : 0.0;
  };
  Evaluation e;
  e.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  e.mean_xa = mean(0);
  e.mean_xb = mean(1);
  e.mean_ya = mean(2);
  e.mean_yb = mean(3);
  e.ratio_x = e.mean_xa / (e.mean_xb + epsilon);
  e.ratio_y = e.mean_ya / (e.mean_yb + epsilon);
  return e;
}

Evaluation evaluate(const Genome& genome, const Architecture& arch,
                    const Dataset& dataset, double epsilon) {
  const ForwardResult out = forward(genome, arch, dataset.features);
  return score_predictions(out.predictions, dataset, epsilon);
}

std::vector<Evaluation> evaluate_batch(std::span<const Genome> genomes,
                                       const Architecture& arch,
                                       const Dataset& dataset, double epsilon,
                                       std::size_t workers) {
  std::vector<Evaluation> results(genomes.size());
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(genomes.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < genomes.size(); ++i) {
      results[i] = evaluate(genomes[i], arch, dataset, epsilon);
    }
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < genomes.size(); i += workers) {
          results[i] = evaluate(genomes[i], arch, dataset, epsilon);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace qdfair

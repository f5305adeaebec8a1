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

#include "qdfair/cmame.hpp"

#include <algorithm>

#include "qdfair/config.hpp"
#include "qdfair/error.hpp"
#include "qdfair/rng.hpp"

namespace qdfair {

void SearchConfig::validate() const {
  if (dimension == 0) throw ConfigError("search dimension must be >= 1");
  if (emitter_count < 1) throw ConfigError("emitter count must be >= 1");
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be > 0");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (initial_mean && static_cast<std::size_t>(initial_mean->size()) != dimension) {
    throw ConfigError("initial mean length does not match the dimension");
  }
  const auto lambda = CmaParameters::defaults(dimension, batch_size).lambda;
  if (n_evaluations < lambda) {
    throw ConfigError("evals must be >= batch size (" + std::to_string(lambda) + ")");
  }
}

std::vector<ImprovementEmitter> init_emitters(const SearchConfig& config) {
  config.validate();
  EmitterOptions options;
  options.sigma0 = config.sigma0;
  options.patience = config.patience;
  options.batch_size = config.batch_size;
  const Eigen::VectorXd mean = config.initial_mean.value_or(
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.dimension)));
  std::vector<ImprovementEmitter> emitters;
  emitters.reserve(config.emitter_count);
  for (std::size_t k = 0; k < config.emitter_count; ++k) {
    emitters.emplace_back(mean, options, derive_seed(config.seed, k));
  }
  return emitters;
}

std::size_t select_emitter(std::span<const std::size_t> solutions_generated) {
  if (solutions_generated.empty()) throw ConfigError("no emitters to select from");
  return static_cast<std::size_t>(
      std::min_element(solutions_generated.begin(), solutions_generated.end()) -
      solutions_generated.begin());
}

std::size_t select_emitter(std::span<const ImprovementEmitter> emitters) {
  std::vector<std::size_t> counts;
  counts.reserve(emitters.size());
  for (const auto& e : emitters) counts.push_back(e.solutions_generated());
  return select_emitter(counts);
}

Archive search(const SearchConfig& config, const BatchEvaluator& evaluate, Archive archive,
               const ProgressFn& progress) {
  auto emitters = init_emitters(config);
  std::size_t evaluations = 0;
  std::size_t generation = 0;
  std::vector<InsertOutcome> outcomes;
  std::vector<double> accuracies;
  while (evaluations < config.n_evaluations) {
    const std::size_t k = select_emitter(emitters);
    auto& emitter = emitters[k];
    const std::vector<Genome> candidates = emitter.ask();
    const std::size_t take = std::min(candidates.size(), config.n_evaluations - evaluations);
    const std::span<const Genome> batch(candidates.data(), take);
    const std::vector<Evaluation> results = evaluate(batch);
    if (results.size() != take) throw DataError("evaluator returned the wrong number of results");
    outcomes.clear();
    accuracies.clear();
    for (std::size_t c = 0; c < take; ++c) {
      outcomes.push_back(archive.try_insert(candidates[c], results[c]));
      accuracies.push_back(results[c].accuracy);
    }
    evaluations += take;
    bool restarted = false;
    if (take == candidates.size()) {
      restarted = emitter.tell(candidates, outcomes, accuracies, archive);
    }
    ++generation;
    if (progress) {
      GenerationStats stats;
      stats.generation = generation;
      stats.evaluations = evaluations;
      stats.archive_size = archive.size();
      stats.best_accuracy = archive.empty() ? 0.0 : archive.best().accuracy;
      stats.emitter = k;
      stats.restarted = restarted;
      progress(stats);
    }
  }
  return archive;
}

SearchConfig RunConfig::search_config() const {
  SearchConfig s;
  s.dimension = genome_length(arch);
  s.n_evaluations = n_evaluations;
  s.emitter_count = emitter_count;
  s.sigma0 = sigma0;
  s.seed = seed;
  s.patience = patience;
  return s;
}

void RunConfig::validate() const {
  arch.validate();
  grid.validate();
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  search_config().validate();
}

RunConfig RunConfig::from_config(const Config& config) { return from_config(config, RunConfig{}); }

RunConfig RunConfig::from_config(const Config& config, const RunConfig& defaults) {
  RunConfig c = defaults;
  if (const auto v = config.get("arch")) c.arch = Architecture::parse(*v);
  auto non_negative = [&](const char* key, std::size_t fallback) {
    const auto v = config.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw ConfigError(config.source() + ": '" + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
  };
  c.n_evaluations = non_negative("evals", c.n_evaluations);
  c.emitter_count = non_negative("emitters", c.emitter_count);
  c.patience = non_negative("patience", c.patience);
  c.workers = non_negative("workers", c.workers);
  c.sigma0 = config.get_double("sigma0", c.sigma0);
  c.seed = config.get_u64("seed", c.seed);
  c.epsilon = config.get_double("epsilon", c.epsilon);
  c.grid.bins = static_cast<int>(config.get_int("bins", c.grid.bins));
  if (const auto v = config.get("range")) {
    const auto parts = split(*v, ':');
    if (parts.size() != 2) throw ConfigError(config.source() + ": range must be 'lo:hi'");
    c.grid.lo = parse_double(parts[0], "range lo");
    c.grid.hi = parse_double(parts[1], "range hi");
  }
  return c;
}

Archive run(const RunConfig& config, const Dataset& dataset, const ProgressFn& progress) {
  config.validate();
  dataset.validate();
  if (dataset.n_features() != config.arch.n_inputs()) {
    throw ConfigError("architecture expects " + std::to_string(config.arch.n_inputs()) +
                      " inputs but the dataset has " + std::to_string(dataset.n_features()) +
                      " features");
  }
  Archive archive(config.grid, config.arch);
  archive.label_x = dataset.label_x;
  archive.label_y = dataset.label_y;
  const BatchEvaluator evaluator = [&](std::span<const Genome> genomes) {
    return evaluate_batch(genomes, config.arch, dataset, config.epsilon, config.workers);
  };
  return search(config.search_config(), evaluator, std::move(archive), progress);
}

}  // namespace qdfair

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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qdfair/archive.hpp"
#include "qdfair/mlp.hpp"
#include "qdfair/rng.hpp"

namespace qdfair {

/// Default CMA-ES strategy parameters for a given search dimension
/// (Hansen's tutorial settings: log-rank weights, cumulative step-size
/// adaptation, rank-one plus rank-mu covariance update).
struct CmaParameters {
  std::size_t dim = 0;
  std::size_t lambda = 0;  // batch size: 4 + floor(3 ln dim)
  std::size_t mu = 0;      // parents: floor(lambda / 2)
  Eigen::VectorXd weights;  // positive, decreasing, sum 1
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;  // E||N(0, I)||
  std::size_t refactor_gap = 1;  // generations between Cholesky refreshes

  static CmaParameters defaults(std::size_t dim, std::optional<std::size_t> lambda = std::nullopt);
};

struct EmitterOptions {
  double sigma0 = 0.5;
  std::size_t patience = 5;  // batches without any archive gain before restart
  double sigma_max_factor = 1e6;
  std::optional<std::size_t> batch_size;  // overrides the default lambda
};

/// Orders candidate indices for recombination: new cells first (by accuracy),
/// then improvements (by gain), then rejected candidates (by accuracy).
/// Remaining ties keep candidate order.
std::vector<std::size_t> improvement_ranking(std::span<const InsertOutcome> outcomes,
                                             std::span<const double> accuracies);

/// A CMA-ES instance driven by archive improvement rather than raw fitness.
///
/// Sampling uses a Cholesky factor L of C (x = m + sigma * L z), refreshed
/// every refactor_gap generations; the step-size path accumulates the z
/// vectors, which are whitened under the factor in use.
class ImprovementEmitter {
 public:
  ImprovementEmitter(Eigen::VectorXd initial_mean, EmitterOptions options, std::uint64_t seed);

  /// lambda candidates; solutions_generated grows by lambda.
  std::vector<Genome> ask();

  /// Feeds back the outcome of the last ask(). Returns true if the emitter
  /// restarted.
  bool tell(std::span<const Genome> candidates, std::span<const InsertOutcome> outcomes,
            std::span<const double> accuracies, const Archive& archive);

  /// Resets at a uniformly chosen elite (or the initial mean if the archive
  /// is empty) with sigma = sigma0, C = I and zero paths.
  void restart(const Archive& archive);

  const CmaParameters& parameters() const { return params_; }
  const EmitterOptions& options() const { return options_; }
  std::size_t batch_size() const { return params_.lambda; }
  std::size_t parent_count() const { return params_.mu; }
  const Eigen::VectorXd& mean() const { return mean_; }
  double step_size() const { return sigma_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const Eigen::VectorXd& path_sigma() const { return path_sigma_; }
  const Eigen::VectorXd& path_c() const { return path_c_; }
  std::size_t generation() const { return generation_; }
  std::size_t solutions_generated() const { return solutions_generated_; }
  std::size_t restarts() const { return restarts_; }
  std::size_t stale_batches() const { return stale_batches_; }

  /// Test hook: the parents (candidate indices) chosen by the last tell.
  const std::vector<std::size_t>& last_parents() const { return last_parents_; }

 private:
  void reset_state(Eigen::VectorXd mean);
  bool refactor();

  CmaParameters params_;
  EmitterOptions options_;
  Rng rng_;
  Eigen::VectorXd initial_mean_;

  Eigen::VectorXd mean_;
  double sigma_ = 0.0;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;  // lower Cholesky factor of cov_
  Eigen::VectorXd path_sigma_;
  Eigen::VectorXd path_c_;
  std::size_t generation_ = 0;
  std::size_t last_refactor_ = 0;
  std::size_t solutions_generated_ = 0;
  std::size_t restarts_ = 0;
  std::size_t stale_batches_ = 0;

  Eigen::MatrixXd z_;  // dim x lambda, from the last ask
  Eigen::MatrixXd y_;  // L z
  bool pending_ = false;
  std::vector<std::size_t> last_parents_;
};

}  // namespace qdfair

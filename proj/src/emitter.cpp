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

#include "qdfair/emitter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "qdfair/error.hpp"

namespace qdfair {

CmaParameters CmaParameters::defaults(std::size_t dim, std::optional<std::size_t> lambda) {
  if (dim == 0) throw ConfigError("search dimension must be >= 1");
  CmaParameters p;
  p.dim = dim;
  const double n = static_cast<double>(dim);
  p.lambda = lambda.value_or(4 + static_cast<std::size_t>(std::floor(3.0 * std::log(n))));
  if (p.lambda < 2) throw ConfigError("batch size must be >= 2");
  p.mu = p.lambda / 2;
  p.weights.resize(static_cast<Eigen::Index>(p.mu));
  for (std::size_t i = 0; i < p.mu; ++i) {
    p.weights[static_cast<Eigen::Index>(i)] =
        std::log(static_cast<double>(p.mu) + 0.5) - std::log(static_cast<double>(i + 1));
  }
  p.weights /= p.weights.sum();
  p.mu_eff = 1.0 / p.weights.squaredNorm();
  const double mu_eff = p.mu_eff;
  p.c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + p.c_sigma;
  p.c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  p.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  p.c_mu = std::min(1.0 - p.c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
  p.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  const double gap = 1.0 / ((p.c_1 + p.c_mu) * n * 10.0);
  p.refactor_gap = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(gap)));
  return p;
}

std::vector<std::size_t> improvement_ranking(std::span<const InsertOutcome> outcomes,
                                             std::span<const double> accuracies) {
  if (outcomes.size() != accuracies.size()) {
    throw DataError("ranking needs one accuracy per outcome");
  }
  auto tier = [](InsertOutcome::Kind k) {
    switch (k) {
      case InsertOutcome::Kind::kNewCell:
        return 0;
      case InsertOutcome::Kind::kImproved:
        return 1;
      case InsertOutcome::Kind::kRejected:
        return 2;
    }
    return 2;
  };
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ta = tier(outcomes[a].kind);
    const int tb = tier(outcomes[b].kind);
    if (ta != tb) return ta < tb;
    if (ta == 1) return outcomes[a].delta > outcomes[b].delta;
    return accuracies[a] > accuracies[b];
  });
  return order;
}

ImprovementEmitter::ImprovementEmitter(Eigen::VectorXd initial_mean, EmitterOptions options,
                                       std::uint64_t seed)
    : params_(CmaParameters::defaults(static_cast<std::size_t>(initial_mean.size()), options.batch_size)),
      options_(options),
      rng_(seed),
      initial_mean_(std::move(initial_mean)) {
  if (!(options_.sigma0 > 0.0) || !std::isfinite(options_.sigma0)) {
    throw ConfigError("initial step size must be > 0");
  }
  if (options_.patience < 1) throw ConfigError("restart patience must be >= 1");
  reset_state(initial_mean_);
}

void ImprovementEmitter::reset_state(Eigen::VectorXd mean) {
  const auto n = static_cast<Eigen::Index>(params_.dim);
  mean_ = std::move(mean);
  sigma_ = options_.sigma0;
  cov_ = Eigen::MatrixXd::Identity(n, n);
  factor_ = Eigen::MatrixXd::Identity(n, n);
  path_sigma_ = Eigen::VectorXd::Zero(n);
  path_c_ = Eigen::VectorXd::Zero(n);
  generation_ = 0;
  last_refactor_ = 0;
  stale_batches_ = 0;
  pending_ = false;
}

void ImprovementEmitter::restart(const Archive& archive) {
  ++restarts_;
  if (archive.empty()) {
    reset_state(initial_mean_);
    return;
  }
  const auto elites = archive.elites();
  const Elite* chosen = elites[static_cast<std::size_t>(rng_.uniform_below(elites.size()))];
  if (chosen->genome.size() != params_.dim) {
    throw DataError("archive genome length does not match the emitter dimension");
  }
  reset_state(chosen->genome.values);
}

bool ImprovementEmitter::refactor() {
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success) return false;
  factor_ = llt.matrixL();
  if (!factor_.allFinite()) return false;
  last_refactor_ = generation_;
  return true;
}

std::vector<Genome> ImprovementEmitter::ask() {
  const auto n = static_cast<Eigen::Index>(params_.dim);
  const auto lambda = static_cast<Eigen::Index>(params_.lambda);
  z_.resize(n, lambda);
  for (Eigen::Index k = 0; k < lambda; ++k) {
    for (Eigen::Index d = 0; d < n; ++d) z_(d, k) = rng_.normal();
  }
  y_.noalias() = factor_.triangularView<Eigen::Lower>() * z_;
  std::vector<Genome> out;
  out.reserve(params_.lambda);
  for (Eigen::Index k = 0; k < lambda; ++k) {
    out.emplace_back(mean_ + sigma_ * y_.col(k));
  }
  solutions_generated_ += params_.lambda;
  pending_ = true;
  return out;
}

bool ImprovementEmitter::tell(std::span<const Genome> candidates,
                              std::span<const InsertOutcome> outcomes,
                              std::span<const double> accuracies, const Archive& archive) {
  if (!pending_) throw DataError("tell() without a matching ask()");
  if (candidates.size() != params_.lambda || outcomes.size() != params_.lambda ||
      accuracies.size() != params_.lambda) {
    throw DataError("tell() needs exactly " + std::to_string(params_.lambda) +
                    " candidates, outcomes and accuracies");
  }
  pending_ = false;

  const auto ranking = improvement_ranking(outcomes, accuracies);
  last_parents_.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(params_.mu));
  const bool any_gain = std::any_of(outcomes.begin(), outcomes.end(),
                                    [](const InsertOutcome& o) { return o.added(); });
  stale_batches_ = any_gain ? 0 : stale_batches_ + 1;

  const auto n = static_cast<Eigen::Index>(params_.dim);
  const auto mu = static_cast<Eigen::Index>(params_.mu);
  Eigen::MatrixXd parents_y(n, mu);
  Eigen::VectorXd z_step = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y_step = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < mu; ++r) {
    const auto k = static_cast<Eigen::Index>(last_parents_[static_cast<std::size_t>(r)]);
    const double w = params_.weights[r];
    z_step += w * z_.col(k);
    y_step += w * y_.col(k);
    parents_y.col(r) = std::sqrt(w) * y_.col(k);
  }

  const auto& p = params_;
  mean_ += sigma_ * y_step;
  path_sigma_ = (1.0 - p.c_sigma) * path_sigma_ + std::sqrt(p.c_sigma * (2.0 - p.c_sigma) * p.mu_eff) * z_step;
  const double decay = 1.0 - std::pow(1.0 - p.c_sigma, 2.0 * static_cast<double>(generation_ + 1));
  const double norm_ps = path_sigma_.norm();
  const bool h_sigma =
      norm_ps / std::sqrt(decay) < (1.4 + 2.0 / (static_cast<double>(p.dim) + 1.0)) * p.chi_n;
  path_c_ = (1.0 - p.c_c) * path_c_;
  if (h_sigma) path_c_ += std::sqrt(p.c_c * (2.0 - p.c_c) * p.mu_eff) * y_step;

  const double delta_h = h_sigma ? 0.0 : p.c_c * (2.0 - p.c_c);
  cov_ *= 1.0 - p.c_1 - p.c_mu + p.c_1 * delta_h;
  cov_.selfadjointView<Eigen::Lower>().rankUpdate(path_c_, p.c_1);
  cov_.selfadjointView<Eigen::Lower>().rankUpdate(parents_y, p.c_mu);
  for (Eigen::Index c = 1; c < n; ++c) {
    for (Eigen::Index r = 0; r < c; ++r) cov_(r, c) = cov_(c, r);
  }

  sigma_ *= std::exp((p.c_sigma / p.d_sigma) * (norm_ps / p.chi_n - 1.0));
  sigma_ = std::min(sigma_, options_.sigma0 * options_.sigma_max_factor);
  ++generation_;

  const bool degenerate = !(sigma_ > 0.0) || !std::isfinite(sigma_) || !mean_.allFinite() ||
                          !cov_.allFinite();
  bool factor_failed = false;
  if (!degenerate && generation_ - last_refactor_ >= p.refactor_gap) factor_failed = !refactor();
  if (degenerate || factor_failed || stale_batches_ >= options_.patience) {
    restart(archive);
    return true;
  }
  return false;
}

}  // namespace qdfair

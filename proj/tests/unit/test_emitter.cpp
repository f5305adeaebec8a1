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

#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "qdfair/emitter.hpp"
#include "qdfair/error.hpp"
#include "support.hpp"

using namespace qdfair;
using Kind = InsertOutcome::Kind;

TEST_CASE("default batch sizes and weights") {
  CHECK(CmaParameters::defaults(1081).lambda == 24);
  CHECK(CmaParameters::defaults(5697).lambda == 29);
  const auto p = CmaParameters::defaults(1081);
  CHECK(p.mu == 12);
  CHECK(p.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
    CHECK(p.weights[i] > 0.0);
    if (i) CHECK(p.weights[i] < p.weights[i - 1]);
  }
  CHECK(p.c_1 + p.c_mu < 1.0);
  CHECK(p.refactor_gap >= 1);
  CHECK(CmaParameters::defaults(1081, 10).lambda == 10);
  CHECK_THROWS_AS(CmaParameters::defaults(0), ConfigError);
}

TEST_CASE("fresh emitter state") {
  ImprovementEmitter e(Eigen::VectorXd::Zero(7), EmitterOptions{}, 1);
  CHECK(e.step_size() == 0.5);
  CHECK(e.covariance() == Eigen::MatrixXd::Identity(7, 7));
  CHECK(e.mean().isZero());
  CHECK(e.path_sigma().isZero());
  CHECK(e.path_c().isZero());
  CHECK(e.solutions_generated() == 0);
}

TEST_CASE("vanishing step size returns the mean") {
  EmitterOptions o;
  o.sigma0 = 1e-300;
  ImprovementEmitter e(Eigen::VectorXd::Ones(10), o, 3);
  for (const Genome& g : e.ask()) CHECK(g.values == Eigen::VectorXd::Ones(10));
  CHECK(e.solutions_generated() == e.batch_size());
}

TEST_CASE("identity covariance sample variance is sigma squared") {
  EmitterOptions o;
  o.sigma0 = 0.5;
  ImprovementEmitter e(Eigen::VectorXd::Zero(4), o, 5);
  double sum[4] = {}, sq[4] = {};
  std::size_t n = 0;
  for (int b = 0; b < 2500; ++b) {
    for (const Genome& g : e.ask()) {
      for (int d = 0; d < 4; ++d) {
        sum[d] += g.values[d];
        sq[d] += g.values[d] * g.values[d];
      }
      ++n;
    }
  }
  const double var = 0.25;
  const double band = 3.0 * var * std::sqrt(2.0 / static_cast<double>(n - 1));
  for (int d = 0; d < 4; ++d) {
    const double mean = sum[d] / static_cast<double>(n);
    const double sample_var = (sq[d] - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    CHECK(std::abs(sample_var - var) < band);
  }
}

TEST_CASE("same seed gives identical batches") {
  ImprovementEmitter a(Eigen::VectorXd::Zero(6), EmitterOptions{}, 77);
  ImprovementEmitter b(Eigen::VectorXd::Zero(6), EmitterOptions{}, 77);
  const auto ba = a.ask();
  const auto bb = b.ask();
  for (std::size_t k = 0; k < ba.size(); ++k) CHECK(ba[k].values == bb[k].values);
  ImprovementEmitter c(Eigen::VectorXd::Zero(6), EmitterOptions{}, 78);
  CHECK(c.ask()[0].values != ba[0].values);
}

TEST_CASE("improvement ranking tiers") {
  std::vector<InsertOutcome> out(6);
  std::vector<double> acc{0.9, 0.2, 0.5, 0.3, 0.8, 0.1};
  out[3] = {Kind::kNewCell, 0.0};
  out[1] = {Kind::kImproved, 0.1};
  const auto order = improvement_ranking(out, acc);
  CHECK(order[0] == 3);
  CHECK(order[1] == 1);
  CHECK(order[2] == 0);  // rejected, by accuracy
  CHECK(order[3] == 4);

  std::vector<InsertOutcome> mixed{{Kind::kImproved, 0.01}, {Kind::kNewCell, 0}, {Kind::kImproved, 0.2},
                                   {Kind::kNewCell, 0}};
  std::vector<double> acc2{0.99, 0.1, 0.2, 0.3};
  CHECK(improvement_ranking(mixed, acc2) == std::vector<std::size_t>{3, 1, 2, 0});
  CHECK_THROWS_AS(improvement_ranking(mixed, std::vector<double>{1.0}), DataError);
}

TEST_CASE("tell picks NewCell then Improved as the two parents") {
  EmitterOptions o;
  o.batch_size = 4;  // mu = 2
  ImprovementEmitter e(Eigen::VectorXd::Zero(5), o, 1);
  const auto cand = e.ask();
  std::vector<InsertOutcome> out(4);
  out[2] = {Kind::kImproved, 0.1};
  out[1] = {Kind::kNewCell, 0};
  const std::vector<double> acc{0.9, 0.1, 0.5, 0.7};
  Archive archive;
  e.tell(cand, out, acc, archive);
  CHECK(e.last_parents() == std::vector<std::size_t>{1, 2});
}

TEST_CASE("restart after patience stale batches") {
  EmitterOptions o;
  o.patience = 5;
  ImprovementEmitter e(Eigen::VectorXd::Zero(5), o, 2);
  Archive archive(GridSpec{}, std::nullopt);
  const auto elite = Genome(Eigen::VectorXd::Constant(5, 3.0));
  archive.try_insert(elite, 0.5, {1.0, 1.0});
  std::vector<InsertOutcome> rejected(e.batch_size());
  std::vector<double> acc(e.batch_size(), 0.1);
  for (int b = 1; b <= 5; ++b) {
    const auto cand = e.ask();
    const bool restarted = e.tell(cand, rejected, acc, archive);
    CHECK(restarted == (b == 5));
    if (b < 5) CHECK(e.stale_batches() == static_cast<std::size_t>(b));
  }
  CHECK(e.restarts() == 1);
  CHECK(e.step_size() == o.sigma0);
  CHECK(e.mean() == elite.values);
  CHECK(e.covariance() == Eigen::MatrixXd::Identity(5, 5));
  CHECK(e.path_c().isZero());
}

TEST_CASE("restart on an empty archive returns to the initial mean") {
  ImprovementEmitter e(Eigen::VectorXd::Constant(3, 2.0), EmitterOptions{}, 2);
  e.restart(Archive{});
  CHECK(e.mean() == Eigen::VectorXd::Constant(3, 2.0));
}

TEST_CASE("covariance stays symmetric positive definite") {
  for (std::size_t dim : {3, 12, 40}) {
    ImprovementEmitter e(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)), EmitterOptions{}, dim);
    Rng rng(dim);
    Archive archive;
    for (int gen = 0; gen < 60; ++gen) {
      const auto cand = e.ask();
      std::vector<InsertOutcome> out(cand.size());
      std::vector<double> acc(cand.size());
      for (std::size_t k = 0; k < cand.size(); ++k) {
        acc[k] = -cand[k].values.squaredNorm();
        const auto roll = rng.uniform_below(3);
        out[k] = roll == 0 ? InsertOutcome{Kind::kNewCell, 0}
                 : roll == 1 ? InsertOutcome{Kind::kImproved, rng.uniform()}
                             : InsertOutcome{};
      }
      e.tell(cand, out, acc, archive);
      const auto& c = e.covariance();
      CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
      CHECK(e.step_size() > 0.0);
      CHECK(e.step_size() <= 0.5 * 1e6);
    }
  }
}

TEST_CASE("tell contract errors") {
  ImprovementEmitter e(Eigen::VectorXd::Zero(4), EmitterOptions{}, 1);
  Archive archive;
  std::vector<Genome> none;
  std::vector<InsertOutcome> no_out;
  std::vector<double> no_acc;
  CHECK_THROWS_AS(e.tell(none, no_out, no_acc, archive), DataError);
  const auto cand = e.ask();
  std::vector<InsertOutcome> out(cand.size() - 1);
  std::vector<double> acc(cand.size() - 1);
  std::span<const Genome> short_batch(cand.data(), cand.size() - 1);
  CHECK_THROWS_AS(e.tell(short_batch, out, acc, archive), DataError);
  EmitterOptions bad;
  bad.sigma0 = 0.0;
  CHECK_THROWS_AS(ImprovementEmitter(Eigen::VectorXd::Zero(4), bad, 1), ConfigError);
}

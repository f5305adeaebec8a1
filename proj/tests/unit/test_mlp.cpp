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

#include "doctest.h"
#include "qdfair/error.hpp"
#include "qdfair/mlp.hpp"
#include "support.hpp"

using namespace qdfair;

TEST_CASE("genome lengths") {
  CHECK(genome_length(Architecture::parse("14,35,15,1")) == 1081);
  CHECK(genome_length(Architecture::parse("55,64,32,1")) == 5697);
  CHECK(genome_length(Architecture::parse("1,1")) == 2);
}

TEST_CASE("architecture validation and text form") {
  const auto a = Architecture::parse("14, 35,15 ,1");
  CHECK(a.to_string() == "14,35,15,1");
  CHECK(a.n_inputs() == 14);
  CHECK_THROWS_AS(Architecture::parse("14,35,2"), ConfigError);
  CHECK_THROWS_AS(Architecture::parse("14,0,1"), ConfigError);
  CHECK_THROWS_AS(Architecture::parse("1"), ConfigError);
  CHECK_THROWS_AS(Architecture::parse("a,1"), ConfigError);
  Architecture bad = a;
  bad.leaky_slope = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("all-zero genome predicts 0.5 and class 0") {
  const auto a = Architecture::parse("3,4,1");
  Rng rng(1);
  const Dataset d = testing::random_dataset(rng, 7, 3);
  const auto r = forward(Genome::zeros(genome_length(a)), a, d.features);
  for (Eigen::Index i = 0; i < 7; ++i) CHECK(r.probabilities[i] == 0.5);
  for (auto p : r.predictions) CHECK(p == 0);
}

TEST_CASE("single weight net gives sigmoid(10)") {
  const auto a = Architecture::parse("1,1");
  Eigen::VectorXd g(2);
  g << 1.0, 0.0;
  Eigen::MatrixXd x(1, 1);
  x << 10.0;
  const auto r = forward(Genome(g), a, x);
  CHECK(r.probabilities[0] == doctest::Approx(1.0 / (1.0 + std::exp(-10.0))).epsilon(1e-15));
  CHECK(r.probabilities[0] == doctest::Approx(0.99995).epsilon(1e-5));
  CHECK(r.predictions[0] == 1);
}

TEST_CASE("leaky relu and sigmoid") {
  CHECK(leaky_relu(-2.0, 0.01) == doctest::Approx(-0.02));
  CHECK(leaky_relu(3.0, 0.01) == 3.0);
  CHECK(sigmoid(800.0) < 1.0);
  CHECK(sigmoid(-800.0) > 0.0);
  CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("forward matches a hand loop and the documented layout") {
  const auto a = Architecture::parse("3,4,2,1");
  Rng rng(11);
  const Dataset d = testing::random_dataset(rng, 9, 3);
  Eigen::VectorXd g(static_cast<Eigen::Index>(genome_length(a)));
  for (Eigen::Index k = 0; k < g.size(); ++k) g[k] = rng.uniform(-2.0, 2.0);
  const auto r = forward(Genome(g), a, d.features);
  for (Eigen::Index row = 0; row < d.features.rows(); ++row) {
    std::vector<double> act(d.features.cols());
    for (Eigen::Index c = 0; c < d.features.cols(); ++c) act[c] = d.features(row, c);
    std::size_t at = 0;
    for (std::size_t l = 0; l + 1 < a.layer_sizes.size(); ++l) {
      const int in = a.layer_sizes[l], out = a.layer_sizes[l + 1];
      std::vector<double> next(out);
      for (int o = 0; o < out; ++o) {
        double z = g[static_cast<Eigen::Index>(at + in * out + o)];
        for (int i = 0; i < in; ++i) z += g[static_cast<Eigen::Index>(at + o * in + i)] * act[i];
        next[o] = (l + 2 < a.layer_sizes.size()) ? leaky_relu(z, a.leaky_slope) : z;
      }
      at += in * out + out;
      act = next;
    }
    const double p = 1.0 / (1.0 + std::exp(-act[0]));
    CHECK(r.probabilities[row] == doctest::Approx(p).epsilon(1e-12));
    CHECK(r.predictions[row] == (r.probabilities[row] > 0.5 ? 1 : 0));
  }
}

TEST_CASE("row permutation permutes outputs") {
  const auto a = Architecture::parse("3,5,1");
  Rng rng(4);
  const Dataset d = testing::random_dataset(rng, 12, 3);
  Eigen::VectorXd g(static_cast<Eigen::Index>(genome_length(a)));
  for (Eigen::Index k = 0; k < g.size(); ++k) g[k] = rng.normal();
  std::vector<std::size_t> perm(12);
  for (std::size_t i = 0; i < 12; ++i) perm[i] = 11 - i;
  const auto base = forward(Genome(g), a, d.features);
  const auto permuted = forward(Genome(g), a, d.subset(perm).features);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(permuted.probabilities[static_cast<Eigen::Index>(i)] ==
          base.probabilities[static_cast<Eigen::Index>(perm[i])]);
  }
}

TEST_CASE("forward shape errors") {
  const auto a = Architecture::parse("3,1");
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(forward(Genome::zeros(3), a, x), DataError);
  CHECK_THROWS_AS(forward(Genome::zeros(4), a, Eigen::MatrixXd::Zero(2, 2)), DataError);
}

TEST_CASE("genome csv round trip is exact") {
  Rng rng(9);
  Eigen::VectorXd v(6);
  for (Eigen::Index k = 0; k < 6; ++k) v[k] = rng.normal() * std::pow(10.0, static_cast<double>(k) - 3);
  v[0] = -0.0;
  const Genome g(v);
  const Genome back = genome_from_csv_row(genome_to_csv_row(g));
  CHECK(back.values == g.values);

  const auto dir = testing::scratch("genome");
  const auto a = Architecture::parse("2,2,1");
  Genome g9 = Genome::zeros(genome_length(a));
  g9.values[3] = 1.0 / 3.0;
  save_genome(g9, a, dir / "g.csv");
  Architecture read_arch;
  const Genome loaded = load_genome(dir / "g.csv", &read_arch);
  CHECK(loaded.values == g9.values);
  CHECK(read_arch == a);
  CHECK_THROWS_AS(genome_from_csv_row("1,abc"), DataError);
}

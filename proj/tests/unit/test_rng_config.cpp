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
#include <numeric>
#include <set>

#include "doctest.h"
#include "qdfair/config.hpp"
#include "qdfair/error.hpp"
#include "qdfair/rng.hpp"

using namespace qdfair;

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42), b(42), c(derive_seed(42, 1));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_seed(42, 1) != derive_seed(42, 2));
  CHECK(derive_seed(42, 1) != derive_seed(43, 1));
  Rng d(42);
  CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("uniform_below stays in range and hits every value") {
  Rng rng(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS(rng.uniform_below(0));
}

TEST_CASE("uniform and normal moments") {
  Rng rng(3);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(1);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("config grammar") {
  const Config c = Config::parse(
      "# comment\n"
      "alpha = 1.5\n"
      "list = a, b ,c\n"
      "[run]\n"
      "evals = 100\n",
      "t.cfg");
  CHECK(c.get_double("alpha", 0) == 1.5);
  CHECK(c.get_list("list") == std::vector<std::string>{"a", "b", "c"});
  CHECK(c.get_int("run.evals", 0) == 100);
  CHECK(c.section("run").at("evals") == "100");
  CHECK(c.get_int("missing", 9) == 9);
  CHECK_THROWS_AS(c.require("missing"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(c.reject_unknown({"alpha"}), ConfigError);
}

TEST_CASE("config errors carry the line number") {
  try {
    Config::parse("a = 1\n\nbroken\n", "x.cfg");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x.cfg:3") != std::string::npos);
  }
}

TEST_CASE("number parsing") {
  CHECK(parse_double("+2.5", "v") == 2.5);
  CHECK(parse_int("-3", "v") == -3);
  CHECK_THROWS_AS(parse_double("1.5x", "v"), ConfigError);
  CHECK_THROWS_AS(parse_double("inf", "v"), ConfigError);
  CHECK_THROWS_AS(parse_int("2.0", "v"), ConfigError);
  CHECK(split("a:b", ':') == std::vector<std::string>{"a", "b"});
  CHECK(trim("  x \t") == "x");
}

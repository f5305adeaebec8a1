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

#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "qdfair/config.hpp"
#include "qdfair/error.hpp"
#include "qdfair/sampler.hpp"
#include "support.hpp"

using namespace qdfair;

namespace {

void check_targets(const ScenarioSpec& spec, const SampleResult& r) {
  for (std::size_t c = 0; c < kJointCells; ++c) {
    CHECK(r.report.cells[c].cases == spec.cells[c].count);
    const double want = spec.cells[c].count * spec.cells[c].positive_rate;
    CHECK(std::abs(static_cast<double>(r.report.cells[c].positives) - want) <= 1.0);
  }
}

}  // namespace

TEST_CASE("unbiased scenario: 5728 cases, every rate 0.50") {
  const auto spec = ScenarioSpec::builtin("unbiased");
  const SampleResult r = sample(testing::promotion_source(), spec);
  CHECK(r.dataset.n_cases() == 5728);
  for (const auto& g : r.report.groups) CHECK(g.rate() == 0.5);
  check_targets(spec, r);
}

TEST_CASE("male-biased scenario matches the marginals") {
  const auto spec = ScenarioSpec::builtin("male_biased");
  const SampleResult r = sample(testing::promotion_source(), spec);
  CHECK(r.dataset.n_cases() == 4384);
  CHECK(r.report.xa().cases == 2192);
  CHECK(std::round(r.report.xa().rate() * 100) == 35);
  CHECK(std::round(r.report.xb().rate() * 100) == 65);
  CHECK(std::round(r.report.all().rate() * 100) == 50);
  check_targets(spec, r);
}

TEST_CASE("higher-male scenario: 6576 cases, male 4384 at 0.67, female 2192 at 0.35") {
  const auto spec = ScenarioSpec::builtin("higher_male");
  const SampleResult r = sample(testing::promotion_source(), spec);
  CHECK(r.dataset.n_cases() == 6576);
  CHECK(r.report.xb().cases == 4384);
  CHECK(r.report.xa().cases == 2192);
  CHECK(std::round(r.report.xb().rate() * 100) == 67);
  CHECK(std::round(r.report.xa().rate() * 100) == 35);
  CHECK(std::round(r.report.all().rate() * 100) == 56);
  check_targets(spec, r);
}

TEST_CASE("cross-biased scenario: joint cells biased, marginals at 0.50") {
  const auto spec = ScenarioSpec::builtin("cross_biased");
  const SampleResult r = sample(testing::promotion_source(), spec);
  CHECK(r.dataset.n_cases() == 4508);
  for (const auto& g : r.report.groups) CHECK(std::round(g.rate() * 100) == 50);
  check_targets(spec, r);
}

TEST_CASE("built-in scenario names") {
  for (const auto& name : ScenarioSpec::builtin_names()) CHECK_NOTHROW(ScenarioSpec::builtin(name));
  try {
    ScenarioSpec::builtin("nope");
    FAIL("expected error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("male_biased") != std::string::npos);
  }
}

TEST_CASE("sampling is deterministic and without replacement") {
  const auto spec = ScenarioSpec::builtin("male_biased");
  const auto& src = testing::promotion_source();
  const SampleResult a = sample(src, spec);
  const SampleResult b = sample(src, spec);
  CHECK(a.rows == b.rows);
  CHECK(std::is_sorted(a.rows.begin(), a.rows.end()));
  CHECK(std::adjacent_find(a.rows.begin(), a.rows.end()) == a.rows.end());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.dataset.labels[k] == src.labels[a.rows[k]]);
  }
  ScenarioSpec other = spec;
  other.seed = 99;
  CHECK(sample(src, other).rows != a.rows);
}

TEST_CASE("infeasible stratum reports the shortfall") {
  Rng rng(5);
  const Dataset small = testing::random_dataset(rng, 40, 2);
  ScenarioSpec spec;
  spec.name = "greedy";
  spec.cells[0] = {20, 0.5};  // 10 positives from XaYa; 40 random cases cannot hold them
  try {
    build_scenario(small, spec);
    FAIL("expected error");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("stratum exhausted") != std::string::npos);
    CHECK(what.find("short") != std::string::npos);
  }
}

TEST_CASE("scenario config parsing") {
  const auto spec = ScenarioSpec::from_config(Config::parse(
      "name = tiny\nseed = 9\ncell.xa_ya = 10 0.5\ncell.xb_yb = 4 0.25\n"));
  CHECK(spec.name == "tiny");
  CHECK(spec.seed == 9);
  CHECK(spec.cells[0].count == 10);
  CHECK(spec.cells[3].positive_rate == 0.25);
  CHECK(spec.cells[1].count == 0);
  CHECK_THROWS_AS(ScenarioSpec::from_config(Config::parse("cell.xa_ya = 10 1.5\n")), ConfigError);
  CHECK_THROWS_AS(ScenarioSpec::from_config(Config::parse("name = empty\n")), ConfigError);
  CHECK_THROWS_AS(ScenarioSpec::from_config(Config::parse("mode = stratified\ntotal = 0\n")),
                  ConfigError);
}

TEST_CASE("shipped scenario files match the built-ins") {
  for (const auto& name : ScenarioSpec::builtin_names()) {
    const auto path = testing::source_dir() / "experiments" / "scenarios" / (name + ".cfg");
    const auto file = ScenarioSpec::load(path);
    const auto builtin = ScenarioSpec::builtin(name);
    CHECK(file.name == builtin.name);
    CHECK(file.mode == builtin.mode);
    CHECK(file.total == builtin.total);
    for (std::size_t c = 0; c < kJointCells; ++c) {
      CHECK(file.cells[c].count == builtin.cells[c].count);
      CHECK(file.cells[c].positive_rate == builtin.cells[c].positive_rate);
    }
  }
}

TEST_CASE("stratified sample keeps stratum proportions") {
  const auto& src = testing::promotion_source();
  const SampleResult r = stratified_sample(src, 13565, 1);
  CHECK(r.dataset.n_cases() == 13565);
  const SampleReport full = audit(src);
  for (std::size_t g = 0; g < 5; ++g) {
    CHECK(std::abs(r.report.groups[g].rate() - full.groups[g].rate()) < 0.01);
    const double share = static_cast<double>(full.groups[g].cases) / src.n_cases() * 13565;
    CHECK(std::abs(static_cast<double>(r.report.groups[g].cases) - share) <= 4.0);
  }
  CHECK_THROWS_AS(stratified_sample(src, 0, 1), ConfigError);
  CHECK_THROWS(stratified_sample(src, src.n_cases() + 1, 1));
}

TEST_CASE("stratified sample of the whole table is the same multiset") {
  Rng rng(8);
  const Dataset d = testing::random_dataset(rng, 50, 2);
  const SampleResult r = stratified_sample(d, 50, 3);
  std::vector<std::size_t> expect(50);
  for (std::size_t i = 0; i < 50; ++i) expect[i] = i;
  CHECK(r.rows == expect);
}

TEST_CASE("audit by hand") {
  // male = X-B. Two male positives, one female positive, one female negative.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 1);
  const Dataset d = Dataset::from_arrays(x, {1, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 1, 0});
  const SampleReport r = audit(d);
  CHECK(r.xb().cases == 2);
  CHECK(r.xb().rate() == 1.0);
  CHECK(r.xa().rate() == 0.5);
  CHECK(r.all().rate() == 0.75);

  const Dataset zeros = Dataset::from_arrays(x, {0, 0, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0});
  for (const auto& g : audit(zeros).groups) CHECK(g.rate() == 0.0);
}

TEST_CASE("report printing uses two decimals") {
  const SampleResult r = sample(testing::promotion_source(), ScenarioSpec::builtin("male_biased"));
  std::ostringstream text, csv;
  r.report.print(text);
  r.report.write_csv(csv);
  CHECK(text.str().find("0.35") != std::string::npos);
  CHECK(csv.str().find("group,cases,positives,rate") == 0);
}

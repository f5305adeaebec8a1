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

#include "qdfair/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qdfair/config.hpp"
#include "qdfair/error.hpp"
#include "qdfair/rng.hpp"

namespace qdfair {

namespace {

constexpr std::size_t kStrata = kJointCells * 2;

std::size_t round_half_up(double value) {
  return static_cast<std::size_t>(std::floor(value + 0.5));
}

// Source rows of each (joint cell, label) stratum in ascending order.
std::array<std::vector<std::size_t>, kStrata> strata_of(const Dataset& d) {
  std::array<std::vector<std::size_t>, kStrata> strata;
  for (std::size_t r = 0; r < d.n_cases(); ++r) {
    strata[joint_cell_of(d, r) * 2 + d.labels[r]].push_back(r);
  }
  return strata;
}

std::string stratum_name(std::size_t stratum) {
  return std::string(joint_cell_name(stratum / 2)) + " label " +
         std::to_string(stratum % 2);
}

// Draws take rows of one stratum with a stream dedicated to that stratum,
// so the choice in one stratum does not depend on the others.
void draw(std::vector<std::size_t> pool, std::size_t take, std::uint64_t seed,
          std::size_t stratum, std::vector<std::size_t>& out) {
  Rng rng(derive_seed(seed, stratum));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
}

SampleResult finish(const Dataset& source, std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  SampleResult result;
  result.dataset = source.subset(rows);
  result.dataset.validate();
  result.report = audit(result.dataset);
  result.rows = std::move(rows);
  return result;
}

CellTarget parse_cell(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  const auto space = t.find_first_of(" \t");
  if (space == std::string::npos) {
    throw ConfigError(where + ": expected '<count> <rate>', got '" + t + "'");
  }
  const auto count = parse_int(t.substr(0, space), where + " count");
  if (count < 0) throw ConfigError(where + ": negative count");
  return {static_cast<std::size_t>(count),
          parse_double(t.substr(space + 1), where + " rate")};
}

ScenarioSpec uniform_cells(std::string name, std::size_t per_cell,
                           double rate) {
  ScenarioSpec s;
  s.name = std::move(name);
  for (auto& c : s.cells) c = {per_cell, rate};
  return s;
}

}  // namespace

std::size_t joint_cell_of(const Dataset& d, std::size_t row) {
  return (d.mask_xa[row] ? 0 : 2) + (d.mask_ya[row] ? 0 : 1);
}

const char* joint_cell_name(std::size_t cell) {
  static constexpr const char* kNames[] = {"X-A/Y-A", "X-A/Y-B", "X-B/Y-A",
                                           "X-B/Y-B"};
  return kNames[cell];
}

void ScenarioSpec::validate() const {
  if (mode == Mode::kStratified) {
    if (total == 0) throw ConfigError("scenario '" + name + "': total must be > 0");
    return;
  }
  bool any = false;
  for (const auto& c : cells) {
    if (!(c.positive_rate >= 0.0 && c.positive_rate <= 1.0)) {
      throw ConfigError("scenario '" + name + "': rate outside [0,1]");
    }
    any = any || c.count > 0;
  }
  if (!any) throw ConfigError("scenario '" + name + "': every cell is empty");
}

ScenarioSpec ScenarioSpec::from_config(const Config& config) {
  config.reject_unknown({"name", "seed", "mode", "total", "cell.xa_ya",
                         "cell.xa_yb", "cell.xb_ya", "cell.xb_yb"});
  ScenarioSpec s;
  s.name = config.get("name").value_or(config.source());
  s.seed = config.get_u64("seed", s.seed);
  const std::string mode = config.get("mode").value_or("cells");
  if (mode == "stratified") {
    s.mode = Mode::kStratified;
    const auto total = config.get_int("total", 0);
    if (total <= 0) throw ConfigError(config.source() + ": total must be > 0");
    s.total = static_cast<std::size_t>(total);
  } else if (mode == "cells") {
    static constexpr const char* kKeys[] = {"cell.xa_ya", "cell.xa_yb",
                                            "cell.xb_ya", "cell.xb_yb"};
    for (std::size_t c = 0; c < kJointCells; ++c) {
      if (const auto v = config.get(kKeys[c])) {
        s.cells[c] = parse_cell(*v, config.source() + ": " + kKeys[c]);
      }
    }
  } else {
    throw ConfigError(config.source() + ": unknown mode '" + mode + "'");
  }
  s.validate();
  return s;
}

ScenarioSpec ScenarioSpec::load(const std::filesystem::path& path) {
  return from_config(Config::load(path));
}

std::vector<std::string> ScenarioSpec::builtin_names() {
  return {"unbiased",     "male_biased",    "higher_male",
          "cross_biased", "adult_unbiased", "adult_stratified"};
}

ScenarioSpec ScenarioSpec::builtin(const std::string& name) {
  // Group A of X is female, group B male; group A of Y is young (or white).
  if (name == "unbiased") return uniform_cells(name, 1432, 0.50);
  if (name == "male_biased") {
    ScenarioSpec s = uniform_cells(name, 1096, 0.65);
    s.cells[0].positive_rate = s.cells[1].positive_rate = 0.35;
    return s;
  }
  if (name == "higher_male") {
    ScenarioSpec s;
    s.name = name;
    s.cells = {{{1096, 0.35}, {1096, 0.35}, {2192, 0.67}, {2192, 0.67}}};
    return s;
  }
  if (name == "cross_biased") {
    ScenarioSpec s;
    s.name = name;
    s.cells = {{{1127, 0.33}, {1127, 0.67}, {1127, 0.67}, {1127, 0.33}}};
    return s;
  }
  if (name == "adult_unbiased") return uniform_cells(name, 420, 0.50);
  if (name == "adult_stratified") {
    ScenarioSpec s;
    s.name = name;
    s.mode = Mode::kStratified;
    s.total = 13565;
    return s;
  }
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown scenario '" + name + "' (known: " + known + ")");
}

SampleReport audit(const Dataset& d) {
  SampleReport report;
  static constexpr const char* kGroups[] = {"All", "X-A", "X-B", "Y-A", "Y-B"};
  for (std::size_t g = 0; g < report.groups.size(); ++g) {
    report.groups[g].group = kGroups[g];
  }
  for (std::size_t c = 0; c < kJointCells; ++c) {
    report.cells[c].group = joint_cell_name(c);
  }
  for (std::size_t r = 0; r < d.n_cases(); ++r) {
    const std::size_t y = d.labels[r];
    const std::uint8_t in[] = {1, d.mask_xa[r], d.mask_xb[r], d.mask_ya[r],
                               d.mask_yb[r]};
    for (std::size_t g = 0; g < report.groups.size(); ++g) {
      report.groups[g].cases += in[g];
      report.groups[g].positives += in[g] * y;
    }
    auto& cell = report.cells[joint_cell_of(d, r)];
    cell.cases += 1;
    cell.positives += y;
  }
  return report;
}

void SampleReport::print(std::ostream& out) const {
  const auto flags = out.flags();
  out << std::left << std::setw(10) << "group" << std::right << std::setw(8)
      << "cases" << std::setw(11) << "positives" << std::setw(7) << "rate"
      << '\n';
  auto row = [&](const GroupStats& g) {
    out << std::left << std::setw(10) << g.group << std::right << std::setw(8)
        << g.cases << std::setw(11) << g.positives << std::setw(7)
        << std::fixed << std::setprecision(2) << g.rate() << '\n';
  };
  for (const auto& g : groups) row(g);
  for (const auto& c : cells) row(c);
  out.flags(flags);
}

void SampleReport::write_csv(std::ostream& out) const {
  out << "group,cases,positives,rate\n";
  std::ostringstream rate;
  for (const auto* list : {&groups[0], &cells[0]}) {
    const std::size_t n = list == &groups[0] ? groups.size() : cells.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& g = list[i];
      rate.str("");
      rate << std::setprecision(17) << g.rate();
      out << g.group << ',' << g.cases << ',' << g.positives << ','
          << rate.str() << '\n';
    }
  }
}

SampleResult build_scenario(const Dataset& source, const ScenarioSpec& spec) {
  spec.validate();
  if (spec.mode != ScenarioSpec::Mode::kCells) {
    throw ConfigError("scenario '" + spec.name + "' is not a cells scenario");
  }
  const auto strata = strata_of(source);
  std::vector<std::size_t> rows;
  for (std::size_t c = 0; c < kJointCells; ++c) {
    const auto& target = spec.cells[c];
    const std::size_t positives =
        std::min(target.count,
                 round_half_up(static_cast<double>(target.count) *
                               target.positive_rate));
    const std::size_t want[2] = {target.count - positives, positives};
    for (std::size_t label = 0; label < 2; ++label) {
      const std::size_t stratum = c * 2 + label;
      const std::size_t have = strata[stratum].size();
      if (want[label] > have) {
        throw DataError("stratum exhausted: " + stratum_name(stratum) +
                        " needs " + std::to_string(want[label]) + ", source has " +
                        std::to_string(have) + " (short " +
                        std::to_string(want[label] - have) + ")");
      }
      draw(strata[stratum], want[label], spec.seed, stratum, rows);
    }
  }
  return finish(source, std::move(rows));
}

SampleResult stratified_sample(const Dataset& source, std::size_t total,
                               std::uint64_t seed) {
  if (total == 0) throw ConfigError("stratified sample total must be > 0");
  const std::size_t n = source.n_cases();
  if (total > n) {
    throw DataError("stratified sample of " + std::to_string(total) +
                    " exceeds source size " + std::to_string(n));
  }
  const auto strata = strata_of(source);
  std::array<std::size_t, kStrata> quota{};
  std::array<std::size_t, kStrata> order{};
  std::array<std::uint64_t, kStrata> remainder{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < kStrata; ++s) {
    // Exact integer arithmetic: quota = floor(total * size / n).
    const auto product =
        static_cast<unsigned __int128>(total) * strata[s].size();
    quota[s] = static_cast<std::size_t>(product / n);
    remainder[s] = static_cast<std::uint64_t>(product % n);
    assigned += quota[s];
    order[s] = s;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < total; ++k) {
    ++quota[order[k]];
    ++assigned;
  }
  std::vector<std::size_t> rows;
  for (std::size_t s = 0; s < kStrata; ++s) {
    draw(strata[s], quota[s], seed, s, rows);
  }
  return finish(source, std::move(rows));
}

SampleResult sample(const Dataset& source, const ScenarioSpec& spec) {
  if (spec.mode == ScenarioSpec::Mode::kStratified) {
    return stratified_sample(source, spec.total, spec.seed);
  }
  return build_scenario(source, spec);
}

}  // namespace qdfair

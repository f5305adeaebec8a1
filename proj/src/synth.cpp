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

#include "qdfair/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include "qdfair/rng.hpp"

namespace qdfair {

namespace {

template <std::size_t N>
std::size_t pick(Rng& rng, const std::array<double, N>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < N; ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return N - 1;
}

}  // namespace

RawTable synthetic_promotion_table(std::size_t rows, std::uint64_t seed) {
  static constexpr std::array<const char*, 9> kDepartments = {
      "Sales & Marketing", "Operations", "Technology", "Procurement", "Analytics",
      "Finance",           "HR",         "Legal",      "R&D"};
  static constexpr std::array<double, 9> kDepartmentWeights = {0.31, 0.21, 0.13, 0.13, 0.10,
                                                               0.05, 0.04, 0.02, 0.01};
  static constexpr std::array<double, 9> kDepartmentScore = {50, 60, 80, 70, 84, 60, 50, 60, 84};
  static constexpr std::array<const char*, 3> kEducation = {"Bachelor's", "Master's & above",
                                                            "Below Secondary"};
  static constexpr std::array<double, 3> kEducationWeights = {0.69, 0.28, 0.03};
  static constexpr std::array<const char*, 3> kChannels = {"other", "sourcing", "referred"};
  static constexpr std::array<double, 3> kChannelWeights = {0.55, 0.42, 0.03};
  static constexpr std::array<double, 5> kRatingWeights = {0.12, 0.08, 0.36, 0.19, 0.25};

  RawTable table;
  table.column_names = {"employee_id",     "department",        "region",
                        "education",       "gender",            "recruitment_channel",
                        "no_of_trainings", "age",               "previous_year_rating",
                        "length_of_service", "KPIs_met >80%",   "awards_won?",
                        "avg_training_score", "is_promoted"};
  table.rows.reserve(rows);
  Rng rng(seed);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t dept = pick(rng, kDepartmentWeights);
    const std::size_t region = static_cast<std::size_t>(rng.uniform_below(34)) + 1;
    const std::size_t edu = pick(rng, kEducationWeights);
    const bool female = rng.uniform() < 0.30;
    const std::size_t channel = pick(rng, kChannelWeights);
    int trainings = 1;
    while (trainings < 10 && rng.uniform() < 0.2) ++trainings;
    const int age = 20 + static_cast<int>(std::floor(40.0 * std::pow(rng.uniform(), 1.6)));
    const int rating = static_cast<int>(pick(rng, kRatingWeights)) + 1;
    const int service =
        std::clamp(1 + static_cast<int>(std::floor(-6.0 * std::log(1.0 - rng.uniform()))), 1,
                   std::max(1, age - 19));
    const bool kpi = rng.uniform() < 0.20 + 0.06 * (rating - 1);
    const bool award = rng.uniform() < 0.03;
    const int score = std::clamp(
        static_cast<int>(std::lround(kDepartmentScore[dept] + 8.0 * rng.normal() + (kpi ? 3.0 : 0.0))),
        39, 99);

    const double logit = -2.1 + 1.5 * kpi + 0.45 * (rating - 3) +
                         0.07 * (score - kDepartmentScore[dept]) + 2.2 * award +
                         (edu == 1 ? 0.25 : 0.0);
    const bool promoted = rng.uniform() < 1.0 / (1.0 + std::exp(-logit));

    table.rows.push_back({std::to_string(r + 1), kDepartments[dept], "region_" + std::to_string(region),
                          kEducation[edu], female ? "f" : "m", kChannels[channel],
                          std::to_string(trainings), std::to_string(age), std::to_string(rating),
                          std::to_string(service), kpi ? "1" : "0", award ? "1" : "0",
                          std::to_string(score), promoted ? "1" : "0"});
  }
  return table;
}

}  // namespace qdfair

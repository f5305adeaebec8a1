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

#include "qdfair/ingest.hpp"

namespace qdfair {

/// Synthetic table with the column layout of the public employee-promotion
/// dataset (department, region, education, gender, recruitment channel,
/// trainings, age, rating, tenure, KPI flag, awards, training score,
/// is_promoted). Promotion depends on the performance columns only, never on
/// gender or age, so any group disparity in a sample comes from how the
/// sample was drawn. Deterministic in (rows, seed).
RawTable synthetic_promotion_table(std::size_t rows, std::uint64_t seed);

}  // namespace qdfair

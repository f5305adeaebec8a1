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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qdfair/ingest.hpp"
#include "qdfair/rng.hpp"
#include "qdfair/synth.hpp"

namespace qdfair::testing {

inline std::filesystem::path source_dir() { return QDFAIR_SOURCE_DIR; }

inline std::filesystem::path promotion_schema() {
  return source_dir() / "experiments" / "schemas" / "promotion.cfg";
}

// Fresh scratch directory per call site name.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qdfair_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Encoded synthetic promotion table, cached across tests.
inline const Dataset& promotion_source() {
  static const Dataset d = encode(synthetic_promotion_table(54808, 0), SchemaSpec::load(promotion_schema()));
  return d;
}

// Random dataset with both groups of each attribute non-empty.
inline Dataset random_dataset(Rng& rng, std::size_t cases, std::size_t features) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(cases), static_cast<Eigen::Index>(features));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.uniform(-1.0, 1.0);
  }
  std::vector<std::uint8_t> labels(cases), xa(cases), ya(cases);
  for (std::size_t r = 0; r < cases; ++r) {
    labels[r] = static_cast<std::uint8_t>(rng.uniform_below(2));
    xa[r] = static_cast<std::uint8_t>(rng.uniform_below(2));
    ya[r] = static_cast<std::uint8_t>(rng.uniform_below(2));
  }
  xa[0] = 1;
  xa[1] = 0;
  ya[0] = 0;
  ya[1] = 1;
  return Dataset::from_arrays(std::move(x), std::move(labels), std::move(xa), std::move(ya));
}

}  // namespace qdfair::testing

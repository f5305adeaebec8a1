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

namespace qdfair {

/// Location of a model in bias space: the two positive-rate ratios.
struct Descriptors {
  double ratio_x = 0.0;
  double ratio_y = 0.0;

  friend bool operator==(const Descriptors&, const Descriptors&) = default;
};

/// Euclidean distance from parity, (1, 1).
double deviation(double ratio_x, double ratio_y);
inline double deviation(const Descriptors& d) { return deviation(d.ratio_x, d.ratio_y); }

/// Region where both ratios satisfy the four-fifths rule in either direction.
struct FairZone {
  double lower = 0.8;
  double upper = 1.25;

  void validate() const;
  bool contains(const Descriptors& d) const;
};

/// Inclusive on both bounds.
bool in_fair_zone(double ratio_x, double ratio_y, const FairZone& zone = {});

}  // namespace qdfair

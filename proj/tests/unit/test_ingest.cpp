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
#include "qdfair/config.hpp"
#include "qdfair/error.hpp"
#include "qdfair/ingest.hpp"
#include "support.hpp"

using namespace qdfair;

namespace {

const char* kSchema =
    "label = y == 1\n"
    "numeric = age, score\n"
    "categorical = color\n"
    "protected_x = sex == f\n"
    "protected_y = age <= 34\n"
    "label_x = Fem/Male\n"
    "label_y = Young/Old\n";

const char* kTable =
    "age,score,color,sex,y\n"
    "22,10,a,f,1\n"
    "34,20,b,m,0\n"
    "50,30,c,m,1\n";

}  // namespace

TEST_CASE("parse_csv basic") {
  const RawTable t = parse_csv("a,b\n1,x\n2,y");
  CHECK(t.column_names == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == "y");
}

TEST_CASE("parse_csv quoting and line endings") {
  const RawTable t = parse_csv("\xEF\xBB\xBFname,note\r\n\"Smith, J\",\"said \"\"hi\"\"\"\r\n\r\nx,\"multi\nline\"\r\n");
  CHECK(t.column_names[0] == "name");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "Smith, J");
  CHECK(t.rows[0][1] == "said \"hi\"");
  CHECK(t.rows[1][1] == "multi\nline");
}

TEST_CASE("parse_csv errors") {
  CHECK_THROWS_WITH_AS(parse_csv(""), "no header", DataError);
  CHECK_THROWS_WITH_AS(parse_csv("a,b\n"), "no data rows", DataError);
  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL("expected ragged-row error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("csv round trip with row selection") {
  const RawTable t = parse_csv("a,b\n1,\"x,y\"\n2,z\n3,w\n");
  std::ostringstream out;
  const std::vector<std::size_t> rows{0, 2};
  write_csv(t, out, rows);
  const RawTable back = parse_csv(out.str());
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0][1] == "x,y");
  CHECK(back.rows[1][0] == "3");
}

TEST_CASE("group predicates") {
  const auto eq = GroupPredicate::parse("sex == f");
  CHECK(eq.matches("f"));
  CHECK(!eq.matches("m"));
  const auto ne = GroupPredicate::parse("race != White");
  CHECK(ne.matches("Black"));
  CHECK(!ne.matches("White"));
  const auto le = GroupPredicate::parse("age <= 34");
  CHECK(le.matches("22"));
  CHECK(le.matches("34"));
  CHECK(!le.matches("35"));
  const auto in = GroupPredicate::parse("income in >50K|>50K.");
  CHECK(in.matches(">50K."));
  CHECK(!in.matches("<=50K"));
  CHECK_THROWS_AS(GroupPredicate::parse("nonsense"), ConfigError);
}

TEST_CASE("encode: min-max scaling, one-hot, age mask") {
  const Dataset d = encode(parse_csv(kTable), SchemaSpec::from_config(Config::parse(kSchema)));
  REQUIRE(d.n_cases() == 3);
  REQUIRE(d.n_features() == 5);
  CHECK(d.feature_names[0] == "age");
  CHECK(d.feature_names[2] == "color=a");
  CHECK(d.features(0, 1) == 0.0);
  CHECK(d.features(1, 1) == 0.5);
  CHECK(d.features(2, 1) == 1.0);
  for (Eigen::Index r = 0; r < 3; ++r) {
    CHECK(d.features.row(r).tail(3).sum() == 1.0);
    CHECK(d.features(r, 2 + r) == 1.0);
  }
  CHECK(d.mask_ya == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(d.mask_yb == std::vector<std::uint8_t>{0, 0, 1});
  CHECK(d.mask_xa == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(d.labels == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(d.label_x == "Fem/Male");
}

TEST_CASE("encode: constant numeric column becomes zeros") {
  const Dataset d = encode(parse_csv("age,score,color,sex,y\n22,5,a,f,1\n50,5,a,m,0\n"),
                           SchemaSpec::from_config(Config::parse(kSchema)));
  CHECK(d.features.col(1).isZero());
}

TEST_CASE("encode is deterministic") {
  const auto schema = SchemaSpec::from_config(Config::parse(kSchema));
  const Dataset a = encode(parse_csv(kTable), schema);
  const Dataset b = encode(parse_csv(kTable), schema);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
}

TEST_CASE("encode errors") {
  const auto schema = SchemaSpec::from_config(Config::parse(kSchema));
  CHECK_THROWS_AS(encode(parse_csv("age,score,color,sex,y\n22,x,a,f,1\n50,5,a,m,0\n"), schema),
                  DataError);
  CHECK_THROWS_AS(encode(parse_csv("age,score,color,sex,y\n22,,a,f,1\n50,5,a,m,0\n"), schema),
                  DataError);
  // every row female: empty male group
  CHECK_THROWS_AS(encode(parse_csv("age,score,color,sex,y\n22,1,a,f,1\n50,5,a,f,0\n"), schema),
                  DataError);
  CHECK_THROWS_AS(encode(parse_csv("age,color,sex,y\n22,a,f,1\n50,a,m,0\n"), schema), ConfigError);
}

TEST_CASE("schema validation") {
  const auto leaky = SchemaSpec::from_config(
      Config::parse("label = y == 1\nnumeric = y, age\nprotected_x = sex == f\nprotected_y = age <= 34\n"));
  CHECK_THROWS_AS(encode(parse_csv("y,age,sex\n1,20,f\n0,40,m\n"), leaky), ConfigError);
  CHECK_THROWS_AS(SchemaSpec::from_config(Config::parse(
                      "label = y == 1\nnumeric = a\nprotected_x = sex == f\nprotected_y = age <= 0\n")),
                  ConfigError);
}

TEST_CASE("feature count check") {
  Rng rng(1);
  const Dataset d14 = testing::random_dataset(rng, 6, 14);
  CHECK(feature_count_check(d14, 14).pass);
  const Dataset d55 = testing::random_dataset(rng, 6, 55);
  CHECK(feature_count_check(d55, 55).pass);
  const Dataset d40 = testing::random_dataset(rng, 6, 40);
  const auto r = feature_count_check(d40, 14);
  CHECK(!r.pass);
  CHECK(r.message.find("40") != std::string::npos);
  CHECK(r.message.find("14") != std::string::npos);
}

TEST_CASE("shipped promotion schema encodes 14 features") {
  const Dataset& d = testing::promotion_source();
  CHECK(d.n_features() == 14);
  CHECK(d.n_cases() == 54808);
  CHECK(d.features.minCoeff() >= 0.0);
  CHECK(d.features.maxCoeff() <= 1.0);
  for (std::size_t r = 0; r < d.n_cases(); ++r) {
    CHECK_FALSE(d.mask_xa[r] == d.mask_xb[r]);
    CHECK_FALSE(d.mask_ya[r] == d.mask_yb[r]);
  }
}

TEST_CASE("dataset subset keeps masks aligned") {
  Rng rng(2);
  const Dataset d = testing::random_dataset(rng, 10, 3);
  const std::vector<std::size_t> rows{1, 0, 7};
  const Dataset s = d.subset(rows);
  CHECK(s.n_cases() == 3);
  CHECK(s.labels[2] == d.labels[7]);
  CHECK(s.features.row(0) == d.features.row(1));
}

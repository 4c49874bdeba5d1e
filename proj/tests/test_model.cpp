// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using joinweaver::ScoreBundle;
using joinweaver::ValidationOutcome;
using joinweaver::Weights;

namespace {

bool has_violation(const ValidationOutcome& outcome, const std::string& text) {
  return std::find(outcome.violations.begin(), outcome.violations.end(),
                   text) != outcome.violations.end();
}

}  // namespace

TEST_CASE("index_of resolves ids and rejects strangers") {
  const ScoreBundle b = testsupport::network_fixture();
  REQUIRE(joinweaver::index_of(b, "network_1.friend") == 0);
  REQUIRE(joinweaver::index_of(b, "network_2.personfriend") == 2);
  REQUIRE_FALSE(joinweaver::index_of(b, "network_1.likes").has_value());
}

TEST_CASE("weights validity") {
  REQUIRE(Weights{}.valid());
  REQUIRE(Weights{0.0, 0.0, 1.0}.valid());
  REQUIRE_FALSE(Weights{0.0, 0.0, 0.0}.valid());
  REQUIRE_FALSE(Weights{-1.0, 1.0, 1.0}.valid());
  REQUIRE_FALSE(
      Weights{std::numeric_limits<double>::quiet_NaN(), 1.0, 1.0}.valid());
  REQUIRE_FALSE(
      Weights{1.0, std::numeric_limits<double>::infinity(), 1.0}.valid());
}

TEST_CASE("fresh context is empty with zeroed coverage") {
  const ScoreBundle b = testsupport::network_fixture();
  const joinweaver::Context ctx = joinweaver::make_context(b);
  REQUIRE(ctx.selected.empty());
  REQUIRE(ctx.edges.empty());
  REQUIRE(ctx.coverage == std::vector<double>(4, 0.0));
  REQUIRE_FALSE(ctx.contains(0));
}

TEST_CASE("fixture bundle passes validation") {
  REQUIRE(joinweaver::validate_bundle(testsupport::network_fixture()).ok());
}

TEST_CASE("validation reports each broken rule by field and index") {
  SECTION("nonzero omega diagonal") {
    ScoreBundle b = testsupport::network_fixture();
    b.omega[2][2] = 0.5;
    REQUIRE(has_violation(joinweaver::validate_bundle(b),
                          "omega diagonal nonzero at 2"));
  }
  SECTION("asymmetric omega") {
    ScoreBundle b = testsupport::network_fixture();
    b.omega[1][2] = 0.3;
    REQUIRE(has_violation(joinweaver::validate_bundle(b),
                          "omega not symmetric at (1,2)"));
  }
  SECTION("negative omega is out of range") {
    ScoreBundle b = testsupport::network_fixture();
    b.omega[0][1] = -0.2;
    b.omega[1][0] = -0.2;
    REQUIRE(has_violation(joinweaver::validate_bundle(b),
                          "omega out of range at (0,1)"));
  }
  SECTION("r outside the unit interval") {
    ScoreBundle b = testsupport::network_fixture();
    b.r[1] = 1.5;
    REQUIRE(has_violation(joinweaver::validate_bundle(b), "r out of range at 1"));
  }
  SECTION("NaN scores are out of range") {
    ScoreBundle b = testsupport::network_fixture();
    b.F[2][0] = std::numeric_limits<double>::quiet_NaN();
    REQUIRE(has_violation(joinweaver::validate_bundle(b),
                          "F out of range at (2,0)"));
  }
  SECTION("duplicate candidate id") {
    ScoreBundle b = testsupport::network_fixture();
    b.candidates[2].id = "network_1.friend";
    REQUIRE(has_violation(joinweaver::validate_bundle(b),
                          "candidate id duplicated: network_1.friend"));
  }
  SECTION("rank gap") {
    ScoreBundle b = testsupport::network_fixture();
    b.candidates[1].rank = 5;
    REQUIRE(has_violation(joinweaver::validate_bundle(b),
                          "candidate rank not contiguous at 1"));
  }
  SECTION("subquery id gap") {
    ScoreBundle b = testsupport::network_fixture();
    b.subqueries[3].id = 7;
    REQUIRE(has_violation(joinweaver::validate_bundle(b),
                          "subquery id not contiguous at 3"));
  }
  SECTION("dimension mismatches") {
    ScoreBundle b = testsupport::network_fixture();
    b.r.push_back(0.1);
    b.F[1].pop_back();
    b.omega.pop_back();
    const ValidationOutcome outcome = joinweaver::validate_bundle(b);
    REQUIRE(has_violation(outcome, "r length 4 != candidate count 3"));
    REQUIRE(has_violation(outcome, "F row length mismatch at 1"));
    REQUIRE(has_violation(outcome, "omega row count 2 != candidate count 3"));
  }
  SECTION("empty gold") {
    ScoreBundle b = testsupport::network_fixture();
    b.gold.clear();
    REQUIRE(has_violation(joinweaver::validate_bundle(b), "gold empty"));
  }
  SECTION("empty bundle") {
    const ValidationOutcome outcome = joinweaver::validate_bundle(ScoreBundle{});
    REQUIRE(has_violation(outcome, "no candidates"));
    REQUIRE(has_violation(outcome, "no subqueries"));
    REQUIRE(has_violation(outcome, "gold empty"));
  }
}

TEST_CASE("method names round-trip") {
  using joinweaver::Method;
  for (Method m : {Method::greedy, Method::oracle, Method::dense,
                   Method::coverage_first}) {
    REQUIRE(joinweaver::method_from_string(joinweaver::to_string(m)) == m);
  }
  REQUIRE_FALSE(joinweaver::method_from_string("bm25").has_value());
}

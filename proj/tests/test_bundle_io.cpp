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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "support.hpp"

using joinweaver::MethodResults;
using joinweaver::RunEntry;
using joinweaver::ScoreBundle;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool bundles_equal(const ScoreBundle& a, const ScoreBundle& b) {
  if (a.query_id != b.query_id || a.query_text != b.query_text) return false;
  if (a.subqueries.size() != b.subqueries.size()) return false;
  for (std::size_t j = 0; j < a.subqueries.size(); ++j) {
    if (a.subqueries[j].id != b.subqueries[j].id ||
        a.subqueries[j].text != b.subqueries[j].text) {
      return false;
    }
  }
  if (a.candidates.size() != b.candidates.size()) return false;
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    if (a.candidates[i].id != b.candidates[i].id ||
        a.candidates[i].rank != b.candidates[i].rank) {
      return false;
    }
  }
  return a.r == b.r && a.F == b.F && a.omega == b.omega && a.gold == b.gold;
}

}  // namespace

TEST_CASE("bundles survive a write and reload bit for bit") {
  const fs::path dir = testsupport::make_temp_dir("roundtrip");

  SECTION("worked-example fixture") {
    const ScoreBundle original = testsupport::network_fixture();
    joinweaver::save_bundle(original, dir / "fixture.json");
    const ScoreBundle loaded = joinweaver::load_bundle(dir / "fixture.json");
    REQUIRE(bundles_equal(original, loaded));
  }
  SECTION("generated bundles, twice through the codec") {
    for (std::size_t trial = 0; trial < 20; ++trial) {
      const ScoreBundle original =
          joinweaver::generate(testsupport::varied_config(trial));
      joinweaver::save_bundle(original, dir / "g.json");
      const ScoreBundle once = joinweaver::load_bundle(dir / "g.json");
      REQUIRE(bundles_equal(original, once));
      joinweaver::save_bundle(once, dir / "g2.json");
      REQUIRE(slurp(dir / "g.json") == slurp(dir / "g2.json"));
    }
  }
}

TEST_CASE("document fields are checked strictly") {
  const nlohmann::json valid =
      joinweaver::bundle_to_json(testsupport::network_fixture());

  SECTION("accepts the writer's output") {
    REQUIRE_NOTHROW(joinweaver::bundle_from_json(valid));
  }
  SECTION("missing field") {
    nlohmann::json doc = valid;
    doc.erase("omega");
    REQUIRE_THROWS_WITH(joinweaver::bundle_from_json(doc),
                        Catch::Matchers::ContainsSubstring("omega"));
  }
  SECTION("unknown field") {
    nlohmann::json doc = valid;
    doc["notes"] = "extra";
    REQUIRE_THROWS_WITH(joinweaver::bundle_from_json(doc),
                        Catch::Matchers::ContainsSubstring("unknown field"));
  }
  SECTION("unsupported version") {
    nlohmann::json doc = valid;
    doc["format_version"] = 2;
    REQUIRE_THROWS_WITH(
        joinweaver::bundle_from_json(doc),
        Catch::Matchers::ContainsSubstring("format_version"));
  }
  SECTION("candidate entry shape") {
    nlohmann::json doc = valid;
    doc["candidates"][0]["score"] = 1.0;
    REQUIRE_THROWS_AS(joinweaver::bundle_from_json(doc),
                      joinweaver::ParseError);
  }
  SECTION("negative rank") {
    nlohmann::json doc = valid;
    doc["candidates"][1]["rank"] = -1;
    REQUIRE_THROWS_AS(joinweaver::bundle_from_json(doc),
                      joinweaver::ParseError);
  }
  SECTION("non-numeric score") {
    nlohmann::json doc = valid;
    doc["r"][0] = "0.6";
    REQUIRE_THROWS_WITH(joinweaver::bundle_from_json(doc),
                        Catch::Matchers::ContainsSubstring("r[0]"));
  }
  SECTION("non-string subquery") {
    nlohmann::json doc = valid;
    doc["subqueries"][2] = 7;
    REQUIRE_THROWS_AS(joinweaver::bundle_from_json(doc),
                      joinweaver::ParseError);
  }
}

TEST_CASE("loading reports io, parse and validation failures") {
  const fs::path dir = testsupport::make_temp_dir("loaderr");

  SECTION("missing file") {
    REQUIRE_THROWS_AS(joinweaver::load_bundle(dir / "absent.json"),
                      joinweaver::IoError);
  }
  SECTION("malformed text") {
    std::ofstream(dir / "broken.json") << "{ not json";
    REQUIRE_THROWS_AS(joinweaver::load_bundle(dir / "broken.json"),
                      joinweaver::ParseError);
  }
  SECTION("invariant violation") {
    ScoreBundle bad = testsupport::network_fixture();
    bad.omega[1][2] = 0.3;  // symmetry broken
    std::ofstream(dir / "bad.json")
        << joinweaver::bundle_to_json(bad).dump(2) << "\n";
    REQUIRE_THROWS_WITH(
        joinweaver::load_bundle(dir / "bad.json"),
        Catch::Matchers::ContainsSubstring("omega not symmetric at (1,2)"));
  }
}

TEST_CASE("directory loads are sorted and collect diagnostics") {
  const fs::path dir = testsupport::make_temp_dir("loaddir");

  ScoreBundle b1 = testsupport::network_fixture();
  b1.query_id = "q-b";
  ScoreBundle b2 = testsupport::network_fixture();
  b2.query_id = "q-a";
  ScoreBundle b3 = testsupport::network_fixture();
  b3.query_id = "q-c";
  joinweaver::save_bundle(b1, dir / "b.json");
  joinweaver::save_bundle(b2, dir / "a.json");
  joinweaver::save_bundle(b3, dir / "c.json");
  std::ofstream(dir / "README.txt") << "not a bundle";

  SECTION("all valid") {
    const joinweaver::LoadResult result = joinweaver::load_bundles(dir);
    REQUIRE(result.diagnostics.empty());
    REQUIRE(result.bundles.size() == 3);
    REQUIRE(result.bundles[0].query_id == "q-a");
    REQUIRE(result.bundles[1].query_id == "q-b");
    REQUIRE(result.bundles[2].query_id == "q-c");
  }
  SECTION("mixed directory") {
    std::ofstream(dir / "zz_broken.json") << "[1,2";
    ScoreBundle bad = testsupport::network_fixture();
    bad.gold.clear();
    std::ofstream(dir / "zz_invalid.json")
        << joinweaver::bundle_to_json(bad).dump(2) << "\n";

    const joinweaver::LoadResult result = joinweaver::load_bundles(dir);
    REQUIRE(result.bundles.size() == 3);
    REQUIRE(result.diagnostics.size() == 2);
    REQUIRE(result.diagnostics[0].kind == "parse");
    REQUIRE(result.diagnostics[1].kind == "validation");
    REQUIRE_THAT(result.diagnostics[1].message,
                 Catch::Matchers::ContainsSubstring("gold empty"));
  }
  SECTION("single file path") {
    const joinweaver::LoadResult result = joinweaver::load_bundles(dir / "a.json");
    REQUIRE(result.bundles.size() == 1);
    REQUIRE(result.bundles[0].query_id == "q-a");
  }
  SECTION("missing path throws") {
    REQUIRE_THROWS_AS(joinweaver::load_bundles(dir / "nope"),
                      joinweaver::IoError);
  }
}

TEST_CASE("result emission produces the three artifact kinds") {
  const fs::path dir = testsupport::make_temp_dir("emit");

  auto make_method = [](const std::string& label, double r2, double cr2,
                        double r3, double cr3) {
    MethodResults m;
    m.label = label;
    m.report.method = label;
    m.report.per_k[2] = joinweaver::KScore{r2, cr2};
    m.report.per_k[3] = joinweaver::KScore{r3, cr3};
    m.report.gold_histogram[2] = 5;
    RunEntry entry;
    entry.query_id = "q1";
    entry.result.selection = {"A", "B"};
    entry.result.trace.push_back(
        joinweaver::StepRecord{1, 0, 0.5, 1.0, 0.0, 4.0});
    m.entries.push_back(entry);
    return m;
  };

  SECTION("summary rows, one per method per k") {
    const std::vector<MethodResults> methods = {
        make_method("alpha", 90.0, 80.0, 95.0, 85.0),
        make_method("beta", 85.55, 80.0, 99.0, 90.0),
    };
    const joinweaver::WriteOutcome outcome =
        joinweaver::write_results(methods, dir);
    REQUIRE(outcome.warnings.empty());
    REQUIRE(fs::exists(dir / "results_alpha.json"));
    REQUIRE(fs::exists(dir / "results_beta.json"));

    const std::string csv = slurp(dir / "summary.csv");
    REQUIRE_THAT(csv, Catch::Matchers::StartsWith(
                          "method,k,recall_pct,cr_pct,elapsed_ms\n"));
    REQUIRE_THAT(csv, Catch::Matchers::ContainsSubstring("alpha,2,90.0,80.0,"));
    REQUIRE_THAT(csv, Catch::Matchers::ContainsSubstring("beta,2,85.5,80.0,"));
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);

    const auto doc =
        nlohmann::json::parse(slurp(dir / "results_alpha.json"));
    REQUIRE(doc["method"] == "alpha");
    REQUIRE(doc["entries"][0]["selection"] ==
            nlohmann::json::array({"A", "B"}));
    REQUIRE(doc["entries"][0]["trace"][0]["utility"] == 4.0);

    const std::string report = slurp(dir / "report.txt");
    REQUIRE_THAT(report, Catch::Matchers::ContainsSubstring("R@2"));
    REQUIRE_THAT(report, Catch::Matchers::ContainsSubstring("90.0*"));
    REQUIRE_THAT(report, Catch::Matchers::ContainsSubstring("99.0*"));
    REQUIRE_THAT(report, Catch::Matchers::ContainsSubstring("gold size histogram"));
    // Two rows only: no second-best marker.
    REQUIRE_THAT(report,
                 !Catch::Matchers::ContainsSubstring("+"));
  }

  SECTION("three rows add second-best markers") {
    const std::vector<MethodResults> methods = {
        make_method("alpha", 90.0, 80.0, 95.0, 85.0),
        make_method("beta", 85.0, 80.0, 99.0, 90.0),
        make_method("gamma", 70.0, 60.0, 80.0, 70.0),
    };
    joinweaver::write_results(methods, dir);
    const std::string report = slurp(dir / "report.txt");
    REQUIRE_THAT(report, Catch::Matchers::ContainsSubstring("85.0+"));
    // Tied best values share the star.
    REQUIRE_THAT(report, Catch::Matchers::ContainsSubstring("80.0*"));
  }

  SECTION("empty results warn and emit a bare header") {
    const joinweaver::WriteOutcome outcome =
        joinweaver::write_results({}, dir);
    REQUIRE_FALSE(outcome.warnings.empty());
    REQUIRE(slurp(dir / "summary.csv") ==
            "method,k,recall_pct,cr_pct,elapsed_ms\n");
  }

  SECTION("solver status section appears when statuses exist") {
    MethodResults m = make_method("oracle", 100.0, 100.0, 100.0, 100.0);
    m.status_by_k[2] = joinweaver::StatusCounts{5, 0, 0};
    m.status_by_k[3] = joinweaver::StatusCounts{4, 1, 0};
    joinweaver::write_results({m}, dir);
    const std::string report = slurp(dir / "report.txt");
    REQUIRE_THAT(report,
                 Catch::Matchers::ContainsSubstring("oracle solver status by k"));
    REQUIRE_THAT(report, Catch::Matchers::ContainsSubstring(
                             "k=3: optimal=4 feasible=1 no_solution=0"));
  }
}

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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "joinweaver/joinweaver.hpp"

namespace testsupport {

/// Three-candidate network query with four sub-queries and no join scores.
/// Score matrix (rows = sub-queries, columns = friend, highschooler,
/// personfriend) chosen so that dense ranking and coverage-gain ranking
/// disagree with the coverage-first heuristic: personfriend wins segment S4
/// outright (0.5597 > 0.5490) yet contributes nothing once friend and
/// highschooler are in the set.
inline joinweaver::ScoreBundle network_fixture() {
  joinweaver::ScoreBundle b;
  b.query_id = "network-0001";
  b.query_text = "high schoolers and the friends they name";
  b.subqueries = {{0, "S1"}, {1, "S2"}, {2, "S3"}, {3, "S4"}};
  b.candidates = {{"network_1.friend", 0},
                  {"network_1.highschooler", 1},
                  {"network_2.personfriend", 2}};
  b.r = {0.6121, 0.5861, 0.5597};
  b.F = {
      {0.5297, 0.5313, 0.5291},
      {0.6121, 0.5861, 0.5377},
      {0.6065, 0.5490, 0.5500},
      {0.5844, 0.5344, 0.5597},
  };
  b.omega = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  b.gold = {"network_1.friend", "network_1.highschooler"};
  return b;
}

/// Coverage-only instance on which greedy selection is strictly suboptimal.
/// Seeding grabs t0 (covers both segments moderately, total 1.15), after
/// which the best completion reaches only 1.2, while the optimal pair
/// {t1, t2} splits the segments for 1.21.
inline joinweaver::ScoreBundle greedy_trap_fixture() {
  joinweaver::ScoreBundle b;
  b.query_id = "trap-0001";
  b.query_text = "adversarial coverage split";
  b.subqueries = {{0, "A"}, {1, "B"}};
  b.candidates = {{"t0", 0}, {"t1", 1}, {"t2", 2}};
  b.r = {0.3, 0.2, 0.1};
  b.F = {
      {0.60, 0.61, 0.00},
      {0.55, 0.00, 0.60},
  };
  b.omega = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  b.gold = {"t1", "t2"};
  return b;
}

inline joinweaver::Weights coverage_only_weights() {
  return joinweaver::Weights{1.0, 0.0, 0.0};
}

/// Independent reimplementation of the set objective. Accumulates in the
/// same order as the library (coarse, then coverage with a zero floor, then
/// join pairs, members ascending) so agreement is exact, but shares no code
/// with it. Members must be ascending candidate indices.
inline double naive_objective(const std::vector<std::size_t>& members,
                              const joinweaver::ScoreBundle& b,
                              const joinweaver::Weights& w) {
  double coarse = 0.0;
  for (std::size_t i : members) coarse += b.r[i];
  double cov = 0.0;
  for (std::size_t j = 0; j < b.subquery_count(); ++j) {
    double best = 0.0;
    for (std::size_t i : members) best = std::max(best, b.F[j][i]);
    cov += best;
  }
  double join = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t c = a + 1; c < members.size(); ++c) {
      join += b.omega[members[a]][members[c]];
    }
  }
  return w.lambda_coarse * coarse + w.lambda_cov * cov + w.lambda_join * join;
}

struct NaiveBest {
  std::set<std::string> selection;
  double objective = 0.0;
  std::uint64_t evaluated = 0;
};

/// Unpruned exhaustive enumerator over all subsets of exactly min(k, N)
/// candidates, visiting combinations in lexicographic index order and
/// keeping the first strict maximum. Requires k >= 1.
inline NaiveBest naive_best_subset(const joinweaver::ScoreBundle& b,
                                   std::size_t k,
                                   const joinweaver::Weights& w) {
  const std::size_t n = b.table_count();
  const std::size_t target = std::min(k, n);
  std::vector<std::size_t> comb(target);
  std::iota(comb.begin(), comb.end(), std::size_t{0});

  NaiveBest best;
  bool have = false;
  std::vector<std::size_t> best_members;
  for (;;) {
    const double obj = naive_objective(comb, b, w);
    ++best.evaluated;
    if (!have || obj > best.objective) {
      have = true;
      best.objective = obj;
      best_members = comb;
    }

    std::size_t pos = target;
    bool advanced = false;
    while (pos-- > 0) {
      if (comb[pos] < n - (target - pos)) {
        ++comb[pos];
        for (std::size_t q = pos + 1; q < target; ++q) comb[q] = comb[q - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }

  for (std::size_t i : best_members) best.selection.insert(b.candidates[i].id);
  return best;
}

/// Deterministic spread of generator settings indexed by test iteration:
/// sizes 2..20, sub-query counts 1..8, noise 0..1.6, alternating join
/// chains.
inline joinweaver::SynthConfig varied_config(std::size_t index) {
  joinweaver::SynthConfig c;
  c.seed = 1000 + index;
  c.n_candidates = 2 + (index * 7) % 19;
  c.gold_size = std::min<std::size_t>(2 + index % 3, c.n_candidates);
  c.n_subqueries = 1 + (index * 3) % 8;
  c.signal = 0.4 + 0.1 * static_cast<double>(index % 6);
  c.noise = 0.4 * static_cast<double>(index % 5);
  c.chain_joins = (index % 2) == 0;
  return c;
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("joinweaver_" + tag + "_" + std::to_string(::getpid()) + "_" +
       std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport

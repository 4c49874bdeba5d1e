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
#include <chrono>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "joinweaver/model.hpp"

/// Reference selectors.
///
/// dense_topk passes the upstream retriever's ranking through unchanged.
///
/// coverage_first is the aggressive segment-coverage greedy: each round it
/// takes the single best (table, segment) pair over unselected tables and
/// uncovered segments, marks that one segment covered, and repeats. Once all
/// segments are covered, remaining slots fill with unselected tables by
/// descending max_j F_ji. Ties break toward the lowest rank, then the lowest
/// segment id.
namespace joinweaver {

/// First min(K, N) candidates by rank, in rank order. Ignores every score.
inline RetrievalResult dense_topk(const ScoreBundle& bundle, std::size_t k) {
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::size_t> by_rank(bundle.table_count());
  std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
  std::sort(by_rank.begin(), by_rank.end(),
            [&bundle](std::size_t a, std::size_t b) {
              return bundle.candidates[a].rank < bundle.candidates[b].rank;
            });

  RetrievalResult result;
  result.method = Method::dense;
  const std::size_t take = std::min(k, by_rank.size());
  for (std::size_t i = 0; i < take; ++i) {
    result.selection.push_back(bundle.candidates[by_rank[i]].id);
  }
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - t0);
  return result;
}

/// One coverage-first iteration: the table chosen, the segment it covered
/// (empty once segments were exhausted and the fill rule took over), and the
/// pivot F score that won the round.
struct CoverageStep {
  std::size_t table = 0;
  std::optional<std::size_t> segment;
  double score = 0.0;
};

inline std::vector<CoverageStep> coverage_first_steps(const ScoreBundle& bundle,
                                                      std::size_t k) {
  const std::size_t n = bundle.table_count();
  const std::size_t jn = bundle.subquery_count();
  const std::size_t take = std::min(k, n);

  std::vector<bool> selected(n, false);
  std::vector<bool> covered(jn, false);
  std::size_t covered_count = 0;
  std::vector<CoverageStep> steps;

  while (steps.size() < take && covered_count < jn) {
    bool found = false;
    std::size_t best_i = 0, best_j = 0;
    std::size_t best_rank = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      const std::size_t rank = bundle.candidates[i].rank;
      for (std::size_t j = 0; j < jn; ++j) {
        if (covered[j]) continue;
        const double score = bundle.F[j][i];
        const bool better =
            !found || score > best_score ||
            (score == best_score &&
             (rank < best_rank || (rank == best_rank && j < best_j)));
        if (better) {
          found = true;
          best_i = i;
          best_j = j;
          best_rank = rank;
          best_score = score;
        }
      }
    }
    if (!found) break;
    selected[best_i] = true;
    covered[best_j] = true;
    ++covered_count;
    steps.push_back(CoverageStep{best_i, best_j, best_score});
  }

  // Fill remaining slots by descending max_j F_ji among unselected tables.
  while (steps.size() < take) {
    bool found = false;
    std::size_t best_i = 0;
    std::size_t best_rank = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      double table_best = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < jn; ++j) {
        table_best = std::max(table_best, bundle.F[j][i]);
      }
      const std::size_t rank = bundle.candidates[i].rank;
      if (!found || table_best > best_score ||
          (table_best == best_score && rank < best_rank)) {
        found = true;
        best_i = i;
        best_rank = rank;
        best_score = table_best;
      }
    }
    if (!found) break;
    selected[best_i] = true;
    steps.push_back(CoverageStep{best_i, std::nullopt, best_score});
  }

  return steps;
}

inline RetrievalResult coverage_first(const ScoreBundle& bundle, std::size_t k) {
  const auto t0 = std::chrono::steady_clock::now();
  RetrievalResult result;
  result.method = Method::coverage_first;
  for (const CoverageStep& step : coverage_first_steps(bundle, k)) {
    result.selection.push_back(bundle.candidates[step.table].id);
  }
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - t0);
  return result;
}

}  // namespace joinweaver

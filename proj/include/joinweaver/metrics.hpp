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

#include <chrono>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "joinweaver/model.hpp"

/// Recall and Complete Recall.
///
/// R@K is the fraction of gold tables among the first K retrieved; CR@K is
/// the binary set-level metric equal to 1 iff every gold table is within the
/// top K. Selections shorter than K (early stop, or N < K) are evaluated
/// as-is. Aggregation is the macro mean over queries, reported as a
/// percentage.
namespace joinweaver {

class MissingGoldError : public std::runtime_error {
 public:
  explicit MissingGoldError(const std::string& what)
      : std::runtime_error(what) {}
};

inline double recall_at(const std::vector<std::string>& selection,
                        const std::set<std::string>& gold) {
  if (gold.empty()) throw std::invalid_argument("recall_at: empty gold set");
  std::size_t hits = 0;
  for (const std::string& id : selection) {
    if (gold.count(id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

/// 1 iff gold is a subset of the selection.
inline bool complete_recall_at(const std::vector<std::string>& selection,
                               const std::set<std::string>& gold) {
  if (gold.empty()) {
    throw std::invalid_argument("complete_recall_at: empty gold set");
  }
  std::size_t hits = 0;
  for (const std::string& id : selection) {
    if (gold.count(id)) ++hits;
  }
  return hits == gold.size();
}

struct QueryScore {
  std::string query_id;
  int k = 0;
  double recall = 0.0;  // in [0, 1]
  bool complete = false;
};

/// Scores one selection at cutoff k (truncation to the first k ids).
inline QueryScore score_query(const std::string& query_id,
                              const std::vector<std::string>& selection,
                              const std::set<std::string>& gold, int k) {
  std::vector<std::string> top(
      selection.begin(),
      selection.begin() +
          static_cast<std::ptrdiff_t>(std::min<std::size_t>(
              selection.size(), static_cast<std::size_t>(std::max(k, 0)))));
  QueryScore score;
  score.query_id = query_id;
  score.k = k;
  score.recall = recall_at(top, gold);
  score.complete = complete_recall_at(top, gold);
  return score;
}

struct KScore {
  double recall_pct = 0.0;  // mean recall x 100
  double cr_pct = 0.0;      // mean complete recall x 100
};

struct MetricsReport {
  std::string method;
  std::map<int, KScore> per_k;
  std::chrono::nanoseconds elapsed_total{0};
  std::map<std::size_t, std::size_t> gold_histogram;  // gold size -> queries
};

using GoldMap = std::map<std::string, std::set<std::string>>;

/// Macro aggregation over queries: per K, truncate each selection to its
/// first K ids, average R and CR, and report x100. Includes the gold-size
/// histogram and the summed per-query elapsed time. Order-independent over
/// queries.
inline MetricsReport aggregate(
    const std::vector<std::pair<std::string, RetrievalResult>>& results,
    const GoldMap& golds, const std::vector<int>& k_list,
    const std::string& method_label) {
  MetricsReport report;
  report.method = method_label;

  for (const auto& [query_id, result] : results) {
    auto it = golds.find(query_id);
    if (it == golds.end()) {
      throw MissingGoldError("no gold set for query " + query_id);
    }
    ++report.gold_histogram[it->second.size()];
    report.elapsed_total += result.elapsed;
  }

  for (int k : k_list) {
    double recall_sum = 0.0;
    double cr_sum = 0.0;
    for (const auto& [query_id, result] : results) {
      const QueryScore s =
          score_query(query_id, result.selection, golds.at(query_id), k);
      recall_sum += s.recall;
      cr_sum += s.complete ? 1.0 : 0.0;
    }
    const double count =
        results.empty() ? 1.0 : static_cast<double>(results.size());
    report.per_k[k] =
        KScore{100.0 * recall_sum / count, 100.0 * cr_sum / count};
  }

  return report;
}

}  // namespace joinweaver

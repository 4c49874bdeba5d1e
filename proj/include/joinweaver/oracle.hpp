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
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "joinweaver/model.hpp"

/// Exhaustive maximization of the order-free set objective
///
///   obj(S) = lambda_coarse * sum_{i in S} r_i
///          + lambda_cov    * sum_j max(0, max_{i in S} F_ji)
///          + lambda_join   * sum_{{i,l} subset S} omega_il
///
/// over all subsets of exactly min(K, N) candidates. Serves as the
/// correctness oracle for the greedy selector. The budget caps the number of
/// subset evaluations so runs stay deterministic and machine-independent;
/// status mirrors a solver's taxonomy: Optimal when enumeration completed,
/// Feasible when the budget halted it with a best-so-far in hand, NoSolution
/// when the budget allowed no evaluation at all.
namespace joinweaver {

enum class OracleStatus { optimal, feasible, no_solution };

inline const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::optimal: return "optimal";
    case OracleStatus::feasible: return "feasible";
    case OracleStatus::no_solution: return "no_solution";
  }
  return "unknown";
}

struct OracleOutcome {
  OracleStatus status = OracleStatus::no_solution;
  std::optional<std::set<std::string>> selection;
  std::optional<double> objective;
  std::uint64_t explored = 0;  // subsets evaluated
};

/// Set objective of `selection` (any order, duplicates rejected).
/// Terms are accumulated in rank order so that independent implementations
/// following the same order agree bitwise. Empty set -> 0.
inline double set_objective(std::span<const std::size_t> selection,
                            const ScoreBundle& bundle, const Weights& w) {
  const std::size_t n = bundle.table_count();
  std::vector<std::size_t> members(selection.begin(), selection.end());
  for (std::size_t i : members) {
    if (i >= n) throw std::invalid_argument("set_objective: index out of range");
  }
  std::sort(members.begin(), members.end(),
            [&bundle](std::size_t a, std::size_t b) {
              return bundle.candidates[a].rank < bundle.candidates[b].rank;
            });
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw std::invalid_argument("set_objective: duplicate index");
  }
  if (members.empty()) return 0.0;

  double coarse = 0.0;
  for (std::size_t i : members) coarse += bundle.r[i];

  double cov = 0.0;
  for (std::size_t j = 0; j < bundle.subquery_count(); ++j) {
    double best = 0.0;
    for (std::size_t i : members) best = std::max(best, bundle.F[j][i]);
    cov += best;
  }

  double join = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      join += bundle.omega[members[a]][members[b]];
    }
  }

  return w.lambda_coarse * coarse + w.lambda_cov * cov + w.lambda_join * join;
}

namespace detail {

// Bound slack absorbing floating-point accumulation differences so that
// pruning can never cut off a subtree holding a strictly better subset.
inline constexpr double kPruneMargin = 1e-9;

struct OracleSearch {
  const ScoreBundle& bundle;
  const Weights& w;
  std::size_t target = 0;
  std::uint64_t budget = 0;
  bool prune = false;

  std::vector<std::size_t> order;       // candidate indices in rank order
  std::vector<double> optimistic;       // per-candidate admissible gain cap
  std::vector<std::size_t> partial;
  std::uint64_t explored = 0;
  bool halted = false;
  bool have_best = false;
  double best_objective = 0.0;
  std::vector<std::size_t> best_set;

  OracleSearch(const ScoreBundle& b, const Weights& weights, std::size_t k,
               std::uint64_t max_evals, bool enable_prune)
      : bundle(b), w(weights), target(k), budget(max_evals),
        prune(enable_prune) {
    order.resize(bundle.table_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&b](std::size_t a, std::size_t c) {
                return b.candidates[a].rank < b.candidates[c].rank;
              });
    optimistic.reserve(order.size());
    for (std::size_t i : order) {
      // r clamped up, full coverage residual, positive part of the omega
      // row. Each term caps the candidate's possible contribution, so the
      // bound stays admissible for any completion.
      double cov = 0.0;
      for (std::size_t j = 0; j < bundle.subquery_count(); ++j) {
        cov += std::max(0.0, bundle.F[j][i]);
      }
      double row = 0.0;
      for (double v : bundle.omega[i]) row += std::max(0.0, v);
      optimistic.push_back(w.lambda_coarse * std::max(0.0, bundle.r[i]) +
                           w.lambda_cov * cov + w.lambda_join * row);
    }
  }

  // Admissible upper bound for any completion of `partial` using candidates
  // at positions >= pos of `order`.
  double upper_bound(std::size_t pos) const {
    const std::size_t need = target - partial.size();
    std::vector<double> gains(optimistic.begin() + static_cast<std::ptrdiff_t>(pos),
                              optimistic.end());
    std::partial_sort(gains.begin(),
                      gains.begin() + static_cast<std::ptrdiff_t>(need),
                      gains.end(), std::greater<>());
    double bound = set_objective(partial, bundle, w);
    for (std::size_t t = 0; t < need; ++t) bound += gains[t];
    return bound;
  }

  void evaluate_leaf() {
    if (explored >= budget) {
      halted = true;
      return;
    }
    ++explored;
    const double obj = set_objective(partial, bundle, w);
    // Strict improvement only: enumeration is in lexicographic rank order,
    // so the first maximizer found is the lexicographically smallest.
    if (!have_best || obj > best_objective) {
      have_best = true;
      best_objective = obj;
      best_set = partial;
    }
  }

  void walk(std::size_t pos) {
    if (halted) return;
    if (partial.size() == target) {
      evaluate_leaf();
      return;
    }
    const std::size_t need = target - partial.size();
    if (order.size() - pos < need) return;
    if (prune && have_best &&
        upper_bound(pos) < best_objective - kPruneMargin) {
      return;
    }
    for (std::size_t p = pos; p < order.size() && !halted; ++p) {
      if (order.size() - p < need) break;
      partial.push_back(order[p]);
      walk(p + 1);
      partial.pop_back();
    }
  }
};

}  // namespace detail

/// Maximizes the set objective over all subsets of exactly min(K, N)
/// candidates, evaluating at most `budget` subsets. Ties break toward the
/// lexicographically smallest rank tuple. Pruning (on by default) uses an
/// admissible bound and never changes the returned optimum.
inline OracleOutcome best_subset(const ScoreBundle& bundle, std::size_t k,
                                 const Weights& w, std::uint64_t budget,
                                 bool prune = true) {
  if (k == 0) throw std::invalid_argument("best_subset: K must be >= 1");
  const std::size_t target = std::min(k, bundle.table_count());

  detail::OracleSearch search(bundle, w, target, budget, prune);
  search.walk(0);

  OracleOutcome out;
  out.explored = search.explored;
  if (!search.have_best) {
    out.status = OracleStatus::no_solution;
    return out;
  }
  out.status = search.halted ? OracleStatus::feasible : OracleStatus::optimal;
  out.objective = search.best_objective;
  std::set<std::string> ids;
  for (std::size_t i : search.best_set) ids.insert(bundle.candidates[i].id);
  out.selection = std::move(ids);
  return out;
}

}  // namespace joinweaver

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
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

/// Core data model for multi-table retrieval over pre-computed scores.
///
/// A ScoreBundle is one query's complete input: the candidate pool (ordered
/// by the upstream dense-retrieval rank), the query's fine-grained concepts
/// (sub-queries), a coarse relevance vector r, a fine-grained relevance
/// matrix F (sub-query x candidate), a symmetric join-compatibility matrix
/// omega, and the gold table set. Score computation from raw corpora is out
/// of scope; bundles are the boundary.
///
/// All types are plain values. Once built they are treated as immutable and
/// may be shared read-only across concurrent workers.
namespace joinweaver {

/// One fine-grained concept decomposed from the query, e.g. "movies:keyword".
/// Ids are dense 0..J-1 within a bundle.
struct SubQuery {
  std::size_t id = 0;
  std::string text;
};

/// A table in the candidate pool. `rank` is the 0-based position in the
/// initial dense-retrieval ordering and doubles as the deterministic
/// tie-breaking key for every argmax in the selectors.
struct CandidateTable {
  std::string id;
  std::size_t rank = 0;
};

struct ScoreBundle {
  std::string query_id;
  std::string query_text;
  std::vector<CandidateTable> candidates;  // length N, ordered by rank
  std::vector<SubQuery> subqueries;        // length J
  std::vector<double> r;                   // N, each in [-1, 1]
  std::vector<std::vector<double>> F;      // J x N, F[j][i] in [-1, 1]
  std::vector<std::vector<double>> omega;  // N x N, symmetric, zero diagonal
  std::set<std::string> gold;              // non-empty; ids may be absent
                                           // from candidates (upstream miss)

  std::size_t table_count() const { return candidates.size(); }
  std::size_t subquery_count() const { return subqueries.size(); }
};

/// Position of `id` in the candidate list, if present.
inline std::optional<std::size_t> index_of(const ScoreBundle& bundle,
                                           std::string_view id) {
  for (std::size_t i = 0; i < bundle.candidates.size(); ++i) {
    if (bundle.candidates[i].id == id) return i;
  }
  return std::nullopt;
}

/// The three utility coefficients. All finite and >= 0, at least one > 0.
struct Weights {
  double lambda_cov = 2.0;
  double lambda_join = 1.0;
  double lambda_coarse = 4.0;

  bool valid() const {
    const bool finite = std::isfinite(lambda_cov) &&
                        std::isfinite(lambda_join) &&
                        std::isfinite(lambda_coarse);
    const bool nonneg =
        lambda_cov >= 0.0 && lambda_join >= 0.0 && lambda_coarse >= 0.0;
    const bool any = lambda_cov > 0.0 || lambda_join > 0.0 || lambda_coarse > 0.0;
    return finite && nonneg && any;
  }
};

/// Stop after `max_k` selections, or earlier once every coverage entry
/// reaches `theta` (when set).
struct StoppingRule {
  std::size_t max_k = 1;
  std::optional<double> theta;
};

/// A join edge discovered at selection time: `a` is the later-chosen table,
/// `b` one already in the set, `omega` their compatibility score.
struct JoinEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double omega = 0.0;
};

/// Search state after k selections: the selected tables in selection order,
/// the join edges above the edge threshold among them, and the per-concept
/// coverage vector (running maximum of F, starting at zero).
struct Context {
  std::vector<std::size_t> selected;
  std::vector<JoinEdge> edges;
  std::vector<double> coverage;  // length J, elementwise non-decreasing

  bool contains(std::size_t index) const {
    for (std::size_t s : selected) {
      if (s == index) return true;
    }
    return false;
  }
};

/// Empty context C_0 for `bundle`: nothing selected, zero coverage.
inline Context make_context(const ScoreBundle& bundle) {
  Context ctx;
  ctx.coverage.assign(bundle.subquery_count(), 0.0);
  return ctx;
}

/// One greedy step of the trace. `utility` equals
/// lambda_coarse*g_coarse + lambda_cov*g_cov + lambda_join*g_join.
struct StepRecord {
  std::size_t step = 0;  // 1-based
  std::size_t chosen = 0;
  double g_coarse = 0.0;
  double g_cov = 0.0;
  double g_join = 0.0;
  double utility = 0.0;
};

enum class Method { greedy, oracle, dense, coverage_first };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::greedy: return "greedy";
    case Method::oracle: return "oracle";
    case Method::dense: return "dense";
    case Method::coverage_first: return "coverage_first";
  }
  return "unknown";
}

inline std::optional<Method> method_from_string(std::string_view name) {
  if (name == "greedy") return Method::greedy;
  if (name == "oracle") return Method::oracle;
  if (name == "dense") return Method::dense;
  if (name == "coverage_first") return Method::coverage_first;
  return std::nullopt;
}

/// Ranked selection plus the per-step gain trace (greedy only; empty for
/// the non-iterative methods).
struct RetrievalResult {
  Method method = Method::greedy;
  std::vector<std::string> selection;  // ordered table ids, no duplicates
  std::vector<StepRecord> trace;
  std::chrono::nanoseconds elapsed{0};
};

/// Violations are data, not faults: an invalid bundle is reported, not thrown.
struct ValidationOutcome {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool in_unit_interval(double v) { return v >= -1.0 && v <= 1.0; }

}  // namespace detail

/// Checks every structural invariant of a bundle and reports each broken
/// rule with the field and index involved. Pure: identical inputs give
/// identical outcomes.
inline ValidationOutcome validate_bundle(const ScoreBundle& bundle) {
  ValidationOutcome out;
  auto flag = [&out](const std::string& msg) { out.violations.push_back(msg); };
  std::ostringstream os;
  auto msg = [&os]() {
    std::string s = os.str();
    os.str(std::string());
    return s;
  };

  const std::size_t n = bundle.table_count();
  const std::size_t j = bundle.subquery_count();

  if (n == 0) flag("no candidates");
  if (j == 0) flag("no subqueries");

  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < n; ++i) {
    const CandidateTable& c = bundle.candidates[i];
    if (!seen_ids.insert(c.id).second) {
      os << "candidate id duplicated: " << c.id;
      flag(msg());
    }
    if (c.rank != i) {
      os << "candidate rank not contiguous at " << i;
      flag(msg());
    }
  }
  for (std::size_t q = 0; q < j; ++q) {
    if (bundle.subqueries[q].id != q) {
      os << "subquery id not contiguous at " << q;
      flag(msg());
    }
  }

  if (bundle.r.size() != n) {
    os << "r length " << bundle.r.size() << " != candidate count " << n;
    flag(msg());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!detail::in_unit_interval(bundle.r[i])) {
        os << "r out of range at " << i;
        flag(msg());
      }
    }
  }

  if (bundle.F.size() != j) {
    os << "F row count " << bundle.F.size() << " != subquery count " << j;
    flag(msg());
  } else {
    for (std::size_t row = 0; row < j; ++row) {
      if (bundle.F[row].size() != n) {
        os << "F row length mismatch at " << row;
        flag(msg());
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!detail::in_unit_interval(bundle.F[row][i])) {
          os << "F out of range at (" << row << "," << i << ")";
          flag(msg());
        }
      }
    }
  }

  if (bundle.omega.size() != n) {
    os << "omega row count " << bundle.omega.size() << " != candidate count "
       << n;
    flag(msg());
  } else {
    bool shape_ok = true;
    for (std::size_t row = 0; row < n; ++row) {
      if (bundle.omega[row].size() != n) {
        os << "omega row length mismatch at " << row;
        flag(msg());
        shape_ok = false;
      }
    }
    if (shape_ok) {
      for (std::size_t row = 0; row < n; ++row) {
        if (bundle.omega[row][row] != 0.0) {
          os << "omega diagonal nonzero at " << row;
          flag(msg());
        }
        for (std::size_t col = 0; col < n; ++col) {
          const double v = bundle.omega[row][col];
          if (!(v >= 0.0 && v <= 1.0)) {
            os << "omega out of range at (" << row << "," << col << ")";
            flag(msg());
          }
          if (col > row && v != bundle.omega[col][row]) {
            os << "omega not symmetric at (" << row << "," << col << ")";
            flag(msg());
          }
        }
      }
    }
  }

  if (bundle.gold.empty()) flag("gold empty");

  return out;
}

}  // namespace joinweaver

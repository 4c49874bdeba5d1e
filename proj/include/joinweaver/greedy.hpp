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
#include <span>
#include <stdexcept>
#include <utility>

#include "joinweaver/model.hpp"

/// Iterative join-aware greedy selection.
///
/// Each step picks the unselected table maximizing a weighted sum of three
/// marginal gains against the current context:
///
///   g_coarse = r_i                                   (intrinsic relevance)
///   g_cov    = sum_j max(0, F_ji - coverage_j)       (new concept coverage)
///   g_join   = sum_{l in selected} omega_il          (joinability to the set)
///
/// The context update appends the chosen table, raises coverage to the
/// elementwise max with the chosen table's F column, and records join edges
/// whose omega clears the edge threshold (edges are interpretability output
/// only; the utility always uses omega directly).
///
/// The seed step is the same maximization against the empty context, where
/// g_join vanishes and g_cov reduces to sum_j max(0, F_ji). Negative F
/// entries therefore never contribute coverage: coverage starts at zero and
/// only max-updates.
///
/// All argmax ties break toward the lowest initial rank. A single run is
/// strictly sequential (path-dependent); distinct runs over shared bundles
/// are safe to execute concurrently.
namespace joinweaver {

inline constexpr double kDefaultEdgeThreshold = 0.5;

/// Marginal gain components of one candidate against one context.
/// g_cov and g_join are always >= 0; g_coarse may be negative.
struct GainTriple {
  double g_coarse = 0.0;
  double g_cov = 0.0;
  double g_join = 0.0;
};

struct Pick {
  std::size_t index = 0;
  GainTriple gains;
};

class EmptyPoolError : public std::runtime_error {
 public:
  explicit EmptyPoolError(const std::string& what) : std::runtime_error(what) {}
};

/// sum_j max(0, f_col[j] - coverage[j]); always >= 0.
inline double coverage_gain(std::span<const double> f_col,
                            std::span<const double> coverage) {
  if (f_col.size() != coverage.size()) {
    throw std::invalid_argument("coverage_gain: length mismatch");
  }
  double gain = 0.0;
  for (std::size_t j = 0; j < f_col.size(); ++j) {
    gain += std::max(0.0, f_col[j] - coverage[j]);
  }
  return gain;
}

/// sum over selected of omega_row[l]; >= 0. The caller guarantees the row's
/// own table is not among `selected` (checked where the index is known).
inline double join_gain(std::span<const double> omega_row,
                        std::span<const std::size_t> selected) {
  double gain = 0.0;
  for (std::size_t l : selected) {
    if (l >= omega_row.size()) {
      throw std::invalid_argument("join_gain: selected index out of range");
    }
    gain += omega_row[l];
  }
  return gain;
}

/// Utility of adding `candidate` to `ctx`:
/// lambda_coarse*g_coarse + lambda_cov*g_cov + lambda_join*g_join.
inline std::pair<double, GainTriple> utility(std::size_t candidate,
                                             const Context& ctx,
                                             const ScoreBundle& bundle,
                                             const Weights& w) {
  if (candidate >= bundle.table_count()) {
    throw std::invalid_argument("utility: candidate index out of range");
  }
  if (ctx.contains(candidate)) {
    throw std::invalid_argument("utility: candidate already selected");
  }
  if (ctx.coverage.size() != bundle.subquery_count()) {
    throw std::invalid_argument("utility: coverage length mismatch");
  }

  GainTriple g;
  g.g_coarse = bundle.r[candidate];
  for (std::size_t j = 0; j < ctx.coverage.size(); ++j) {
    g.g_cov += std::max(0.0, bundle.F[j][candidate] - ctx.coverage[j]);
  }
  g.g_join = join_gain(bundle.omega[candidate], ctx.selected);

  const double u =
      w.lambda_coarse * g.g_coarse + w.lambda_cov * g.g_cov + w.lambda_join * g.g_join;
  return {u, g};
}

/// Argmax of utility over the unselected pool; ties go to the lowest rank.
inline Pick select_next(const Context& ctx, const ScoreBundle& bundle,
                        const Weights& w) {
  const std::size_t n = bundle.table_count();
  bool found = false;
  double best_u = 0.0;
  std::size_t best_rank = 0;
  Pick best;
  for (std::size_t i = 0; i < n; ++i) {
    if (ctx.contains(i)) continue;
    auto [u, gains] = utility(i, ctx, bundle, w);
    const std::size_t rank = bundle.candidates[i].rank;
    if (!found || u > best_u || (u == best_u && rank < best_rank)) {
      found = true;
      best_u = u;
      best_rank = rank;
      best = Pick{i, gains};
    }
  }
  if (!found) throw EmptyPoolError("select_next: no unselected candidate");
  return best;
}

/// Seed step: individual merit against the empty context, i.e.
/// lambda_coarse*r_i + lambda_cov*sum_j max(0, F_ji) with g_join = 0.
inline Pick seed_select(const ScoreBundle& bundle, const Weights& w) {
  if (bundle.table_count() == 0) {
    throw EmptyPoolError("seed_select: empty candidate pool");
  }
  return select_next(make_context(bundle), bundle, w);
}

/// Transition to the next context: append `chosen`, max-update coverage with
/// its F column, and add edges (chosen, l, omega) for every already-selected
/// l whose omega clears `edge_threshold`.
inline Context update_context(Context ctx, std::size_t chosen,
                              const ScoreBundle& bundle,
                              double edge_threshold = kDefaultEdgeThreshold) {
  if (chosen >= bundle.table_count()) {
    throw std::invalid_argument("update_context: chosen index out of range");
  }
  if (ctx.contains(chosen)) {
    throw std::invalid_argument("update_context: duplicate selection");
  }
  for (std::size_t l : ctx.selected) {
    const double omega = bundle.omega[chosen][l];
    if (omega >= edge_threshold) {
      ctx.edges.push_back(JoinEdge{chosen, l, omega});
    }
  }
  for (std::size_t j = 0; j < ctx.coverage.size(); ++j) {
    ctx.coverage[j] = std::max(ctx.coverage[j], bundle.F[j][chosen]);
  }
  ctx.selected.push_back(chosen);
  return ctx;
}

/// Full run: seed, then iterate selection and update until min(K, N) tables
/// are chosen or, when theta is set, every coverage entry has reached it.
/// Deterministic for fixed inputs; one StepRecord per selection.
inline RetrievalResult run_query(const ScoreBundle& bundle, const Weights& w,
                                 const StoppingRule& stop,
                                 double edge_threshold = kDefaultEdgeThreshold) {
  const auto t0 = std::chrono::steady_clock::now();

  RetrievalResult result;
  result.method = Method::greedy;

  const std::size_t target = std::min(stop.max_k, bundle.table_count());
  Context ctx = make_context(bundle);
  for (std::size_t k = 1; k <= target; ++k) {
    const Pick pick = select_next(ctx, bundle, w);
    const double u = w.lambda_coarse * pick.gains.g_coarse +
                     w.lambda_cov * pick.gains.g_cov +
                     w.lambda_join * pick.gains.g_join;
    result.trace.push_back(
        StepRecord{k, pick.index, pick.gains.g_coarse, pick.gains.g_cov,
                   pick.gains.g_join, u});
    result.selection.push_back(bundle.candidates[pick.index].id);
    ctx = update_context(std::move(ctx), pick.index, bundle, edge_threshold);

    if (stop.theta.has_value() && !ctx.coverage.empty()) {
      const double min_cov =
          *std::min_element(ctx.coverage.begin(), ctx.coverage.end());
      if (min_cov >= *stop.theta) break;
    }
  }

  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - t0);
  return result;
}

}  // namespace joinweaver

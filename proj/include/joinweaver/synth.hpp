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
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "joinweaver/model.hpp"

/// Deterministic synthetic bundles with planted gold sets.
///
/// The first gold_size tables (identity order, before rank sorting) are
/// gold. They partition the sub-queries into contiguous blocks and score
/// `signal` on their own block's F cells; every other F cell is uniform in
/// [-noise, noise]. Join scores start as uniform background in [0, noise]
/// (symmetric, zero diagonal); chain_joins then overwrites consecutive gold
/// pairs with `signal`. r is the per-table column max of F plus jitter in
/// [-0.01, 0.01], clamped to [-1, 1]. Candidates are ordered by descending
/// r with a stable sort, and r, F and omega are permuted to match.
///
/// noise is clamped to 1 when drawing so every value stays in range. With
/// noise = 0 and no join chain the instance is modular: table utilities are
/// independent, so greedy selection is exact for K = gold_size.
namespace joinweaver {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_candidates = 20;
  std::size_t n_subqueries = 6;
  std::size_t gold_size = 3;
  double signal = 0.8;
  double noise = 0.2;
  bool chain_joins = false;
};

namespace detail {

/// mt19937_64 with manual 53-bit extraction. The standard pins the engine's
/// output sequence, and `(x >> 11) * 2^-53` is exact, so draws are identical
/// on every platform. std::uniform_real_distribution is avoided because its
/// algorithm is implementation-defined.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}

  double next01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
  }

  double in(double lo, double hi) { return lo + next01() * (hi - lo); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

inline void validate_config(const SynthConfig& config) {
  if (config.gold_size < 2) {
    throw ConfigError("gold_size must be at least 2");
  }
  if (config.gold_size > config.n_candidates) {
    throw ConfigError("gold_size " + std::to_string(config.gold_size) +
                      " exceeds n_candidates " +
                      std::to_string(config.n_candidates));
  }
  if (config.n_subqueries == 0) {
    throw ConfigError("n_subqueries must be positive");
  }
  if (!(config.signal > 0.0 && config.signal <= 1.0)) {
    throw ConfigError("signal must be in (0, 1]");
  }
  if (!(config.noise >= 0.0) || !std::isfinite(config.noise)) {
    throw ConfigError("noise must be finite and non-negative");
  }
}

/// Deterministic in config.seed. Draw order is part of the format: F cells
/// row-major (planted cells consume no draw), then the omega upper triangle
/// row-major, then one jitter per table.
inline ScoreBundle generate(const SynthConfig& config) {
  validate_config(config);

  const std::size_t n = config.n_candidates;
  const std::size_t jn = config.n_subqueries;
  const std::size_t g = config.gold_size;
  const double spread = std::min(config.noise, 1.0);

  detail::Uniform rng(config.seed);

  // Contiguous balanced partition: gold table t owns sub-queries
  // [t*J/g, (t+1)*J/g).
  auto owner = [&](std::size_t j) -> std::size_t {
    return std::min(g - 1, (j * g) / jn);
  };

  std::vector<std::vector<double>> f(jn, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < jn; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i < g && owner(j) == i) {
        f[j][i] = config.signal;
      } else {
        f[j][i] = rng.in(-spread, spread);
      }
    }
  }

  std::vector<std::vector<double>> omega(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = i + 1; l < n; ++l) {
      const double w = rng.in(0.0, spread);
      omega[i][l] = w;
      omega[l][i] = w;
    }
  }
  if (config.chain_joins) {
    for (std::size_t t = 0; t + 1 < g; ++t) {
      omega[t][t + 1] = config.signal;
      omega[t + 1][t] = config.signal;
    }
  }

  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = f[0][i];
    for (std::size_t j = 1; j < jn; ++j) best = std::max(best, f[j][i]);
    r[i] = std::clamp(best + rng.in(-0.01, 0.01), -1.0, 1.0);
  }

  // Rank order: descending r, stable in identity order.
  std::vector<std::size_t> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });

  const std::size_t digits = std::to_string(n == 0 ? 0 : n - 1).size();
  auto table_id = [&](std::size_t identity) {
    std::string num = std::to_string(identity);
    return "t" + std::string(digits - num.size(), '0') + num;
  };

  ScoreBundle bundle;
  bundle.query_id = "synth-" + std::to_string(config.seed);
  bundle.query_text = "synthetic multi-table query " + std::to_string(config.seed);
  for (std::size_t j = 0; j < jn; ++j) {
    bundle.subqueries.push_back(SubQuery{j, "segment " + std::to_string(j)});
  }
  for (std::size_t pos = 0; pos < n; ++pos) {
    bundle.candidates.push_back(CandidateTable{table_id(by_rank[pos]), pos});
  }
  bundle.r.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) bundle.r[pos] = r[by_rank[pos]];
  bundle.F.assign(jn, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < jn; ++j) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      bundle.F[j][pos] = f[j][by_rank[pos]];
    }
  }
  bundle.omega.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      bundle.omega[a][b] = omega[by_rank[a]][by_rank[b]];
    }
  }
  for (std::size_t t = 0; t < g; ++t) bundle.gold.insert(table_id(t));

  return bundle;
}

}  // namespace joinweaver

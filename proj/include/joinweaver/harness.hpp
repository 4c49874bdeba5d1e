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
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "joinweaver/baselines.hpp"
#include "joinweaver/bundle_io.hpp"
#include "joinweaver/greedy.hpp"
#include "joinweaver/metrics.hpp"
#include "joinweaver/model.hpp"
#include "joinweaver/oracle.hpp"
#include "joinweaver/synth.hpp"

/// Command orchestration behind the CLI: bundle generation, method runs,
/// and weight sweeps. Commands return process exit codes (0 success,
/// 1 runtime failure, 2 usage) and log to the given stream. Exit 0 implies
/// every requested artifact file exists and parses.
///
/// Per-query work is dispatched to a pool of --jobs threads; each result is
/// written to its query's slot, so the worker count never changes any
/// numeric output.
namespace joinweaver {

struct RunOptions {
  std::string bundles;
  std::optional<std::string> out;
  std::vector<Method> methods = {Method::greedy};
  std::vector<int> k_list = {2, 3, 5, 10};
  Weights weights;
  std::optional<double> theta;
  double edge_threshold = kDefaultEdgeThreshold;
  std::uint64_t oracle_budget = 1000000;
  bool skip_invalid = false;
  unsigned jobs = 1;
};

struct GenOptions {
  std::optional<std::string> out;
  std::size_t count = 100;
  SynthConfig config;  // config.seed is the base; bundle b uses seed + b
};

struct SweepOptions {
  std::string bundles;
  std::optional<std::string> out;
  std::vector<int> k_list = {2, 3, 5, 10};
  std::optional<double> theta;
  double edge_threshold = kDefaultEdgeThreshold;
  bool skip_invalid = false;
  unsigned jobs = 1;
  std::vector<Weights> extras;
};

/// --out when given, else $JOINWEAVER_OUT, else "out".
inline std::filesystem::path resolve_out_dir(
    const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (const char* env = std::getenv("JOINWEAVER_OUT"); env && *env) return env;
  return "out";
}

namespace detail {

/// Shared-counter worker pool. fn(i) must write only to slot i of any shared
/// output. The first worker exception is rethrown after the join.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(jobs == 0 ? 1 : jobs, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline GoldMap golds_of(const std::vector<ScoreBundle>& bundles) {
  GoldMap golds;
  for (const ScoreBundle& b : bundles) golds[b.query_id] = b.gold;
  return golds;
}

inline std::vector<std::pair<std::string, RetrievalResult>> as_pairs(
    const std::vector<RunEntry>& entries) {
  std::vector<std::pair<std::string, RetrievalResult>> out;
  out.reserve(entries.size());
  for (const RunEntry& e : entries) out.emplace_back(e.query_id, e.result);
  return out;
}

/// greedy, dense or coverage_first over every bundle at K = max(k_list);
/// per-K scores come from truncation because all three selections are
/// prefix-consistent in K.
inline MethodResults run_simple_method(
    Method method, const std::string& label,
    const std::vector<ScoreBundle>& bundles, const GoldMap& golds,
    const std::vector<int>& k_list, const Weights& weights,
    const std::optional<double>& theta, double edge_threshold, unsigned jobs) {
  const int k_max = *std::max_element(k_list.begin(), k_list.end());

  std::vector<RunEntry> entries(bundles.size());
  parallel_for(bundles.size(), jobs, [&](std::size_t idx) {
    const ScoreBundle& bundle = bundles[idx];
    RetrievalResult result;
    switch (method) {
      case Method::greedy:
        result = run_query(bundle, weights,
                           StoppingRule{static_cast<std::size_t>(k_max), theta},
                           edge_threshold);
        break;
      case Method::dense:
        result = dense_topk(bundle, static_cast<std::size_t>(k_max));
        break;
      case Method::coverage_first:
        result = coverage_first(bundle, static_cast<std::size_t>(k_max));
        break;
      case Method::oracle:
        throw std::logic_error("exact solver is not prefix-consistent");
    }
    entries[idx] = RunEntry{bundle.query_id, std::nullopt, std::move(result),
                            std::nullopt, std::nullopt, std::nullopt};
  });

  MethodResults out;
  out.label = label;
  out.report = aggregate(as_pairs(entries), golds, k_list, label);
  out.entries = std::move(entries);
  return out;
}

/// The exact solver is re-run per K (one entry per query per K) with a
/// per-query subset-evaluation budget; per-K status tallies are kept.
inline MethodResults run_oracle_method(const std::vector<ScoreBundle>& bundles,
                                       const GoldMap& golds,
                                       const std::vector<int>& k_list,
                                       const Weights& weights,
                                       std::uint64_t budget, unsigned jobs) {
  MethodResults out;
  out.label = "oracle";
  out.report.method = "oracle";

  for (int k : k_list) {
    std::vector<RunEntry> entries(bundles.size());
    parallel_for(bundles.size(), jobs, [&](std::size_t idx) {
      const ScoreBundle& bundle = bundles[idx];
      const auto t0 = std::chrono::steady_clock::now();
      const OracleOutcome solved =
          best_subset(bundle, static_cast<std::size_t>(k), weights, budget);
      const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - t0);

      RunEntry entry;
      entry.query_id = bundle.query_id;
      entry.k = k;
      entry.result.method = Method::oracle;
      entry.result.elapsed = elapsed;
      if (solved.selection) {
        for (const CandidateTable& c : bundle.candidates) {
          if (solved.selection->count(c.id)) {
            entry.result.selection.push_back(c.id);
          }
        }
      }
      entry.status = solved.status;
      entry.objective = solved.objective;
      entry.explored = solved.explored;
      entries[idx] = std::move(entry);
    });

    const MetricsReport k_report =
        aggregate(as_pairs(entries), golds, {k}, "oracle");
    out.report.per_k[k] = k_report.per_k.at(k);
    out.report.elapsed_total += k_report.elapsed_total;
    if (out.report.gold_histogram.empty()) {
      out.report.gold_histogram = k_report.gold_histogram;
    }

    StatusCounts counts;
    for (const RunEntry& entry : entries) counts.add(*entry.status);
    out.status_by_k[k] = counts;

    out.entries.insert(out.entries.end(),
                       std::make_move_iterator(entries.begin()),
                       std::make_move_iterator(entries.end()));
  }
  return out;
}

/// Loads bundles for run/sweep. Returns 0 and fills `out`, or an exit code.
/// Invalid files abort unless skip_invalid, in which case they are logged
/// and skipped.
inline int load_valid_bundles(const std::string& path, bool skip_invalid,
                              std::ostream& log,
                              std::vector<ScoreBundle>& out) {
  LoadResult loaded;
  try {
    loaded = load_bundles(path);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }

  for (const LoadDiagnostic& d : loaded.diagnostics) {
    log << (skip_invalid ? "warning: " : "error: ") << d.file << " [" << d.kind
        << "] " << d.message << "\n";
  }
  if (!loaded.diagnostics.empty() && !skip_invalid) {
    log << "error: " << loaded.diagnostics.size()
        << " invalid bundle file(s); pass --skip-invalid to continue\n";
    return 1;
  }
  if (loaded.bundles.empty()) {
    log << "error: no valid bundles at " << path << "\n";
    return 1;
  }

  std::set<std::string> seen;
  for (const ScoreBundle& b : loaded.bundles) {
    if (!seen.insert(b.query_id).second) {
      log << "error: duplicate query_id " << b.query_id << "\n";
      return 1;
    }
  }

  out = std::move(loaded.bundles);
  return 0;
}

inline int emit(const std::vector<MethodResults>& methods,
                const std::optional<std::string>& cli_out, std::ostream& log) {
  const std::filesystem::path out_dir = resolve_out_dir(cli_out);
  WriteOutcome written;
  try {
    written = write_results(methods, out_dir);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
  for (const std::string& w : written.warnings) log << "warning: " << w << "\n";
  for (const std::filesystem::path& f : written.files) {
    log << "wrote " << f.string() << "\n";
  }
  return 0;
}

}  // namespace detail

inline int run_command(const RunOptions& options, std::ostream& log) {
  if (options.methods.empty()) {
    log << "error: no method given\n";
    return 2;
  }
  if (options.k_list.empty() ||
      *std::min_element(options.k_list.begin(), options.k_list.end()) < 1) {
    log << "error: every k must be a positive integer\n";
    return 2;
  }
  if (!options.weights.valid()) {
    log << "error: weights must be finite, non-negative and not all zero\n";
    return 2;
  }

  std::vector<ScoreBundle> bundles;
  if (int code = detail::load_valid_bundles(options.bundles,
                                            options.skip_invalid, log, bundles);
      code != 0) {
    return code;
  }
  const GoldMap golds = detail::golds_of(bundles);

  std::vector<MethodResults> methods;
  try {
    for (Method m : options.methods) {
      if (m == Method::oracle) {
        methods.push_back(detail::run_oracle_method(bundles, golds,
                                                    options.k_list,
                                                    options.weights,
                                                    options.oracle_budget,
                                                    options.jobs));
        for (const auto& [k, counts] : methods.back().status_by_k) {
          log << "oracle k=" << k << ": optimal=" << counts.optimal
              << " feasible=" << counts.feasible
              << " no_solution=" << counts.no_solution
              << " (budget=" << options.oracle_budget << ")\n";
        }
      } else {
        methods.push_back(detail::run_simple_method(
            m, to_string(m), bundles, golds, options.k_list, options.weights,
            options.theta, options.edge_threshold, options.jobs));
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }

  return detail::emit(methods, options.out, log);
}

inline int gen_command(const GenOptions& options, std::ostream& log) {
  try {
    validate_config(options.config);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }

  const std::filesystem::path out_dir = resolve_out_dir(options.out);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    log << "error: cannot create " << out_dir.string() << ": " << ec.message()
        << "\n";
    return 1;
  }

  if (options.count == 0) {
    log << "warning: generated 0 bundles\n";
    return 0;
  }

  try {
    for (std::size_t b = 0; b < options.count; ++b) {
      SynthConfig config = options.config;
      config.seed = options.config.seed + b;
      char name[32];
      std::snprintf(name, sizeof(name), "bundle_%06zu.json", b);
      save_bundle(generate(config), out_dir / name);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }

  log << "wrote " << options.count << " bundles to " << out_dir.string()
      << "\n";
  return 0;
}

inline int sweep_command(const SweepOptions& options, std::ostream& log) {
  if (options.k_list.empty() ||
      *std::min_element(options.k_list.begin(), options.k_list.end()) < 1) {
    log << "error: every k must be a positive integer\n";
    return 2;
  }
  for (const Weights& w : options.extras) {
    if (!w.valid()) {
      log << "error: weights must be finite, non-negative and not all zero\n";
      return 2;
    }
  }

  std::vector<ScoreBundle> bundles;
  if (int code = detail::load_valid_bundles(options.bundles,
                                            options.skip_invalid, log, bundles);
      code != 0) {
    return code;
  }
  const GoldMap golds = detail::golds_of(bundles);

  std::vector<std::pair<std::string, Weights>> settings = {
      {"only_coverage", Weights{1.0, 0.0, 0.0}},
      {"only_join", Weights{0.0, 1.0, 0.0}},
      {"only_coarse", Weights{0.0, 0.0, 1.0}},
      {"no_coarse", Weights{1.0, 1.0, 0.0}},
      {"no_join", Weights{1.0, 0.0, 1.0}},
      {"no_coverage", Weights{0.0, 1.0, 1.0}},
      {"custom", Weights{2.0, 1.0, 4.0}},
  };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  for (const Weights& w : options.extras) {
    settings.emplace_back("extra_" + fmt(w.lambda_cov) + "_" +
                              fmt(w.lambda_join) + "_" + fmt(w.lambda_coarse),
                          w);
  }

  std::vector<MethodResults> methods;
  try {
    for (const auto& [label, weights] : settings) {
      methods.push_back(detail::run_simple_method(
          Method::greedy, label, bundles, golds, options.k_list, weights,
          options.theta, options.edge_threshold, options.jobs));
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }

  return detail::emit(methods, options.out, log);
}

}  // namespace joinweaver

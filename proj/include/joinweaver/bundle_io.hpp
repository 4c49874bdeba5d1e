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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "joinweaver/metrics.hpp"
#include "joinweaver/model.hpp"
#include "joinweaver/oracle.hpp"

/// Versioned on-disk format for score bundles, plus result and report
/// emission.
///
/// A bundle file is one JSON document per query with top-level fields
/// exactly: format_version (= 1), query_id, query_text, subqueries (array of
/// strings, index = id), candidates (array of {id, rank} ordered by rank),
/// r (N numbers), F (J arrays of N numbers), omega (N arrays of N numbers),
/// gold (array of strings). Unknown fields and unknown versions are
/// rejected, not guessed. Writing then loading reproduces a structurally
/// equal bundle with bit-identical numbers (the writer emits the shortest
/// round-trip decimal form).
namespace joinweaver {

inline constexpr int kFormatVersion = 1;

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& violations) {
    std::string out;
    for (const std::string& v : violations) {
      if (!out.empty()) out += "; ";
      out += v;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// One per-file failure collected by load_bundles. kind is "io", "parse" or
/// "validation".
struct LoadDiagnostic {
  std::string file;
  std::string kind;
  std::string message;
};

struct LoadResult {
  std::vector<ScoreBundle> bundles;
  std::vector<LoadDiagnostic> diagnostics;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& doc,
                                           const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) {
    throw ParseError(std::string("missing field \"") + name + "\"");
  }
  return *it;
}

inline double require_number(const nlohmann::json& node,
                             const std::string& where) {
  if (!node.is_number()) {
    throw ParseError("field \"" + where + "\" must be a number");
  }
  return node.get<double>();
}

inline std::vector<double> require_number_array(const nlohmann::json& node,
                                                const std::string& where) {
  if (!node.is_array()) {
    throw ParseError("field \"" + where + "\" must be an array");
  }
  std::vector<double> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(require_number(node[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace detail

/// Strict parse of one bundle document. The field set must match exactly;
/// extra keys are as fatal as missing ones.
inline ScoreBundle bundle_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("bundle document must be an object");

  static const std::set<std::string> kKnown = {
      "format_version", "query_id", "query_text", "subqueries",
      "candidates",     "r",        "F",          "omega",
      "gold"};
  for (const auto& item : doc.items()) {
    if (!kKnown.count(item.key())) {
      throw ParseError("unknown field \"" + item.key() + "\"");
    }
  }

  const nlohmann::json& version = detail::require_field(doc, "format_version");
  if (!version.is_number_integer() ||
      version.get<long long>() != kFormatVersion) {
    throw ParseError("unsupported format_version " + version.dump());
  }

  ScoreBundle bundle;

  const nlohmann::json& query_id = detail::require_field(doc, "query_id");
  if (!query_id.is_string()) throw ParseError("field \"query_id\" must be a string");
  bundle.query_id = query_id.get<std::string>();

  const nlohmann::json& query_text = detail::require_field(doc, "query_text");
  if (!query_text.is_string()) {
    throw ParseError("field \"query_text\" must be a string");
  }
  bundle.query_text = query_text.get<std::string>();

  const nlohmann::json& subqueries = detail::require_field(doc, "subqueries");
  if (!subqueries.is_array()) {
    throw ParseError("field \"subqueries\" must be an array");
  }
  for (std::size_t j = 0; j < subqueries.size(); ++j) {
    if (!subqueries[j].is_string()) {
      throw ParseError("field \"subqueries[" + std::to_string(j) +
                       "]\" must be a string");
    }
    bundle.subqueries.push_back(SubQuery{j, subqueries[j].get<std::string>()});
  }

  const nlohmann::json& candidates = detail::require_field(doc, "candidates");
  if (!candidates.is_array()) {
    throw ParseError("field \"candidates\" must be an array");
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const nlohmann::json& entry = candidates[i];
    const std::string where = "candidates[" + std::to_string(i) + "]";
    if (!entry.is_object() || entry.size() != 2 || !entry.contains("id") ||
        !entry.contains("rank")) {
      throw ParseError("field \"" + where + "\" must be {id, rank}");
    }
    if (!entry["id"].is_string()) {
      throw ParseError("field \"" + where + ".id\" must be a string");
    }
    if (!entry["rank"].is_number_integer() || entry["rank"].get<long long>() < 0) {
      throw ParseError("field \"" + where +
                       ".rank\" must be a non-negative integer");
    }
    bundle.candidates.push_back(CandidateTable{
        entry["id"].get<std::string>(),
        static_cast<std::size_t>(entry["rank"].get<long long>())});
  }

  bundle.r = detail::require_number_array(detail::require_field(doc, "r"), "r");

  const nlohmann::json& f = detail::require_field(doc, "F");
  if (!f.is_array()) throw ParseError("field \"F\" must be an array");
  for (std::size_t j = 0; j < f.size(); ++j) {
    bundle.F.push_back(
        detail::require_number_array(f[j], "F[" + std::to_string(j) + "]"));
  }

  const nlohmann::json& omega = detail::require_field(doc, "omega");
  if (!omega.is_array()) throw ParseError("field \"omega\" must be an array");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    bundle.omega.push_back(detail::require_number_array(
        omega[i], "omega[" + std::to_string(i) + "]"));
  }

  const nlohmann::json& gold = detail::require_field(doc, "gold");
  if (!gold.is_array()) throw ParseError("field \"gold\" must be an array");
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i].is_string()) {
      throw ParseError("field \"gold[" + std::to_string(i) +
                       "]\" must be a string");
    }
    bundle.gold.insert(gold[i].get<std::string>());
  }

  return bundle;
}

inline nlohmann::ordered_json bundle_to_json(const ScoreBundle& bundle) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["query_id"] = bundle.query_id;
  doc["query_text"] = bundle.query_text;

  nlohmann::ordered_json subqueries = nlohmann::ordered_json::array();
  for (const SubQuery& sq : bundle.subqueries) subqueries.push_back(sq.text);
  doc["subqueries"] = std::move(subqueries);

  nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
  for (const CandidateTable& c : bundle.candidates) {
    nlohmann::ordered_json entry;
    entry["id"] = c.id;
    entry["rank"] = c.rank;
    candidates.push_back(std::move(entry));
  }
  doc["candidates"] = std::move(candidates);

  doc["r"] = bundle.r;
  doc["F"] = bundle.F;
  doc["omega"] = bundle.omega;
  doc["gold"] = std::vector<std::string>(bundle.gold.begin(), bundle.gold.end());
  return doc;
}

/// Parses and validates one bundle file. Throws IoError, ParseError or
/// ValidationError.
inline ScoreBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  ScoreBundle bundle = bundle_from_json(doc);
  ValidationOutcome outcome = validate_bundle(bundle);
  if (!outcome.ok()) throw ValidationError(outcome.violations);
  return bundle;
}

inline void save_bundle(const ScoreBundle& bundle,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << bundle_to_json(bundle).dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

/// Loads a bundle file or every *.json file in a directory (sorted by
/// filename). Per-file failures become diagnostics instead of exceptions so
/// a caller can choose between aborting and skipping.
inline LoadResult load_bundles(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("no such path: " + path.string());

  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const fs::directory_entry& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }

  LoadResult result;
  for (const fs::path& file : files) {
    try {
      result.bundles.push_back(load_bundle(file));
    } catch (const ValidationError& e) {
      result.diagnostics.push_back({file.string(), "validation", e.what()});
    } catch (const ParseError& e) {
      result.diagnostics.push_back({file.string(), "parse", e.what()});
    } catch (const IoError& e) {
      result.diagnostics.push_back({file.string(), "io", e.what()});
    }
  }
  return result;
}

/// Per-query exact-solver status tallies.
struct StatusCounts {
  std::size_t optimal = 0;
  std::size_t feasible = 0;
  std::size_t no_solution = 0;

  std::size_t total() const { return optimal + feasible + no_solution; }

  void add(OracleStatus status) {
    switch (status) {
      case OracleStatus::optimal: ++optimal; break;
      case OracleStatus::feasible: ++feasible; break;
      case OracleStatus::no_solution: ++no_solution; break;
    }
  }
};

/// One retrieval outcome. Greedy-family methods produce one entry per query
/// (the selection serves every K by truncation); the exact solver produces
/// one entry per query per K, tagged with k and a status.
struct RunEntry {
  std::string query_id;
  std::optional<int> k;
  RetrievalResult result;
  std::optional<OracleStatus> status;
  std::optional<double> objective;
  std::optional<std::uint64_t> explored;
};

struct MethodResults {
  std::string label;
  std::vector<RunEntry> entries;
  MetricsReport report;
  std::map<int, StatusCounts> status_by_k;  // empty unless the exact solver ran
};

struct WriteOutcome {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out += keep ? c : '_';
  }
  return out;
}

inline std::string format_pct(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

inline std::chrono::nanoseconds elapsed_for_k(const MethodResults& method,
                                              int k) {
  std::chrono::nanoseconds sum{0};
  for (const RunEntry& entry : method.entries) {
    if (!entry.k || *entry.k == k) sum += entry.result.elapsed;
  }
  return sum;
}

inline nlohmann::ordered_json entry_to_json(const RunEntry& entry) {
  nlohmann::ordered_json doc;
  doc["query_id"] = entry.query_id;
  if (entry.k) doc["k"] = *entry.k;
  doc["selection"] = entry.result.selection;
  if (entry.status) doc["status"] = to_string(*entry.status);
  if (entry.objective) doc["objective"] = *entry.objective;
  if (entry.explored) doc["explored"] = *entry.explored;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const StepRecord& step : entry.result.trace) {
    nlohmann::ordered_json rec;
    rec["step"] = step.step;
    rec["chosen"] = step.chosen;
    rec["g_coarse"] = step.g_coarse;
    rec["g_cov"] = step.g_cov;
    rec["g_join"] = step.g_join;
    rec["utility"] = step.utility;
    trace.push_back(std::move(rec));
  }
  doc["trace"] = std::move(trace);
  doc["elapsed_ns"] = entry.result.elapsed.count();
  return doc;
}

/// Appends one grid column's cells with best (*) and, when the grid has at
/// least three rows, second-best (+) markers. Ties share a marker.
inline std::vector<std::string> mark_column(const std::vector<double>& values) {
  std::vector<std::string> cells;
  double best = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  double second = best;
  bool has_second = false;
  for (double v : values) {
    if (v < best && (!has_second || v > second)) {
      second = v;
      has_second = true;
    }
  }
  for (double v : values) {
    std::string cell = format_pct(v);
    if (v == best) {
      cell += '*';
    } else if (values.size() >= 3 && has_second && v == second) {
      cell += '+';
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace detail

/// Emits one results document per method (results_<label>.json with
/// per-query selections and traces), summary.csv with header
/// `method,k,recall_pct,cr_pct,elapsed_ms` and one decimal for percentages,
/// and report.txt: a plain-text grid of R/CR per K with the best value per
/// column marked * (and second best +, once three or more rows exist),
/// followed by the gold-size histogram and solver status sections.
inline WriteOutcome write_results(const std::vector<MethodResults>& methods,
                                  const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  WriteOutcome outcome;
  bool any_entries = false;
  for (const MethodResults& m : methods) any_entries |= !m.entries.empty();
  if (!any_entries) outcome.warnings.push_back("no results to report");

  for (const MethodResults& m : methods) {
    nlohmann::ordered_json doc;
    doc["method"] = m.label;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const RunEntry& entry : m.entries) {
      entries.push_back(detail::entry_to_json(entry));
    }
    doc["entries"] = std::move(entries);

    const fs::path path =
        out_dir / ("results_" + detail::sanitize_label(m.label) + ".json");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
    outcome.files.push_back(path);
  }

  {
    const fs::path path = out_dir / "summary.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "method,k,recall_pct,cr_pct,elapsed_ms\n";
    if (any_entries) {
      for (const MethodResults& m : methods) {
        for (const auto& [k, score] : m.report.per_k) {
          const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
              detail::elapsed_for_k(m, k));
          out << m.label << ',' << k << ',' << detail::format_pct(score.recall_pct)
              << ',' << detail::format_pct(score.cr_pct) << ',' << ms.count()
              << "\n";
        }
      }
    }
    if (!out) throw IoError("write failed: " + path.string());
    outcome.files.push_back(path);
  }

  {
    std::vector<int> k_values;
    for (const MethodResults& m : methods) {
      for (const auto& [k, score] : m.report.per_k) {
        if (std::find(k_values.begin(), k_values.end(), k) == k_values.end()) {
          k_values.push_back(k);
        }
      }
    }
    std::sort(k_values.begin(), k_values.end());

    std::vector<std::string> headers = {"method"};
    for (int k : k_values) {
      headers.push_back("R@" + std::to_string(k));
      headers.push_back("CR@" + std::to_string(k));
    }

    std::vector<std::vector<std::string>> rows;
    for (const MethodResults& m : methods) {
      rows.push_back({m.label});
    }
    for (std::size_t col = 0; col < k_values.size() * 2; ++col) {
      const int k = k_values[col / 2];
      const bool is_cr = (col % 2) == 1;
      std::vector<double> values;
      for (const MethodResults& m : methods) {
        auto it = m.report.per_k.find(k);
        const KScore score = it == m.report.per_k.end() ? KScore{} : it->second;
        values.push_back(is_cr ? score.cr_pct : score.recall_pct);
      }
      const std::vector<std::string> cells = detail::mark_column(values);
      for (std::size_t row = 0; row < rows.size(); ++row) {
        rows[row].push_back(cells[row]);
      }
    }

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
      widths[c] = headers[c].size();
      for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
    }

    const fs::path path = out_dir / "report.txt";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");

    auto emit_row = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c == 0) {
          out << cells[c] << std::string(widths[c] - cells[c].size(), ' ');
        } else {
          out << "  " << std::string(widths[c] - cells[c].size(), ' ') << cells[c];
        }
      }
      out << "\n";
    };

    out << "retrieval scores (percent; * best per column";
    if (rows.size() >= 3) out << ", + second best";
    out << ")\n";
    emit_row(headers);
    for (const auto& row : rows) emit_row(row);

    if (!methods.empty() && !methods.front().report.gold_histogram.empty()) {
      out << "\ngold size histogram\n";
      for (const auto& [size, count] : methods.front().report.gold_histogram) {
        out << "  " << size << ": " << count << "\n";
      }
    }

    for (const MethodResults& m : methods) {
      if (m.status_by_k.empty()) continue;
      out << "\n" << m.label << " solver status by k\n";
      for (const auto& [k, counts] : m.status_by_k) {
        out << "  k=" << k << ": optimal=" << counts.optimal
            << " feasible=" << counts.feasible
            << " no_solution=" << counts.no_solution << "\n";
      }
    }

    if (!out) throw IoError("write failed: " + path.string());
    outcome.files.push_back(path);
  }

  return outcome;
}

}  // namespace joinweaver

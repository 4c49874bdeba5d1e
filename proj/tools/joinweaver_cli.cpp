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

// Command-line front end: `run` scores bundles with the selected methods,
// `gen` writes synthetic bundles, `sweep` compares utility weight settings.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "joinweaver/joinweaver.hpp"

namespace {

std::optional<joinweaver::Weights> parse_triple(const std::string& text) {
  double cov = 0.0;
  double join = 0.0;
  double coarse = 0.0;
  char tail = '\0';
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &cov, &join, &coarse, &tail) !=
      3) {
    return std::nullopt;
  }
  return joinweaver::Weights{cov, join, coarse};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"join-aware multi-table retrieval harness"};
  app.require_subcommand(1);

  // run
  joinweaver::RunOptions run_options;
  std::string run_out;
  std::vector<std::string> method_names = {"greedy"};
  std::vector<double> weight_values;
  double theta_value = 0.0;

  CLI::App* run_cmd =
      app.add_subcommand("run", "score bundles with the selected methods");
  run_cmd->add_option("--bundles", run_options.bundles,
                      "bundle file or directory")
      ->required();
  CLI::Option* run_out_opt = run_cmd->add_option(
      "--out", run_out, "output directory (default: $JOINWEAVER_OUT or out)");
  run_cmd
      ->add_option("--method", method_names,
                   "comma list of greedy,oracle,dense,coverage_first")
      ->delimiter(',');
  run_cmd->add_option("--k", run_options.k_list, "comma list of K cutoffs")
      ->delimiter(',');
  run_cmd
      ->add_option("--weights", weight_values,
                   "coverage,join,coarse utility weights")
      ->delimiter(',')
      ->expected(3);
  CLI::Option* theta_opt = run_cmd->add_option(
      "--theta", theta_value, "stop once every sub-query is covered this far");
  run_cmd->add_option("--edge-threshold", run_options.edge_threshold,
                      "minimum join score that forms a graph edge");
  run_cmd->add_option("--oracle-budget", run_options.oracle_budget,
                      "subset evaluations allowed per query");
  run_cmd->add_flag("--skip-invalid", run_options.skip_invalid,
                    "skip bundles that fail validation");
  run_cmd->add_option("--jobs", run_options.jobs, "worker threads");

  // gen
  joinweaver::GenOptions gen_options;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write synthetic bundles");
  CLI::Option* gen_out_opt = gen_cmd->add_option(
      "--out", gen_out, "output directory (default: $JOINWEAVER_OUT or out)");
  gen_cmd->add_option("--n", gen_options.count, "number of bundles");
  gen_cmd->add_option("--seed", gen_options.config.seed,
                      "base seed; bundle b uses seed + b");
  gen_cmd->add_option("--candidates", gen_options.config.n_candidates,
                      "candidate tables per bundle");
  gen_cmd->add_option("--subqueries", gen_options.config.n_subqueries,
                      "sub-queries per bundle");
  gen_cmd->add_option("--gold-size", gen_options.config.gold_size,
                      "planted gold tables per bundle (at least 2)");
  gen_cmd->add_option("--signal", gen_options.config.signal,
                      "planted score strength in (0,1]");
  gen_cmd->add_option("--noise", gen_options.config.noise,
                      "distractor score scale");
  gen_cmd->add_flag("--chain-joins", gen_options.config.chain_joins,
                    "plant a join chain across the gold tables");

  // sweep
  joinweaver::SweepOptions sweep_options;
  std::string sweep_out;
  std::vector<std::string> extra_triples;
  double sweep_theta_value = 0.0;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "compare utility weight settings");
  sweep_cmd
      ->add_option("--bundles", sweep_options.bundles,
                   "bundle file or directory")
      ->required();
  CLI::Option* sweep_out_opt = sweep_cmd->add_option(
      "--out", sweep_out,
      "output directory (default: $JOINWEAVER_OUT or out)");
  sweep_cmd->add_option("--k", sweep_options.k_list, "comma list of K cutoffs")
      ->delimiter(',');
  CLI::Option* sweep_theta_opt =
      sweep_cmd->add_option("--theta", sweep_theta_value,
                            "stop once every sub-query is covered this far");
  sweep_cmd->add_option("--edge-threshold", sweep_options.edge_threshold,
                        "minimum join score that forms a graph edge");
  sweep_cmd->add_flag("--skip-invalid", sweep_options.skip_invalid,
                      "skip bundles that fail validation");
  sweep_cmd->add_option("--jobs", sweep_options.jobs, "worker threads");
  sweep_cmd->add_option("--extra", extra_triples,
                        "additional coverage,join,coarse triple (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run_cmd) {
    if (*run_out_opt) run_options.out = run_out;
    if (*theta_opt) run_options.theta = theta_value;
    if (!weight_values.empty()) {
      run_options.weights = joinweaver::Weights{
          weight_values[0], weight_values[1], weight_values[2]};
    }
    run_options.methods.clear();
    for (const std::string& name : method_names) {
      const auto method = joinweaver::method_from_string(name);
      if (!method) {
        std::cout << "error: unknown method " << name << "\n";
        return 2;
      }
      run_options.methods.push_back(*method);
    }
    return joinweaver::run_command(run_options, std::cout);
  }

  if (*gen_cmd) {
    if (*gen_out_opt) gen_options.out = gen_out;
    return joinweaver::gen_command(gen_options, std::cout);
  }

  if (*sweep_cmd) {
    if (*sweep_out_opt) sweep_options.out = sweep_out;
    if (*sweep_theta_opt) sweep_options.theta = sweep_theta_value;
    for (const std::string& text : extra_triples) {
      const auto weights = parse_triple(text);
      if (!weights) {
        std::cout << "error: --extra expects three comma-separated numbers, got "
                  << text << "\n";
        return 2;
      }
      sweep_options.extras.push_back(*weights);
    }
    return joinweaver::sweep_command(sweep_options, std::cout);
  }

  return 2;
}

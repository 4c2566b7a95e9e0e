// Copyright 2020 The Authors.
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

#include <iostream>

#include "CLI11.hpp"
#include "aro/run.hpp"

int main(int argc, char** argv) {
  aro::RunConfig c;
  CLI::App app{"Robust non-adaptive and adaptive selection over stochastic items"};
  app.require_subcommand(1);

  const auto global = [&](CLI::App* s) {
    s->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    s->add_option("--out", c.out_path, "Write the report here instead of stdout");
    s->add_option("--format", c.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    s->add_option("--mc-samples", c.mc_samples, "Monte Carlo samples per estimate")
        ->capture_default_str();
    s->add_flag("--timing", c.timing, "Add wall time to JSON reports");
  };
  const auto solver_flags = [&](CLI::App* s) {
    s->add_option("--steps", c.steps, "Continuous greedy steps")->capture_default_str();
    s->add_option("--gamma-tol", c.gamma_tol, "Relative gamma search tolerance")
        ->capture_default_str();
    s->add_flag("--exact-extension", c.exact_extension,
                "Tabulate the multilinear extension exactly");
    s->add_option("--rounds", c.rounds, "Rounding repetitions")->capture_default_str();
    s->add_option("--do-tol", c.do_tol, "Double oracle improvement tolerance")
        ->capture_default_str();
    s->add_option("--do-max-iter", c.do_max_iter, "Double oracle iteration limit")
        ->capture_default_str();
    s->add_flag("--exhaustive-br", c.exhaustive_br,
                "Exhaustive best response (at most 12 items)");
  };
  const auto gen_flags = [&](CLI::App* s) {
    s->add_option("--preset", c.preset, "Instance family")
        ->check(CLI::IsMember(aro::preset_names()))
        ->required();
    s->add_option("--n", c.gen.n, "Items (0: preset default)");
    s->add_option("--m", c.gen.m, "Objectives (0: preset default)");
    s->add_option("--eps", c.gen.epsilon, "Epsilon (0: preset default)");
    s->add_option("--states", c.gen.states, "States per item (0: preset default)");
    s->add_option("--k", c.gen.k, "Cardinality or rank limit (0: preset default)");
    s->add_option("--levels", c.gen.levels, "Perturbation levels")->capture_default_str();
  };

  auto* solve = app.add_subcommand("solve", "Compute a robust non-adaptive policy");
  solve->add_option("--instance", c.instance_path, "Instance JSON")
      ->required();
  solve->add_option("--algorithm", c.algorithm, "Solver")
      ->check(CLI::IsMember({"one-over-m", "double-oracle", "continuous-greedy"}))
      ->capture_default_str();
  global(solve);
  solver_flags(solve);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a mixed policy or a set");
  evaluate->add_option("--instance", c.instance_path, "Instance JSON")
      ->required();
  auto* pol = evaluate->add_option("--policy", c.policy_path,
                                   "Policy JSON (a solve report or a policy array)");
  auto* set = evaluate->add_option("--set", c.set_spec, "Comma-separated item ids");
  pol->excludes(set);
  global(evaluate);

  auto* gap = app.add_subcommand("gap", "Adaptive vs non-adaptive optimum on a tiny instance");
  gap->add_option("--instance", c.instance_path, "Instance JSON")
      ->required();
  global(gap);

  auto* suite = app.add_subcommand("suite", "Run a generated instance family");
  suite->add_option("--count", c.count, "Number of instances")->capture_default_str();
  global(suite);
  solver_flags(suite);
  gen_flags(suite);

  auto* gen = app.add_subcommand("gen", "Write a generated instance");
  global(gen);
  gen_flags(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aro::kExitUsage;
  }
  for (auto* s : {solve, evaluate, gap, suite, gen}) {
    if (s->parsed()) c.subcommand = s->get_name();
  }
  return aro::run(c, std::cout, std::cerr);
}

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

//
//  Command dispatch behind the `aro` tool: solve, evaluate, gap, suite and
//  gen. Reports are JSON (authoritative) or CSV.
//

#ifndef ARO_RUN_HPP
#define ARO_RUN_HPP

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aro/continuous_greedy.hpp"
#include "aro/generate.hpp"
#include "aro/heuristics.hpp"
#include "aro/io.hpp"
#include "aro/mixed_policy.hpp"
#include "aro/oracle.hpp"
#include "aro/policies.hpp"
#include "aro/rounding.hpp"

namespace aro {

inline constexpr std::uint64_t kDefaultSeed = 20200101;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInstance = 2,
  kExitCap = 3,
  kExitSolver = 4,
};

struct RunConfig {
  std::string subcommand;
  std::string instance_path;
  std::string algorithm = "double-oracle";
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
  std::string format = "json";
  bool timing = false;

  // continuous greedy
  int steps = 100;
  double gamma_tol = 1e-3;
  std::size_t mc_samples = 2000;
  bool exact_extension = false;
  // rounding
  int rounds = 32;
  // double oracle
  double do_tol = 1e-6;
  int do_max_iter = 200;
  bool exhaustive_br = false;
  // evaluate
  std::string policy_path;
  std::string set_spec;
  // suite / gen
  std::string preset;
  int count = 100;
  GenParams gen;
};

namespace detail {

inline Json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"exact", e.exact}};
}

inline Json policy_json(const MixedSetPolicy& p) {
  Json arr = Json::array();
  for (const auto& w : p.canonical().support) {
    arr.push_back({{"set", w.set}, {"probability", w.weight}});
  }
  return arr;
}

inline MixedSetPolicy policy_from_json(const Json& j) {
  const Json& arr = j.is_object() ? field(j, "policy", "policy file") : j;
  if (!arr.is_array()) throw InstanceError("policy: expected an array");
  MixedSetPolicy p;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string where = "policy[" + std::to_string(k) + "]";
    p.add(as<ItemSet>(field(arr[k], "set", where), where + ".set"),
          as<double>(field(arr[k], "probability", where), where + ".probability"));
  }
  return p;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string set_cell(const ItemSet& s) {
  std::string out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k > 0) out += " ";
    out += std::to_string(s[k]);
  }
  return out;
}

/// Best single support set by robust value; ties go to the first listed.
inline std::pair<ItemSet, Estimate> best_pure(const MixedSetPolicy& p,
                                              const InducedEvaluator& eval) {
  ItemSet best;
  Estimate best_value{-std::numeric_limits<double>::infinity(), 0.0, true};
  for (const auto& w : p.canonical().support) {
    const Estimate v = robust_value(MixedSetPolicy::point_mass(w.set), eval);
    if (v.value > best_value.value) {
      best_value = v;
      best = w.set;
    }
  }
  return {best, best_value};
}

inline EvaluatorOptions evaluator_options(const RunConfig& c) {
  EvaluatorOptions o;
  o.mc_samples = c.mc_samples;
  o.seed = c.seed;
  return o;
}

inline Json solve_report(const Instance& inst, const RunConfig& c) {
  InducedEvaluator eval(inst.ground, inst.objectives, evaluator_options(c));
  Json r;
  r["instance_id"] = inst.id;
  r["algorithm"] = c.algorithm;
  r["seed"] = c.seed;
  MixedSetPolicy policy;
  if (c.algorithm == "one-over-m") {
    const auto res = sigma_one_over_m(inst, eval);
    policy = res.policy;
    r["alpha"] = res.alpha;
    Json per = Json::array();
    for (const auto& a : res.per_objective) {
      per.push_back({{"set", a.set},
                     {"value", a.value},
                     {"alpha_claim", a.alpha_claim},
                     {"heuristic", a.heuristic}});
    }
    r["oracle_sets"] = per;
  } else if (c.algorithm == "double-oracle") {
    DoubleOracleOptions o;
    o.tol = c.do_tol;
    o.max_iter = c.do_max_iter;
    o.exhaustive_best_response = c.exhaustive_br;
    const auto res = double_oracle(inst, eval, o);
    policy = res.policy;
    r["iterations"] = res.iterations;
    r["converged"] = res.converged;
    r["value_history"] = res.value_history;
    if (res.beta_estimate) r["beta_estimate"] = *res.beta_estimate;
  } else if (c.algorithm == "continuous-greedy") {
    GreedyConfig g;
    g.steps = c.steps;
    g.gamma_tolerance = c.gamma_tol;
    g.mc_samples = c.mc_samples;
    g.seed = c.seed;
    g.exact_extension = c.exact_extension;
    const auto search = binary_search_gamma(inst, g);
    const auto& sol = search.solution;
    r["gamma"] = sol.gamma_used;
    r["gamma_upper_bound"] = search.upper_bound;
    r["gamma_runs"] = search.runs;
    r["trivial"] = search.trivial;
    r["x"] = sol.x.values();
    Json fv = Json::array();
    for (const auto& v : sol.values) fv.push_back(estimate_json(v));
    r["fractional_values"] = fv;
    r["fractional_value"] = sol.min_value();
    const MixedSetPolicy decomposition = MixedSetPolicy::from_decomposition(sol.decomposition);
    Rng rng(InducedEvaluator::mix_seed(c.seed, 0x726f756e64, 0));
    const auto rounded = best_of_rounds(sol, inst.constraint, eval, c.rounds, rng);
    r["rounding"] = {{"method", to_string(rounded.method)},
                     {"repetitions", rounded.repetitions_used},
                     {"best_set", rounded.set},
                     {"best_set_value", estimate_json(rounded.value)},
                     {"zeta_hat", rounded.zeta_hat}};
    const Estimate dv = robust_value(decomposition, eval);
    const Estimate rv = robust_value(rounded.draws_policy, eval);
    r["decomposition_value"] = estimate_json(dv);
    r["rounded_mix_value"] = estimate_json(rv);
    const bool use_rounded = rv.value > dv.value;
    policy = use_rounded ? rounded.draws_policy : decomposition;
    r["policy_source"] = use_rounded ? "rounded-draws" : "decomposition";
  } else {
    throw SolverError("unknown algorithm '" + c.algorithm +
                      "' (expected one-over-m, double-oracle or continuous-greedy)");
  }
  policy.validate(inst.constraint);
  r["policy"] = policy_json(policy);
  r["robust_value"] = estimate_json(robust_value(policy, eval));
  Json per = Json::array();
  for (const auto& v : per_objective_values(policy, eval)) per.push_back(estimate_json(v));
  r["per_objective"] = per;
  const auto [set, value] = best_pure(policy, eval);
  r["best_pure_set"] = {{"set", set}, {"value", estimate_json(value)}};
  return r;
}

inline Json evaluate_report(const Instance& inst, const RunConfig& c) {
  MixedSetPolicy policy;
  if (!c.policy_path.empty()) {
    std::ifstream in(c.policy_path);
    if (!in) throw InstanceError("policy: cannot open '" + c.policy_path + "'");
    Json j;
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw InstanceError(std::string("policy: invalid JSON: ") + e.what());
    }
    policy = policy_from_json(j);
  } else {
    ItemSet s;
    std::stringstream ss(c.set_spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      try {
        s.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw InstanceError("--set: expected comma-separated item ids");
      }
    }
    for (int e : s) {
      if (e < 0 || e >= inst.n()) throw InstanceError("--set: item id out of range");
    }
    policy = MixedSetPolicy::point_mass(s);
  }
  policy.validate(inst.constraint);
  InducedEvaluator eval(inst.ground, inst.objectives, evaluator_options(c));
  Json r;
  r["instance_id"] = inst.id;
  r["policy"] = policy_json(policy);
  r["robust_value"] = estimate_json(robust_value(policy, eval));
  Json per = Json::array();
  for (const auto& v : per_objective_values(policy, eval)) per.push_back(estimate_json(v));
  r["per_objective"] = per;
  return r;
}

inline const char* kGapColumns =
    "instance_id,n,m,epsilon,adaptive_value,nonadaptive_value,ratio,bound,bound_satisfied";

inline std::string gap_row(const GapReport& g) {
  return g.instance_id + "," + std::to_string(g.n) + "," + std::to_string(g.m) + "," +
         num(g.epsilon) + "," + num(g.adaptive_value) + "," + num(g.nonadaptive_value) +
         "," + num(g.ratio) + "," + num(g.bound) + "," +
         (g.bound_satisfied ? "true" : "false");
}

inline Json gap_json(const GapReport& g) {
  return {{"instance_id", g.instance_id},         {"n", g.n},
          {"m", g.m},                             {"epsilon", g.epsilon},
          {"adaptive_value", g.adaptive_value},   {"nonadaptive_value", g.nonadaptive_value},
          {"ratio", g.ratio},                     {"bound", g.bound},
          {"bound_satisfied", g.bound_satisfied}, {"half_bound_satisfied", g.half_bound_satisfied}};
}

inline const char* kAlgorithmColumns =
    "instance_id,n,m,epsilon,exact_p2,one_over_m,double_oracle,cg_fractional,cg_gamma";

/// Per-instance comparison of the three solvers against the exact
/// non-adaptive optimum.
inline Json algorithm_row(const Instance& inst, const RunConfig& c) {
  InducedEvaluator eval(inst.ground, inst.objectives, evaluator_options(c));
  const double p2 = oracle::exact_p2(inst).value;
  const double om = sigma_one_over_m(inst, eval).value.value;
  DoubleOracleOptions o;
  o.tol = c.do_tol;
  o.max_iter = c.do_max_iter;
  o.exhaustive_best_response = c.exhaustive_br;
  o.compute_beta = false;
  const double dov = double_oracle(inst, eval, o).value.value;
  GreedyConfig g;
  g.steps = c.steps;
  g.gamma_tolerance = c.gamma_tol;
  g.mc_samples = c.mc_samples;
  g.seed = c.seed;
  g.exact_extension = c.exact_extension;
  const auto cg = binary_search_gamma(inst, g);
  return {{"instance_id", inst.id},   {"n", inst.n()},
          {"m", inst.m()},            {"epsilon", inst.epsilon()},
          {"exact_p2", p2},           {"one_over_m", om},
          {"double_oracle", dov},     {"cg_fractional", cg.solution.min_value()},
          {"cg_gamma", cg.solution.gamma_used}};
}

inline std::string algorithm_csv(const Json& j) {
  return j["instance_id"].get<std::string>() + "," + std::to_string(j["n"].get<int>()) +
         "," + std::to_string(j["m"].get<int>()) + "," + num(j["epsilon"]) + "," +
         num(j["exact_p2"]) + "," + num(j["one_over_m"]) + "," + num(j["double_oracle"]) +
         "," + num(j["cg_fractional"]) + "," + num(j["cg_gamma"]);
}

inline std::string solve_csv(const Json& r) {
  const auto& rv = r["robust_value"];
  const auto& bp = r["best_pure_set"];
  std::string s = "instance_id,algorithm,robust_value,std_error,exact,best_pure_set,"
                  "best_pure_value,support_size\n";
  s += r["instance_id"].get<std::string>() + "," + r.value("algorithm", "evaluate") + "," +
       num(rv["value"]) + "," + num(rv["std_error"]) + "," +
       (rv["exact"].get<bool>() ? "true" : "false") + ",";
  if (bp.is_object()) {
    s += set_cell(bp["set"].get<ItemSet>()) + "," + num(bp["value"]["value"]);
  } else {
    s += ",";
  }
  return s + "," + std::to_string(r["policy"].size()) + "\n";
}

}  // namespace detail

/// Seed of the k-th instance of a suite.
inline std::uint64_t suite_seed(std::uint64_t seed, int k) {
  return InducedEvaluator::mix_seed(seed, static_cast<std::uint64_t>(k), 0x5717e);
}

/// Runs one command, writing the report to `out` (or to the --out file).
/// Returns an ExitCode; error messages go to `err`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    const auto start = std::chrono::steady_clock::now();
    std::string text;
    const bool csv = c.format == "csv";
    if (c.format != "csv" && c.format != "json") {
      throw InstanceError("--format: expected csv or json");
    }
    const auto need_instance = [&]() {
      if (c.instance_path.empty()) throw InstanceError("--instance: required");
      return load_instance(c.instance_path);
    };
    const auto finish = [&](Json report) {
      if (c.timing) {
        report["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      return report.dump(2) + "\n";
    };

    if (c.subcommand == "solve") {
      const Instance inst = need_instance();
      const Json r = detail::solve_report(inst, c);
      text = csv ? detail::solve_csv(r) : finish(r);
    } else if (c.subcommand == "evaluate") {
      const Instance inst = need_instance();
      const Json r = detail::evaluate_report(inst, c);
      text = csv ? detail::solve_csv(r) : finish(r);
    } else if (c.subcommand == "gap") {
      const Instance inst = need_instance();
      const GapReport g = gap_experiment(inst);
      text = csv ? std::string(detail::kGapColumns) + "\n" + detail::gap_row(g) + "\n"
                 : finish(detail::gap_json(g));
    } else if (c.subcommand == "suite") {
      if (c.preset.empty()) throw InstanceError("--preset: required");
      if (c.count < 1) throw InstanceError("--count: must be >= 1");
      const bool gap = c.preset == "theorem1";
      std::string rows =
          std::string(gap ? detail::kGapColumns : detail::kAlgorithmColumns) + "\n";
      Json arr = Json::array();
      for (int k = 0; k < c.count; ++k) {
        GenParams p = c.gen;
        p.seed = suite_seed(c.seed, k);
        const Instance inst = generate_instance(c.preset, p);
        if (gap) {
          const GapReport g = gap_experiment(inst);
          rows += detail::gap_row(g) + "\n";
          arr.push_back(detail::gap_json(g));
        } else {
          const Json row = detail::algorithm_row(inst, c);
          rows += detail::algorithm_csv(row) + "\n";
          arr.push_back(row);
        }
      }
      text = csv ? rows : finish(Json{{"preset", c.preset}, {"seed", c.seed}, {"rows", arr}});
    } else if (c.subcommand == "gen") {
      if (c.preset.empty()) throw InstanceError("--preset: required");
      GenParams p = c.gen;
      p.seed = c.seed;
      text = dump_instance(generate_instance(c.preset, p));
    } else {
      err << "error: unknown subcommand '" << c.subcommand << "'\n";
      return kExitUsage;
    }

    if (c.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(c.out_path);
      if (!f) throw InstanceError("--out: cannot write '" + c.out_path + "'");
      f << text;
    }
    return kExitOk;
  } catch (const InstanceError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInstance;
  } catch (const CapExceeded& e) {
    err << "size limit: " << e.what() << "\n";
    return kExitCap;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace aro

#endif  // ARO_RUN_HPP

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
//  General-case non-adaptive solvers: play one per-objective greedy
//  solution uniformly at random, or grow a support of sets by column
//  generation against the finite adversary over objectives.
//

#ifndef ARO_HEURISTICS_HPP
#define ARO_HEURISTICS_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include "aro/core.hpp"
#include "aro/greedy.hpp"
#include "aro/instance.hpp"
#include "aro/lp.hpp"
#include "aro/mixed_policy.hpp"
#include "aro/objectives.hpp"
#include "aro/policies.hpp"

namespace aro {

struct ApproxOracleResult {
  ItemSet set;
  /// U(set, f_i).
  double value = 0.0;
  /// Approximation factor the oracle can claim for this objective.
  double alpha_claim = 0.5;
  /// True when alpha_claim is not backed by a guarantee (eps < 1 or a
  /// non-matroid family).
  bool heuristic = false;
};

/// Lazy greedy on U(., f_i) over the instance's family.
inline ApproxOracleResult approx_single(int i, const Instance& instance,
                                        const InducedEvaluator& eval) {
  const auto g = lazy_greedy(instance.constraint,
                             [&](Mask s) { return eval.value(i, s).value; });
  ApproxOracleResult out;
  out.set = g.set;
  out.value = g.value;
  const double eps = instance.objectives[i].epsilon;
  out.heuristic = eps < 1.0 || !instance.constraint.is_matroid();
  out.alpha_claim = eps < 1.0 ? 0.5 * eps * eps : 0.5;
  return out;
}

struct OneOverMResult {
  /// Each E_i with probability 1/m; equal sets merged.
  MixedSetPolicy policy;
  /// Per-objective oracle outputs, in objective order.
  std::vector<ApproxOracleResult> per_objective;
  Estimate value;
  /// min_i alpha_claim.
  double alpha = 0.5;
};

/// Optimizes each objective separately and picks one of the m answers
/// uniformly at random.
inline OneOverMResult sigma_one_over_m(const Instance& instance,
                                       const InducedEvaluator& eval) {
  OneOverMResult out;
  const int m = instance.m();
  out.alpha = 1.0;
  for (int i = 0; i < m; ++i) {
    out.per_objective.push_back(approx_single(i, instance, eval));
    out.alpha = std::min(out.alpha, out.per_objective.back().alpha_claim);
  }
  for (const auto& r : out.per_objective) out.policy.add(r.set, 1.0 / m);
  out.value = robust_value(out.policy, eval);
  return out;
}

inline OneOverMResult sigma_one_over_m(const Instance& instance,
                                       EvaluatorOptions options = {}) {
  InducedEvaluator eval(instance.ground, instance.objectives, options);
  return sigma_one_over_m(instance, eval);
}

inline constexpr int kExhaustiveBestResponseMaxItems = 12;

/// Maximizes sum_i lambda_i U(S, f_i) by lazy greedy, or by enumerating
/// the family when `exhaustive` is set (at most 12 items).
inline std::pair<ItemSet, double> best_response(std::span<const double> lambda,
                                                const Instance& instance,
                                                const InducedEvaluator& eval,
                                                bool exhaustive = false) {
  if (static_cast<int>(lambda.size()) != instance.m()) {
    throw SolverError("best_response: lambda must have one weight per objective");
  }
  const auto weighted = [&](Mask s) { return eval.weighted_value(lambda, s); };
  if (exhaustive) {
    if (instance.n() > kExhaustiveBestResponseMaxItems) {
      throw CapExceeded("exhaustive best response: more than 12 items");
    }
    return exhaustive_best(instance.constraint, weighted);
  }
  const auto g = lazy_greedy(instance.constraint, weighted);
  return {g.set, g.value};
}

struct DoubleOracleOptions {
  double tol = 1e-6;
  int max_iter = 200;
  bool exhaustive_best_response = false;
  /// Compare with the exact optimum over all feasible sets when n <= 12.
  bool compute_beta = true;
};

struct DoubleOracleResult {
  MixedSetPolicy policy;
  /// Robust value of the policy.
  Estimate value;
  /// Best-response calls made.
  int iterations = 0;
  /// The oracle found no set improving on the restricted game.
  bool converged = false;
  /// value / exact optimum, when the exact optimum was computed.
  std::optional<double> beta_estimate;
  /// Restricted game value after each solve.
  std::vector<double> value_history;
  /// Support sets in the order they were added.
  std::vector<ItemSet> support;
};

/// Column generation for the set player: solve the game restricted to the
/// current support, ask the best-response oracle for a set against the
/// adversary's mix over objectives, and stop when it cannot improve.
inline DoubleOracleResult double_oracle(const Instance& instance,
                                        const InducedEvaluator& eval,
                                        const DoubleOracleOptions& options = {}) {
  if (options.max_iter < 1) throw SolverError("double_oracle: max_iter must be >= 1");
  DoubleOracleResult out;
  const int m = instance.m();
  const auto start = sigma_one_over_m(instance, eval);
  for (const auto& r : start.per_objective) {
    if (std::find(out.support.begin(), out.support.end(), r.set) == out.support.end()) {
      out.support.push_back(r.set);
    }
  }
  GameSolution sol;
  while (true) {
    MatrixGame game;
    for (const auto& s : out.support) {
      const Mask mask = to_mask(s);
      std::vector<double> row(m);
      for (int i = 0; i < m; ++i) row[i] = eval.value(i, mask).value;
      game.payoff.push_back(std::move(row));
    }
    sol = solve_matrix_game(game);
    out.value_history.push_back(sol.value);
    if (out.iterations >= options.max_iter) break;
    const auto [set, weighted] =
        best_response(sol.col_mix, instance, eval, options.exhaustive_best_response);
    ++out.iterations;
    const bool known =
        std::find(out.support.begin(), out.support.end(), set) != out.support.end();
    if (weighted <= sol.value + options.tol || known) {
      out.converged = true;
      break;
    }
    out.support.push_back(set);
  }
  for (std::size_t k = 0; k < out.support.size(); ++k) {
    if (sol.row_mix[k] > 0.0) out.policy.add(out.support[k], sol.row_mix[k]);
  }
  out.value = robust_value(out.policy, eval);
  if (options.compute_beta && instance.n() <= kExhaustiveBestResponseMaxItems) {
    const double opt = optimal_nonadaptive_value(instance).value;
    out.beta_estimate = opt > 0.0 ? out.value.value / opt : 1.0;
  }
  return out;
}

inline DoubleOracleResult double_oracle(const Instance& instance,
                                        const DoubleOracleOptions& options = {},
                                        EvaluatorOptions eval_options = {}) {
  InducedEvaluator eval(instance.ground, instance.objectives, eval_options);
  return double_oracle(instance, eval, options);
}

}  // namespace aro

#endif  // ARO_HEURISTICS_HPP

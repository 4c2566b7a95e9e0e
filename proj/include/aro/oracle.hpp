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
//  Brute-force reference optima. Everything here is computed from full
//  realization enumeration and an LP; none of the solvers or the cached
//  evaluator are used.
//

#ifndef ARO_ORACLE_HPP
#define ARO_ORACLE_HPP

#include <string>
#include <vector>

#include "aro/core.hpp"
#include "aro/instance.hpp"
#include "aro/lp.hpp"
#include "aro/policies.hpp"

namespace aro::oracle {

struct OracleResult {
  double value = 0.0;
  /// Feasible sets (or tree indices for the adaptive oracle) with their
  /// optimal weights.
  std::vector<ItemSet> sets;
  std::vector<std::string> trees;
  std::vector<double> weights;
  /// Number of pure strategies enumerated.
  std::size_t enumerated = 0;
};

inline constexpr std::size_t kOracleRealizationCap = 1'000'000;

/// Every realization of all n items with its probability.
inline std::vector<std::pair<std::vector<int>, double>> all_realizations(
    const GroundSet& ground) {
  const int n = ground.size();
  std::vector<std::pair<std::vector<int>, double>> out;
  std::vector<int> y(n, 0);
  while (true) {
    double p = 1.0;
    for (int e = 0; e < n; ++e) p *= ground.prob(e, y[e]);
    out.push_back({y, p});
    if (out.size() > kOracleRealizationCap) {
      throw CapExceeded("oracle: too many realizations to enumerate");
    }
    int e = 0;
    while (e < n && ++y[e] == ground.state_count(e)) y[e++] = 0;
    if (e == n) break;
  }
  return out;
}

/// Payoff matrix U(S, f_i) over every feasible S found by scanning all
/// 2^n masks.
inline std::vector<std::vector<double>> set_payoffs(const Instance& inst,
                                                    std::vector<Mask>& sets) {
  const int n = inst.n();
  if (n > 20) throw CapExceeded("oracle: more than 20 items");
  const auto ys = all_realizations(inst.ground);
  sets.clear();
  for (Mask m = 0; m <= full_mask(n); ++m) {
    if (is_feasible(inst.constraint, from_mask(m))) sets.push_back(m);
  }
  std::vector<std::vector<double>> payoff;
  std::vector<Observation> obs;
  for (Mask m : sets) {
    const ItemSet s = from_mask(m);
    std::vector<double> row;
    for (const auto& pair : inst.objectives) {
      double u = 0.0;
      for (const auto& [y, p] : ys) {
        obs.clear();
        for (int e : s) obs.push_back({e, y[e]});
        u += p * pair.f(obs);
      }
      row.push_back(u);
    }
    payoff.push_back(std::move(row));
  }
  return payoff;
}

inline OracleResult solve_sets(const Instance& inst, bool sub_probability) {
  std::vector<Mask> sets;
  MatrixGame game{set_payoffs(inst, sets)};
  const GameSolution sol = solve_matrix_game(game, sub_probability);
  OracleResult out;
  out.value = sol.value;
  out.enumerated = sets.size();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (sol.row_mix[k] > 0.0) {
      out.sets.push_back(from_mask(sets[k]));
      out.weights.push_back(sol.row_mix[k]);
    }
  }
  return out;
}

/// Best distribution over feasible sets (probabilities summing to one).
inline OracleResult exact_p2(const Instance& inst) { return solve_sets(inst, false); }

/// Same game with probabilities summing to at most one.
inline OracleResult exact_p1_fractional(const Instance& inst) {
  return solve_sets(inst, true);
}

/// Best distribution over deterministic policy trees. Trees come from the
/// shared enumerator; each is evaluated here by replaying it on every full
/// realization.
inline OracleResult exact_adaptive(const Instance& inst,
                                   const TreeEnumerationLimits& limits = {}) {
  const auto trees = enumerate_policy_trees(inst, limits);
  const auto ys = all_realizations(inst.ground);
  MatrixGame game;
  Realization r;
  std::vector<Observation> obs;
  for (const auto& t : trees) {
    std::vector<double> row(inst.m(), 0.0);
    for (const auto& [y, p] : ys) {
      r.states = y;
      obs.clear();
      for (int e : t.picked(r)) obs.push_back({e, y[e]});
      for (int i = 0; i < inst.m(); ++i) row[i] += p * inst.objectives[i].f(obs);
    }
    game.payoff.push_back(std::move(row));
  }
  const GameSolution sol = solve_matrix_game(game);
  OracleResult out;
  out.value = sol.value;
  out.enumerated = trees.size();
  for (std::size_t k = 0; k < trees.size(); ++k) {
    if (sol.row_mix[k] > 0.0) {
      out.trees.push_back(trees[k].to_string());
      out.weights.push_back(sol.row_mix[k]);
    }
  }
  return out;
}

}  // namespace aro::oracle

#endif  // ARO_ORACLE_HPP

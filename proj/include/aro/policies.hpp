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
//  Adaptive policies as decision trees, their exact evaluation, the
//  realization-sampling reduction to a non-adaptive mixed policy, and the
//  brute-force optima used for adaptivity-gap experiments.
//

#ifndef ARO_POLICIES_HPP
#define ARO_POLICIES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "aro/core.hpp"
#include "aro/instance.hpp"
#include "aro/lp.hpp"
#include "aro/mixed_policy.hpp"
#include "aro/objectives.hpp"

namespace aro {

/// Deterministic adaptive policy. A node either stops (item == -1) or
/// picks `item` and continues with children[state]. Subtrees are shared
/// and immutable.
class PolicyTree {
 public:
  struct Node {
    int item = -1;
    std::vector<std::shared_ptr<const Node>> children;
  };
  using NodePtr = std::shared_ptr<const Node>;

  PolicyTree() : root_(stop_node()) {}
  explicit PolicyTree(NodePtr root) : root_(std::move(root)) {}

  static NodePtr stop_node() {
    static const NodePtr stop = std::make_shared<const Node>();
    return stop;
  }

  static NodePtr pick(int item, std::vector<NodePtr> children) {
    auto n = std::make_shared<Node>();
    n->item = item;
    n->children = std::move(children);
    return n;
  }

  const NodePtr& root() const { return root_; }

  /// Throws SolverError unless every child list matches the item's state
  /// count, no item repeats on a path and every path is feasible.
  void validate(const GroundSet& ground, const FeasibleFamily& family) const {
    validate_node(*root_, 0, ground, family);
  }

  /// Items picked along the path taken under a full realization.
  ItemSet picked(const Realization& y) const {
    ItemSet out;
    const Node* node = root_.get();
    while (node->item >= 0) {
      out.push_back(node->item);
      node = node->children[y.states[node->item]].get();
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t node_count() const { return count(*root_); }

  /// Parenthesized form, e.g. "0(1(.,.),.)" where "." is stop.
  std::string to_string() const { return format(*root_); }

 private:
  static void validate_node(const Node& node, Mask path, const GroundSet& ground,
                            const FeasibleFamily& family) {
    if (node.item < 0) {
      if (!node.children.empty()) throw SolverError("policy tree: stop node has children");
      return;
    }
    if (node.item >= ground.size()) throw SolverError("policy tree: item out of range");
    const Mask bit = Mask{1} << node.item;
    if (path & bit) throw SolverError("policy tree: item repeats on a path");
    if (!family.contains_mask(path | bit)) throw SolverError("policy tree: infeasible path");
    if (static_cast<int>(node.children.size()) != ground.state_count(node.item)) {
      throw SolverError("policy tree: child count differs from state count");
    }
    for (const auto& c : node.children) {
      if (!c) throw SolverError("policy tree: null child");
      validate_node(*c, path | bit, ground, family);
    }
  }

  static std::size_t count(const Node& node) {
    std::size_t c = 1;
    for (const auto& ch : node.children) c += count(*ch);
    return c;
  }

  static std::string format(const Node& node) {
    if (node.item < 0) return ".";
    std::string s = std::to_string(node.item) + "(";
    for (std::size_t k = 0; k < node.children.size(); ++k) {
      if (k > 0) s += ",";
      s += format(*node.children[k]);
    }
    return s + ")";
  }

  NodePtr root_;
};

namespace detail {

/// Visits every leaf with the observations collected on its path and the
/// path probability. Zero-probability branches are skipped.
template <class Visit>
void walk_tree(const PolicyTree::Node& node, const GroundSet& ground,
               std::vector<Observation>& path, double prob, Visit& visit) {
  if (node.item < 0) {
    visit(std::span<const Observation>(path), prob);
    return;
  }
  for (int s = 0; s < ground.state_count(node.item); ++s) {
    const double p = ground.prob(node.item, s);
    if (p <= 0.0) continue;
    path.push_back({node.item, s});
    walk_tree(*node.children[s], ground, path, prob * p, visit);
    path.pop_back();
  }
}

}  // namespace detail

/// U(pi, f) = E_y[f(observations picked by pi under y)]. States of items
/// off the taken path do not affect the reward, so the tree is walked
/// branch by branch instead of enumerating full realizations.
inline double evaluate_policy_exact(const PolicyTree& policy, const RewardFunction& f,
                                    const GroundSet& ground) {
  std::vector<Observation> path;
  double total = 0.0;
  auto visit = [&](std::span<const Observation> obs, double p) { total += p * f.value(obs); };
  detail::walk_tree(*policy.root(), ground, path, 1.0, visit);
  return total;
}

/// min_i U(pi, f_i).
inline double robust_value(const PolicyTree& policy, const Instance& instance) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pair : instance.objectives) {
    best = std::min(best, evaluate_policy_exact(policy, pair.f, instance.ground));
  }
  return best;
}

inline Estimate robust_value(const MixedSetPolicy& policy, const Instance& instance,
                             EvaluatorOptions options = {}) {
  InducedEvaluator eval(instance.ground, instance.objectives, options);
  return robust_value(policy, eval);
}

/// The mixed policy that plays the item set pi would pick under an
/// independently drawn realization: each reachable leaf set gets the total
/// probability of the paths ending there.
inline MixedSetPolicy nonadaptive_from_adaptive(const PolicyTree& policy,
                                                const GroundSet& ground) {
  std::map<ItemSet, double> mass;
  std::vector<Observation> path;
  auto visit = [&](std::span<const Observation> obs, double p) {
    ItemSet s;
    for (const auto& o : obs) s.push_back(o.item);
    std::sort(s.begin(), s.end());
    mass[s] += p;
  };
  detail::walk_tree(*policy.root(), ground, path, 1.0, visit);
  MixedSetPolicy out;
  for (auto& [s, p] : mass) out.support.push_back({s, p});
  return out;
}

struct TreeEnumerationLimits {
  int max_items = 4;
  int max_states = 3;
  int max_rank = 3;
  std::size_t max_trees = 200'000;
};

/// Number of distinct trees enumerate_policy_trees would return, without
/// building them. Saturates at infinity.
inline double count_policy_trees(const GroundSet& ground, const FeasibleFamily& family) {
  const int n = ground.size();
  if (n > 20) return std::numeric_limits<double>::infinity();
  std::vector<double> count(std::size_t{1} << n, 0.0);
  for (Mask m = full_mask(n) + 1; m-- > 0;) {
    if (!family.contains_mask(m)) continue;
    double c = 1.0;
    for (int e = 0; e < n; ++e) {
      const Mask next = m | (Mask{1} << e);
      if (next == m || !family.contains_mask(next)) continue;
      c += std::pow(count[next], ground.state_count(e));
    }
    count[m] = c;
  }
  return count[0];
}

/// Every deterministic feasible policy tree, including trees that stop
/// early. Trees below the same picked set are shared, so distinct trees
/// differ structurally.
inline std::vector<PolicyTree> enumerate_policy_trees(
    const GroundSet& ground, const FeasibleFamily& family,
    const TreeEnumerationLimits& limits = {}) {
  const int n = ground.size();
  if (n > limits.max_items) {
    throw CapExceeded("policy tree enumeration: " + std::to_string(n) +
                      " items exceeds the limit of " + std::to_string(limits.max_items));
  }
  for (int e = 0; e < n; ++e) {
    if (ground.state_count(e) > limits.max_states) {
      throw CapExceeded("policy tree enumeration: item " + std::to_string(e) +
                        " has more than " + std::to_string(limits.max_states) + " states");
    }
  }
  if (family.rank() > limits.max_rank) {
    throw CapExceeded("policy tree enumeration: family rank exceeds " +
                      std::to_string(limits.max_rank));
  }
  const double total = count_policy_trees(ground, family);
  if (total > static_cast<double>(limits.max_trees)) {
    throw CapExceeded("policy tree enumeration: " + std::to_string(total) +
                      " trees exceeds the limit of " + std::to_string(limits.max_trees));
  }

  using NodePtr = PolicyTree::NodePtr;
  std::vector<std::vector<NodePtr>> memo(std::size_t{1} << n);
  for (Mask m = full_mask(n) + 1; m-- > 0;) {
    if (!family.contains_mask(m)) continue;
    auto& out = memo[m];
    out.push_back(PolicyTree::stop_node());
    for (int e = 0; e < n; ++e) {
      const Mask next = m | (Mask{1} << e);
      if (next == m || !family.contains_mask(next)) continue;
      const auto& sub = memo[next];
      const int k = ground.state_count(e);
      // Odometer over one subtree choice per state.
      std::vector<std::size_t> idx(k, 0);
      while (true) {
        std::vector<NodePtr> children(k);
        for (int s = 0; s < k; ++s) children[s] = sub[idx[s]];
        out.push_back(PolicyTree::pick(e, std::move(children)));
        int pos = k - 1;
        while (pos >= 0 && ++idx[pos] == sub.size()) idx[pos--] = 0;
        if (pos < 0) break;
      }
    }
  }
  std::vector<PolicyTree> trees;
  trees.reserve(memo[0].size());
  for (auto& root : memo[0]) trees.emplace_back(root);
  return trees;
}

inline std::vector<PolicyTree> enumerate_policy_trees(
    const Instance& instance, const TreeEnumerationLimits& limits = {}) {
  return enumerate_policy_trees(instance.ground, instance.constraint, limits);
}

/// Optimal randomized adaptive policy: a distribution over trees.
struct AdaptiveOptimum {
  double value = 0.0;
  std::vector<PolicyTree> trees;
  std::vector<double> weights;
  /// Number of trees enumerated (before removing duplicate payoff rows).
  std::size_t enumerated = 0;
};

namespace detail {

/// Keeps the first row of every group of identical rows.
inline std::vector<std::size_t> distinct_rows(const std::vector<std::vector<double>>& rows) {
  std::map<std::vector<double>, std::size_t> seen;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (seen.emplace(rows[r], r).second) keep.push_back(r);
  }
  return keep;
}

}  // namespace detail

/// Solves the game trees x objectives. For m = 1 the best tree is returned
/// directly.
inline AdaptiveOptimum optimal_adaptive_value(const Instance& instance,
                                              const TreeEnumerationLimits& limits = {}) {
  const auto trees = enumerate_policy_trees(instance, limits);
  std::vector<std::vector<double>> payoff(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    for (const auto& pair : instance.objectives) {
      payoff[t].push_back(evaluate_policy_exact(trees[t], pair.f, instance.ground));
    }
  }
  const auto keep = detail::distinct_rows(payoff);
  MatrixGame game;
  for (std::size_t r : keep) game.payoff.push_back(payoff[r]);
  const GameSolution sol = solve_matrix_game(game);
  AdaptiveOptimum out;
  out.value = sol.value;
  out.enumerated = trees.size();
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (sol.row_mix[k] > 0.0) {
      out.trees.push_back(trees[keep[k]]);
      out.weights.push_back(sol.row_mix[k]);
    }
  }
  return out;
}

struct NonadaptiveOptimum {
  double value = 0.0;
  MixedSetPolicy policy;
  std::size_t enumerated = 0;
};

/// Exact optimum over distributions on feasible sets, using the
/// evaluator's induced values.
inline NonadaptiveOptimum optimal_nonadaptive_value(const Instance& instance,
                                                    std::size_t set_cap = std::size_t{1} << 20) {
  if (instance.n() > 20) throw CapExceeded("nonadaptive optimum: more than 20 items");
  InducedEvaluator eval(instance.ground, instance.objectives);
  const auto sets = instance.constraint.enumerate(set_cap);
  MatrixGame game;
  for (Mask s : sets) {
    std::vector<double> row;
    for (int i = 0; i < instance.m(); ++i) row.push_back(eval.value(i, s).value);
    game.payoff.push_back(std::move(row));
  }
  const GameSolution sol = solve_matrix_game(game);
  NonadaptiveOptimum out;
  out.value = sol.value;
  out.enumerated = sets.size();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (sol.row_mix[k] > 0.0) out.policy.add(from_mask(sets[k]), sol.row_mix[k]);
  }
  return out;
}

struct GapReport {
  std::string instance_id;
  int n = 0;
  int m = 0;
  double epsilon = 1.0;
  double adaptive_value = 0.0;
  double nonadaptive_value = 0.0;
  /// nonadaptive / adaptive, or 1 when the adaptive optimum is 0.
  double ratio = 1.0;
  /// eps^2 / 2.
  double bound = 0.5;
  bool bound_satisfied = true;
  /// For eps = 1 the ratio must also be at least 1/2.
  bool half_bound_satisfied = true;
};

inline constexpr double kGapTolerance = 1e-9;

inline GapReport gap_experiment(const Instance& instance,
                                const TreeEnumerationLimits& limits = {}) {
  GapReport r;
  r.instance_id = instance.id;
  r.n = instance.n();
  r.m = instance.m();
  r.epsilon = instance.epsilon();
  r.adaptive_value = optimal_adaptive_value(instance, limits).value;
  r.nonadaptive_value = optimal_nonadaptive_value(instance).value;
  r.ratio = r.adaptive_value > 0.0 ? r.nonadaptive_value / r.adaptive_value : 1.0;
  r.bound = r.epsilon * r.epsilon / 2.0;
  r.bound_satisfied = r.ratio >= r.bound - kGapTolerance;
  if (r.epsilon == 1.0) r.half_bound_satisfied = r.ratio >= 0.5 - kGapTolerance;
  return r;
}

}  // namespace aro

#endif  // ARO_POLICIES_HPP

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

#ifndef ARO_MIXED_POLICY_HPP
#define ARO_MIXED_POLICY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aro/core.hpp"
#include "aro/objectives.hpp"

namespace aro {

struct WeightedSet {
  ItemSet set;
  double weight = 0.0;
};

/// Sum of weight * indicator(set).
inline std::vector<double> reconstruct(int n, std::span<const WeightedSet> parts) {
  std::vector<double> x(n, 0.0);
  for (const auto& p : parts) {
    for (int e : p.set) x[e] += p.weight;
  }
  return x;
}

/// Non-adaptive randomized policy: play set S with probability p(S).
///
/// Probabilities may sum to less than one (the remaining mass picks
/// nothing); `sub_probability` records whether the producer allowed that.
struct MixedSetPolicy {
  std::vector<WeightedSet> support;
  bool sub_probability = false;

  static MixedSetPolicy point_mass(ItemSet s) {
    MixedSetPolicy p;
    p.support.push_back({normalized(std::move(s)), 1.0});
    return p;
  }

  /// The weighted sets of a decomposition, with the missing mass on the
  /// empty set.
  static MixedSetPolicy from_decomposition(std::span<const WeightedSet> parts) {
    MixedSetPolicy p;
    for (const auto& w : parts) {
      if (w.weight > 0.0) p.add(w.set, w.weight);
    }
    const double rest = 1.0 - p.total();
    if (rest > 0.0) p.add({}, rest);
    return p;
  }

  /// Adds mass to a set, merging with an existing entry.
  void add(ItemSet s, double prob) {
    s = normalized(std::move(s));
    for (auto& w : support) {
      if (w.set == s) {
        w.weight += prob;
        return;
      }
    }
    support.push_back({std::move(s), prob});
  }

  double total() const {
    double t = 0.0;
    for (const auto& w : support) t += w.weight;
    return t;
  }

  /// Throws SolverError on negative mass, total above one, or an
  /// infeasible support set.
  void validate(const FeasibleFamily& family) const {
    for (const auto& w : support) {
      if (!(w.weight >= -1e-12)) throw SolverError("mixed policy: negative probability");
      if (!family.contains(w.set)) {
        throw SolverError("mixed policy: infeasible support set " +
                          FeasibleFamily::set_string(w.set));
      }
    }
    if (total() > 1.0 + 1e-9) throw SolverError("mixed policy: probabilities exceed one");
  }

  /// Support sorted by set for stable output.
  MixedSetPolicy canonical() const {
    MixedSetPolicy out;
    out.sub_probability = sub_probability;
    for (const auto& w : support) {
      if (w.weight > 0.0) out.add(w.set, w.weight);
    }
    std::sort(out.support.begin(), out.support.end(),
              [](const WeightedSet& a, const WeightedSet& b) { return a.set < b.set; });
    return out;
  }
};

/// sum_S p(S) U(S, f_i) for every objective.
inline std::vector<Estimate> per_objective_values(const MixedSetPolicy& policy,
                                                  const InducedEvaluator& eval) {
  std::vector<Estimate> out(eval.objective_count());
  std::vector<double> var(eval.objective_count(), 0.0);
  for (int i = 0; i < eval.objective_count(); ++i) {
    for (const auto& w : policy.support) {
      const Estimate e = eval.value(i, to_mask(w.set));
      out[i].value += w.weight * e.value;
      var[i] += w.weight * w.weight * e.std_error * e.std_error;
      out[i].exact = out[i].exact && e.exact;
    }
    out[i].std_error = std::sqrt(var[i]);
  }
  return out;
}

/// min_i of the per-objective values, with the standard error of the
/// minimizing objective.
inline Estimate robust_value(const MixedSetPolicy& policy,
                             const InducedEvaluator& eval) {
  const auto values = per_objective_values(policy, eval);
  Estimate best{std::numeric_limits<double>::infinity(), 0.0, true};
  for (const auto& v : values) {
    if (v.value < best.value) best = v;
  }
  bool exact = true;
  for (const auto& v : values) exact = exact && v.exact;
  best.exact = exact;
  return best;
}

}  // namespace aro

#endif  // ARO_MIXED_POLICY_HPP

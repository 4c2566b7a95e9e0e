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
//  Rounding a fractional point to a feasible set: swap rounding for
//  uniform and partition matroids, independent rounding with greedy repair
//  for everything else.
//

#ifndef ARO_ROUNDING_HPP
#define ARO_ROUNDING_HPP

#include <algorithm>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aro/continuous_greedy.hpp"
#include "aro/core.hpp"
#include "aro/mixed_policy.hpp"
#include "aro/multilinear.hpp"
#include "aro/objectives.hpp"

namespace aro {

namespace detail {

/// Partition matroid whose parts are padded with dummy elements so every
/// independent set extends to a base with exactly min(cap, |part|) elements
/// per part. Dummies of part j get ids n + offset[j] + k.
class PaddedPartition {
 public:
  explicit PaddedPartition(const FeasibleFamily& family) : n_(family.size()) {
    part_of_.resize(n_);
    for (int e = 0; e < n_; ++e) part_of_[e] = family.part_of(e);
    int next = n_;
    for (std::size_t j = 0; j < family.parts().size(); ++j) {
      const int slots = std::min<int>(family.capacities()[j],
                                      static_cast<int>(family.parts()[j].size()));
      slots_.push_back(slots);
      first_dummy_.push_back(next);
      for (int k = 0; k < slots; ++k) part_of_.push_back(static_cast<int>(j));
      next += slots;
    }
  }

  std::vector<int> to_base(const ItemSet& s) const {
    std::vector<int> used(slots_.size(), 0);
    std::vector<int> base = s;
    for (int e : s) ++used[part_of_[e]];
    for (std::size_t j = 0; j < slots_.size(); ++j) {
      for (int k = used[j]; k < slots_[j]; ++k) base.push_back(first_dummy_[j] + k - used[j]);
    }
    std::sort(base.begin(), base.end());
    return base;
  }

  ItemSet real_items(const std::vector<int>& base) const {
    ItemSet out;
    for (int e : base) {
      if (e < n_) out.push_back(e);
    }
    return out;
  }

  int part_of(int e) const { return part_of_[e]; }

 private:
  int n_;
  std::vector<int> part_of_;
  std::vector<int> slots_;
  std::vector<int> first_dummy_;
};

}  // namespace detail

/// Swap rounding of a convex combination of independent sets of a uniform
/// or partition matroid. Missing mass is assigned to the empty set. Each
/// item ends up in the output with probability equal to its coordinate.
inline ItemSet swap_round(std::span<const WeightedSet> decomposition,
                          const FeasibleFamily& family, Rng& rng) {
  if (!family.is_matroid()) {
    throw SolverError(
        "swap_round: family is not a uniform or partition matroid; use "
        "independent_round_repair");
  }
  const detail::PaddedPartition padded(family);
  std::vector<std::pair<std::vector<int>, double>> parts;
  double total = 0.0;
  for (const auto& w : decomposition) {
    if (!family.contains(w.set)) {
      throw SolverError("swap_round: decomposition holds an infeasible set");
    }
    if (w.weight <= 0.0) continue;
    parts.push_back({padded.to_base(w.set), w.weight});
    total += w.weight;
  }
  if (total < 1.0) parts.push_back({padded.to_base({}), 1.0 - total});
  if (parts.empty()) return {};

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> current = parts[0].first;
  double current_weight = parts[0].second;
  for (std::size_t k = 1; k < parts.size(); ++k) {
    std::vector<int> other = parts[k].first;
    const double other_weight = parts[k].second;
    while (current != other) {
      std::vector<int> only_current, only_other;
      std::set_difference(current.begin(), current.end(), other.begin(),
                          other.end(), std::back_inserter(only_current));
      std::set_difference(other.begin(), other.end(), current.begin(),
                          current.end(), std::back_inserter(only_other));
      const int a = only_current.front();
      int b = -1;
      for (int cand : only_other) {
        if (padded.part_of(cand) == padded.part_of(a)) {
          b = cand;
          break;
        }
      }
      // Equal slot counts per part guarantee a partner exists.
      if (b < 0) throw SolverError("swap_round: no exchange partner found");
      const double keep_current = current_weight / (current_weight + other_weight);
      if (unif(rng) < keep_current) {
        std::replace(other.begin(), other.end(), b, a);
        std::sort(other.begin(), other.end());
      } else {
        std::replace(current.begin(), current.end(), a, b);
        std::sort(current.begin(), current.end());
      }
    }
    current_weight += other_weight;
  }
  return padded.real_items(current);
}

inline ItemSet swap_round(const FractionalSolution& solution,
                          const FeasibleFamily& family, Rng& rng) {
  return swap_round(solution.decomposition, family, rng);
}

/// Includes each item independently with probability x_e.
inline ItemSet independent_round(const FractionalPoint& x, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ItemSet s;
  for (int e = 0; e < x.size(); ++e) {
    if (unif(rng) < x[e]) s.push_back(e);
  }
  return s;
}

/// Independent rounding, then drops the item with the smallest average
/// marginal over objectives (ties: the higher id) until feasible.
inline ItemSet independent_round_repair(const FractionalPoint& x,
                                        const FeasibleFamily& family,
                                        const InducedEvaluator& eval, Rng& rng) {
  ItemSet s = independent_round(x, rng);
  while (!family.contains(s)) {
    const Mask m = to_mask(s);
    std::vector<double> base(eval.objective_count());
    for (int i = 0; i < eval.objective_count(); ++i) base[i] = eval.value(i, m).value;
    int drop = -1;
    double smallest = std::numeric_limits<double>::infinity();
    for (int e : s) {
      const Mask without = m & ~(Mask{1} << e);
      double avg = 0.0;
      for (int i = 0; i < eval.objective_count(); ++i) {
        avg += base[i] - eval.value(i, without).value;
      }
      avg /= eval.objective_count();
      if (avg <= smallest) {
        smallest = avg;
        drop = e;
      }
    }
    s.erase(std::find(s.begin(), s.end(), drop));
  }
  return s;
}

enum class RoundingMethod { kSwap, kIndependentRepair };

inline const char* to_string(RoundingMethod m) {
  return m == RoundingMethod::kSwap ? "swap" : "independent-repair";
}

struct RoundingOutcome {
  ItemSet set;
  RoundingMethod method = RoundingMethod::kSwap;
  int repetitions_used = 0;
  /// min_i U(set, f_i).
  Estimate value;
  /// min_i F_i(x) of the fractional solution.
  double fractional_value = 0.0;
  /// value / fractional_value (1 when the fractional value is 0).
  double zeta_hat = 1.0;
  /// Every drawn set, in draw order.
  std::vector<ItemSet> draws;
  /// Uniform mixture over the draws.
  MixedSetPolicy draws_policy;
};

/// Draws R rounded sets and keeps the one with the best robust value.
inline RoundingOutcome best_of_rounds(const FractionalSolution& solution,
                                      const FeasibleFamily& family,
                                      const InducedEvaluator& eval, int repetitions,
                                      Rng& rng) {
  if (repetitions < 1) throw SolverError("best_of_rounds: repetitions must be >= 1");
  RoundingOutcome out;
  out.method = family.is_matroid() ? RoundingMethod::kSwap
                                   : RoundingMethod::kIndependentRepair;
  out.fractional_value = solution.min_value();
  out.value.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < repetitions; ++r) {
    ItemSet s = out.method == RoundingMethod::kSwap
                    ? swap_round(solution, family, rng)
                    : independent_round_repair(solution.x, family, eval, rng);
    const Mask m = to_mask(s);
    Estimate worst{std::numeric_limits<double>::infinity(), 0.0, true};
    for (int i = 0; i < eval.objective_count(); ++i) {
      const Estimate e = eval.value(i, m);
      if (e.value < worst.value) worst = e;
    }
    if (worst.value > out.value.value) {
      out.value = worst;
      out.set = s;
    }
    out.draws_policy.add(s, 1.0 / repetitions);
    out.draws.push_back(std::move(s));
  }
  out.repetitions_used = repetitions;
  out.zeta_hat =
      out.fractional_value > 0.0 ? out.value.value / out.fractional_value : 1.0;
  return out;
}

}  // namespace aro

#endif  // ARO_ROUNDING_HPP

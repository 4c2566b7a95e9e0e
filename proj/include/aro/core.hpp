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
//  Ground-set model: stochastic items, their state priors, realizations,
//  and downward-closed feasibility families.
//

#ifndef ARO_CORE_HPP
#define ARO_CORE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aro/errors.hpp"

namespace aro {

/// Sorted, duplicate-free list of item ids.
using ItemSet = std::vector<int>;
/// Bit i set iff item i is in the set.
using Mask = std::uint64_t;
using Rng = std::mt19937_64;

inline constexpr int kMaxItems = 64;
inline constexpr double kProbTolerance = 1e-9;
inline constexpr std::size_t kDefaultRealizationCap = 1'000'000;

inline Mask to_mask(std::span<const int> items) {
  Mask m = 0;
  for (int e : items) m |= Mask{1} << e;
  return m;
}

inline ItemSet from_mask(Mask m) {
  ItemSet out;
  while (m != 0) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

inline int popcount(Mask m) { return std::popcount(m); }

inline Mask full_mask(int n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

inline ItemSet normalized(ItemSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

/// An item together with the state it was observed in.
struct Observation {
  int item = 0;
  int state = 0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Item {
  int id = 0;
  std::string label;
};

struct StatePrior {
  int item = 0;
  std::vector<double> probs;
};

struct Realization {
  std::vector<int> states;
  friend bool operator==(const Realization&, const Realization&) = default;
};

/// Items and their independent state priors.
class GroundSet {
 public:
  GroundSet() = default;

  GroundSet(std::vector<Item> items, std::vector<StatePrior> priors)
      : items_(std::move(items)), priors_(std::move(priors)) {
    validate();
  }

  /// n items with the given per-item state distributions, ids 0..n-1.
  static GroundSet from_probs(const std::vector<std::vector<double>>& probs) {
    std::vector<Item> items;
    std::vector<StatePrior> priors;
    for (int e = 0; e < static_cast<int>(probs.size()); ++e) {
      items.push_back({e, {}});
      priors.push_back({e, probs[e]});
    }
    return GroundSet(std::move(items), std::move(priors));
  }

  /// n items with a single certain state each.
  static GroundSet deterministic(int n) {
    return from_probs(std::vector<std::vector<double>>(n, {1.0}));
  }

  int size() const { return static_cast<int>(items_.size()); }
  const std::vector<Item>& items() const { return items_; }
  const std::vector<StatePrior>& priors() const { return priors_; }
  int state_count(int e) const {
    return static_cast<int>(priors_[e].probs.size());
  }
  double prob(int e, int s) const { return priors_[e].probs[s]; }

  /// Number of joint realizations of the given items, saturating at cap+1.
  std::size_t realization_count(std::span<const int> items,
                                std::size_t cap) const {
    std::size_t count = 1;
    for (int e : items) {
      count *= static_cast<std::size_t>(state_count(e));
      if (count > cap) return cap + 1;
    }
    return count;
  }

  std::size_t realization_count(std::size_t cap) const {
    ItemSet all(size());
    std::iota(all.begin(), all.end(), 0);
    return realization_count(all, cap);
  }

 private:
  void validate() {
    const int n = static_cast<int>(items_.size());
    if (n == 0) throw InstanceError("items: ground set is empty");
    if (n > kMaxItems) {
      throw InstanceError("items: at most " + std::to_string(kMaxItems) +
                          " items are supported");
    }
    for (int i = 0; i < n; ++i) {
      if (items_[i].id != i) {
        throw InstanceError("items[" + std::to_string(i) +
                            "].id: ids must be contiguous from 0");
      }
    }
    if (static_cast<int>(priors_.size()) != n) {
      throw InstanceError("priors: expected one prior per item");
    }
    std::sort(priors_.begin(), priors_.end(),
              [](const StatePrior& a, const StatePrior& b) {
                return a.item < b.item;
              });
    for (int i = 0; i < n; ++i) {
      const std::string where = "priors[" + std::to_string(i) + "]";
      if (priors_[i].item != i) {
        throw InstanceError(where + ": priors must cover every item once");
      }
      const auto& p = priors_[i].probs;
      if (p.empty()) throw InstanceError(where + ": needs at least one state");
      double total = 0.0;
      for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw InstanceError(where + ": probabilities must be nonnegative");
        }
        total += v;
      }
      if (std::abs(total - 1.0) > kProbTolerance) {
        throw InstanceError(where + ": probabilities must sum to 1");
      }
    }
  }

  std::vector<Item> items_;
  std::vector<StatePrior> priors_;
};

inline int sample_state(const GroundSet& ground, int e, Rng& rng) {
  const auto& p = ground.priors()[e].probs;
  if (p.size() == 1) return 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < p.size(); ++s) {
    acc += p[s];
    if (u < acc) return static_cast<int>(s);
  }
  // Skip trailing zero-probability states.
  int last = static_cast<int>(p.size()) - 1;
  while (last > 0 && p[last] == 0.0) --last;
  return last;
}

/// Draws every item's state independently from its prior.
inline Realization sample_realization(const GroundSet& ground, Rng& rng) {
  Realization r;
  r.states.resize(ground.size());
  for (int e = 0; e < ground.size(); ++e) r.states[e] = sample_state(ground, e, rng);
  return r;
}

/// Visits every joint state assignment of `items` (in lexicographic order,
/// last item fastest) with its product probability. Zero-probability
/// assignments are skipped.
inline void for_each_realization(
    const GroundSet& ground, std::span<const int> items, std::size_t cap,
    const std::function<void(std::span<const int>, double)>& visit) {
  if (ground.realization_count(items, cap) > cap) {
    throw CapExceeded("too large to enumerate: realization count exceeds " +
                      std::to_string(cap));
  }
  const std::size_t k = items.size();
  std::vector<int> states(k, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t j = 0; j < k; ++j) p *= ground.prob(items[j], states[j]);
    if (p > 0.0) visit(states, p);
    std::size_t j = k;
    while (j > 0) {
      --j;
      if (++states[j] < ground.state_count(items[j])) break;
      states[j] = 0;
      if (j == 0) return;
    }
    if (k == 0) return;
  }
}

inline std::vector<std::pair<Realization, double>> enumerate_realizations(
    const GroundSet& ground, std::size_t cap = kDefaultRealizationCap) {
  ItemSet all(ground.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::pair<Realization, double>> out;
  for_each_realization(ground, all, cap,
                       [&](std::span<const int> states, double p) {
                         out.push_back({Realization{{states.begin(), states.end()}}, p});
                       });
  return out;
}

/// Downward-closed family of feasible item sets.
///
/// Uniform and partition matroids are stored as parts with capacities
/// (a uniform matroid is a single part). Explicit families store every
/// feasible set and must be closed under taking subsets.
class FeasibleFamily {
 public:
  enum class Kind { kUniform, kPartition, kExplicit };

  FeasibleFamily() = default;

  static FeasibleFamily uniform(int n, int k) {
    if (k < 0) throw InstanceError("constraint.k: must be nonnegative");
    FeasibleFamily f;
    f.kind_ = Kind::kUniform;
    f.n_ = n;
    f.part_of_.assign(n, 0);
    f.parts_ = {ItemSet(n)};
    std::iota(f.parts_[0].begin(), f.parts_[0].end(), 0);
    f.capacities_ = {k};
    return f;
  }

  static FeasibleFamily partition(int n, std::vector<ItemSet> parts,
                                  std::vector<int> capacities) {
    if (parts.size() != capacities.size()) {
      throw InstanceError(
          "constraint.capacities: need one capacity per part");
    }
    FeasibleFamily f;
    f.kind_ = Kind::kPartition;
    f.n_ = n;
    f.part_of_.assign(n, -1);
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (capacities[j] < 0) {
        throw InstanceError("constraint.capacities: must be nonnegative");
      }
      parts[j] = normalized(std::move(parts[j]));
      for (int e : parts[j]) {
        if (e < 0 || e >= n || f.part_of_[e] != -1) {
          throw InstanceError(
              "constraint.parts: every item must appear in exactly one part");
        }
        f.part_of_[e] = static_cast<int>(j);
      }
    }
    if (std::find(f.part_of_.begin(), f.part_of_.end(), -1) !=
        f.part_of_.end()) {
      throw InstanceError(
          "constraint.parts: every item must appear in exactly one part");
    }
    f.parts_ = std::move(parts);
    f.capacities_ = std::move(capacities);
    return f;
  }

  static constexpr int kMaxExplicitItems = 20;

  /// The empty set is added if missing. Throws unless the list is
  /// downward-closed.
  static FeasibleFamily explicit_sets(int n, const std::vector<ItemSet>& sets) {
    if (n > kMaxExplicitItems) {
      throw InstanceError("constraint.sets: explicit families support at most " +
                          std::to_string(kMaxExplicitItems) + " items");
    }
    FeasibleFamily f;
    f.kind_ = Kind::kExplicit;
    f.n_ = n;
    std::vector<Mask> masks{0};
    for (const auto& s : sets) {
      for (int e : s) {
        if (e < 0 || e >= n) {
          throw InstanceError("constraint.sets: item id out of range");
        }
      }
      masks.push_back(to_mask(s));
    }
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    for (Mask m : masks) {
      // Removing one element at a time suffices by induction.
      for (Mask rest = m; rest != 0; rest &= rest - 1) {
        const Mask sub = m & ~(rest & -rest);
        if (!std::binary_search(masks.begin(), masks.end(), sub)) {
          throw InstanceError(
              "constraint.sets: family is not downward-closed (a subset of " +
              set_string(from_mask(m)) + " is missing)");
        }
      }
    }
    f.sets_ = std::move(masks);
    return f;
  }

  /// Smallest downward-closed family containing the given sets.
  static FeasibleFamily downward_closure(int n, const std::vector<ItemSet>& sets) {
    std::vector<ItemSet> all;
    for (const auto& s : sets) {
      const Mask m = to_mask(s);
      for (Mask sub = m;; sub = (sub - 1) & m) {
        all.push_back(from_mask(sub));
        if (sub == 0) break;
      }
    }
    return explicit_sets(n, all);
  }

  Kind kind() const { return kind_; }
  int size() const { return n_; }
  bool is_matroid() const { return kind_ != Kind::kExplicit; }

  const std::vector<ItemSet>& parts() const { return parts_; }
  const std::vector<int>& capacities() const { return capacities_; }
  int part_of(int e) const { return part_of_[e]; }
  /// Explicit kind only: all feasible sets as masks, ascending.
  const std::vector<Mask>& explicit_masks() const { return sets_; }

  bool contains_mask(Mask m) const {
    if (n_ < 64 && (m >> n_) != 0) return false;
    if (kind_ == Kind::kExplicit) {
      return std::binary_search(sets_.begin(), sets_.end(), m);
    }
    std::vector<int> used(capacities_.size(), 0);
    for (Mask r = m; r != 0; r &= r - 1) {
      const int j = part_of_[std::countr_zero(r)];
      if (++used[j] > capacities_[j]) return false;
    }
    return true;
  }

  bool contains(std::span<const int> s) const {
    for (int e : s) {
      if (e < 0 || e >= n_) return false;
    }
    const Mask m = to_mask(s);
    if (popcount(m) != static_cast<int>(s.size())) return false;
    return contains_mask(m);
  }

  /// Largest feasible set size.
  int rank() const {
    if (kind_ == Kind::kExplicit) {
      int r = 0;
      for (Mask m : sets_) r = std::max(r, popcount(m));
      return r;
    }
    int r = 0;
    for (std::size_t j = 0; j < parts_.size(); ++j) {
      r += std::min<int>(capacities_[j], static_cast<int>(parts_[j].size()));
    }
    return r;
  }

  /// All feasible sets as masks, ascending.
  std::vector<Mask> enumerate(std::size_t cap = std::size_t{1} << 20) const {
    if (kind_ == Kind::kExplicit) return sets_;
    if (n_ > 30) {
      throw CapExceeded("too large to enumerate: ground set has " +
                        std::to_string(n_) + " items");
    }
    std::vector<Mask> out;
    const Mask limit = Mask{1} << n_;
    for (Mask m = 0; m < limit; ++m) {
      if (contains_mask(m)) {
        out.push_back(m);
        if (out.size() > cap) {
          throw CapExceeded("too large to enumerate: more than " +
                            std::to_string(cap) + " feasible sets");
        }
      }
    }
    return out;
  }

  static std::string set_string(const ItemSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s[i]);
    }
    return out + "}";
  }

 private:
  Kind kind_ = Kind::kUniform;
  int n_ = 0;
  std::vector<int> part_of_;
  std::vector<ItemSet> parts_;
  std::vector<int> capacities_;
  std::vector<Mask> sets_;
};

inline bool is_feasible(const FeasibleFamily& family, std::span<const int> s) {
  return family.contains(s);
}

/// Linear optimization over the family. Matroids use the greedy rule
/// (heaviest first, ties to the lower id, nonpositive weights skipped);
/// explicit families are scanned.
inline std::pair<ItemSet, double> max_weight_feasible(
    const FeasibleFamily& family, std::span<const double> weights) {
  const int n = family.size();
  if (static_cast<int>(weights.size()) != n) {
    throw SolverError("max_weight_feasible: weight vector has wrong length");
  }
  if (family.is_matroid()) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return weights[a] > weights[b]; });
    std::vector<int> used(family.capacities().size(), 0);
    ItemSet chosen;
    double total = 0.0;
    for (int e : order) {
      if (!(weights[e] > 0.0)) break;
      const int j = family.part_of(e);
      if (used[j] < family.capacities()[j]) {
        ++used[j];
        chosen.push_back(e);
        total += weights[e];
      }
    }
    std::sort(chosen.begin(), chosen.end());
    return {chosen, total};
  }
  ItemSet best;
  double best_value = 0.0;
  for (Mask m : family.explicit_masks()) {
    double v = 0.0;
    for (Mask r = m; r != 0; r &= r - 1) v += weights[std::countr_zero(r)];
    const ItemSet s = from_mask(m);
    if (v > best_value || (v == best_value && s < best)) {
      best_value = v;
      best = s;
    }
  }
  return {best, best_value};
}

}  // namespace aro

#endif  // ARO_CORE_HPP

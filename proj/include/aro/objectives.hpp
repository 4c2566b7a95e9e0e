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
//  Monotone reward functions on (item, state) observations, nearly
//  submodular pairs, and the item-level expected value U(S, f).
//

#ifndef ARO_OBJECTIVES_HPP
#define ARO_OBJECTIVES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "aro/core.hpp"

namespace aro {

/// f(X) = sum of weights[item][state] over X.
struct ModularReward {
  std::vector<std::vector<double>> weights;
};

/// Each observation covers a set of weighted elements; f(X) is the weight of
/// the union of the covered elements.
struct CoverageReward {
  std::vector<double> element_weights;
  /// covers[item][state] lists element ids.
  std::vector<std::vector<std::vector<int>>> covers;
};

/// f(X) = min(cap, sum of weights over X).
struct SaturatingReward {
  std::vector<std::vector<double>> weights;
  double cap = 0.0;
};

class RewardFunction;

/// f(X) = base(X) * c(|X|) with c(k) = eps * (1/eps^2)^(min(k, L) / L).
/// The multiplier lies in [eps, 1/eps], so (f, base, eps) is a valid
/// nearly submodular pair whenever base is submodular.
struct PerturbedReward {
  std::shared_ptr<const RewardFunction> base;
  double epsilon = 1.0;
  int levels = 1;
};

/// Arbitrary callable, for tests and experiments. Not serializable.
struct CustomReward {
  std::function<double(std::span<const Observation>)> fn;
  std::string name = "custom";
};

class RewardFunction {
 public:
  using Variant = std::variant<ModularReward, CoverageReward, SaturatingReward,
                               PerturbedReward, CustomReward>;

  RewardFunction() : impl_(ModularReward{}) {}
  RewardFunction(ModularReward r) : impl_(std::move(r)) {}
  RewardFunction(CoverageReward r) : impl_(std::move(r)) {}
  RewardFunction(SaturatingReward r) : impl_(std::move(r)) {}
  RewardFunction(PerturbedReward r) : impl_(std::move(r)) {}
  RewardFunction(CustomReward r) : impl_(std::move(r)) {}

  static RewardFunction perturbed(RewardFunction base, double epsilon,
                                  int levels) {
    return PerturbedReward{
        std::make_shared<const RewardFunction>(std::move(base)), epsilon,
        levels};
  }

  const Variant& variant() const { return impl_; }

  std::string kind() const {
    return std::visit(
        [](const auto& r) -> std::string {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, ModularReward>) return "modular";
          if constexpr (std::is_same_v<T, CoverageReward>) return "weighted-coverage";
          if constexpr (std::is_same_v<T, SaturatingReward>) return "saturating-sum";
          if constexpr (std::is_same_v<T, PerturbedReward>) return "perturbed";
          if constexpr (std::is_same_v<T, CustomReward>) return r.name;
        },
        impl_);
  }

  /// Throws InstanceError when X holds the same item twice.
  double operator()(std::span<const Observation> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        if (x[i].item == x[j].item) {
          throw InstanceError("reward: observation set lists item " +
                              std::to_string(x[i].item) + " twice");
        }
      }
    }
    return value(x);
  }

  /// Evaluation without the duplicate check; callers guarantee at most one
  /// observation per item.
  double value(std::span<const Observation> x) const {
    return std::visit([&](const auto& r) { return eval_impl(r, x); }, impl_);
  }

  /// Checks dimensions and sign conventions against a ground set. `where`
  /// prefixes error messages.
  void validate(const GroundSet& ground, const std::string& where) const {
    const auto check_table = [&](const std::vector<std::vector<double>>& w,
                                 const std::string& field) {
      if (static_cast<int>(w.size()) != ground.size()) {
        throw InstanceError(where + "." + field + ": expected one row per item");
      }
      for (int e = 0; e < ground.size(); ++e) {
        if (static_cast<int>(w[e].size()) != ground.state_count(e)) {
          throw InstanceError(where + "." + field + "[" + std::to_string(e) +
                              "]: expected one entry per state");
        }
        for (double v : w[e]) {
          if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InstanceError(where + "." + field +
                                ": weights must be finite and nonnegative");
          }
        }
      }
    };
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, ModularReward>) {
            check_table(r.weights, "weights");
          } else if constexpr (std::is_same_v<T, SaturatingReward>) {
            check_table(r.weights, "weights");
            if (!(r.cap >= 0.0)) {
              throw InstanceError(where + ".cap: must be nonnegative");
            }
          } else if constexpr (std::is_same_v<T, CoverageReward>) {
            for (double v : r.element_weights) {
              if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InstanceError(where +
                                    ".element_weights: must be nonnegative");
              }
            }
            if (static_cast<int>(r.covers.size()) != ground.size()) {
              throw InstanceError(where + ".covers: expected one row per item");
            }
            const int elements = static_cast<int>(r.element_weights.size());
            for (int e = 0; e < ground.size(); ++e) {
              if (static_cast<int>(r.covers[e].size()) != ground.state_count(e)) {
                throw InstanceError(where + ".covers[" + std::to_string(e) +
                                    "]: expected one cover list per state");
              }
              for (const auto& c : r.covers[e]) {
                for (int u : c) {
                  if (u < 0 || u >= elements) {
                    throw InstanceError(where + ".covers: element id out of range");
                  }
                }
              }
            }
          } else if constexpr (std::is_same_v<T, PerturbedReward>) {
            if (!r.base) throw InstanceError(where + ".base: missing");
            if (!(r.epsilon > 0.0 && r.epsilon <= 1.0)) {
              throw InstanceError(where + ".epsilon: must lie in (0, 1]");
            }
            if (r.levels < 1) throw InstanceError(where + ".levels: must be >= 1");
            r.base->validate(ground, where + ".base");
          }
        },
        impl_);
  }

 private:
  static double eval_impl(const ModularReward& r,
                          std::span<const Observation> x) {
    double total = 0.0;
    for (const auto& o : x) total += r.weights[o.item][o.state];
    return total;
  }

  static double eval_impl(const SaturatingReward& r,
                          std::span<const Observation> x) {
    double total = 0.0;
    for (const auto& o : x) total += r.weights[o.item][o.state];
    return std::min(r.cap, total);
  }

  static double eval_impl(const CoverageReward& r,
                          std::span<const Observation> x) {
    thread_local std::vector<unsigned> seen;
    thread_local unsigned stamp = 0;
    if (seen.size() < r.element_weights.size()) {
      seen.assign(r.element_weights.size(), 0);
      stamp = 0;
    }
    if (++stamp == 0) {
      std::fill(seen.begin(), seen.end(), 0);
      stamp = 1;
    }
    double total = 0.0;
    for (const auto& o : x) {
      for (int u : r.covers[o.item][o.state]) {
        if (seen[u] != stamp) {
          seen[u] = stamp;
          total += r.element_weights[u];
        }
      }
    }
    return total;
  }

  static double eval_impl(const PerturbedReward& r,
                          std::span<const Observation> x) {
    return r.base->value(x) * perturbation_multiplier(
                                  r.epsilon, r.levels,
                                  static_cast<int>(x.size()));
  }

  static double eval_impl(const CustomReward& r,
                          std::span<const Observation> x) {
    return r.fn(x);
  }

 public:
  static double perturbation_multiplier(double epsilon, int levels, int size) {
    const double frac =
        static_cast<double>(std::min(size, levels)) / static_cast<double>(levels);
    return epsilon * std::pow(1.0 / (epsilon * epsilon), frac);
  }

 private:
  Variant impl_;
};

/// A reward f, its submodular surrogate g, and eps with
/// eps * g <= f <= g / eps.
struct NearlySubmodularPair {
  RewardFunction f;
  RewardFunction g;
  double epsilon = 1.0;

  /// A submodular reward is its own surrogate with eps = 1.
  static NearlySubmodularPair submodular(RewardFunction f) {
    return {f, f, 1.0};
  }
};

using ObjectiveFamily = std::vector<NearlySubmodularPair>;

struct SandwichReport {
  bool passed = true;
  /// False when the universe was too large and subsets were sampled.
  bool exhaustive = true;
  std::size_t checked = 0;
  /// Largest violation of either inequality (<= 0 when passed).
  double worst_violation = -std::numeric_limits<double>::infinity();
  std::vector<Observation> worst_subset;
};

namespace detail {

/// Visits every observation set with at most one state per item.
inline void for_each_partial_realization(
    const GroundSet& ground,
    const std::function<void(std::span<const Observation>)>& visit) {
  const int n = ground.size();
  // choice[e] == 0 means absent, otherwise state choice[e]-1.
  std::vector<int> choice(n, 0);
  std::vector<Observation> x;
  while (true) {
    x.clear();
    for (int e = 0; e < n; ++e) {
      if (choice[e] > 0) x.push_back({e, choice[e] - 1});
    }
    visit(x);
    int e = n - 1;
    while (e >= 0) {
      if (++choice[e] <= ground.state_count(e)) break;
      choice[e] = 0;
      --e;
    }
    if (e < 0) return;
  }
}

inline std::size_t partial_realization_count(const GroundSet& ground,
                                             std::size_t cap) {
  std::size_t count = 1;
  for (int e = 0; e < ground.size(); ++e) {
    count *= static_cast<std::size_t>(ground.state_count(e) + 1);
    if (count > cap) return cap + 1;
  }
  return count;
}

}  // namespace detail

/// Verifies eps * g <= f <= g / eps on every observation set (one state per
/// item). Falls back to `samples` random sets beyond `cap` and flags the
/// report as non-exhaustive.
inline SandwichReport check_sandwich(const NearlySubmodularPair& pair,
                                     const GroundSet& ground,
                                     std::size_t cap = std::size_t{1} << 20,
                                     std::size_t samples = 100'000,
                                     std::uint64_t seed = 1) {
  SandwichReport report;
  const double eps = pair.epsilon;
  if (!(eps > 0.0 && eps <= 1.0)) {
    report.passed = false;
    return report;
  }
  const auto check = [&](std::span<const Observation> x) {
    const double f = pair.f.value(x);
    const double g = pair.g.value(x);
    const double tol = 1e-12 * std::max({1.0, std::abs(f), std::abs(g)});
    const double violation = std::max(eps * g - f, f - g / eps);
    ++report.checked;
    if (violation > report.worst_violation) {
      report.worst_violation = violation;
      report.worst_subset.assign(x.begin(), x.end());
    }
    if (violation > tol) report.passed = false;
  };
  if (detail::partial_realization_count(ground, cap) <= cap) {
    detail::for_each_partial_realization(ground, check);
    return report;
  }
  report.exhaustive = false;
  Rng rng(seed);
  std::vector<Observation> x;
  for (std::size_t t = 0; t < samples; ++t) {
    x.clear();
    for (int e = 0; e < ground.size(); ++e) {
      std::uniform_int_distribution<int> pick(0, ground.state_count(e));
      const int c = pick(rng);
      if (c > 0) x.push_back({e, c - 1});
    }
    check(x);
  }
  return report;
}

/// Exhaustive diminishing-returns check over observation sets drawn from
/// `universe` (at most one state per item, at most 16 observations).
///
/// Up to 12 observations every (S1 subset of S2, v outside S2) triple is
/// tested. Larger universes use the equivalent local form
/// f(S+u) + f(S+v) >= f(S+u+v) + f(S).
template <class SetFn>
bool is_submodular_bruteforce(SetFn&& f, std::span<const Observation> universe,
                              double tol = 1e-9) {
  const int k = static_cast<int>(universe.size());
  if (k > 16) throw CapExceeded("is_submodular_bruteforce: universe above 16");
  const std::uint32_t limit = std::uint32_t{1} << k;
  // Observations sharing an item conflict.
  std::vector<std::uint32_t> conflict(k, 0);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (a != b && universe[a].item == universe[b].item) {
        conflict[a] |= std::uint32_t{1} << b;
      }
    }
  }
  std::vector<char> valid(limit, 1);
  std::vector<double> value(limit, 0.0);
  std::vector<Observation> x;
  for (std::uint32_t m = 0; m < limit; ++m) {
    for (int a = 0; a < k && valid[m]; ++a) {
      if ((m >> a & 1u) && (conflict[a] & m)) valid[m] = 0;
    }
    if (!valid[m]) continue;
    x.clear();
    for (int a = 0; a < k; ++a) {
      if (m >> a & 1u) x.push_back(universe[a]);
    }
    value[m] = f(std::span<const Observation>(x));
  }
  if (k <= 12) {
    for (std::uint32_t s2 = 0; s2 < limit; ++s2) {
      if (!valid[s2]) continue;
      for (int v = 0; v < k; ++v) {
        const std::uint32_t bit = std::uint32_t{1} << v;
        if ((s2 & bit) || !valid[s2 | bit]) continue;
        const double big = value[s2 | bit] - value[s2];
        for (std::uint32_t s1 = s2;; s1 = (s1 - 1) & s2) {
          if (value[s1 | bit] - value[s1] < big - tol) return false;
          if (s1 == 0) break;
        }
      }
    }
    return true;
  }
  for (std::uint32_t s = 0; s < limit; ++s) {
    if (!valid[s]) continue;
    for (int u = 0; u < k; ++u) {
      const std::uint32_t bu = std::uint32_t{1} << u;
      if (s & bu) continue;
      for (int v = u + 1; v < k; ++v) {
        const std::uint32_t bv = std::uint32_t{1} << v;
        if ((s & bv) || !valid[s | bu | bv]) continue;
        if (value[s | bu] + value[s | bv] <
            value[s | bu | bv] + value[s] - tol) {
          return false;
        }
      }
    }
  }
  return true;
}

inline bool is_submodular_bruteforce(const RewardFunction& f,
                                     std::span<const Observation> universe,
                                     double tol = 1e-9) {
  return is_submodular_bruteforce(
      [&](std::span<const Observation> x) { return f.value(x); }, universe,
      tol);
}

/// Every (item, state) observation of a ground set.
inline std::vector<Observation> observation_universe(const GroundSet& ground) {
  std::vector<Observation> out;
  for (int e = 0; e < ground.size(); ++e) {
    for (int s = 0; s < ground.state_count(e); ++s) out.push_back({e, s});
  }
  return out;
}

/// Value with its Monte Carlo standard error (0 and exact == true when the
/// expectation was enumerated).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

/// U(S, f): expected reward of picking S, integrating out the states of S.
inline double induced_value_exact(std::span<const int> s, const RewardFunction& f,
                                  const GroundSet& ground,
                                  std::size_t cap = kDefaultRealizationCap) {
  std::vector<Observation> x(s.size());
  double total = 0.0;
  for_each_realization(ground, s, cap, [&](std::span<const int> states, double p) {
    for (std::size_t j = 0; j < s.size(); ++j) x[j] = {s[j], states[j]};
    total += p * f.value(x);
  });
  return total;
}

/// Sample mean of f over `samples` independent state draws for S.
inline Estimate induced_value_mc(std::span<const int> s, const RewardFunction& f,
                                 const GroundSet& ground, std::size_t samples,
                                 Rng& rng) {
  if (samples == 0) throw SolverError("induced_value_mc: samples must be >= 1");
  std::vector<Observation> x(s.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      x[j] = {s[j], sample_state(ground, s[j], rng)};
    }
    const double v = f.value(x);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  double se = 0.0;
  if (samples > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  }
  return {mean, se, false};
}

struct EvaluatorOptions {
  std::size_t realization_cap = kDefaultRealizationCap;
  std::size_t mc_samples = 2000;
  std::uint64_t seed = 0x5eed;
};

/// Cached U(S, f_i) for every objective of a family. Exact when the states
/// of S can be enumerated within the cap, otherwise Monte Carlo with a
/// stream seeded from (seed, S, i) so repeated queries agree.
///
/// Not thread-safe; give each worker its own evaluator.
class InducedEvaluator {
 public:
  InducedEvaluator(const GroundSet& ground, const ObjectiveFamily& objectives,
                   EvaluatorOptions options = {})
      : ground_(&ground),
        objectives_(&objectives),
        options_(options),
        cache_(objectives.size()) {}

  int objective_count() const { return static_cast<int>(objectives_->size()); }
  const GroundSet& ground() const { return *ground_; }
  const EvaluatorOptions& options() const { return options_; }

  Estimate value(int i, Mask s) const {
    auto& cache = cache_[i];
    if (auto it = cache.find(s); it != cache.end()) return it->second;
    const ItemSet items = from_mask(s);
    Estimate est;
    const auto& f = (*objectives_)[i].f;
    if (ground_->realization_count(items, options_.realization_cap) <=
        options_.realization_cap) {
      est.value = induced_value_exact(items, f, *ground_, options_.realization_cap);
    } else {
      Rng rng(mix_seed(options_.seed, s, static_cast<std::uint64_t>(i)));
      est = induced_value_mc(items, f, *ground_, options_.mc_samples, rng);
    }
    cache.emplace(s, est);
    return est;
  }

  double value(int i, std::span<const int> s) const {
    return value(i, to_mask(s)).value;
  }

  /// min over objectives of U(S, f_i).
  double min_value(Mask s) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < objective_count(); ++i) best = std::min(best, value(i, s).value);
    return best;
  }

  /// sum_i weights[i] * U(S, f_i).
  double weighted_value(std::span<const double> weights, Mask s) const {
    double total = 0.0;
    for (int i = 0; i < objective_count(); ++i) {
      if (weights[i] != 0.0) total += weights[i] * value(i, s).value;
    }
    return total;
  }

  /// True if every value served so far was enumerated exactly.
  bool all_exact() const {
    for (const auto& c : cache_) {
      for (const auto& [m, est] : c) {
        if (!est.exact) return false;
      }
    }
    return true;
  }

  static std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
    // splitmix64 finalizer over the combined words.
    std::uint64_t z = seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b + 0x632be59bd9b4e019ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  const GroundSet* ground_;
  const ObjectiveFamily* objectives_;
  EvaluatorOptions options_;
  mutable std::vector<std::unordered_map<Mask, Estimate>> cache_;
};

}  // namespace aro

#endif  // ARO_OBJECTIVES_HPP

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
//  Seeded random instance families.
//
//    disjoint-singletons  m items, one certain state each, uniform(1),
//                         objective i rewards item i only
//    coverage             random weighted coverage objectives
//    modular              random modular objectives
//    perturbed            coverage surrogates times the size multiplier
//    theorem1             tiny adaptive instances: n <= 4, <= 2 states,
//                         m <= 3, eps in {0.5, 0.75, 1}; often with
//                         worthless failed-probe states
//    lemma2               submodular instances: n <= 6, m <= 3, uniform or
//                         partition matroid
//

#ifndef ARO_GENERATE_HPP
#define ARO_GENERATE_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "aro/core.hpp"
#include "aro/instance.hpp"
#include "aro/objectives.hpp"

namespace aro {

/// Zero or negative fields take the preset's default.
struct GenParams {
  int n = 0;
  int m = 0;
  double epsilon = 0.0;
  int states = 0;
  /// Cardinality limit for uniform constraints.
  int k = 0;
  int levels = 2;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "disjoint-singletons", "coverage", "modular", "perturbed", "theorem1", "lemma2"};
  return names;
}

namespace detail {

/// Draws are taken from the raw 64-bit stream so files are identical
/// across standard library implementations.
class GenRng {
 public:
  explicit GenRng(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  int range(int lo, int hi) { return lo + static_cast<int>(rng_() % (hi - lo + 1)); }
  /// Uniform in [lo, hi], rounded to two decimals.
  double round2(double lo, double hi) {
    return std::round((lo + (hi - lo) * unit()) * 100.0) / 100.0;
  }
  bool coin(double p) { return unit() < p; }

 private:
  Rng rng_;
};

inline GroundSet random_ground(GenRng& r, int n, int states) {
  std::vector<std::vector<double>> probs;
  for (int e = 0; e < n; ++e) {
    if (states <= 1) {
      probs.push_back({1.0});
      continue;
    }
    std::vector<double> w(states), p(states);
    double wsum = 0.0;
    for (double& v : w) wsum += (v = 0.1 + 0.9 * r.unit());
    double total = 0.0;
    for (int s = 0; s + 1 < states; ++s) {
      p[s] = std::round(w[s] / wsum * 100.0) / 100.0;
      total += p[s];
    }
    p[states - 1] = std::max(0.0, std::round((1.0 - total) * 100.0) / 100.0);
    probs.push_back(p);
  }
  return GroundSet::from_probs(probs);
}

/// With `probing`, state 0 of every item is a failed probe worth nothing.
inline RewardFunction random_coverage(GenRng& r, const GroundSet& g,
                                      bool probing = false) {
  CoverageReward c;
  const int elements = 2 * g.size() + 2;
  for (int u = 0; u < elements; ++u) c.element_weights.push_back(r.round2(0.5, 2.0));
  c.covers.resize(g.size());
  for (int e = 0; e < g.size(); ++e) {
    for (int s = 0; s < g.state_count(e); ++s) {
      std::vector<int> cover;
      for (int u = 0; u < elements; ++u) {
        if (r.coin(0.3)) cover.push_back(u);
      }
      if (probing && s == 0 && g.state_count(e) > 1) cover.clear();
      c.covers[e].push_back(cover);
    }
  }
  return c;
}

inline RewardFunction random_modular(GenRng& r, const GroundSet& g,
                                     bool probing = false) {
  ModularReward w;
  w.weights.resize(g.size());
  for (int e = 0; e < g.size(); ++e) {
    for (int s = 0; s < g.state_count(e); ++s) {
      const double v = r.round2(0.0, 3.0);
      w.weights[e].push_back(probing && s == 0 && g.state_count(e) > 1 ? 0.0 : v);
    }
  }
  return w;
}

inline NearlySubmodularPair make_pair(RewardFunction g, double eps, int levels) {
  if (eps >= 1.0) return NearlySubmodularPair::submodular(std::move(g));
  return {RewardFunction::perturbed(g, eps, levels), g, eps};
}

inline FeasibleFamily random_matroid(GenRng& r, int n, int max_rank) {
  if (n >= 2 && r.coin(0.5)) {
    // Two parts split at a random point.
    const int cut = r.range(1, n - 1);
    ItemSet a, b;
    for (int e = 0; e < n; ++e) (e < cut ? a : b).push_back(e);
    const int ca = r.range(1, std::min<int>(a.size(), std::max(1, max_rank - 1)));
    const int cb = r.range(1, std::min<int>(b.size(), std::max(1, max_rank - ca)));
    return FeasibleFamily::partition(n, {a, b}, {ca, cb});
  }
  return FeasibleFamily::uniform(n, r.range(1, std::min(n, max_rank)));
}

}  // namespace detail

/// Deterministic in (preset, params). Throws InstanceError on an unknown
/// preset name.
inline Instance generate_instance(const std::string& preset, const GenParams& p) {
  detail::GenRng r(p.seed);
  const auto pick = [](int v, int def) { return v > 0 ? v : def; };
  const std::string id = preset + "-" + std::to_string(p.seed);

  if (preset == "disjoint-singletons") {
    const int m = pick(p.m, 2);
    ObjectiveFamily objs;
    for (int i = 0; i < m; ++i) {
      ModularReward w;
      w.weights.assign(m, {0.0});
      w.weights[i][0] = 1.0;
      objs.push_back(NearlySubmodularPair::submodular(w));
    }
    GroundSet g = GroundSet::deterministic(m);
    return Instance(g, objs, FeasibleFamily::uniform(m, 1), "disjoint-singletons-" +
                                                                 std::to_string(m));
  }

  if (preset == "coverage" || preset == "modular" || preset == "perturbed") {
    const int n = pick(p.n, 6);
    const int m = pick(p.m, 3);
    const double eps =
        p.epsilon > 0.0 ? p.epsilon : (preset == "perturbed" ? 0.5 : 1.0);
    const GroundSet g = detail::random_ground(r, n, pick(p.states, 2));
    ObjectiveFamily objs;
    for (int i = 0; i < m; ++i) {
      RewardFunction base = preset == "modular" ? detail::random_modular(r, g)
                                                : detail::random_coverage(r, g);
      objs.push_back(detail::make_pair(std::move(base), eps, p.levels));
    }
    return Instance(g, objs, FeasibleFamily::uniform(n, pick(p.k, std::max(1, n / 2))),
                    id);
  }

  if (preset == "theorem1") {
    static constexpr double kEps[] = {0.5, 0.75, 1.0};
    const int n = pick(p.n, r.range(1, 4));
    const int m = pick(p.m, r.range(1, 3));
    const double eps = p.epsilon > 0.0 ? p.epsilon : kEps[r.range(0, 2)];
    const GroundSet g = detail::random_ground(r, n, pick(p.states, r.range(1, 2)));
    const bool probing = r.coin(0.6);
    ObjectiveFamily objs;
    for (int i = 0; i < m; ++i) {
      RewardFunction base = r.coin(0.7) ? detail::random_coverage(r, g, probing)
                                        : detail::random_modular(r, g, probing);
      objs.push_back(detail::make_pair(std::move(base), eps, p.levels));
    }
    return Instance(g, objs, detail::random_matroid(r, n, pick(p.k, 3)), id);
  }

  if (preset == "lemma2") {
    const int n = pick(p.n, r.range(2, 6));
    const int m = pick(p.m, r.range(1, 3));
    const GroundSet g = detail::random_ground(r, n, pick(p.states, r.range(1, 2)));
    ObjectiveFamily objs;
    for (int i = 0; i < m; ++i) {
      RewardFunction base =
          r.coin(0.7) ? detail::random_coverage(r, g) : detail::random_modular(r, g);
      objs.push_back(NearlySubmodularPair::submodular(std::move(base)));
    }
    return Instance(g, objs, detail::random_matroid(r, n, pick(p.k, 3)), id);
  }

  throw InstanceError("preset: unknown preset '" + preset + "'");
}

}  // namespace aro

#endif  // ARO_GENERATE_HPP

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
//  Robust continuous greedy over the polytope of a feasible family.
//
//  For a target gamma, each of T steps solves
//
//      max_{v in P(I)}  min_i ( v . grad F_i(x) - (gamma - F_i(x)) )
//
//  and moves x <- x + v / T. If gamma is attainable by some randomized
//  non-adaptive policy the optimum is nonnegative at every x, so a negative
//  slack certifies that gamma is out of reach. After T steps every
//  objective satisfies F_i(x) >= (1 - 1/e) gamma up to discretization. A
//  binary search on gamma finds the largest attainable target.
//

#ifndef ARO_CONTINUOUS_GREEDY_HPP
#define ARO_CONTINUOUS_GREEDY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aro/core.hpp"
#include "aro/greedy.hpp"
#include "aro/instance.hpp"
#include "aro/lp.hpp"
#include "aro/mixed_policy.hpp"
#include "aro/multilinear.hpp"
#include "aro/objectives.hpp"

namespace aro {

/// Writes a point of a uniform or partition matroid polytope as a convex
/// combination of independent sets (weights sum to one, the empty set
/// included). Within each part, items are laid end to end on a line with
/// lengths x_e; a uniform offset u in [0, 1) selects the item covering each
/// of u, u + 1, u + 2, ... . Every offset picks at most ceil(sum) <=
/// capacity items per part and item e is picked for a set of offsets of
/// measure x_e, so the pieces between consecutive breakpoints form the
/// decomposition.
inline std::vector<WeightedSet> decompose_matroid_point(
    const FeasibleFamily& family, std::span<const double> x) {
  if (!family.is_matroid()) {
    throw SolverError("decompose_matroid_point: family is not a matroid");
  }
  // Per part: item ids with positive length and their cumulative end points.
  std::vector<std::vector<int>> ids(family.parts().size());
  std::vector<std::vector<double>> ends(family.parts().size());
  std::vector<double> breaks{0.0, 1.0};
  for (std::size_t j = 0; j < family.parts().size(); ++j) {
    const auto& part = family.parts()[j];
    double total = 0.0;
    for (int e : part) total += std::clamp(x[e], 0.0, 1.0);
    const double cap = family.capacities()[j];
    const double scale = total > cap ? cap / total : 1.0;
    double pos = 0.0;
    for (int e : part) {
      const double len = std::min(1.0, std::clamp(x[e], 0.0, 1.0) * scale);
      if (len <= 0.0) continue;
      pos = std::min(cap, pos + len);
      ids[j].push_back(e);
      ends[j].push_back(pos);
      breaks.push_back(pos - std::floor(pos));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<WeightedSet> out;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double width = breaks[b + 1] - breaks[b];
    if (width <= 0.0) continue;
    const double u = 0.5 * (breaks[b] + breaks[b + 1]);
    ItemSet s;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (ends[j].empty()) continue;
      // The point u + k lies in exactly one item's interval.
      for (double point = u; point < ends[j].back(); point += 1.0) {
        const auto it = std::upper_bound(ends[j].begin(), ends[j].end(), point);
        const int e = ids[j][it - ends[j].begin()];
        if (s.empty() || s.back() != e) s.push_back(e);
      }
    }
    std::sort(s.begin(), s.end());
    if (!out.empty() && out.back().set == s) {
      out.back().weight += width;
    } else {
      out.push_back({std::move(s), width});
    }
  }
  return out;
}

struct Direction {
  FractionalPoint v;
  /// min_i (v . grad_i - residual_i) at the returned v.
  double slack = 0.0;
  /// Convex decomposition of v into feasible sets (weights sum to one,
  /// empty set omitted).
  std::vector<WeightedSet> pieces;
};

/// Best ascent direction in P(I) for the robust target. Matroid families
/// use their explicit inequality description; explicit families optimize
/// over mixtures of their listed sets.
inline Direction direction(const std::vector<std::vector<double>>& grads,
                           std::span<const double> residuals,
                           const FeasibleFamily& family) {
  const int n = family.size();
  const int m = static_cast<int>(grads.size());
  if (m == 0 || static_cast<int>(residuals.size()) != m) {
    throw SolverError("direction: need one residual per gradient");
  }
  LinearProgram lp;
  Direction out;
  if (family.is_matroid()) {
    for (int e = 0; e < n; ++e) lp.add_variable(0.0, 0.0, 1.0);
    const int t = lp.add_variable(1.0, -kInf, kInf);
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(n + 1, 0.0);
      for (int e = 0; e < n; ++e) row[e] = grads[i][e];
      row[t] = -1.0;
      lp.add_constraint(std::move(row), Relation::kGreaterEqual, residuals[i]);
    }
    for (std::size_t j = 0; j < family.parts().size(); ++j) {
      std::vector<double> row(n + 1, 0.0);
      for (int e : family.parts()[j]) row[e] = 1.0;
      lp.add_constraint(std::move(row), Relation::kLessEqual,
                        family.capacities()[j]);
    }
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::kOptimal) {
      throw SolverError(std::string("direction LP ") + to_string(r.status));
    }
    std::vector<double> v(r.x.begin(), r.x.begin() + n);
    for (auto& p : decompose_matroid_point(family, v)) {
      if (!p.set.empty()) out.pieces.push_back(std::move(p));
    }
  } else {
    std::vector<Mask> sets;
    for (Mask s : family.explicit_masks()) {
      if (s != 0) sets.push_back(s);
    }
    const int k = static_cast<int>(sets.size());
    for (int s = 0; s < k; ++s) lp.add_variable(0.0);
    const int t = lp.add_variable(1.0, -kInf, kInf);
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(k + 1, 0.0);
      for (int s = 0; s < k; ++s) {
        for (Mask r = sets[s]; r != 0; r &= r - 1) {
          row[s] += grads[i][std::countr_zero(r)];
        }
      }
      row[t] = -1.0;
      lp.add_constraint(std::move(row), Relation::kGreaterEqual, residuals[i]);
    }
    std::vector<double> ones(k + 1, 1.0);
    ones[t] = 0.0;
    lp.add_constraint(std::move(ones), Relation::kLessEqual, 1.0);
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::kOptimal) {
      throw SolverError(std::string("direction LP ") + to_string(r.status));
    }
    for (int s = 0; s < k; ++s) {
      if (r.x[s] > 1e-15) out.pieces.push_back({from_mask(sets[s]), r.x[s]});
    }
  }
  std::vector<double> v = reconstruct(n, out.pieces);
  for (double& c : v) c = std::clamp(c, 0.0, 1.0);
  out.v = FractionalPoint(std::move(v));
  out.slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    double dot = 0.0;
    for (int e = 0; e < n; ++e) dot += out.v[e] * grads[i][e];
    out.slack = std::min(out.slack, dot - residuals[i]);
  }
  return out;
}

struct GreedyConfig {
  int steps = 100;
  /// Relative width at which the binary search on gamma stops.
  double gamma_tolerance = 1e-3;
  std::size_t mc_samples = 2000;
  std::uint64_t seed = 0x5eed;
  bool exact_extension = false;
  /// Slack below -slack_tolerance certifies an unattainable gamma.
  double slack_tolerance = 1e-9;
  /// Success requires min_i F_i(x(T)) >= (1 - 1/e) gamma - value_tolerance.
  double value_tolerance = 1e-9;
  std::size_t extension_cap = kDefaultExtensionCap;
  std::size_t realization_cap = kDefaultRealizationCap;
};

struct FractionalSolution {
  FractionalPoint x;
  /// Feasible sets with weights summing to at most one; their weighted
  /// indicators sum to x. The empty set carries the remaining mass.
  std::vector<WeightedSet> decomposition;
  /// F_i(x) per objective, with standard errors in Monte Carlo mode.
  std::vector<Estimate> values;
  double gamma_used = 0.0;
  /// min_i F_i(x(t)) after each step, starting with t = 0.
  std::vector<double> trajectory;

  double min_value() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& e : values) v = std::min(v, e.value);
    return values.empty() ? 0.0 : v;
  }
};

struct Certificate {
  double gamma = 0.0;
  /// Step at which the direction slack turned negative, or -1 when the
  /// final value check failed.
  int step = -1;
  double slack = 0.0;
  std::string reason = "no feasible solution attains value gamma for all objectives";
};

using GammaOutcome = std::variant<FractionalSolution, Certificate>;

inline constexpr double kOneMinusInvE = 1.0 - 0.36787944117144233;

namespace detail {

struct ObjectiveState {
  std::vector<Estimate> values;
  std::vector<std::vector<double>> grads;
  /// Per-objective noise allowance for the direction slack.
  double slack_noise = 0.0;
};

inline ObjectiveState evaluate_objectives(const std::vector<ExtensionOracle>& oracles,
                                          const FractionalPoint& x, Rng& rng) {
  ObjectiveState st;
  for (const auto& o : oracles) {
    st.values.push_back(o.value(x, &rng));
    GradientEstimate g = o.gradient(x, &rng);
    double noise = st.values.back().std_error;
    for (double se : g.std_error) noise += se;
    st.slack_noise = std::max(st.slack_noise, 3.0 * noise);
    st.grads.push_back(std::move(g.grad));
  }
  return st;
}

inline double min_of(const std::vector<Estimate>& v) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& e : v) out = std::min(out, e.value);
  return out;
}

}  // namespace detail

/// Runs T steps toward the target gamma with prebuilt extension oracles.
inline GammaOutcome run_for_gamma(const Instance& instance,
                                  const std::vector<ExtensionOracle>& oracles,
                                  double gamma, const GreedyConfig& config,
                                  Rng& rng) {
  if (!(gamma >= 0.0)) throw SolverError("run_for_gamma: gamma must be >= 0");
  if (config.steps < 1) throw SolverError("run_for_gamma: steps must be >= 1");
  const int n = instance.n();
  FractionalSolution sol;
  sol.gamma_used = gamma;
  sol.x = FractionalPoint::zeros(n);
  auto st = detail::evaluate_objectives(oracles, sol.x, rng);
  sol.trajectory.push_back(detail::min_of(st.values));
  if (gamma == 0.0) {
    sol.values = st.values;
    return sol;
  }
  std::map<Mask, double> pieces;
  std::vector<double> x(n, 0.0);
  const double step = 1.0 / config.steps;
  for (int t = 0; t < config.steps; ++t) {
    std::vector<double> residuals;
    for (const auto& v : st.values) residuals.push_back(gamma - v.value);
    const Direction d = direction(st.grads, residuals, instance.constraint);
    if (d.slack < -(config.slack_tolerance + st.slack_noise)) {
      return Certificate{gamma, t, d.slack};
    }
    for (const auto& p : d.pieces) pieces[to_mask(p.set)] += p.weight * step;
    for (int e = 0; e < n; ++e) x[e] += d.v[e] * step;
    std::vector<double> clamped = x;
    for (double& c : clamped) c = std::clamp(c, 0.0, 1.0);
    sol.x = FractionalPoint(std::move(clamped));
    st = detail::evaluate_objectives(oracles, sol.x, rng);
    sol.trajectory.push_back(detail::min_of(st.values));
  }
  sol.values = st.values;
  double noise = 0.0;
  for (const auto& v : sol.values) noise = std::max(noise, 3.0 * v.std_error);
  if (sol.min_value() < kOneMinusInvE * gamma - config.value_tolerance - noise) {
    return Certificate{gamma, -1, sol.min_value() - kOneMinusInvE * gamma};
  }
  for (const auto& [m, w] : pieces) {
    if (w > 0.0) sol.decomposition.push_back({from_mask(m), w});
  }
  // x is the running sum of the same pieces; rebuild it from them so the two
  // agree to rounding.
  std::vector<double> rebuilt = reconstruct(n, sol.decomposition);
  for (double& c : rebuilt) c = std::clamp(c, 0.0, 1.0);
  sol.x = FractionalPoint(std::move(rebuilt));
  return sol;
}

inline GammaOutcome run_for_gamma(const Instance& instance, double gamma,
                                  const GreedyConfig& config) {
  const auto oracles = make_extension_oracles(
      instance, config.exact_extension, config.mc_samples, config.extension_cap);
  Rng rng(config.seed);
  return run_for_gamma(instance, oracles, gamma, config, rng);
}

struct GammaSearchResult {
  FractionalSolution solution;
  /// Only the trivial gamma = 0 target succeeded.
  bool trivial = false;
  double upper_bound = 0.0;
  int runs = 0;
  /// (gamma, succeeded) in the order tried.
  std::vector<std::pair<double, bool>> history;
};

/// No policy beats any single objective's optimum, which is at most
/// U(E, f_i) by monotonicity and, for submodular objectives on matroids,
/// at most twice the greedy value.
inline double gamma_upper_bound(const Instance& instance,
                                const GreedyConfig& config) {
  EvaluatorOptions eo;
  eo.realization_cap = config.realization_cap;
  eo.mc_samples = config.mc_samples;
  eo.seed = config.seed;
  InducedEvaluator eval(instance.ground, instance.objectives, eo);
  double upper = std::numeric_limits<double>::infinity();
  const Mask all = full_mask(instance.n());
  for (int i = 0; i < instance.m(); ++i) {
    double bound = eval.value(i, all).value;
    if (instance.objectives[i].epsilon == 1.0 && instance.constraint.is_matroid()) {
      const auto g = lazy_greedy(instance.constraint,
                                 [&](Mask s) { return eval.value(i, s).value; });
      bound = std::min(bound, 2.0 * g.value);
    }
    upper = std::min(upper, bound);
  }
  return upper;
}

/// Binary search for the largest gamma on which run_for_gamma succeeds.
inline GammaSearchResult binary_search_gamma(const Instance& instance,
                                             const GreedyConfig& config) {
  const auto oracles = make_extension_oracles(
      instance, config.exact_extension, config.mc_samples, config.extension_cap);
  GammaSearchResult out;
  out.upper_bound = gamma_upper_bound(instance, config);
  std::uint64_t run_index = 0;
  const auto attempt = [&](double gamma) {
    Rng rng(InducedEvaluator::mix_seed(config.seed, run_index++, 0x9a11a));
    ++out.runs;
    return run_for_gamma(instance, oracles, gamma, config, rng);
  };
  {
    auto trivial = attempt(0.0);
    out.solution = std::get<FractionalSolution>(trivial);
    out.history.push_back({0.0, true});
  }
  out.trivial = true;
  double lo = 0.0;
  double hi = out.upper_bound;
  for (int iter = 0; iter < 64 && hi > 0.0; ++iter) {
    if (hi - lo <= config.gamma_tolerance * hi) break;
    const double mid = 0.5 * (lo + hi);
    auto outcome = attempt(mid);
    const bool ok = std::holds_alternative<FractionalSolution>(outcome);
    out.history.push_back({mid, ok});
    if (ok) {
      lo = mid;
      out.solution = std::move(std::get<FractionalSolution>(outcome));
      out.trivial = false;
    } else {
      hi = mid;
    }
  }
  return out;
}

}  // namespace aro

#endif  // ARO_CONTINUOUS_GREEDY_HPP

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
//  Multilinear extension F(x) = sum_S U(S) prod_{i in S} x_i
//  prod_{i not in S} (1 - x_i) of an item-level set function, with
//  marginals and gradients. Exact mode tabulates U over all 2^n sets;
//  Monte Carlo mode samples sets and states.
//

#ifndef ARO_MULTILINEAR_HPP
#define ARO_MULTILINEAR_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aro/core.hpp"
#include "aro/instance.hpp"
#include "aro/objectives.hpp"

namespace aro {

/// A point of the unit cube [0, 1]^n.
class FractionalPoint {
 public:
  FractionalPoint() = default;

  explicit FractionalPoint(std::vector<double> x) : x_(std::move(x)) {
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!(x_[i] >= 0.0 && x_[i] <= 1.0)) {
        throw SolverError("fractional point: coordinate " + std::to_string(i) +
                          " outside [0, 1]");
      }
    }
  }

  static FractionalPoint zeros(int n) {
    return FractionalPoint(std::vector<double>(n, 0.0));
  }

  static FractionalPoint indicator(int n, std::span<const int> s) {
    std::vector<double> x(n, 0.0);
    for (int e : s) x[e] = 1.0;
    return FractionalPoint(std::move(x));
  }

  int size() const { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_[i]; }
  const std::vector<double>& values() const { return x_; }

  FractionalPoint with(int e, double value) const {
    auto x = x_;
    x[e] = value;
    return FractionalPoint(std::move(x));
  }

 private:
  std::vector<double> x_;
};

struct GradientEstimate {
  std::vector<double> grad;
  /// Per-coordinate standard error; all zero in exact mode.
  std::vector<double> std_error;
};

inline constexpr std::size_t kDefaultExtensionCap = 10'000'000;

/// Evaluates the multilinear extension of one objective's item-level
/// function U(S, f).
class ExtensionOracle {
 public:
  enum class Mode { kExact, kMonteCarlo };

  /// Tabulates U(S, f) for every S. Requires prod_e (1 + |O_e|) <= cap.
  static ExtensionOracle exact(const GroundSet& ground, const RewardFunction& f,
                               std::size_t cap = kDefaultExtensionCap) {
    const int n = ground.size();
    std::size_t work = 1;
    for (int e = 0; e < n; ++e) {
      work *= static_cast<std::size_t>(ground.state_count(e) + 1);
      if (work > cap || n > 24) {
        throw CapExceeded(
            "exact multilinear extension exceeds its cap; use Monte Carlo mode");
      }
    }
    std::vector<double> table(std::size_t{1} << n);
    for (Mask m = 0; m < table.size(); ++m) {
      table[m] = induced_value_exact(from_mask(m), f, ground, cap);
    }
    ExtensionOracle o = from_table(n, std::move(table));
    o.ground_ = &ground;
    o.f_ = &f;
    return o;
  }

  /// Exact oracle over a given item-level table indexed by mask.
  static ExtensionOracle from_table(int n, std::vector<double> table) {
    if (n > 24 || table.size() != (std::size_t{1} << n)) {
      throw SolverError("extension table must have 2^n entries");
    }
    ExtensionOracle o;
    o.mode_ = Mode::kExact;
    o.n_ = n;
    o.table_ = std::make_shared<const std::vector<double>>(std::move(table));
    return o;
  }

  static ExtensionOracle monte_carlo(const GroundSet& ground,
                                     const RewardFunction& f,
                                     std::size_t samples = 2000) {
    if (samples == 0) throw SolverError("monte carlo extension: samples must be >= 1");
    ExtensionOracle o;
    o.mode_ = Mode::kMonteCarlo;
    o.n_ = ground.size();
    o.ground_ = &ground;
    o.f_ = &f;
    o.samples_ = samples;
    return o;
  }

  Mode mode() const { return mode_; }
  int size() const { return n_; }
  std::size_t samples() const { return samples_; }

  /// Exact mode only: U(S) for a mask.
  double set_value(Mask s) const { return (*table_)[s]; }

  Estimate value(const FractionalPoint& x, Rng* rng = nullptr) const {
    check(x);
    if (mode_ == Mode::kExact) {
      const auto p = set_probabilities(x.values(), -1);
      double total = 0.0;
      for (std::size_t m = 0; m < p.size(); ++m) total += p[m] * (*table_)[m];
      return {total, 0.0, true};
    }
    Rng& r = need_rng(rng);
    std::vector<Observation> obs;
    Accumulator acc;
    for (std::size_t t = 0; t < samples_; ++t) {
      obs.clear();
      for (int e = 0; e < n_; ++e) {
        if (include(x[e], r)) obs.push_back({e, sample_state(*ground_, e, r)});
      }
      acc.add(f_->value(obs));
    }
    return acc.estimate(samples_);
  }

  /// F(x v 1_e) - F(x). Monte Carlo mode couples both terms on the same
  /// sampled sets.
  Estimate marginal(int e, const FractionalPoint& x, Rng* rng = nullptr) const {
    check(x);
    if (mode_ == Mode::kExact) {
      return {value(x.with(e, 1.0)).value - value(x).value, 0.0, true};
    }
    Rng& r = need_rng(rng);
    std::vector<Observation> obs;
    Accumulator acc;
    for (std::size_t t = 0; t < samples_; ++t) {
      obs.clear();
      bool has_e = false;
      int e_state = 0;
      for (int j = 0; j < n_; ++j) {
        const bool in = include(x[j], r);
        const int s = sample_state(*ground_, j, r);
        if (j == e) {
          has_e = in;
          e_state = s;
          continue;
        }
        if (in) obs.push_back({j, s});
      }
      double base = 0.0;
      if (has_e) {
        obs.push_back({e, e_state});
        base = f_->value(obs);
        acc.add(0.0);
        continue;
      }
      base = f_->value(obs);
      obs.push_back({e, e_state});
      acc.add(f_->value(obs) - base);
    }
    return acc.estimate(samples_);
  }

  /// dF/dx_e = F(x with x_e = 1) - F(x with x_e = 0) for every e. Monte
  /// Carlo mode reuses one sampled set and realization across coordinates.
  GradientEstimate gradient(const FractionalPoint& x, Rng* rng = nullptr) const {
    check(x);
    GradientEstimate out;
    out.grad.assign(n_, 0.0);
    out.std_error.assign(n_, 0.0);
    if (mode_ == Mode::kExact) {
      const auto& table = *table_;
      for (int e = 0; e < n_; ++e) {
        const auto p = set_probabilities(x.values(), e);
        const Mask bit = Mask{1} << e;
        double g = 0.0;
        for (Mask m = 0; m < p.size(); ++m) {
          if (m & bit) continue;
          g += p[m] * (table[m | bit] - table[m]);
        }
        out.grad[e] = g;
      }
      return out;
    }
    Rng& r = need_rng(rng);
    std::vector<Accumulator> acc(n_);
    std::vector<int> states(n_);
    std::vector<char> in(n_);
    std::vector<Observation> obs;
    for (std::size_t t = 0; t < samples_; ++t) {
      obs.clear();
      for (int e = 0; e < n_; ++e) {
        in[e] = include(x[e], r);
        states[e] = sample_state(*ground_, e, r);
        if (in[e]) obs.push_back({e, states[e]});
      }
      const double base = f_->value(obs);
      std::vector<Observation> alt;
      for (int e = 0; e < n_; ++e) {
        alt.clear();
        for (const auto& o : obs) {
          if (o.item != e) alt.push_back(o);
        }
        if (in[e]) {
          acc[e].add(base - f_->value(alt));
        } else {
          alt.push_back({e, states[e]});
          acc[e].add(f_->value(alt) - base);
        }
      }
    }
    for (int e = 0; e < n_; ++e) {
      const Estimate est = acc[e].estimate(samples_);
      out.grad[e] = est.value;
      out.std_error[e] = est.std_error;
    }
    return out;
  }

 private:
  struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    void add(double v) {
      sum += v;
      sum_sq += v * v;
    }
    Estimate estimate(std::size_t count) const {
      const double n = static_cast<double>(count);
      const double mean = sum / n;
      double se = 0.0;
      if (count > 1) {
        se = std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) / n);
      }
      return {mean, se, false};
    }
  };

  static bool include(double p, Rng& r) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(r) < p;
  }

  void check(const FractionalPoint& x) const {
    if (x.size() != n_) throw SolverError("fractional point has wrong dimension");
  }

  Rng& need_rng(Rng* rng) const {
    if (rng == nullptr) {
      throw SolverError("Monte Carlo extension needs a random stream");
    }
    return *rng;
  }

  /// Probability of every mask under independent inclusion; item `skip`
  /// is treated as absent with probability one.
  std::vector<double> set_probabilities(const std::vector<double>& x,
                                        int skip) const {
    std::vector<double> p(std::size_t{1} << n_, 0.0);
    p[0] = 1.0;
    std::size_t filled = 1;
    for (int e = 0; e < n_; ++e) {
      const std::size_t bit = std::size_t{1} << e;
      if (e == skip) {
        filled <<= 1;
        continue;
      }
      for (std::size_t m = 0; m < filled; ++m) {
        if (p[m] == 0.0) continue;
        p[m | bit] = p[m] * x[e];
        p[m] *= 1.0 - x[e];
      }
      filled <<= 1;
    }
    return p;
  }

  Mode mode_ = Mode::kExact;
  int n_ = 0;
  std::shared_ptr<const std::vector<double>> table_;
  const GroundSet* ground_ = nullptr;
  const RewardFunction* f_ = nullptr;
  std::size_t samples_ = 0;
};

/// One extension oracle per objective of an instance.
inline std::vector<ExtensionOracle> make_extension_oracles(
    const Instance& instance, bool exact, std::size_t mc_samples,
    std::size_t cap = kDefaultExtensionCap) {
  std::vector<ExtensionOracle> out;
  for (const auto& pair : instance.objectives) {
    out.push_back(exact ? ExtensionOracle::exact(instance.ground, pair.f, cap)
                        : ExtensionOracle::monte_carlo(instance.ground, pair.f,
                                                       mc_samples));
  }
  return out;
}

}  // namespace aro

#endif  // ARO_MULTILINEAR_HPP

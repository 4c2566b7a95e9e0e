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

#include "aro/objectives.hpp"

#include <cmath>
#include <random>

#include "aro/generate.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace aro {
namespace {

using testing::brute_induced;

RewardFunction pair_count() {
  return CustomReward{[](std::span<const Observation> x) { return double(x.size()); },
                      "count"};
}

TEST(RewardTest, ModularEmptyIsZero) {
  const RewardFunction f = ModularReward{{{1.0, 2.0}, {3.0}}};
  EXPECT_EQ(f(std::vector<Observation>{}), 0.0);
  EXPECT_EQ(f(std::vector<Observation>{{0, 1}, {1, 0}}), 5.0);
}

TEST(RewardTest, CoverageCountsUnionWeight) {
  CoverageReward c;
  c.element_weights = {1.0, 1.0};
  c.covers = {{{}, {0, 1}}, {{1}, {}}};
  const RewardFunction f = c;
  EXPECT_EQ(f(std::vector<Observation>{{0, 1}, {1, 0}}), 2.0);
  EXPECT_EQ(f(std::vector<Observation>{{1, 0}}), 1.0);
}

TEST(RewardTest, SaturatingCapBinds) {
  const RewardFunction f = SaturatingReward{{{3.0}, {4.0}}, 5.0};
  EXPECT_EQ(f(std::vector<Observation>{{0, 0}, {1, 0}}), 5.0);
  EXPECT_EQ(f(std::vector<Observation>{{0, 0}}), 3.0);
}

TEST(RewardTest, DuplicateItemRejected) {
  const RewardFunction f = ModularReward{{{1.0, 2.0}}};
  EXPECT_THROW(f(std::vector<Observation>{{0, 0}, {0, 1}}), InstanceError);
}

TEST(RewardTest, PerturbationMultiplierEndpoints) {
  EXPECT_DOUBLE_EQ(RewardFunction::perturbation_multiplier(0.5, 2, 0), 0.5);
  EXPECT_DOUBLE_EQ(RewardFunction::perturbation_multiplier(0.5, 2, 1), 1.0);
  EXPECT_DOUBLE_EQ(RewardFunction::perturbation_multiplier(0.5, 2, 2), 2.0);
  EXPECT_DOUBLE_EQ(RewardFunction::perturbation_multiplier(0.5, 2, 5), 2.0);
}

TEST(RewardTest, EveryShippedKindIsMonotone) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}, {0.2, 0.8}, {1.0}, {0.3, 0.7}});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const char* preset : {"coverage", "modular", "perturbed"}) {
      GenParams p;
      p.n = 4;
      p.m = 1;
      p.seed = seed;
      const Instance inst = generate_instance(preset, p);
      const auto& f = inst.objectives[0].f;
      const auto universe = observation_universe(inst.ground);
      // f(X) <= f(X + o) for every valid X and o.
      const int k = static_cast<int>(universe.size());
      for (std::uint32_t m = 0; m < (1u << k); ++m) {
        std::vector<Observation> x;
        Mask items = 0;
        bool ok = true;
        for (int a = 0; a < k; ++a) {
          if (!(m >> a & 1u)) continue;
          if (items >> universe[a].item & 1) ok = false;
          items |= Mask{1} << universe[a].item;
          x.push_back(universe[a]);
        }
        if (!ok) continue;
        const double base = f(x);
        EXPECT_GE(base, 0.0);
        for (const auto& o : universe) {
          if (items >> o.item & 1) continue;
          auto y = x;
          y.push_back(o);
          EXPECT_GE(f(y), base - 1e-12) << preset << " seed " << seed;
        }
      }
    }
  }
  (void)g;
}

TEST(SandwichTest, IdenticalPairPasses) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}, {1.0}});
  const RewardFunction f = ModularReward{{{1.0, 2.0}, {3.0}}};
  const auto r = check_sandwich(NearlySubmodularPair::submodular(f), g);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.checked, 6u);
}

TEST(SandwichTest, PerturbedPairPasses) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}, {1.0}, {0.5, 0.5}});
  const RewardFunction base = ModularReward{{{1.0, 2.0}, {3.0}, {0.5, 1.0}}};
  const NearlySubmodularPair pair{RewardFunction::perturbed(base, 0.5, 2), base, 0.5};
  EXPECT_TRUE(check_sandwich(pair, g).passed);
  // c(|X|) at the three sizes.
  const std::vector<Observation> one{{1, 0}}, two{{1, 0}, {0, 0}};
  EXPECT_DOUBLE_EQ(pair.f(std::vector<Observation>{}), 0.0);
  EXPECT_DOUBLE_EQ(pair.f(one), 3.0);
  EXPECT_DOUBLE_EQ(pair.f(two), 8.0);
}

TEST(SandwichTest, ScaledPairFails) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}, {1.0}});
  const RewardFunction g1 = ModularReward{{{1.0, 2.0}, {3.0}}};
  const RewardFunction f3 = ModularReward{{{3.0, 6.0}, {9.0}}};
  const auto r = check_sandwich({f3, g1, 0.5}, g);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.worst_violation, 0.0);
  EXPECT_FALSE(r.worst_subset.empty());
}

TEST(SandwichTest, EpsilonOnePassesOnlyForEqualFunctions) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}, {1.0}});
  const RewardFunction a = ModularReward{{{1.0, 2.0}, {3.0}}};
  const RewardFunction b = ModularReward{{{1.0, 2.0}, {3.5}}};
  EXPECT_TRUE(check_sandwich({a, a, 1.0}, g).passed);
  EXPECT_FALSE(check_sandwich({a, b, 1.0}, g).passed);
}

TEST(SandwichTest, LargeUniverseDowngradesToSampling) {
  const GroundSet g = GroundSet::from_probs(std::vector<std::vector<double>>(
      12, {0.25, 0.25, 0.25, 0.25}));
  ModularReward w;
  w.weights.assign(12, {1.0, 1.0, 1.0, 1.0});
  const auto r = check_sandwich(NearlySubmodularPair::submodular(w), g, 1000, 500);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.checked, 500u);
}

TEST(SubmodularityTest, ModularAndCoverageAreSubmodular) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}, {0.5, 0.5}, {1.0}, {0.3, 0.7}});
  const auto universe = observation_universe(g);
  EXPECT_TRUE(is_submodular_bruteforce(RewardFunction(ModularReward{
                                           {{1, 2}, {0, 4}, {3}, {2, 2}}}),
                                       universe));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GenParams p;
    p.n = 4;
    p.m = 1;
    p.seed = seed;
    const Instance inst = generate_instance("coverage", p);
    EXPECT_TRUE(is_submodular_bruteforce(inst.objectives[0].f,
                                         observation_universe(inst.ground)));
  }
}

TEST(SubmodularityTest, SquareOfSizeIsNot) {
  const auto sq = [](std::span<const Observation> x) {
    return double(x.size() * x.size());
  };
  const std::vector<Observation> universe{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_FALSE(is_submodular_bruteforce(sq, universe));
}

TEST(SubmodularityTest, LocalFormAgreesAboveTwelve) {
  // 14 observations forces the local check.
  std::vector<Observation> universe;
  for (int e = 0; e < 14; ++e) universe.push_back({e, 0});
  const auto sq = [](std::span<const Observation> x) {
    return double(x.size() * x.size());
  };
  const auto sqrt_size = [](std::span<const Observation> x) {
    return std::sqrt(double(x.size()));
  };
  EXPECT_FALSE(is_submodular_bruteforce(sq, universe));
  EXPECT_TRUE(is_submodular_bruteforce(sqrt_size, universe));
}

TEST(InducedValueTest, SingleItemHalf) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}});
  const RewardFunction f = ModularReward{{{0.0, 1.0}}};
  EXPECT_DOUBLE_EQ(induced_value_exact(ItemSet{0}, f, g), 0.5);
  EXPECT_DOUBLE_EQ(induced_value_exact(ItemSet{}, f, g), 0.0);
}

TEST(InducedValueTest, DeterministicPriorsGiveForcedValue) {
  const GroundSet g = GroundSet::deterministic(3);
  const RewardFunction f = SaturatingReward{{{2.0}, {3.0}, {4.0}}, 6.0};
  EXPECT_DOUBLE_EQ(induced_value_exact(ItemSet{0, 2}, f, g), 6.0);
  Rng rng(3);
  const Estimate e = induced_value_mc(ItemSet{0, 1}, f, g, 50, rng);
  EXPECT_DOUBLE_EQ(e.value, 5.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(InducedValueTest, EmptySetGivesValueAtEmpty) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}});
  const RewardFunction f = CustomReward{
      [](std::span<const Observation> x) { return 7.0 + x.size(); }, "offset"};
  EXPECT_DOUBLE_EQ(induced_value_exact(ItemSet{}, f, g), 7.0);
}

TEST(InducedValueTest, MatchesFullRealizationSum) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenParams p;
    p.n = 5;
    p.m = 2;
    p.states = 3;
    p.seed = seed;
    const Instance inst = generate_instance("perturbed", p);
    for (Mask m = 0; m < 32; ++m) {
      for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(induced_value_exact(from_mask(m), inst.objectives[i].f, inst.ground),
                    brute_induced(inst, i, from_mask(m)), 1e-12);
      }
    }
  }
}

TEST(InducedValueTest, MonteCarloWithinThreeStdErrors) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}});
  const RewardFunction f = ModularReward{{{0.0, 1.0}}};
  Rng rng(11);
  const Estimate e = induced_value_mc(ItemSet{0}, f, g, 10'000, rng);
  EXPECT_FALSE(e.exact);
  EXPECT_NEAR(e.value, 0.5, 3.0 * e.std_error);
}

TEST(InducedValueTest, StdErrorHalvesWithFourTimesSamples) {
  const GroundSet g = GroundSet::from_probs({{0.3, 0.7}, {0.5, 0.5}});
  const RewardFunction f = ModularReward{{{0.0, 2.0}, {1.0, 3.0}}};
  Rng rng(5);
  double ratio_sum = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double a = induced_value_mc(ItemSet{0, 1}, f, g, 1000, rng).std_error;
    const double b = induced_value_mc(ItemSet{0, 1}, f, g, 4000, rng).std_error;
    ratio_sum += b / a;
  }
  EXPECT_NEAR(ratio_sum / 20.0, 0.5, 0.15);
}

TEST(InducedValueTest, MonteCarloIsUnbiased) {
  GenParams p;
  p.n = 4;
  p.m = 1;
  p.seed = 17;
  const Instance inst = generate_instance("coverage", p);
  const ItemSet s{0, 1, 3};
  const double exact = brute_induced(inst, 0, s);
  Rng rng(99);
  double sum = 0.0, var = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Estimate e = induced_value_mc(s, inst.objectives[0].f, inst.ground, 200, rng);
    sum += e.value;
    var += e.std_error * e.std_error;
  }
  const double mean = sum / 100.0;
  const double pooled = std::sqrt(var) / 100.0;
  EXPECT_NEAR(mean, exact, 3.0 * pooled);
}

TEST(InducedValueTest, DeterministicGivenSeed) {
  const GroundSet g = GroundSet::from_probs({{0.3, 0.7}, {0.5, 0.5}});
  const RewardFunction f = ModularReward{{{0.0, 2.0}, {1.0, 3.0}}};
  Rng a(8), b(8);
  EXPECT_EQ(induced_value_mc(ItemSet{0, 1}, f, g, 100, a).value,
            induced_value_mc(ItemSet{0, 1}, f, g, 100, b).value);
}

TEST(InducedValueTest, SubmodularRewardInducesSubmodularSetFunction) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GenParams p;
    p.n = 6;
    p.m = 1;
    p.seed = seed;
    const Instance inst = generate_instance("coverage", p);
    const int n = inst.n();
    std::vector<double> u(std::size_t{1} << n);
    for (Mask m = 0; m < u.size(); ++m) {
      u[m] = induced_value_exact(from_mask(m), inst.objectives[0].f, inst.ground);
    }
    for (Mask t = 0; t < u.size(); ++t) {
      for (int v = 0; v < n; ++v) {
        const Mask bit = Mask{1} << v;
        if (t & bit) continue;
        EXPECT_GE(u[t | bit], u[t] - 1e-12);
        for (Mask s = t;; s = (s - 1) & t) {
          EXPECT_GE(u[s | bit] - u[s], u[t | bit] - u[t] - 1e-9);
          if (s == 0) break;
        }
      }
    }
  }
}

TEST(EvaluatorTest, ExactWithinCapAndCached) {
  const Instance inst = testing::probing_gap_instance();
  InducedEvaluator eval(inst.ground, inst.objectives);
  const Estimate e = eval.value(0, to_mask(ItemSet{0, 1}));
  EXPECT_TRUE(e.exact);
  EXPECT_DOUBLE_EQ(e.value, 1.5);
  EXPECT_DOUBLE_EQ(eval.value(0, ItemSet{0, 2}), 1.5);
  EXPECT_TRUE(eval.all_exact());
}

TEST(EvaluatorTest, MonteCarloBeyondCapIsRepeatable) {
  const Instance inst = testing::probing_gap_instance();
  EvaluatorOptions o;
  o.realization_cap = 1;
  o.mc_samples = 500;
  InducedEvaluator a(inst.ground, inst.objectives, o);
  InducedEvaluator b(inst.ground, inst.objectives, o);
  const Estimate ea = a.value(0, to_mask(ItemSet{0, 1}));
  EXPECT_FALSE(ea.exact);
  EXPECT_EQ(ea.value, b.value(0, to_mask(ItemSet{0, 1})).value);
  EXPECT_NEAR(ea.value, 1.5, 4.0 * ea.std_error + 1e-12);
  EXPECT_FALSE(a.all_exact());
}

TEST(EvaluatorTest, PairCountExample) {
  const GroundSet g = GroundSet::from_probs({{0.5, 0.5}, {1.0}});
  EXPECT_DOUBLE_EQ(induced_value_exact(ItemSet{0, 1}, pair_count(), g), 2.0);
}

}  // namespace
}  // namespace aro

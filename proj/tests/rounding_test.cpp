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

#include "aro/rounding.hpp"

#include <cmath>

#include "aro/generate.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace aro {
namespace {

TEST(SwapRoundTest, SingleSetAlwaysReturned) {
  const auto f = FeasibleFamily::uniform(3, 2);
  const std::vector<WeightedSet> d{{{0, 2}, 1.0}};
  Rng rng(1);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(swap_round(d, f, rng), (ItemSet{0, 2}));
}

TEST(SwapRoundTest, TwoSingletonsSplitEvenly) {
  const auto f = FeasibleFamily::uniform(2, 1);
  const std::vector<WeightedSet> d{{{0}, 0.5}, {{1}, 0.5}};
  Rng rng(2);
  int a = 0;
  const int reps = 10'000;
  for (int t = 0; t < reps; ++t) {
    const ItemSet s = swap_round(d, f, rng);
    ASSERT_EQ(s.size(), 1u);
    a += s[0] == 0;
  }
  EXPECT_NEAR(a / double(reps), 0.5, 0.02);
}

TEST(SwapRoundTest, IntegralPointIsKept) {
  const auto f = FeasibleFamily::uniform(3, 2);
  const auto d = decompose_matroid_point(f, std::vector<double>{1.0, 1.0, 0.0});
  Rng rng(3);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(swap_round(d, f, rng), (ItemSet{0, 1}));
}

TEST(SwapRoundTest, RejectsExplicitFamilies) {
  const auto f = FeasibleFamily::downward_closure(2, {{0}, {1}});
  const std::vector<WeightedSet> d{{{0}, 1.0}};
  Rng rng(4);
  try {
    swap_round(d, f, rng);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("independent_round_repair"), std::string::npos);
  }
}

TEST(SwapRoundTest, PreservesMarginalsAndFeasibility) {
  Rng rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<FeasibleFamily> families{
      FeasibleFamily::uniform(4, 2),
      FeasibleFamily::partition(5, {{0, 1}, {2, 3, 4}}, {1, 2})};
  for (const auto& f : families) {
    for (int inst = 0; inst < 5; ++inst) {
      std::vector<double> x(f.size());
      for (double& v : x) v = unif(rng);
      for (std::size_t j = 0; j < f.parts().size(); ++j) {
        double s = 0.0;
        for (int e : f.parts()[j]) s += x[e];
        if (s > f.capacities()[j]) {
          for (int e : f.parts()[j]) x[e] *= f.capacities()[j] / s;
        }
      }
      const auto d = decompose_matroid_point(f, x);
      const int reps = 10'000;
      std::vector<int> hits(f.size(), 0);
      for (int t = 0; t < reps; ++t) {
        const ItemSet s = swap_round(d, f, rng);
        ASSERT_TRUE(f.contains(s));
        for (int e : s) ++hits[e];
      }
      for (int e = 0; e < f.size(); ++e) {
        const double se = std::sqrt(x[e] * (1 - x[e]) / reps);
        EXPECT_LE(std::abs(hits[e] / double(reps) - x[e]), 3.0 * se + 1e-12);
      }
    }
  }
}

TEST(SwapRoundTest, NeverInfeasibleOnAnyDecompositionSet) {
  const auto f = FeasibleFamily::partition(4, {{0, 1}, {2, 3}}, {1, 1});
  // Every feasible set with a random weight.
  std::vector<WeightedSet> d;
  for (const auto& s : testing::brute_feasible_sets(f)) d.push_back({s, 1.0 / 9.0});
  Rng rng(6);
  for (int t = 0; t < 2000; ++t) EXPECT_TRUE(f.contains(swap_round(d, f, rng)));
}

TEST(IndependentRoundTest, IntegralFeasiblePointIsKept) {
  const Instance inst = testing::modular_instance({{1, 1, 1}}, FeasibleFamily::uniform(3, 2));
  InducedEvaluator eval(inst.ground, inst.objectives);
  Rng rng(7);
  EXPECT_EQ(independent_round_repair(FractionalPoint({1, 0, 1}), inst.constraint, eval, rng),
            (ItemSet{0, 2}));
}

TEST(IndependentRoundTest, RepairDropsDownToCapacity) {
  const Instance inst = testing::modular_instance({{2, 1}}, FeasibleFamily::uniform(2, 1));
  InducedEvaluator eval(inst.ground, inst.objectives);
  Rng rng(8);
  const ItemSet s =
      independent_round_repair(FractionalPoint({1, 1}), inst.constraint, eval, rng);
  EXPECT_EQ(s, (ItemSet{0}));
}

TEST(IndependentRoundTest, PreRepairMarginalsMatch) {
  const FractionalPoint x({0.2, 0.5, 0.9});
  Rng rng(9);
  std::vector<int> hits(3, 0);
  const int reps = 10'000;
  for (int t = 0; t < reps; ++t) {
    for (int e : independent_round(x, rng)) ++hits[e];
  }
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(hits[e] / double(reps), x[e], 0.02);
}

FractionalSolution fractional(const FeasibleFamily& f, std::vector<double> x,
                              const Instance& inst) {
  FractionalSolution sol;
  sol.decomposition = decompose_matroid_point(f, x);
  sol.x = FractionalPoint(reconstruct(f.size(), sol.decomposition));
  const auto oracles = make_extension_oracles(inst, true, 1);
  for (const auto& o : oracles) sol.values.push_back(o.value(sol.x));
  return sol;
}

TEST(BestOfRoundsTest, SingleRoundIsOneSwapDraw) {
  const Instance inst = testing::ab_instance();
  const auto sol = fractional(inst.constraint, {0.5, 0.5}, inst);
  InducedEvaluator eval(inst.ground, inst.objectives);
  Rng a(10), b(10);
  const auto out = best_of_rounds(sol, inst.constraint, eval, 1, a);
  EXPECT_EQ(out.set, swap_round(sol, inst.constraint, b));
  EXPECT_EQ(out.repetitions_used, 1);
  EXPECT_EQ(out.method, RoundingMethod::kSwap);
}

TEST(BestOfRoundsTest, IntegralPointHasUnitZeta) {
  const Instance inst = testing::modular_instance({{3, 2, 1}}, FeasibleFamily::uniform(3, 2));
  const auto sol = fractional(inst.constraint, {1, 1, 0}, inst);
  InducedEvaluator eval(inst.ground, inst.objectives);
  Rng rng(11);
  const auto out = best_of_rounds(sol, inst.constraint, eval, 8, rng);
  EXPECT_DOUBLE_EQ(out.zeta_hat, 1.0);
  EXPECT_DOUBLE_EQ(out.value.value, 5.0);
}

TEST(BestOfRoundsTest, DisjointSingletonsLosePureValueButKeepMixed) {
  const Instance inst = testing::ab_instance();
  const auto sol = fractional(inst.constraint, {0.5, 0.5}, inst);
  EXPECT_DOUBLE_EQ(sol.min_value(), 0.5);
  InducedEvaluator eval(inst.ground, inst.objectives);
  Rng rng(12);
  const auto out = best_of_rounds(sol, inst.constraint, eval, 32, rng);
  EXPECT_DOUBLE_EQ(out.value.value, 0.0);
  EXPECT_DOUBLE_EQ(out.zeta_hat, 0.0);
  const Estimate mixed = robust_value(out.draws_policy, eval);
  EXPECT_GT(mixed.value, 0.3);
  EXPECT_DOUBLE_EQ(robust_value(MixedSetPolicy::from_decomposition(sol.decomposition), eval).value,
                   0.5);
}

TEST(BestOfRoundsTest, MeanRoundedValueAtLeastFractionalForSubmodular) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GenParams p;
    p.m = 1;
    p.seed = seed;
    const Instance inst = generate_instance("lemma2", p);
    std::vector<double> x(inst.n(), 0.0);
    // Spread mass uniformly within every part.
    for (std::size_t j = 0; j < inst.constraint.parts().size(); ++j) {
      const auto& part = inst.constraint.parts()[j];
      for (int e : part) x[e] = std::min(1.0, double(inst.constraint.capacities()[j]) / part.size());
    }
    const auto sol = fractional(inst.constraint, x, inst);
    InducedEvaluator eval(inst.ground, inst.objectives);
    Rng rng(seed);
    const int reps = 4000;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < reps; ++t) {
      const double v = eval.value(0, to_mask(swap_round(sol, inst.constraint, rng))).value;
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / reps;
    const double se = std::sqrt(std::max(0.0, sum_sq / reps - mean * mean) / reps);
    EXPECT_GE(mean, sol.min_value() - 3.0 * se - 1e-12) << inst.id;
  }
}

TEST(BestOfRoundsTest, ExplicitFamilyUsesRepair) {
  ModularReward w{{{1.0}, {1.0}, {1.0}}};
  const Instance inst(GroundSet::deterministic(3), {NearlySubmodularPair::submodular(w)},
                      FeasibleFamily::downward_closure(3, {{0, 1}, {2}}));
  FractionalSolution sol;
  sol.decomposition = {{{0, 1}, 0.5}, {{2}, 0.5}};
  sol.x = FractionalPoint(reconstruct(3, sol.decomposition));
  sol.values = {{1.5, 0.0, true}};
  InducedEvaluator eval(inst.ground, inst.objectives);
  Rng rng(13);
  const auto out = best_of_rounds(sol, inst.constraint, eval, 16, rng);
  EXPECT_EQ(out.method, RoundingMethod::kIndependentRepair);
  for (const auto& s : out.draws) EXPECT_TRUE(inst.constraint.contains(s));
  EXPECT_THROW(best_of_rounds(sol, inst.constraint, eval, 0, rng), SolverError);
}

}  // namespace
}  // namespace aro

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

#include "aro/heuristics.hpp"

#include "aro/generate.hpp"
#include "aro/oracle.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace aro {
namespace {

TEST(ApproxSingleTest, ModularGreedyIsOptimal) {
  const Instance inst = testing::modular_instance({{3, 2, 1}}, FeasibleFamily::uniform(3, 2));
  InducedEvaluator eval(inst.ground, inst.objectives);
  const auto r = approx_single(0, inst, eval);
  EXPECT_EQ(r.set, (ItemSet{0, 1}));
  EXPECT_DOUBLE_EQ(r.value, 5.0);
  EXPECT_DOUBLE_EQ(r.alpha_claim, 0.5);
  EXPECT_FALSE(r.heuristic);
}

TEST(ApproxSingleTest, ZeroObjectiveGivesEmptySet) {
  const Instance inst = testing::modular_instance({{0, 0, 0}}, FeasibleFamily::uniform(3, 2));
  InducedEvaluator eval(inst.ground, inst.objectives);
  const auto r = approx_single(0, inst, eval);
  EXPECT_TRUE(r.set.empty());
  EXPECT_DOUBLE_EQ(r.value, 0.0);
}

TEST(ApproxSingleTest, PerturbedObjectiveFlagsHeuristicClaim) {
  GenParams p;
  p.n = 4;
  p.m = 1;
  p.epsilon = 0.5;
  const Instance inst = generate_instance("perturbed", p);
  InducedEvaluator eval(inst.ground, inst.objectives);
  const auto r = approx_single(0, inst, eval);
  EXPECT_TRUE(r.heuristic);
  EXPECT_DOUBLE_EQ(r.alpha_claim, 0.125);
}

TEST(ApproxSingleTest, CoverageGreedyWithinHalfOfEnumeration) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams p;
    p.n = 8;
    p.m = 1;
    p.k = 3;
    p.seed = seed;
    const Instance inst = generate_instance("coverage", p);
    InducedEvaluator eval(inst.ground, inst.objectives);
    const auto r = approx_single(0, inst, eval);
    double best = 0.0;
    for (const auto& s : testing::brute_feasible_sets(inst.constraint)) {
      best = std::max(best, testing::brute_induced(inst, 0, s));
    }
    EXPECT_GE(r.value, 0.5 * best - 1e-12) << inst.id;
  }
}

TEST(OneOverMTest, SingleObjectiveIsPointMass) {
  const Instance inst = testing::modular_instance({{3, 2, 1}}, FeasibleFamily::uniform(3, 2));
  const auto r = sigma_one_over_m(inst);
  ASSERT_EQ(r.policy.support.size(), 1u);
  EXPECT_EQ(r.policy.support[0].set, (ItemSet{0, 1}));
  EXPECT_DOUBLE_EQ(r.policy.support[0].weight, 1.0);
}

TEST(OneOverMTest, ThreeObjectivesGetOneThirdEach) {
  const Instance inst = testing::modular_instance({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                                                  FeasibleFamily::uniform(3, 1));
  const auto r = sigma_one_over_m(inst);
  ASSERT_EQ(r.policy.support.size(), 3u);
  for (const auto& w : r.policy.support) EXPECT_EQ(w.weight, 1.0 / 3.0);
  EXPECT_NEAR(r.value.value, 1.0 / 3.0, 1e-12);
}

TEST(OneOverMTest, DuplicateSetsMergeMass) {
  const Instance inst = testing::modular_instance({{1, 0}, {2, 0}, {0, 1}},
                                                  FeasibleFamily::uniform(2, 1));
  const auto r = sigma_one_over_m(inst).policy.canonical();
  ASSERT_EQ(r.support.size(), 2u);
  EXPECT_DOUBLE_EQ(r.support[0].weight, 2.0 / 3.0);
}

TEST(OneOverMTest, DisjointSingletons) {
  const auto r = sigma_one_over_m(testing::ab_instance());
  EXPECT_DOUBLE_EQ(r.value.value, 0.5);
  ASSERT_EQ(r.policy.support.size(), 2u);
  EXPECT_DOUBLE_EQ(r.policy.support[0].weight, 0.5);
}

TEST(BestResponseTest, PureLambdaMatchesApproxSingle) {
  GenParams p;
  p.n = 6;
  p.m = 3;
  p.seed = 2;
  const Instance inst = generate_instance("coverage", p);
  InducedEvaluator eval(inst.ground, inst.objectives);
  for (int i = 0; i < 3; ++i) {
    std::vector<double> lambda(3, 0.0);
    lambda[i] = 1.0;
    const auto [set, value] = best_response(lambda, inst, eval);
    const auto a = approx_single(i, inst, eval);
    EXPECT_EQ(set, a.set);
    EXPECT_DOUBLE_EQ(value, a.value);
  }
}

TEST(BestResponseTest, OpposingModularObjectives) {
  const Instance inst = testing::ab_instance();
  InducedEvaluator eval(inst.ground, inst.objectives);
  const auto [set, value] = best_response(std::vector<double>{0.5, 0.5}, inst, eval);
  EXPECT_EQ(set.size(), 1u);
  EXPECT_DOUBLE_EQ(value, 0.5);
}

TEST(BestResponseTest, IdenticalObjectivesMatchSingleGreedy) {
  const Instance inst = testing::modular_instance({{3, 2, 1}, {3, 2, 1}},
                                                  FeasibleFamily::uniform(3, 2));
  InducedEvaluator eval(inst.ground, inst.objectives);
  const auto [set, value] = best_response(std::vector<double>{0.5, 0.5}, inst, eval);
  EXPECT_EQ(set, approx_single(0, inst, eval).set);
  EXPECT_DOUBLE_EQ(value, 5.0);
}

TEST(BestResponseTest, ExhaustiveRefusesLargeInstances) {
  const Instance inst = testing::modular_instance({std::vector<double>(13, 1.0)},
                                                  FeasibleFamily::uniform(13, 2));
  InducedEvaluator eval(inst.ground, inst.objectives);
  EXPECT_THROW(best_response(std::vector<double>{1.0}, inst, eval, true), CapExceeded);
}

TEST(DoubleOracleTest, DisjointSingletons) {
  const auto r = double_oracle(testing::ab_instance());
  EXPECT_NEAR(r.value.value, 0.5, 1e-9);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 3);
  const auto p = r.policy.canonical();
  ASSERT_EQ(p.support.size(), 2u);
  EXPECT_NEAR(p.support[0].weight, 0.5, 1e-9);
  ASSERT_TRUE(r.beta_estimate.has_value());
  EXPECT_NEAR(*r.beta_estimate, 1.0, 1e-9);
}

TEST(DoubleOracleTest, SingleObjectiveStopsAfterOneResponse) {
  const Instance inst = testing::modular_instance({{3, 2, 1}}, FeasibleFamily::uniform(3, 2));
  const auto r = double_oracle(inst);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.policy.support[0].set, (ItemSet{0, 1}));
}

TEST(DoubleOracleTest, HistoryHasOneEntryPerRestrictedSolve) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams p;
    p.n = 8;
    p.m = 3;
    p.seed = seed;
    const Instance inst = generate_instance("coverage", p);
    for (int limit : {1, 2, 200}) {
      DoubleOracleOptions o;
      o.max_iter = limit;
      o.compute_beta = false;
      const auto r = double_oracle(inst, o);
      EXPECT_LE(r.iterations, limit);
      EXPECT_EQ(r.value_history.size(), std::size_t(r.iterations) + (r.converged ? 0 : 1));
      if (!r.converged) {
        EXPECT_EQ(r.iterations, limit);
      }
    }
  }
  DoubleOracleOptions bad;
  bad.max_iter = 0;
  EXPECT_THROW(double_oracle(testing::ab_instance(), bad), SolverError);
}

TEST(DoubleOracleTest, ExhaustiveResponseIsExactAndMonotone) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GenParams p;
    p.seed = seed;
    const Instance inst = generate_instance(seed % 2 ? "lemma2" : "theorem1", p);
    DoubleOracleOptions o;
    o.exhaustive_best_response = true;
    const auto r = double_oracle(inst, o);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value.value, oracle::exact_p2(inst).value, 1e-6) << inst.id;
    for (std::size_t k = 1; k < r.value_history.size(); ++k) {
      EXPECT_GE(r.value_history[k], r.value_history[k - 1] - 1e-9);
    }
    EXPECT_NEAR(r.policy.total(), 1.0, 1e-9);
    EXPECT_NO_THROW(r.policy.validate(inst.constraint));
  }
}

TEST(OneOverMPropertyTest, MeetsAlphaOverMOfExactOptimum) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GenParams p;
    p.seed = seed;
    const Instance inst = generate_instance("lemma2", p);
    const auto r = sigma_one_over_m(inst);
    EXPECT_GE(r.value.value, 0.5 / inst.m() * oracle::exact_p2(inst).value - 1e-9) << inst.id;
    EXPECT_NEAR(r.policy.total(), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace aro

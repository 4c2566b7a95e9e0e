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

#include "aro/oracle.hpp"

#include "aro/generate.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace aro {
namespace {

TEST(ExactP2Test, DisjointSingletons) {
  const auto r = oracle::exact_p2(testing::ab_instance());
  EXPECT_NEAR(r.value, 0.5, 1e-9);
  EXPECT_EQ(r.enumerated, 3u);
}

TEST(ExactP2Test, SingleObjectiveIsBestSet) {
  const Instance inst = testing::modular_instance({{3, 2, 1}}, FeasibleFamily::uniform(3, 2));
  EXPECT_NEAR(oracle::exact_p2(inst).value, 5.0, 1e-9);
}

TEST(ExactP2Test, OnlyEmptySetFeasible) {
  const RewardFunction offset = CustomReward{
      [](std::span<const Observation> x) { return 1.5 + x.size(); }, "offset"};
  ModularReward w{{{1.0}}};
  const Instance inst(GroundSet::deterministic(1),
                      {NearlySubmodularPair::submodular(offset),
                       NearlySubmodularPair::submodular(w)},
                      FeasibleFamily::uniform(1, 0));
  EXPECT_NEAR(oracle::exact_p2(inst).value, 0.0, 1e-12);
  EXPECT_NEAR(oracle::exact_p1_fractional(inst).value, 0.0, 1e-12);
}

TEST(ExactP1Test, EqualsP2OnMonotoneInstances) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams p;
    p.seed = seed;
    const Instance inst = generate_instance("theorem1", p);
    EXPECT_NEAR(oracle::exact_p1_fractional(inst).value, oracle::exact_p2(inst).value, 1e-9);
  }
}

TEST(ExactP1Test, AllZeroObjectives) {
  const Instance inst = testing::modular_instance({{0, 0}, {0, 0}}, FeasibleFamily::uniform(2, 1));
  EXPECT_NEAR(oracle::exact_p1_fractional(inst).value, 0.0, 1e-12);
}

TEST(ExactP1Test, SingleFeasibleSet) {
  const RewardFunction offset = CustomReward{
      [](std::span<const Observation> x) { return 2.0 + x.size(); }, "offset"};
  const Instance inst(GroundSet::deterministic(1), {NearlySubmodularPair::submodular(offset)},
                      FeasibleFamily::uniform(1, 0));
  EXPECT_NEAR(oracle::exact_p1_fractional(inst).value, 2.0, 1e-9);
}

TEST(ExactAdaptiveTest, SharedVectors) {
  EXPECT_NEAR(oracle::exact_adaptive(testing::ab_instance()).value, 0.5, 1e-9);
  EXPECT_NEAR(oracle::exact_adaptive(testing::probing_gap_instance()).value, 2.0, 1e-9);
  const Instance det =
      testing::modular_instance({{3, 1, 2}}, FeasibleFamily::uniform(3, 2));
  EXPECT_NEAR(oracle::exact_adaptive(det).value, 5.0, 1e-9);
}

TEST(OracleChainTest, AdaptiveAtLeastP2AtLeastBound) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GenParams p;
    p.seed = seed;
    const Instance inst = generate_instance("theorem1", p);
    const double a = oracle::exact_adaptive(inst).value;
    const double n = oracle::exact_p2(inst).value;
    const double eps = inst.epsilon();
    EXPECT_GE(a, n - 1e-9) << inst.id;
    EXPECT_GE(n, eps * eps / 2.0 * a - 1e-9) << inst.id;
    if (eps == 1.0) {
      EXPECT_GE(n, 0.5 * a - 1e-9) << inst.id;
    }
  }
}

TEST(OracleChainTest, AgreesWithPolicyModule) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams p;
    p.seed = seed;
    const Instance inst = generate_instance("theorem1", p);
    EXPECT_NEAR(oracle::exact_adaptive(inst).value, optimal_adaptive_value(inst).value, 1e-9);
    EXPECT_NEAR(oracle::exact_p2(inst).value, optimal_nonadaptive_value(inst).value, 1e-9);
  }
}

}  // namespace
}  // namespace aro

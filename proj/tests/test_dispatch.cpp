// Copyright 2026 The RRUC Authors
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

#include <gtest/gtest.h>

#include "rruc/dispatch.hpp"
#include "support/oracles.hpp"

namespace rruc {
namespace {

DispatchProblem symmetric_pair() {
  DispatchUnit u{{0.01, 10.0, 100.0}, 10.0, 100.0, 0.0};
  return {{u, u}, 120.0};
}

TEST(EconomicDispatch, SymmetricPairSplitsEvenly) {
  const auto pb = symmetric_pair();
  const Dispatch d = economic_dispatch(pb);
  ASSERT_TRUE(d.feasible);
  EXPECT_NEAR(d.outputs[0], 60.0, 1e-9);
  EXPECT_NEAR(d.outputs[1], 60.0, 1e-9);
  EXPECT_NEAR(d.lambda, 11.2, 1e-9);
  EXPECT_NEAR(d.objective, 1472.0, 1e-7);
}

TEST(EconomicDispatch, FloorOverSatisfiesDemand) {
  const DispatchProblem pb{{{{0.01, 10, 0}, 50.0, 100.0, 0.0}}, 30.0};
  const Dispatch d = economic_dispatch(pb);
  ASSERT_TRUE(d.feasible);
  EXPECT_EQ(d.outputs[0], 50.0);
  EXPECT_TRUE(verify_kkt_dispatch(pb, d, 1e-9));
}

TEST(EconomicDispatch, InsufficientCapacityIsInfeasible) {
  const DispatchProblem pb{{{{0.01, 10, 0}, 10.0, 100.0, 0.0}}, 130.0};
  const Dispatch d = economic_dispatch(pb);
  EXPECT_FALSE(d.feasible);
  EXPECT_EQ(d.outputs[0], 100.0);
}

TEST(EconomicDispatch, EmptyUnitListRejected) {
  EXPECT_THROW(economic_dispatch(DispatchProblem{{}, 10.0}), ArgumentError);
}

TEST(EconomicDispatch, StartPenaltiesAddToObjective) {
  auto pb = symmetric_pair();
  pb.units[1].start_penalty = 250.0;
  EXPECT_NEAR(economic_dispatch(pb).objective, 1472.0 + 250.0, 1e-7);
}

TEST(EconomicDispatch, FlatUnitsFillByLowestIndex) {
  const DispatchUnit flat{{0.0, 10.0, 0.0}, 0.0, 100.0, 0.0};
  const DispatchProblem pb{{flat, flat, {{0.0, 30.0, 0.0}, 0.0, 100.0, 0.0}}, 150.0};
  const Dispatch d = economic_dispatch(pb);
  ASSERT_TRUE(d.feasible);
  EXPECT_NEAR(d.outputs[0], 100.0, 1e-9);
  EXPECT_NEAR(d.outputs[1], 50.0, 1e-9);
  EXPECT_EQ(d.outputs[2], 0.0);
  EXPECT_NEAR(d.lambda, 10.0, 1e-9);
  EXPECT_TRUE(verify_kkt_dispatch(pb, d, 1e-9));
}

TEST(EconomicDispatch, MixedFlatAndQuadratic) {
  const DispatchProblem pb{{{{0.0, 20.0, 0.0}, 0.0, 50.0, 0.0}, {{0.05, 10.0, 0.0}, 0.0, 200.0, 0.0}}, 180.0};
  const Dispatch d = economic_dispatch(pb);
  // At price 20 the pair supplies only 150, so the flat unit saturates and the quadratic one covers the rest.
  EXPECT_NEAR(d.outputs[0], 50.0, 1e-9);
  EXPECT_NEAR(d.outputs[1], 130.0, 1e-6);
  EXPECT_NEAR(d.lambda, 23.0, 1e-6);
  EXPECT_TRUE(verify_kkt_dispatch(pb, d, 1e-6));
}

TEST(EconomicDispatch, HeterogeneousTripleMatchesGridSearch) {
  SplitMix rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pb = testing::random_dispatch_problem(rng, 3);
    const Dispatch d = economic_dispatch(pb);
    const auto ref = testing::grid_search_dispatch(pb.units, pb.demand);
    ASSERT_TRUE(d.feasible);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(d.outputs[j], ref.outputs[j], 0.05);
    EXPECT_NEAR(d.objective, ref.objective, 1e-4 * ref.objective);
    double total = 0;
    for (double p : d.outputs) total += p;
    EXPECT_NEAR(total, pb.demand, 1e-6 * pb.demand);
  }
}

TEST(VerifyKkt, AcceptsOptimumAndRejectsPerturbation) {
  const auto pb = symmetric_pair();
  Dispatch d = economic_dispatch(pb);
  EXPECT_TRUE(verify_kkt_dispatch(pb, d, 1e-6));
  d.outputs[0] += 1.0;
  EXPECT_FALSE(verify_kkt_dispatch(pb, d, 1e-6));
}

TEST(VerifyKkt, GridOracleSolutionsPass) {
  SplitMix rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pb = testing::random_dispatch_problem(rng, 2 + trial % 6);
    const auto ref = testing::grid_search_dispatch(pb.units, pb.demand);
    const Dispatch as_dispatch{ref.outputs, ref.lambda, ref.objective, true};
    EXPECT_TRUE(verify_kkt_dispatch(pb, as_dispatch, 1e-3)) << "trial " << trial;
  }
}

// Property: supply is nondecreasing in lambda.
TEST(EconomicDispatch, SupplyMonotoneInPrice) {
  SplitMix rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto pb = testing::random_dispatch_problem(rng, 8);
    pb.units[0].cost.a = 0.0;
    double prev = -1.0;
    for (double lam = 0.0; lam <= 120.0; lam += 0.37) {
      const double s = supply_at(pb.units, lam);
      ASSERT_GE(s, prev);
      prev = s;
    }
  }
}

// Property: no feasible point sampled from the box beats the dispatch.
TEST(EconomicDispatch, NoSampledFeasiblePointIsCheaper) {
  SplitMix rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pb = testing::random_dispatch_problem(rng, 4);
    const Dispatch d = economic_dispatch(pb);
    int accepted = 0;
    while (accepted < 1000) {
      std::vector<double> p(pb.units.size());
      double total = 0;
      for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = rng.uniform(pb.units[j].lower, pb.units[j].upper);
        total += p[j];
      }
      if (total < pb.demand) continue;
      ++accepted;
      double obj = 0;
      for (std::size_t j = 0; j < p.size(); ++j) obj += pb.units[j].cost(p[j]);
      ASSERT_LE(d.objective, obj + 1e-9 * obj);
    }
  }
}

TEST(EconomicDispatch, Deterministic) {
  SplitMix rng(1);
  const auto pb = testing::random_dispatch_problem(rng, 12);
  const Dispatch a = economic_dispatch(pb), b = economic_dispatch(pb);
  EXPECT_EQ(a.outputs, b.outputs);
  EXPECT_EQ(a.objective, b.objective);
}

}  // namespace
}  // namespace rruc

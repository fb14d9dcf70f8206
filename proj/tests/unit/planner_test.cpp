// SPDX-License-Identifier: Apache-2.0
#include "offsim/planner.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include <gtest/gtest.h>

#include "offsim/errors.hpp"
#include "oracle/reference_model.hpp"
#include "support/test_support.hpp"

namespace offsim {
namespace {

const SystemProfile& def() { return default_profile(); }

std::vector<ExecutionPlan> plans_of(const std::vector<CostReport>& rows) {
  std::vector<ExecutionPlan> out;
  for (const auto& r : rows) out.push_back(r.plan);
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<std::vector<Axis>>& axis_sets() {
  static const std::vector<std::vector<Axis>> sets = {
      {Axis::kDelay, Axis::kEnergy},
      {Axis::kDelay, Axis::kNegAccuracy},
      {Axis::kEnergy, Axis::kNegAccuracy},
      {Axis::kDelay, Axis::kEnergy, Axis::kNegAccuracy},
  };
  return sets;
}

TEST(Sweep, DefaultGrid) {
  const SweepResult s = sweep(def());
  ASSERT_EQ(s.rows.size(), 30u);
  for (std::size_t i = 1; i < s.rows.size(); ++i) EXPECT_LT(s.rows[i - 1].plan, s.rows[i].plan);
  EXPECT_NEAR(s.at(5, 0).delay.t_total * 1e3, 196.91, 5e-3);
  EXPECT_EQ(s.at(3, 2).plan, (ExecutionPlan{3, 2}));
  EXPECT_THROW(s.at(6, 0), DomainError);
}

TEST(ParetoFront, DelayAccuracyContainsFullOffloadAtMainExit) {
  const std::array axes{Axis::kDelay, Axis::kNegAccuracy};
  const auto front = plans_of(pareto_front(sweep(def()), axes));
  EXPECT_NE(std::find(front.begin(), front.end(), ExecutionPlan{5, 0}), front.end());
}

TEST(ParetoFront, SingletonAndTies) {
  SweepResult one;
  one.rows.push_back(evaluate_plan({2, 1}, def()));
  const std::array axes{Axis::kDelay, Axis::kEnergy};
  EXPECT_EQ(pareto_front(one, axes).size(), 1u);

  SweepResult twins;
  twins.rows = {evaluate_plan({1, 2}, def()), evaluate_plan({1, 3}, def())};
  EXPECT_EQ(pareto_front(twins, axes).size(), 2u);
}

TEST(ParetoFront, RejectsDegenerateInput) {
  const std::array two{Axis::kDelay, Axis::kEnergy};
  const std::array one{Axis::kDelay};
  EXPECT_THROW(pareto_front(SweepResult{}, two), DomainError);
  EXPECT_THROW(pareto_front(sweep(def()), one), DomainError);
}

TEST(ParetoFront, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed <= 100; ++seed) {
    const SystemProfile p = seed == 0 ? def() : testing::random_profile(seed);
    for (auto mode : {ModelMode::kRefined, ModelMode::kIdealized}) {
      const SweepResult s = sweep(p, mode);
      for (const auto& axes : axis_sets()) {
        EXPECT_EQ(plans_of(pareto_front(s, axes)), plans_of(testing::brute_force_front(s.rows, axes)))
            << "seed " << seed;
      }
    }
  }
}

TEST(Optimize, MinDelayWithAccuracyFloor) {
  Constraint c;
  c.min_accuracy = 0.90;
  const CostReport r = optimize(def(), Objective::min_delay(), c);
  EXPECT_EQ(r.plan, (ExecutionPlan{5, 0}));
  EXPECT_NEAR(r.delay.t_total * 1e3, 196.91, 5e-3);
}

TEST(Optimize, InfeasibleNamesConstraint) {
  Constraint c;
  c.min_accuracy = 0.99;
  try {
    optimize(def(), Objective::min_delay(), c);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.constraint(), "min_accuracy");
    EXPECT_NE(std::string(e.what()).find("0.93"), std::string::npos) << e.what();
  }
}

TEST(Optimize, TightestOfSeveral) {
  Constraint c;
  c.min_accuracy = 0.9;
  c.max_delay = 0.150;  // satisfiable alone, but not at exit 5
  try {
    optimize(def(), Objective::min_energy(), c);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_TRUE(e.constraint() == "min_accuracy" || e.constraint() == "max_delay");
  }
  c.max_delay = 0.001;  // unsatisfiable on its own
  try {
    optimize(def(), Objective::min_energy(), c);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.constraint(), "max_delay");
  }
}

TEST(Optimize, MinEnergyIsGlobalMinimumWithDeterministicTieBreak) {
  const SweepResult s = sweep(def());
  double best = s.rows.front().energy.e_total;
  for (const auto& r : s.rows) best = std::min(best, r.energy.e_total);
  const CostReport r = optimize(s, Objective::min_energy(), {});
  EXPECT_EQ(r.energy.e_total, best);
  EXPECT_NEAR(r.energy.e_total, oracle::kMinEnergyJ, 1e-8);
  EXPECT_EQ(r.plan, (ExecutionPlan{1, 1}));
}

TEST(Optimize, WeightedEndpointsAgreeWithSingleObjectives) {
  const SweepResult s = sweep(def());
  EXPECT_EQ(optimize(s, Objective::weighted(1, 0), {}).plan, optimize(s, Objective::min_delay(), {}).plan);
  EXPECT_EQ(optimize(s, Objective::weighted(0, 1), {}).plan, optimize(s, Objective::min_energy(), {}).plan);
  EXPECT_THROW(optimize(s, Objective::weighted(0, 0), {}), ValidationError);
  EXPECT_THROW(optimize(s, Objective::weighted(-1, 2), {}), ValidationError);
  Constraint bad;
  bad.min_accuracy = 1.2;
  EXPECT_THROW(optimize(s, Objective::min_delay(), bad), ValidationError);
}

TEST(Optimize, ResultLiesOnImpliedFront) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed <= 100; ++seed) {
    const SystemProfile p = seed == 0 ? def() : testing::random_profile(seed);
    const SweepResult s = sweep(p);
    const Objective objectives[] = {Objective::min_delay(), Objective::min_energy(),
                                    Objective::weighted(u(rng), u(rng) + 0.01)};
    for (const auto& obj : objectives) {
      Constraint c;
      if (u(rng) < 0.5) c.min_accuracy = u(rng) * 0.8;
      if (u(rng) < 0.3) c.max_energy = 5.0;
      CostReport r;
      try {
        r = optimize(s, obj, c);
      } catch (const InfeasibleError&) {
        continue;
      }
      // A row dominating a feasible row is itself feasible, so the whole
      // sweep's front is the reference.
      const auto front = plans_of(testing::brute_force_front(s.rows, implied_axes(obj, c)));
      EXPECT_NE(std::find(front.begin(), front.end(), r.plan), front.end()) << "seed " << seed;
    }
  }
}

TEST(Optimize, RaisingAccuracyFloorNeverLowersDelay) {
  for (std::uint64_t seed = 0; seed <= 30; ++seed) {
    const SystemProfile p = seed == 0 ? def() : testing::random_profile(seed);
    const SweepResult s = sweep(p);
    double last = 0.0;
    for (double floor = 0.0; floor <= 1.0; floor += 0.05) {
      Constraint c;
      c.min_accuracy = floor;
      try {
        const double d = optimize(s, Objective::min_delay(), c).delay.t_total;
        EXPECT_GE(d, last);
        last = d;
      } catch (const InfeasibleError&) {
        break;
      }
    }
  }
}

TEST(Optimize, ExitInvariantUnderDelayRescaling) {
  for (double k : {0.25, 0.5, 2.0, 7.0}) {
    SystemProfile p = def();
    p.network.d_ul_ms *= k;
    p.network.d_dl_ms *= k;
    p.network.b_ul_mbps /= k;
    p.network.b_dl_mbps /= k;
    p.compute.d_dev_ms *= k;
    p.compute.d_mec_ms *= k;
    p.compute.d_prep_ms *= k;
    p.compute.k_prep /= k;
    p.compute.c_dev_gflops /= k;
    p.compute.c_mec_gflops /= k;
    for (double floor : {0.3, 0.5, 0.8, 0.85, 0.9}) {
      Constraint c;
      c.min_accuracy = floor;
      EXPECT_EQ(optimize(p, Objective::min_delay(), c).plan.exit, optimize(def(), Objective::min_delay(), c).plan.exit)
          << k << " " << floor;
    }
  }
}

TEST(BindingConstraints, ReportsOnlyConstraintsThatMoveTheOptimum) {
  const SweepResult s = sweep(def());
  Constraint c;
  c.min_accuracy = 0.9;
  c.max_energy = 10.0;
  const auto binding = binding_constraints(s, Objective::min_energy(), c);
  ASSERT_EQ(binding.size(), 1u);
  EXPECT_EQ(binding[0], "min_accuracy");
  EXPECT_TRUE(binding_constraints(s, Objective::min_delay(), {}).empty());
}

}  // namespace
}  // namespace offsim

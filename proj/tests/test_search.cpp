// Copyright 2026 The advrisk Authors
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

#include "advrisk/search.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "advrisk/error.hpp"
#include "oracle/oracle.hpp"
#include "test_support.hpp"

namespace advrisk {
namespace {

using IndexSet = std::set<std::vector<std::uint32_t>>;

IndexSet contents(const ConfigurationPool& pool) {
  IndexSet out;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const IndexSpan m = pool.members(j);
    out.emplace(m.begin(), m.end());
  }
  return out;
}

// Power-set enumeration followed by the dense tableau solver.
double oracle_objective(const oracle::Instance& in, double eps, bool chebyshev) {
  const auto cols = oracle::feasible_configurations(in, eps, chebyshev);
  return oracle::dense_lp(in.points.size(), cols, std::vector<double>(cols.size(), 1.0),
                          std::vector<double>(in.points.size(), 1.0))
      .objective;
}

double exhaustive_objective(const LabeledDataset& ds, Metric metric, double eps) {
  const ConfigurationPool pool = exhaustive_search(ds, metric, eps);
  return solve_pool(pool, ds.size()).objective;
}

TEST(Exhaustive, TinyBudgetGivesSingletons) {
  const LabeledDataset ds = testing::desk_532();
  const ConfigurationPool pool = exhaustive_search(ds, Metric::kEuclidean, 0.01);
  EXPECT_EQ(pool.size(), ds.size());
  const LpSolution s = solve_pool(pool, ds.size());
  EXPECT_EQ(risk_from_objective(s.objective, ds.size()), 0.0);
}

TEST(Exhaustive, TwoPoints) {
  const LabeledDataset ds = testing::two_points();
  const ConfigurationPool pool = exhaustive_search(ds, Metric::kEuclidean, 1.0);
  EXPECT_EQ(contents(pool), (IndexSet{{0}, {1}, {0, 1}}));
  EXPECT_NEAR(risk_from_objective(solve_pool(pool, 2).objective, 2), 0.5, 1e-12);
}

TEST(Exhaustive, SameClassPointsNeverCombine) {
  const LabeledDataset ds = testing::make_dataset({{0.0}, {0.1}, {0.2}}, {0, 0, 0});
  EXPECT_EQ(exhaustive_search(ds, Metric::kEuclidean, 10.0).size(), 3u);
}

TEST(Exhaustive, MatchesPowerSetOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const bool chebyshev = trial % 3 == 2;
    const oracle::Instance in = oracle::random_instance(rng, 12, 2 + trial % 3, 2, 1.0);
    const double eps = 0.1 + 0.05 * (trial % 6);
    const LabeledDataset ds = testing::to_dataset(in);
    const Metric metric = chebyshev ? Metric::kChebyshev : Metric::kEuclidean;
    const auto expected = oracle::feasible_configurations(in, eps, chebyshev);
    const ConfigurationPool pool = exhaustive_search(ds, metric, eps);
    EXPECT_EQ(contents(pool), IndexSet(expected.begin(), expected.end())) << "trial " << trial;
    EXPECT_EQ(pool.size(), expected.size());
    EXPECT_NEAR(solve_pool(pool, ds.size()).objective, oracle_objective(in, eps, chebyshev), 1e-8);
  }
}

TEST(Exhaustive, ThreadCountDoesNotChangeThePool) {
  std::mt19937_64 rng(32);
  const LabeledDataset ds = testing::to_dataset(oracle::random_instance(rng, 60, 4, 2, 1.0));
  ExhaustiveOptions one;
  one.threads = 1;
  ExhaustiveOptions four;
  four.threads = 4;
  const ConfigurationPool a = exhaustive_search(ds, Metric::kEuclidean, 0.2, one);
  const ConfigurationPool b = exhaustive_search(ds, Metric::kEuclidean, 0.2, four);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_TRUE(std::ranges::equal(a.members(j), b.members(j)));
  }
}

TEST(Exhaustive, CountsGrowWithBudget) {
  std::mt19937_64 rng(33);
  const LabeledDataset ds = testing::to_dataset(oracle::random_instance(rng, 80, 5, 2, 1.0));
  std::size_t previous = 0;
  double previous_risk = 0.0;
  for (const double eps : {0.02, 0.05, 0.1, 0.15, 0.2}) {
    const ConfigurationPool pool = exhaustive_search(ds, Metric::kEuclidean, eps);
    EXPECT_GE(pool.size(), previous);
    const double risk = risk_from_objective(solve_pool(pool, ds.size()).objective, ds.size());
    EXPECT_GE(risk, previous_risk - 1e-9);
    previous = pool.size();
    previous_risk = risk;
  }
}

TEST(Exhaustive, CapAborts) {
  const LabeledDataset ds = testing::desk_532();
  ExhaustiveOptions opts;
  opts.max_configs = 12;
  EXPECT_THROW(exhaustive_search(ds, Metric::kEuclidean, 5.0, opts), EnumerationCapExceeded);
  EXPECT_THROW(exhaustive_search(ds, Metric::kEuclidean, 0.0), InvalidArgument);
}

TEST(RuleWeights, Parse) {
  const RuleWeights w = parse_rule_weights("1:2.5:0");
  EXPECT_EQ(w.add, 1.0);
  EXPECT_EQ(w.swap, 2.5);
  EXPECT_EQ(w.drop, 0.0);
  EXPECT_THROW(parse_rule_weights("1:1"), InvalidArgument);
  EXPECT_THROW(parse_rule_weights("1:x:0"), InvalidArgument);
  EXPECT_THROW(parse_rule_weights("0:0:0"), InvalidArgument);
  EXPECT_THROW(parse_rule_weights("-1:1:0"), InvalidArgument);
}

TEST(Sampler, DropOnPair) {
  const LabeledDataset ds = testing::desk_532();
  const OffspringSampler sampler(ds);
  std::mt19937_64 rng(1);
  const Configuration parent{0, 6};
  std::set<Configuration> seen;
  for (int k = 0; k < 100; ++k) {
    const auto child = sampler.propose(parent.indices(), Rule::kDrop, rng);
    ASSERT_TRUE(child.has_value());
    seen.insert(*child);
  }
  EXPECT_EQ(seen, (std::set<Configuration>{Configuration{0}, Configuration{6}}));
  EXPECT_FALSE(sampler.propose(Configuration{3}.indices(), Rule::kDrop, rng).has_value());
}

TEST(Sampler, AddOnFullParentIsImpossible) {
  const LabeledDataset ds = testing::desk_532();
  const OffspringSampler sampler(ds);
  std::mt19937_64 rng(2);
  EXPECT_FALSE(sampler.propose(Configuration{0, 5, 8}.indices(), Rule::kAdd, rng).has_value());
}

TEST(Sampler, OffspringHaveDistinctClasses) {
  std::mt19937_64 rng(3);
  const LabeledDataset ds = testing::to_dataset(oracle::random_instance(rng, 40, 5, 2, 1.0));
  const OffspringSampler sampler(ds);
  std::uniform_int_distribution<PointIndex> point(0, 39);
  for (int k = 0; k < 3000; ++k) {
    const Configuration parent{point(rng)};
    std::optional<Configuration> child = parent;
    for (int step = 0; step < 4 && child; ++step) {
      const Rule rule = static_cast<Rule>(k % 3);
      const auto next = sampler.propose(child->indices(), rule, rng);
      if (!next) break;
      std::set<ClassId> classes;
      for (const PointIndex i : next->indices()) classes.insert(ds.label(i));
      ASSERT_EQ(classes.size(), next->size());
      if (rule == Rule::kAdd) EXPECT_EQ(next->size(), child->size() + 1);
      if (rule == Rule::kSwap) {
        EXPECT_EQ(next->size(), child->size());
        EXPECT_NE(*next, *child);
      }
      if (rule == Rule::kDrop) EXPECT_EQ(next->size() + 1, child->size());
      child = next;
    }
  }
}

TEST(Sampler, AddIsUniformOverForeignPoints) {
  // Parent {0} of class 0; foreign points are 5..9 (five of them).
  const LabeledDataset ds = testing::desk_532();
  const OffspringSampler sampler(ds);
  std::mt19937_64 rng(4);
  std::vector<int> hits(10, 0);
  const int draws = 50000;
  for (int k = 0; k < draws; ++k) {
    const auto child = sampler.propose(Configuration{0}.indices(), Rule::kAdd, rng);
    ASSERT_TRUE(child.has_value());
    hits[child->indices()[1]]++;
  }
  for (int i = 1; i < 5; ++i) EXPECT_EQ(hits[i], 0);
  for (int i = 5; i < 10; ++i) EXPECT_NEAR(hits[i], draws / 5.0, 0.05 * draws / 5.0);
}

TEST(Sampler, RuleDrawFollowsWeights) {
  const LabeledDataset ds = testing::desk_532();
  const OffspringSampler sampler(ds);
  std::mt19937_64 rng(5);
  std::vector<int> hits(3, 0);
  for (int k = 0; k < 40000; ++k) hits[static_cast<int>(sampler.draw_rule({1, 3, 0}, rng))]++;
  EXPECT_EQ(hits[2], 0);
  EXPECT_NEAR(hits[0] / 40000.0, 0.25, 0.01);
}

GeneticParams quick_params(std::uint64_t seed) {
  GeneticParams p;
  p.seed = seed;
  p.time_limit = 30.0;
  p.stagnation_generations = 20;
  return p;
}

TEST(Genetic, TinyBudgetKeepsRiskZero) {
  const LabeledDataset ds = testing::desk_532();
  const GeneticResult r = genetic_search(ds, Metric::kEuclidean, 0.01, quick_params(1));
  EXPECT_EQ(r.risk(ds.size()), 0.0);
  EXPECT_EQ(r.pool.size(), ds.size());
  EXPECT_EQ(r.stop, StopReason::kStagnation);
}

TEST(Genetic, TwoPointsAddOnly) {
  const LabeledDataset ds = testing::two_points();
  GeneticParams p = quick_params(2);
  p.rule_weights = {1, 0, 0};
  p.stagnation_generations = 3;
  const GeneticResult r = genetic_search(ds, Metric::kEuclidean, 1.0, p);
  EXPECT_NEAR(r.risk(2), 0.5, 1e-12);
  EXPECT_TRUE(r.pool.contains(Configuration{0, 1}));
  // The pair is found by the first generation.
  ASSERT_GE(r.trace.records().size(), 2u);
  EXPECT_NEAR(r.trace.records()[1].risk, 0.5, 1e-12);
}

TEST(Genetic, SoundLowerBoundAndMonotoneTrace) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const bool chebyshev = trial % 4 == 3;
    const Metric metric = chebyshev ? Metric::kChebyshev : Metric::kEuclidean;
    const oracle::Instance in = oracle::random_instance(rng, 12, 3, 2, 1.0);
    const LabeledDataset ds = testing::to_dataset(in);
    const double eps = 0.2 + 0.05 * (trial % 3);
    const GeneticResult r = genetic_search(ds, metric, eps, quick_params(trial));
    for (std::size_t j = 0; j < r.pool.size(); ++j) {
      const IndexSpan m = r.pool.members(j);
      EXPECT_TRUE(is_feasible(m, ds));
      EXPECT_TRUE(within_budget(configuration_radius(m, ds, metric), eps));
    }
    EXPECT_LE(r.solution.support.size(), ds.size());
    EXPECT_TRUE(r.trace.objective_nonincreasing());
    for (std::size_t k = 1; k < r.trace.records().size(); ++k) {
      EXPECT_GE(r.trace.records()[k].risk, r.trace.records()[k - 1].risk - 1e-9);
    }
    const double exact = risk_from_objective(oracle_objective(in, eps, chebyshev), 12);
    EXPECT_LE(r.risk(12), exact + 1e-8);
  }
}

TEST(Genetic, NearOptimalOnDeskInstances) {
  std::mt19937_64 rng(42);
  int close = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::Instance in = oracle::random_instance(rng, 12, 3, 2, 1.0);
    const LabeledDataset ds = testing::to_dataset(in);
    const double exact = oracle_objective(in, 0.3, false);
    GeneticParams p = quick_params(100 + trial);
    p.max_proposals = 10'000;
    p.stagnation_generations = 1000;
    const GeneticResult r = genetic_search(ds, Metric::kEuclidean, 0.3, p);
    EXPECT_GE(r.solution.objective, exact - 1e-8);
    if (r.solution.objective <= exact * 1.01) ++close;
  }
  EXPECT_GE(close, 9);
}

TEST(Genetic, StopsAtTarget) {
  std::mt19937_64 rng(43);
  const oracle::Instance in = oracle::random_instance(rng, 12, 3, 2, 1.0);
  const LabeledDataset ds = testing::to_dataset(in);
  const double exact = exhaustive_objective(ds, Metric::kEuclidean, 0.3);
  GeneticParams p = quick_params(7);
  p.target_objective = exact;
  p.stagnation_generations = 100000;
  p.max_generations = 100000;
  const GeneticResult r = genetic_search(ds, Metric::kEuclidean, 0.3, p);
  EXPECT_EQ(r.stop, StopReason::kTargetReached);
  EXPECT_TRUE(r.converged());
  EXPECT_NEAR(r.solution.objective, exact, 1e-8);
}

TEST(Genetic, BudgetsStopTheSearch) {
  const LabeledDataset ds = testing::desk_532();
  GeneticParams p = quick_params(8);
  p.stagnation_generations = 100000;
  p.max_generations = 3;
  const GeneticResult a = genetic_search(ds, Metric::kEuclidean, 0.6, p);
  EXPECT_EQ(a.stop, StopReason::kGenerationLimit);
  EXPECT_EQ(a.generations, 3u);
  EXPECT_FALSE(a.converged());
  p.max_generations = 0;
  p.max_proposals = 50;
  const GeneticResult b = genetic_search(ds, Metric::kEuclidean, 0.6, p);
  EXPECT_EQ(b.stop, StopReason::kProposalBudget);
  EXPECT_GE(b.proposals, 50u);
}

TEST(Genetic, SeedDeterminism) {
  std::mt19937_64 rng(44);
  const LabeledDataset ds = testing::to_dataset(oracle::random_instance(rng, 40, 4, 2, 1.0));
  GeneticParams p = quick_params(9);
  p.max_generations = 15;
  const GeneticResult a = genetic_search(ds, Metric::kEuclidean, 0.25, p);
  const GeneticResult b = genetic_search(ds, Metric::kEuclidean, 0.25, p);
  EXPECT_EQ(a.solution.objective, b.solution.objective);
  ASSERT_EQ(a.pool.size(), b.pool.size());
  for (std::size_t j = 0; j < a.pool.size(); ++j) {
    EXPECT_TRUE(std::ranges::equal(a.pool.members(j), b.pool.members(j)));
  }
}

TEST(Genetic, ParameterValidation) {
  const LabeledDataset ds = testing::desk_532();
  GeneticParams p;
  p.time_limit = 0.0;
  EXPECT_THROW(genetic_search(ds, Metric::kEuclidean, 0.5, p), InvalidArgument);
  p = GeneticParams{};
  p.rule_weights = {0, 0, 0};
  EXPECT_THROW(genetic_search(ds, Metric::kEuclidean, 0.5, p), InvalidArgument);
  EXPECT_THROW(genetic_search(ds, Metric::kEuclidean, -1.0, GeneticParams{}), InvalidArgument);
}

}  // namespace
}  // namespace advrisk

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

#include "advrisk/lp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "advrisk/error.hpp"
#include "oracle/oracle.hpp"

namespace advrisk {
namespace {

using Columns = std::vector<std::vector<PointIndex>>;

struct Instance {
  std::size_t n = 0;
  ColumnStore store;
  Columns columns;
  std::vector<double> costs;

  Instance(std::size_t n_points, Columns cols, std::vector<double> c)
      : n(n_points), columns(std::move(cols)), costs(std::move(c)) {
    for (std::size_t j = 0; j < columns.size(); ++j) store.push_back(columns[j], costs[j]);
  }
  ReducedProblem problem() const { return ReducedProblem::unit_mass(n, store.view()); }
};

// The optimality conditions every returned solution must meet.
void expect_certified(const ReducedProblem& problem, const LpSolution& s) {
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  const SolutionCheck c = check_solution(problem, s);
  EXPECT_LE(c.support_size, problem.n_points);
  EXPECT_LE(c.primal_residual, 1e-8);
  EXPECT_LE(c.dual_violation, 1e-8);
  EXPECT_LE(c.duality_gap, 1e-8 * (1.0 + std::abs(s.objective)));
  EXPECT_LE(c.slackness, 1e-8);
  if (c.support_size > 0) EXPECT_GT(c.min_weight, 0.0);
}

TEST(Solve, ForcedSingletons) {
  const Instance in(2, {{0}, {1}}, {1, 1});
  const LpSolution s = solve(in.problem());
  expect_certified(in.problem(), s);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);
  ASSERT_EQ(s.support.size(), 2u);
  EXPECT_NEAR(s.support[0].weight, 1.0, 1e-12);
  EXPECT_NEAR(s.support[1].weight, 1.0, 1e-12);
}

TEST(Solve, PairColumnWins) {
  const Instance in(2, {{0}, {1}, {0, 1}}, {1, 1, 1});
  const LpSolution s = solve(in.problem());
  expect_certified(in.problem(), s);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
  ASSERT_EQ(s.support.size(), 1u);
  EXPECT_EQ(s.support[0].configuration, (Configuration{0, 1}));
  EXPECT_NEAR(s.support[0].weight, 1.0, 1e-12);
  // Dual: sum u = 1, u_1 + u_2 <= 1, u_i <= 1.
  EXPECT_NEAR(s.dual[0] + s.dual[1], 1.0, 1e-12);
  EXPECT_LE(s.dual[0], 1.0 + 1e-12);
  EXPECT_LE(s.dual[1], 1.0 + 1e-12);
}

TEST(Solve, SharedPointInstance) {
  // Labels (A, A, B): configurations {0},{1},{2},{0,2},{1,2}.
  const Instance in(3, {{0}, {1}, {2}, {0, 2}, {1, 2}}, {1, 1, 1, 1, 1});
  const LpSolution s = solve(in.problem());
  expect_certified(in.problem(), s);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);
}

TEST(Solve, InfeasibleWhenARowIsUncovered) {
  const Instance in(3, {{0}, {0, 1}}, {1, 1});
  EXPECT_EQ(solve(in.problem()).status, LpStatus::kInfeasible);
}

TEST(Solve, InconsistentRowsAreInfeasible) {
  // g0 covers rows {0,1}: row 0 needs 1, row 1 needs 1 but row 1 is also in
  // g1 = {1,2} while row 2 has only g1: g1 = 1 forces row 1 to 2.
  const Instance in(3, {{0, 1}, {1, 2}}, {1, 1});
  EXPECT_EQ(solve(in.problem()).status, LpStatus::kInfeasible);
}

TEST(Solve, PhaseOneWithoutSingletons) {
  const Instance in(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}}, {1, 2, 1, 1});
  const LpSolution s = solve(in.problem());
  expect_certified(in.problem(), s);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);
}

TEST(Solve, IterationLimit) {
  const Instance in(2, {{0}, {1}, {0, 1}}, {1, 1, 1});
  SimplexOptions opts;
  opts.max_iterations = 0;
  EXPECT_EQ(solve(in.problem(), opts).status, LpStatus::kIterationLimit);
}

TEST(Solve, ValidationErrors) {
  const Instance ok(2, {{0}, {1}}, {1, 1});
  ReducedProblem p = ok.problem();
  p.rhs[0] = 0.0;
  EXPECT_THROW(solve(p), InvalidArgument);
  p = ok.problem();
  p.rhs.pop_back();
  EXPECT_THROW(solve(p), InvalidArgument);
  const Instance inf(2, {{0}, {1}}, {1, kInfiniteCost});
  EXPECT_THROW(solve(inf.problem()), InvalidArgument);
  const Instance range(2, {{0}, {5}}, {1, 1});
  EXPECT_THROW(solve(range.problem()), InvalidArgument);
  const Instance unsorted(3, {{0}, {1}, {2}, {2, 1}}, {1, 1, 1, 1});
  EXPECT_THROW(solve(unsorted.problem()), InvalidArgument);
  EXPECT_THROW(solve(ReducedProblem::unit_mass(2, ColumnsView{})), InvalidArgument);
}

TEST(WarmSolve, UnchangedProblem) {
  const Instance in(3, {{0}, {1}, {2}, {0, 2}, {1, 2}}, {1, 1, 1, 1, 1});
  const LpSolution cold = solve(in.problem());
  const LpSolution warm = warm_solve(in.problem(), cold);
  expect_certified(in.problem(), warm);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-12);
  EXPECT_EQ(warm.iterations, 0u);
}

TEST(WarmSolve, ColumnWithoutGain) {
  const Instance base(2, {{0}, {1}, {0, 1}}, {1, 1, 1});
  const LpSolution first = solve(base.problem());
  const Instance more(2, {{0}, {1}, {0, 1}, {1}}, {1, 1, 1, 3});
  const LpSolution second = warm_solve(more.problem(), first);
  expect_certified(more.problem(), second);
  EXPECT_NEAR(second.objective, 1.0, 1e-12);
}

TEST(WarmSolve, AddedPairImproves) {
  const Instance base(2, {{0}, {1}}, {1, 1});
  const LpSolution first = solve(base.problem());
  EXPECT_NEAR(first.objective, 2.0, 1e-12);
  const Instance more(2, {{0}, {1}, {0, 1}}, {1, 1, 1});
  const LpSolution second = warm_solve(more.problem(), first);
  expect_certified(more.problem(), second);
  EXPECT_NEAR(second.objective, 1.0, 1e-12);
}

TEST(WarmSolve, FallsBackWhenBasisVanished) {
  const Instance base(3, {{0}, {1}, {2}, {0, 1, 2}}, {1, 1, 1, 1});
  const LpSolution first = solve(base.problem());
  const Instance other(3, {{0}, {1}, {2}, {0, 1}}, {1, 1, 1, 1});
  const LpSolution second = warm_solve(other.problem(), first);
  expect_certified(other.problem(), second);
  EXPECT_NEAR(second.objective, 2.0, 1e-12);
}

// Random instances: singletons (optionally), then random columns with costs
// in [0.5, 2.5].
Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t extra,
                         bool singletons, bool unit_costs) {
  Columns cols;
  std::vector<double> costs;
  std::uniform_real_distribution<double> cost(0.5, 2.5);
  std::uniform_int_distribution<std::size_t> len(1, std::min<std::size_t>(n, 4));
  std::uniform_int_distribution<PointIndex> row(0, static_cast<PointIndex>(n - 1));
  if (singletons) {
    for (PointIndex i = 0; i < n; ++i) {
      cols.push_back({i});
      costs.push_back(unit_costs ? 1.0 : cost(rng));
    }
  }
  std::set<std::vector<PointIndex>> seen(cols.begin(), cols.end());
  // Distinct subsets of size <= 4 bound the number of columns.
  std::size_t available = 0, binom = 1;
  for (std::size_t k = 1; k <= std::min<std::size_t>(n, 4); ++k) {
    binom = binom * (n - k + 1) / k;
    available += binom;
  }
  const std::size_t target = std::min(available, extra + (singletons ? n : 0));
  while (cols.size() < target) {
    std::set<PointIndex> s;
    const std::size_t m = len(rng);
    while (s.size() < m) s.insert(row(rng));
    std::vector<PointIndex> v(s.begin(), s.end());
    if (!seen.insert(v).second) continue;
    cols.push_back(v);
    costs.push_back(unit_costs ? 1.0 : cost(rng));
  }
  return Instance(n, cols, costs);
}

oracle::LpResult oracle_solve(const Instance& in) {
  std::vector<std::vector<std::uint32_t>> cols(in.columns.begin(), in.columns.end());
  return oracle::dense_lp(in.n, cols, in.costs, std::vector<double>(in.n, 1.0));
}

TEST(Solve, MatchesDenseOracleOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const bool singletons = trial % 4 != 3;
    const Instance in =
        random_instance(rng, n, 5 + trial % 40, singletons, trial % 3 == 0);
    const oracle::LpResult expected = oracle_solve(in);
    const LpSolution got = solve(in.problem());
    if (!expected.feasible) {
      EXPECT_EQ(got.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    expect_certified(in.problem(), got);
    EXPECT_NEAR(got.objective, expected.objective, 1e-8) << "trial " << trial;
  }
}

TEST(Solve, PricingVariantsAgree) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance in = random_instance(rng, 12, 150, true, trial % 2 == 0);
    const double expected = oracle_solve(in).objective;
    SimplexOptions bland;
    bland.degenerate_switch = 0;
    SimplexOptions sifting;
    sifting.sifting_threshold = 10;
    SimplexOptions refactor;
    refactor.refactor_interval = 1;
    for (const SimplexOptions& opts : {SimplexOptions{}, bland, sifting, refactor}) {
      const LpSolution s = solve(in.problem(), opts);
      expect_certified(in.problem(), s);
      EXPECT_NEAR(s.objective, expected, 1e-8) << "trial " << trial;
    }
  }
}

TEST(Solve, AddingColumnsNeverIncreasesObjective) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance big = random_instance(rng, 10, 60, true, trial % 2 == 0);
    double previous = std::numeric_limits<double>::infinity();
    LpSolution last;
    for (std::size_t m = 10; m <= big.columns.size(); m += 10) {
      const Instance prefix(10, Columns(big.columns.begin(), big.columns.begin() + static_cast<long>(m)),
                            std::vector<double>(big.costs.begin(), big.costs.begin() + static_cast<long>(m)));
      const LpSolution s = last.basis.empty() ? solve(prefix.problem())
                                              : warm_solve(prefix.problem(), last);
      expect_certified(prefix.problem(), s);
      EXPECT_LE(s.objective, previous + 1e-9);
      previous = s.objective;
      last = s;
    }
  }
}

TEST(Solve, DeterministicForFixedColumnOrder) {
  std::mt19937_64 rng(6);
  const Instance in = random_instance(rng, 12, 200, true, true);
  const LpSolution a = solve(in.problem());
  const LpSolution b = solve(in.problem());
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.dual, b.dual);
  ASSERT_EQ(a.support.size(), b.support.size());
  for (std::size_t k = 0; k < a.support.size(); ++k) {
    EXPECT_EQ(a.support[k].configuration, b.support[k].configuration);
    EXPECT_EQ(a.support[k].weight, b.support[k].weight);
  }
}

TEST(LpFormat, WritesObjectiveAndRows) {
  const Instance in(2, {{0}, {1}, {0, 1}}, {1, 1, 1.5});
  std::ostringstream out;
  write_lp_format(in.problem(), out);
  const std::string text = out.str();
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("1.5 g2"), std::string::npos);
  EXPECT_NE(text.find(" p0: g0 + g2 = 1"), std::string::npos);
  EXPECT_NE(text.find(" p1: g1 + g2 = 1"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
}

}  // namespace
}  // namespace advrisk

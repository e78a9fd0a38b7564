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

#ifndef ADVRISK_LP_HPP_
#define ADVRISK_LP_HPP_

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "advrisk/configuration.hpp"

namespace advrisk {

// The reduced linear program
//
//   minimize   sum_j cost_j * gamma_j
//   subject to sum_{j : i in column j} gamma_j = rhs_i   for every point i,
//              gamma >= 0.
//
// `columns` is a non-owning view; the backing store must outlive the problem.
struct ReducedProblem {
  std::size_t n_points = 0;
  ColumnsView columns;
  std::vector<double> rhs;

  // Unit mass per point (the rescaled empirical measure).
  static ReducedProblem unit_mass(std::size_t n_points, ColumnsView columns);
};

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };
const char* to_string(LpStatus status);

struct SupportEntry {
  Configuration configuration;
  std::size_t column = 0;
  double weight = 0.0;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  // Columns with strictly positive weight in the basic solution.
  std::vector<SupportEntry> support;
  // One potential per point.
  std::vector<double> dual;
  // Basic structural columns, including those at zero level; used to warm
  // start the next solve.
  std::vector<Configuration> basis;
  std::size_t iterations = 0;

  double total_mass() const;
  std::vector<Configuration> support_configurations() const;
};

struct SimplexOptions {
  std::size_t max_iterations = 5'000'000;
  // Eta file length after which the basis is refactorized.
  std::size_t refactor_interval = 100;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_switch = 1000;
  // Above this many columns, pricing works on a candidate subset that is
  // refreshed by full scans (sifting).
  std::size_t sifting_threshold = 20'000;
};

inline constexpr double kPivotTolerance = 1e-10;
inline constexpr double kOptimalityTolerance = 1e-9;

// Revised simplex from the all-singleton basis (artificial unit columns with
// a phase 1 for rows lacking a singleton). Returns a basic optimal solution
// and the matching dual. Deterministic for a fixed column order.
LpSolution solve(const ReducedProblem& problem, const SimplexOptions& options = {});

// Same contract as solve, starting from previous.basis. Falls back to a cold
// start when that basis is unusable.
LpSolution warm_solve(const ReducedProblem& problem, const LpSolution& previous,
                      const SimplexOptions& options = {});

// Solves the unit-mass problem over every pool member (warm started from
// `previous` when given) and throws LpError unless the status is optimal.
LpSolution solve_pool(const ConfigurationPool& pool, std::size_t n_points,
                      const LpSolution* previous = nullptr,
                      const SimplexOptions& options = {});

// Residuals of the optimality conditions, used by tests and debug checks.
struct SolutionCheck {
  double primal_residual = 0.0;   // max_i |A gamma - rhs|_i
  double dual_violation = 0.0;    // max_j (sum_{i in j} u_i - c_j)^+
  double duality_gap = 0.0;       // |objective - rhs . u|
  double slackness = 0.0;         // max over support of |sum u - c|
  double min_weight = 0.0;
  std::size_t support_size = 0;
};
SolutionCheck check_solution(const ReducedProblem& problem,
                             const LpSolution& solution);

// CPLEX LP text format with variables g<j> and rows p<i>.
void write_lp_format(const ReducedProblem& problem, std::ostream& out);

}  // namespace advrisk

#endif  // ADVRISK_LP_HPP_

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

#ifndef ADVRISK_GENCOL_HPP_
#define ADVRISK_GENCOL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "advrisk/configuration.hpp"
#include "advrisk/dataset.hpp"
#include "advrisk/lp.hpp"
#include "advrisk/report.hpp"
#include "advrisk/search.hpp"

namespace advrisk {

inline constexpr double kCertifyTolerance = 1e-8;

struct GencolParams {
  double tau = 1.0;
  // The pool is trimmed by N members whenever it grows past beta * N.
  std::size_t beta = 3;
  std::size_t samples_per_generation = 0;  // 0: N
  // Drop is on by default: without it offspring never shrink, and the
  // search can stall on pools whose improving columns are only reachable
  // from smaller configurations.
  RuleWeights rule_weights{1.0, 1.0, 1.0};
  double time_limit = 300.0;  // seconds
  std::size_t stagnation_generations = 50;
  std::uint64_t seed = 0;
  // Offspring are accepted when their dual gain exceeds this. Negative
  // values force pool growth (used to exercise trimming).
  double gain_threshold = 1e-10;
  std::size_t max_generations = 0;  // 0: unlimited
  unsigned threads = 0;
  SimplexOptions lp;
};

void validate(const GencolParams& params);

struct TrimEvent {
  std::size_t generation = 0;
  std::size_t size_before = 0;
  std::size_t removed = 0;
  double objective_before = 0.0;
  double objective_after = 0.0;
};

// Risk read off a W2-penalized solution, on the probability scale.
struct W2RiskReport {
  double tau = 0.0;
  std::size_t beta = 0;
  double regularized_value = 0.0;  // 1 - objective / N
  double corrected_risk = 0.0;     // 1 - sum(gamma) / N
  double penalty_paid = 0.0;       // sum(penalty * gamma) / N
  double total_mass = 0.0;         // sum(gamma) / N
  bool converged = false;
  double elapsed_s = 0.0;

  nlohmann::json to_json() const;
};

struct GencolResult {
  ConfigurationPool pool;
  LpSolution solution;
  W2RiskReport report;
  ConvergenceTrace trace;
  std::vector<TrimEvent> trims;
  StopReason stop = StopReason::kStagnation;
  std::size_t generations = 0;
  std::size_t max_pool_size = 0;
};

// sum_{i in r} u_i - (1 + w2_penalty(r, tau)).
double gain(IndexSpan candidate, std::span<const double> dual,
            const LabeledDataset& ds, double tau);

W2RiskReport w2_risk_report(const LpSolution& solution, const LabeledDataset& ds,
                            double tau);

// Column generation for the W2-penalized problem (Euclidean metric).
GencolResult gencol_w2(const LabeledDataset& ds, const GencolParams& params);

// Number of configurations with pairwise distinct labels:
// prod_k (1 + n_k) - 1.
double count_feasible_configurations(const LabeledDataset& ds);

struct Certificate {
  bool is_optimal = false;
  // Largest dual gain over all configurations under the certifying dual
  // (when the solution is optimal) or under the solution's own dual.
  double max_violation = 0.0;
  // Largest gain under the dual returned with the solution. Degenerate
  // reduced problems can report a positive value here even at a global
  // optimum; the full problem then supplies another optimal dual.
  double solution_dual_violation = 0.0;
  // Optimal value of the full problem, when it had to be solved.
  std::optional<double> full_objective;
  Configuration worst;
  std::size_t enumerated = 0;
};

// Global optimality test against every feasible configuration. The
// solution's own dual is tried first; if some configuration has positive
// gain under it, the full problem is solved (warm started from the
// solution) and the solution is optimal iff it attains the full optimum.
Certificate certify_optimality(const LpSolution& solution, const LabeledDataset& ds,
                               double tau, std::size_t cap = 1'000'000);

}  // namespace advrisk

#endif  // ADVRISK_GENCOL_HPP_

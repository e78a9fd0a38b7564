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

#ifndef ADVRISK_SEARCH_HPP_
#define ADVRISK_SEARCH_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "advrisk/configuration.hpp"
#include "advrisk/dataset.hpp"
#include "advrisk/lp.hpp"
#include "advrisk/report.hpp"

namespace advrisk {

// 1 - objective / N: the risk lower bound read off a unit-mass LP value.
inline double risk_from_objective(double objective, std::size_t n_points) {
  return 1.0 - objective / static_cast<double>(n_points);
}

struct ExhaustiveOptions {
  // Aborts with EnumerationCapExceeded once the pool would exceed this size.
  std::size_t max_configs = 50'000'000;
  unsigned threads = 0;  // 0: ADVRISK_THREADS / hardware concurrency
};

// Every configuration whose enclosing-ball radius is within epsilon, built
// level by level: a configuration of length k is produced exactly once, from
// its prefix of the k-1 smallest indices, extended by a larger index of an
// unused class.
ConfigurationPool exhaustive_search(const LabeledDataset& ds, Metric metric,
                                    double epsilon,
                                    const ExhaustiveOptions& options = {});

// Proposal rules: add a point of a foreign class, swap one entry for a point
// of a class absent from the others, or drop one entry.
enum class Rule { kAdd, kSwap, kDrop };

struct RuleWeights {
  double add = 1.0;
  double swap = 1.0;
  double drop = 0.0;
};

// Parses "a:b:c".
RuleWeights parse_rule_weights(std::string_view text);
void validate(const RuleWeights& weights);

class OffspringSampler {
 public:
  explicit OffspringSampler(const LabeledDataset& ds);

  Rule draw_rule(const RuleWeights& weights, std::mt19937_64& rng) const;

  // Returns nullopt when the move is impossible (add on a configuration that
  // spans every class, drop on a singleton, swap with no candidate point).
  std::optional<Configuration> propose(IndexSpan parent, Rule rule,
                                       std::mt19937_64& rng) const;

 private:
  // Uniform point whose class is not flagged in `used`, excluding `skip`.
  std::optional<PointIndex> draw_foreign(const std::vector<bool>& used,
                                         std::optional<PointIndex> skip,
                                         std::mt19937_64& rng) const;

  const LabeledDataset* ds_;
};

std::optional<Configuration> propose_offspring(const Configuration& parent,
                                               Rule rule,
                                               const LabeledDataset& ds,
                                               std::mt19937_64& rng);

enum class StopReason {
  kStagnation,
  kTimeLimit,
  kTargetReached,
  kProposalBudget,
  kGenerationLimit,
};
const char* to_string(StopReason reason);

struct GeneticParams {
  std::size_t samples_per_generation = 0;  // 0: 2N
  RuleWeights rule_weights;
  double time_limit = 300.0;  // seconds
  std::size_t stagnation_generations = 50;
  std::uint64_t seed = 0;
  std::size_t max_proposals = 0;    // 0: unlimited
  std::size_t max_generations = 0;  // 0: unlimited
  // Stop once the LP objective reaches this value (e.g. the exhaustive optimum).
  std::optional<double> target_objective;
  unsigned threads = 0;
  SimplexOptions lp;
};

void validate(const GeneticParams& params);

struct GeneticResult {
  ConfigurationPool pool;
  LpSolution solution;
  ConvergenceTrace trace;
  StopReason stop = StopReason::kStagnation;
  std::size_t generations = 0;
  std::size_t proposals = 0;
  double elapsed_s = 0.0;

  double risk(std::size_t n_points) const {
    return risk_from_objective(solution.objective, n_points);
  }
  // Stagnation or target stops; time and budget stops only give lower bounds.
  bool converged() const {
    return stop == StopReason::kStagnation || stop == StopReason::kTargetReached;
  }
};

// Genetic search for the classical budget: parents are drawn uniformly from
// the LP support, offspring within the budget join the pool, and the reduced
// problem is re-solved once per generation.
GeneticResult genetic_search(const LabeledDataset& ds, Metric metric,
                             double epsilon, const GeneticParams& params);

}  // namespace advrisk

#endif  // ADVRISK_SEARCH_HPP_

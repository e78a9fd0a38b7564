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

#include "advrisk/gencol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "advrisk/error.hpp"
#include "advrisk/parallel.hpp"

namespace advrisk {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double penalty_of(IndexSpan indices, const LabeledDataset& ds, double tau) {
  std::vector<PointView> points;
  points.reserve(indices.size());
  for (const PointIndex i : indices) points.push_back(ds.point(i));
  return w2_penalty(points, tau);
}

}  // namespace

void validate(const GencolParams& params) {
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) {
    throw InvalidArgument("tau must be a positive finite number");
  }
  if (params.beta < 2) throw InvalidArgument("beta must be >= 2");
  validate(params.rule_weights);
  if (!(params.time_limit > 0.0)) throw InvalidArgument("time limit must be > 0");
  if (params.stagnation_generations == 0) {
    throw InvalidArgument("stagnation generations must be >= 1");
  }
  if (!std::isfinite(params.gain_threshold)) {
    throw InvalidArgument("gain threshold must be finite");
  }
}

nlohmann::json W2RiskReport::to_json() const {
  return {{"tau", tau},
          {"beta", beta},
          {"regularized_value", regularized_value},
          {"corrected_risk", corrected_risk},
          {"penalty_paid", penalty_paid},
          {"total_mass", total_mass},
          {"converged", converged},
          {"lower_bound_only", !converged},
          {"elapsed_s", elapsed_s}};
}

double gain(IndexSpan candidate, std::span<const double> dual,
            const LabeledDataset& ds, double tau) {
  if (dual.size() != ds.size()) {
    throw InvalidArgument("gain: dual has " + std::to_string(dual.size()) +
                          " entries for " + std::to_string(ds.size()) + " points");
  }
  double u = 0.0;
  for (const PointIndex i : candidate) u += dual[i];
  return u - cost(candidate, ds, CostModel::w2(tau));
}

W2RiskReport w2_risk_report(const LpSolution& solution, const LabeledDataset& ds,
                            double tau) {
  const double n = static_cast<double>(ds.size());
  double mass = 0.0;
  double penalty = 0.0;
  for (const SupportEntry& e : solution.support) {
    mass += e.weight;
    penalty += e.weight * penalty_of(e.configuration.indices(), ds, tau);
  }
  W2RiskReport report;
  report.tau = tau;
  report.total_mass = mass / n;
  report.corrected_risk = 1.0 - mass / n;
  report.penalty_paid = penalty / n;
  report.regularized_value = 1.0 - solution.objective / n;
  return report;
}

GencolResult gencol_w2(const LabeledDataset& ds, const GencolParams& params) {
  validate(params);
  const CostModel model = CostModel::w2(params.tau);
  const auto start = Clock::now();
  const std::size_t n = ds.size();
  const std::size_t samples =
      params.samples_per_generation > 0 ? params.samples_per_generation : n;
  const std::size_t cap = params.beta * n;
  const unsigned workers = worker_count(params.threads);
  std::mt19937_64 rng(params.seed);
  const OffspringSampler sampler(ds);

  GencolResult result;
  result.pool.insert_singletons(ds, model);
  result.max_pool_size = result.pool.size();
  result.solution = solve_pool(result.pool, n, nullptr, params.lp);
  auto record = [&] {
    result.trace.add({seconds_since(start), result.generations, result.pool.size(),
                      result.solution.objective,
                      1.0 - result.solution.objective / static_cast<double>(n)});
  };
  record();

  std::size_t stagnant = 0;
  while (true) {
    if (seconds_since(start) >= params.time_limit) {
      result.stop = StopReason::kTimeLimit;
      break;
    }
    if (params.max_generations > 0 && result.generations >= params.max_generations) {
      result.stop = StopReason::kGenerationLimit;
      break;
    }
    ++result.generations;

    if (result.pool.size() > cap) {
      TrimEvent trim;
      trim.generation = result.generations;
      trim.size_before = result.pool.size();
      trim.objective_before = result.solution.objective;
      const auto active = result.solution.support_configurations();
      trim.removed = result.pool.trim_inactive(active, n, rng);
      result.solution = solve_pool(result.pool, n, &result.solution, params.lp);
      trim.objective_after = result.solution.objective;
      result.trims.push_back(trim);
    }

    const auto& support = result.solution.support;
    std::uniform_int_distribution<std::size_t> pick_parent(0, support.size() - 1);
    std::vector<Configuration> candidates;
    for (std::size_t s = 0; s < samples; ++s) {
      const IndexSpan parent = support[pick_parent(rng)].configuration.indices();
      const Rule rule = sampler.draw_rule(params.rule_weights, rng);
      auto child = sampler.propose(parent, rule, rng);
      if (child && !result.pool.contains(*child)) candidates.push_back(std::move(*child));
    }

    std::vector<double> costs(candidates.size(), 0.0);
    std::vector<char> accept(candidates.size(), 0);
    const std::vector<double>& dual = result.solution.dual;
    parallel_chunks(candidates.size(), workers, static_cast<std::size_t>(workers) * 4,
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                      for (std::size_t c = begin; c < end; ++c) {
                        const IndexSpan r = candidates[c].indices();
                        costs[c] = cost(r, ds, model);
                        double u = 0.0;
                        for (const PointIndex i : r) u += dual[i];
                        accept[c] = u - costs[c] > params.gain_threshold;
                      }
                    });
    std::size_t inserted = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (accept[c] && result.pool.insert(candidates[c], costs[c])) ++inserted;
    }
    result.max_pool_size = std::max(result.max_pool_size, result.pool.size());
    if (inserted == 0) {
      if (++stagnant >= params.stagnation_generations) {
        result.stop = StopReason::kStagnation;
        break;
      }
      continue;
    }
    stagnant = 0;
    result.solution = solve_pool(result.pool, n, &result.solution, params.lp);
    record();
  }

  result.report = w2_risk_report(result.solution, ds, params.tau);
  result.report.beta = params.beta;
  result.report.converged = result.stop == StopReason::kStagnation;
  result.report.elapsed_s = seconds_since(start);
  return result;
}

double count_feasible_configurations(const LabeledDataset& ds) {
  double count = 1.0;
  for (const std::size_t n_k : ds.class_counts()) {
    count *= 1.0 + static_cast<double>(n_k);
  }
  return count - 1.0;
}

namespace {

// Depth-first over classes, each contributing no point or one point. The
// penalty uses sum |x|^2 - |sum x|^2 / m, maintained incrementally. `visit`
// receives the members in class order (not sorted), their dual sum and cost.
void for_each_configuration(
    const LabeledDataset& ds, double tau, std::span<const double> dual,
    const std::function<void(const std::vector<PointIndex>&, double, double)>& visit) {
  const std::size_t k_classes = ds.n_classes();
  const std::size_t dim = ds.dim();
  const double inv_tau2 = 1.0 / (tau * tau);
  std::vector<std::vector<double>> sums(k_classes + 1, std::vector<double>(dim, 0.0));
  std::vector<PointIndex> chosen;

  std::function<void(std::size_t, std::size_t, double, double)> step =
      [&](std::size_t k, std::size_t depth, double u, double sumsq) {
        if (k == k_classes) {
          if (chosen.empty()) return;
          double norm2 = 0.0;
          for (const double s : sums[depth]) norm2 += s * s;
          const double spread =
              std::max(0.0, sumsq - norm2 / static_cast<double>(chosen.size()));
          visit(chosen, u, 1.0 + spread * inv_tau2);
          return;
        }
        step(k + 1, depth, u, sumsq);
        for (const PointIndex i : ds.members(static_cast<ClassId>(k))) {
          const PointView x = ds.point(i);
          double xx = 0.0;
          for (std::size_t t = 0; t < dim; ++t) {
            sums[depth + 1][t] = sums[depth][t] + x[t];
            xx += x[t] * x[t];
          }
          chosen.push_back(i);
          step(k + 1, depth + 1, u + dual[i], sumsq + xx);
          chosen.pop_back();
        }
      };
  step(0, 0, 0.0, 0.0);
}

struct WorstGain {
  double gain = -std::numeric_limits<double>::infinity();
  std::vector<PointIndex> members;
};

}  // namespace

Certificate certify_optimality(const LpSolution& solution, const LabeledDataset& ds,
                               double tau, std::size_t cap) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
  if (solution.dual.size() != ds.size()) {
    throw InvalidArgument("certify: dual does not match the dataset");
  }
  const double total = count_feasible_configurations(ds);
  if (total > static_cast<double>(cap)) {
    throw EnumerationCapExceeded("certify: " + std::to_string(total) +
                                 " configurations exceed the cap of " +
                                 std::to_string(cap));
  }

  Certificate cert;
  WorstGain own;
  for_each_configuration(ds, tau, solution.dual,
                         [&](const std::vector<PointIndex>& members, double u, double c) {
                           ++cert.enumerated;
                           if (u - c > own.gain) own = {u - c, members};
                         });
  cert.solution_dual_violation = own.gain;
  cert.max_violation = own.gain;
  if (!own.members.empty()) cert.worst = Configuration(own.members);
  if (own.gain <= kCertifyTolerance) {
    cert.is_optimal = true;
    return cert;
  }

  // Another optimal dual may still exist: solve the full problem.
  ColumnStore store;
  std::vector<PointIndex> sorted;
  for_each_configuration(ds, tau, solution.dual,
                         [&](const std::vector<PointIndex>& members, double, double c) {
                           sorted = members;
                           std::sort(sorted.begin(), sorted.end());
                           store.push_back(sorted, c);
                         });
  const ReducedProblem full = ReducedProblem::unit_mass(ds.size(), store.view());
  const LpSolution best = warm_solve(full, solution);
  if (best.status != LpStatus::kOptimal) {
    throw LpError(std::string("certify: full problem ") + to_string(best.status));
  }
  cert.full_objective = best.objective;
  const double slack = 1e-9 * (1.0 + std::abs(best.objective));
  if (solution.objective > best.objective + slack) return cert;

  WorstGain other;
  for_each_configuration(ds, tau, best.dual,
                         [&](const std::vector<PointIndex>& members, double u, double c) {
                           if (u - c > other.gain) other = {u - c, members};
                         });
  cert.max_violation = other.gain;
  cert.worst = Configuration(other.members);
  cert.is_optimal = other.gain <= kCertifyTolerance;
  return cert;
}

}  // namespace advrisk

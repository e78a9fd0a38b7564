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

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <string>

#include "advrisk/error.hpp"
#include "advrisk/parallel.hpp"

namespace advrisk {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Pairs (i, j), j > i, of distinct classes whose two-point ball fits the
// budget. Every pair inside a feasible configuration is such a pair.
std::vector<std::vector<PointIndex>> budget_neighbors(const LabeledDataset& ds,
                                                     Metric metric, double epsilon,
                                                     unsigned workers) {
  const std::size_t n = ds.size();
  std::vector<std::vector<PointIndex>> neighbors(n);
  parallel_chunks(n, workers, static_cast<std::size_t>(workers) * 16,
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto pi = static_cast<PointIndex>(i);
                      for (PointIndex j = pi + 1; j < n; ++j) {
                        if (ds.label(j) == ds.label(pi)) continue;
                        const double d = distance(ds.point(pi), ds.point(j), metric);
                        if (within_budget(0.5 * d, epsilon)) neighbors[i].push_back(j);
                      }
                    }
                  });
  return neighbors;
}

}  // namespace

ConfigurationPool exhaustive_search(const LabeledDataset& ds, Metric metric,
                                    double epsilon,
                                    const ExhaustiveOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidArgument("budget epsilon must be > 0");
  const CostModel model = CostModel::classical(epsilon, metric);
  const unsigned workers = worker_count(options.threads);
  const std::size_t n = ds.size();

  ConfigurationPool pool;
  pool.insert_singletons(ds, model);
  auto check_cap = [&](std::size_t size) {
    if (size > options.max_configs) {
      throw EnumerationCapExceeded(
          "exhaustive search exceeded --max-configs=" +
          std::to_string(options.max_configs) + " at budget " +
          std::to_string(epsilon));
    }
  };
  check_cap(pool.size());

  const auto neighbors = budget_neighbors(ds, metric, epsilon, workers);
  std::size_t n_pairs = 0;
  for (const auto& list : neighbors) n_pairs += list.size();
  check_cap(pool.size() + n_pairs);
  pool.reserve(n + n_pairs, n + 2 * n_pairs);
  for (PointIndex i = 0; i < n; ++i) {
    for (const PointIndex j : neighbors[i]) {
      const PointIndex pair[2] = {i, j};
      pool.insert_sorted(pair, 1.0);
    }
  }

  std::size_t level_begin = n;
  std::size_t level_end = pool.size();
  for (std::size_t k = 3; k <= ds.n_classes() && level_end > level_begin; ++k) {
    const std::size_t parents = level_end - level_begin;
    const std::size_t n_chunks = static_cast<std::size_t>(workers) * 8;
    std::vector<std::vector<PointIndex>> found(std::min(n_chunks, parents));
    parallel_chunks(parents, workers, n_chunks,
                    [&](std::size_t begin, std::size_t end, std::size_t chunk) {
      std::vector<PointIndex>& out = found[chunk];
      std::vector<bool> used(ds.n_classes(), false);
      std::vector<PointView> points;
      for (std::size_t p = level_begin + begin; p < level_begin + end; ++p) {
        const IndexSpan parent = pool.members(p);
        for (const PointIndex i : parent) used[ds.label(i)] = true;
        points.clear();
        for (const PointIndex i : parent) points.push_back(ds.point(i));
        std::optional<Ball> parent_ball;
        for (const PointIndex j : neighbors[parent.back()]) {
          if (used[ds.label(j)]) continue;
          bool pairs_ok = true;
          for (std::size_t t = 0; t + 1 < parent.size() && pairs_ok; ++t) {
            const auto& list = neighbors[parent[t]];
            pairs_ok = std::binary_search(list.begin(), list.end(), j);
          }
          if (!pairs_ok) continue;
          if (!parent_ball) parent_ball = enclosing_ball(points, metric);
          bool fits = distance(ds.point(j), parent_ball->center, metric) <=
                      parent_ball->radius;
          if (!fits) {
            points.push_back(ds.point(j));
            fits = within_budget(enclosing_radius(points, metric), epsilon);
            points.pop_back();
          }
          if (fits) {
            out.insert(out.end(), parent.begin(), parent.end());
            out.push_back(j);
          }
        }
        for (const PointIndex i : parent) used[ds.label(i)] = false;
      }
    });
    std::size_t total = 0;
    for (const auto& chunk : found) total += chunk.size() / k;
    check_cap(pool.size() + total);
    for (auto& chunk : found) {
      for (std::size_t off = 0; off < chunk.size(); off += k) {
        pool.insert_sorted(IndexSpan(chunk.data() + off, k), 1.0);
      }
      std::vector<PointIndex>().swap(chunk);
    }
    level_begin = level_end;
    level_end = pool.size();
  }
  return pool;
}

// ---------------------------------------------------------------------------

RuleWeights parse_rule_weights(std::string_view text) {
  double values[3];
  std::size_t start = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t colon = text.find(':', start);
    if ((k < 2) == (colon == std::string_view::npos)) {
      throw InvalidArgument("rule weights must look like a:b:c");
    }
    const std::string_view field = text.substr(start, colon - start);
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), values[k]);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw InvalidArgument("rule weights must look like a:b:c");
    }
    start = colon + 1;
  }
  RuleWeights weights{values[0], values[1], values[2]};
  validate(weights);
  return weights;
}

void validate(const RuleWeights& w) {
  if (!(w.add >= 0.0 && w.swap >= 0.0 && w.drop >= 0.0) ||
      !(w.add + w.swap + w.drop > 0.0) ||
      !std::isfinite(w.add + w.swap + w.drop)) {
    throw InvalidArgument("rule weights must be nonnegative with a positive sum");
  }
}

OffspringSampler::OffspringSampler(const LabeledDataset& ds) : ds_(&ds) {}

Rule OffspringSampler::draw_rule(const RuleWeights& w, std::mt19937_64& rng) const {
  std::discrete_distribution<int> pick({w.add, w.swap, w.drop});
  return static_cast<Rule>(pick(rng));
}

std::optional<PointIndex> OffspringSampler::draw_foreign(
    const std::vector<bool>& used, std::optional<PointIndex> skip,
    std::mt19937_64& rng) const {
  std::size_t total = 0;
  for (ClassId k = 0; k < ds_->n_classes(); ++k) {
    if (!used[k]) total += ds_->class_counts()[k];
  }
  const bool skip_counts = skip && !used[ds_->label(*skip)];
  if (skip_counts) --total;
  if (total == 0) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  std::size_t t = pick(rng);
  for (ClassId k = 0; k < ds_->n_classes(); ++k) {
    if (used[k]) continue;
    const auto members = ds_->members(k);
    std::size_t available = members.size();
    const bool here = skip_counts && ds_->label(*skip) == k;
    if (here) --available;
    if (t < available) {
      if (here) {
        const auto skip_pos = static_cast<std::size_t>(
            std::lower_bound(members.begin(), members.end(), *skip) - members.begin());
        if (t >= skip_pos) ++t;
      }
      return members[t];
    }
    t -= available;
  }
  return std::nullopt;
}

std::optional<Configuration> OffspringSampler::propose(IndexSpan parent, Rule rule,
                                                       std::mt19937_64& rng) const {
  const std::size_t m = parent.size();
  if (m == 0) return std::nullopt;
  std::vector<bool> used(ds_->n_classes(), false);
  switch (rule) {
    case Rule::kAdd: {
      if (m >= ds_->n_classes()) return std::nullopt;
      for (const PointIndex i : parent) used[ds_->label(i)] = true;
      const auto extra = draw_foreign(used, std::nullopt, rng);
      if (!extra) return std::nullopt;
      std::vector<PointIndex> child(parent.begin(), parent.end());
      child.push_back(*extra);
      return Configuration(std::move(child));
    }
    case Rule::kSwap: {
      std::uniform_int_distribution<std::size_t> pick(0, m - 1);
      const std::size_t out = pick(rng);
      std::vector<PointIndex> child;
      for (std::size_t t = 0; t < m; ++t) {
        if (t == out) continue;
        child.push_back(parent[t]);
        used[ds_->label(parent[t])] = true;
      }
      const auto in = draw_foreign(used, parent[out], rng);
      if (!in) return std::nullopt;
      child.push_back(*in);
      return Configuration(std::move(child));
    }
    case Rule::kDrop: {
      if (m == 1) return std::nullopt;
      std::uniform_int_distribution<std::size_t> pick(0, m - 1);
      const std::size_t out = pick(rng);
      std::vector<PointIndex> child;
      for (std::size_t t = 0; t < m; ++t) {
        if (t != out) child.push_back(parent[t]);
      }
      return Configuration(std::move(child));
    }
  }
  return std::nullopt;
}

std::optional<Configuration> propose_offspring(const Configuration& parent,
                                               Rule rule,
                                               const LabeledDataset& ds,
                                               std::mt19937_64& rng) {
  return OffspringSampler(ds).propose(parent.indices(), rule, rng);
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kStagnation:
      return "stagnation";
    case StopReason::kTimeLimit:
      return "time_limit";
    case StopReason::kTargetReached:
      return "target_reached";
    case StopReason::kProposalBudget:
      return "proposal_budget";
    case StopReason::kGenerationLimit:
      return "generation_limit";
  }
  return "unknown";
}

void validate(const GeneticParams& params) {
  validate(params.rule_weights);
  if (!(params.time_limit > 0.0)) throw InvalidArgument("time limit must be > 0");
  if (params.stagnation_generations == 0) {
    throw InvalidArgument("stagnation generations must be >= 1");
  }
}

GeneticResult genetic_search(const LabeledDataset& ds, Metric metric,
                             double epsilon, const GeneticParams& params) {
  validate(params);
  if (!(epsilon > 0.0)) throw InvalidArgument("budget epsilon must be > 0");
  const CostModel model = CostModel::classical(epsilon, metric);
  const auto start = Clock::now();
  const std::size_t n = ds.size();
  const std::size_t samples =
      params.samples_per_generation > 0 ? params.samples_per_generation : 2 * n;
  const unsigned workers = worker_count(params.threads);
  std::mt19937_64 rng(params.seed);
  const OffspringSampler sampler(ds);

  GeneticResult result;
  result.pool.insert_singletons(ds, model);
  result.solution = solve_pool(result.pool, n, nullptr, params.lp);
  auto record = [&] {
    result.trace.add({seconds_since(start), result.generations, result.pool.size(),
                      result.solution.objective,
                      risk_from_objective(result.solution.objective, n)});
  };
  record();

  std::size_t stagnant = 0;
  while (true) {
    if (params.target_objective &&
        result.solution.objective <=
            *params.target_objective + 1e-9 * (1.0 + std::abs(*params.target_objective))) {
      result.stop = StopReason::kTargetReached;
      break;
    }
    if (seconds_since(start) >= params.time_limit) {
      result.stop = StopReason::kTimeLimit;
      break;
    }
    if (params.max_proposals > 0 && result.proposals >= params.max_proposals) {
      result.stop = StopReason::kProposalBudget;
      break;
    }
    if (params.max_generations > 0 && result.generations >= params.max_generations) {
      result.stop = StopReason::kGenerationLimit;
      break;
    }
    ++result.generations;

    std::size_t draws = samples;
    if (params.max_proposals > 0) {
      draws = std::min(draws, params.max_proposals - result.proposals);
    }
    result.proposals += draws;
    const auto& support = result.solution.support;
    std::uniform_int_distribution<std::size_t> pick_parent(0, support.size() - 1);
    std::vector<Configuration> candidates;
    for (std::size_t s = 0; s < draws; ++s) {
      const IndexSpan parent = support[pick_parent(rng)].configuration.indices();
      const Rule rule = sampler.draw_rule(params.rule_weights, rng);
      auto child = sampler.propose(parent, rule, rng);
      if (child && !result.pool.contains(*child)) candidates.push_back(std::move(*child));
    }

    std::vector<char> fits(candidates.size(), 0);
    parallel_chunks(candidates.size(), workers, static_cast<std::size_t>(workers) * 4,
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                      for (std::size_t c = begin; c < end; ++c) {
                        fits[c] = within_budget(
                            configuration_radius(candidates[c].indices(), ds, metric),
                            epsilon);
                      }
                    });
    std::size_t inserted = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (fits[c] && result.pool.insert(candidates[c], 1.0)) ++inserted;
    }
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
  result.elapsed_s = seconds_since(start);
  return result;
}

}  // namespace advrisk

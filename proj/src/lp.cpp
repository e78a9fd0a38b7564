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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include "advrisk/error.hpp"

namespace advrisk {
namespace {

constexpr double kDropTolerance = 1e-13;
constexpr double kFeasibilityTolerance = 1e-9;
constexpr double kSingularTolerance = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Revised simplex over the columns of a ReducedProblem plus one artificial
// unit column per row. The basis inverse is kept in product form: B^{-1} is a
// sequence of eta matrices applied to the identity, rebuilt from scratch
// every refactor_interval pivots. Basis positions coincide with rows.
class RevisedSimplex {
 public:
  RevisedSimplex(const ReducedProblem& problem, const SimplexOptions& options)
      : n_(problem.n_points),
        m_(problem.columns.size()),
        columns_(problem.columns),
        rhs_(problem.rhs),
        options_(options) {
    slack_.assign(n_, kNone);
    for (std::size_t j = 0; j < m_; ++j) {
      const IndexSpan col = columns_.column(j);
      if (col.size() == 1 && slack_[col[0]] == kNone) slack_[col[0]] = j;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (slack_[i] == kNone) slack_[i] = m_ + i;
    }
    sifting_ = m_ > options_.sifting_threshold;
    work_.resize(n_);
  }

  // Installs the given columns as the basis, completing it with row slacks.
  // Returns false if the resulting basic solution is primal infeasible.
  bool start_from(const std::vector<std::size_t>& desired) {
    install_basis(desired);
    compute_primal();
    return *std::min_element(x_.begin(), x_.end()) >= -kFeasibilityTolerance;
  }

  void cold_start() {
    std::vector<std::size_t> slacks(slack_.begin(), slack_.end());
    install_basis(slacks);
    compute_primal();
  }

  LpSolution run() {
    LpSolution solution;
    bool needs_phase1 = false;
    for (std::size_t pos = 0; pos < n_; ++pos) {
      if (is_artificial(head_[pos]) && x_[pos] > kFeasibilityTolerance) {
        needs_phase1 = true;
      }
    }
    if (needs_phase1) {
      if (!iterate(1)) return limit_solution();
      double infeasibility = 0.0;
      for (std::size_t pos = 0; pos < n_; ++pos) {
        if (is_artificial(head_[pos])) infeasibility += std::max(x_[pos], 0.0);
      }
      const double scale =
          1.0 + std::accumulate(rhs_.begin(), rhs_.end(), 0.0);
      if (infeasibility > kFeasibilityTolerance * scale) {
        solution.status = LpStatus::kInfeasible;
        solution.iterations = iterations_;
        return solution;
      }
    }
    if (!iterate(2)) return limit_solution();
    return extract();
  }

 private:
  bool is_artificial(std::size_t col) const { return col >= m_; }

  double cost(std::size_t col) const {
    if (is_artificial(col)) return phase_ == 1 ? 1.0 : 0.0;
    return phase_ == 1 ? 0.0 : columns_.cost(col);
  }

  std::size_t column_length(std::size_t col) const {
    return is_artificial(col) ? 1 : columns_.column(col).size();
  }

  void load_column(std::size_t col, std::vector<double>& v) const {
    std::fill(v.begin(), v.end(), 0.0);
    if (is_artificial(col)) {
      v[col - m_] = 1.0;
      return;
    }
    for (const PointIndex r : columns_.column(col)) v[r] = 1.0;
  }

  double reduced_cost(std::size_t col, const std::vector<double>& y) const {
    double d = cost(col);
    for (const PointIndex r : columns_.column(col)) d -= y[r];
    return d;
  }

  // v <- B^{-1} v
  void ftran(std::vector<double>& v) const {
    for (std::size_t k = 0; k < eta_pivot_.size(); ++k) {
      const std::size_t p = eta_pivot_[k];
      double t = v[p];
      if (t == 0.0) continue;
      t /= eta_pivot_value_[k];
      v[p] = t;
      for (std::size_t e = eta_start_[k]; e < eta_start_[k + 1]; ++e) {
        v[eta_row_[e]] -= eta_value_[e] * t;
      }
    }
  }

  // v^T <- v^T B^{-1}
  void btran(std::vector<double>& v) const {
    for (std::size_t k = eta_pivot_.size(); k-- > 0;) {
      const std::size_t p = eta_pivot_[k];
      double s = v[p];
      for (std::size_t e = eta_start_[k]; e < eta_start_[k + 1]; ++e) {
        s -= eta_value_[e] * v[eta_row_[e]];
      }
      v[p] = s / eta_pivot_value_[k];
    }
  }

  void push_eta(std::size_t p, const std::vector<double>& alpha) {
    eta_pivot_.push_back(static_cast<std::uint32_t>(p));
    eta_pivot_value_.push_back(alpha[p]);
    for (std::size_t i = 0; i < n_; ++i) {
      if (i != p && std::abs(alpha[i]) > kDropTolerance) {
        eta_row_.push_back(static_cast<std::uint32_t>(i));
        eta_value_.push_back(alpha[i]);
      }
    }
    eta_start_.push_back(eta_row_.size());
  }

  void clear_etas() {
    eta_pivot_.clear();
    eta_pivot_value_.clear();
    eta_row_.clear();
    eta_value_.clear();
    eta_start_.assign(1, 0);
  }

  // Rebuilds the eta file for the given column set. Unit columns sit on
  // their own rows; the others are pivoted in by Gaussian elimination with
  // largest-magnitude pivots among free rows. Dependent columns are dropped
  // and free rows receive their slack. Returns the number dropped.
  std::size_t install_basis(const std::vector<std::size_t>& desired) {
    clear_etas();
    head_.assign(n_, kNone);
    basic_pos_.assign(m_ + n_, kNone);
    std::vector<std::size_t> others;
    std::size_t dropped = 0;
    for (const std::size_t col : desired) {
      if (basic_pos_[col] != kNone) continue;
      if (column_length(col) == 1) {
        const std::size_t r =
            is_artificial(col) ? col - m_ : columns_.column(col)[0];
        if (head_[r] == kNone) {
          head_[r] = col;
          basic_pos_[col] = r;
        } else {
          ++dropped;
        }
        continue;
      }
      basic_pos_[col] = kNone - 1;  // reserved, placed below
      others.push_back(col);
    }
    std::stable_sort(others.begin(), others.end(),
                     [&](std::size_t a, std::size_t b) {
                       return column_length(a) < column_length(b);
                     });
    for (const std::size_t col : others) {
      basic_pos_[col] = kNone;
      load_column(col, work_);
      ftran(work_);
      std::size_t best = kNone;
      double best_abs = kSingularTolerance;
      for (std::size_t i = 0; i < n_; ++i) {
        if (head_[i] == kNone && std::abs(work_[i]) > best_abs) {
          best_abs = std::abs(work_[i]);
          best = i;
        }
      }
      if (best == kNone) {
        ++dropped;
        continue;
      }
      push_eta(best, work_);
      head_[best] = col;
      basic_pos_[col] = best;
    }
    for (std::size_t r = 0; r < n_; ++r) {
      if (head_[r] == kNone) {
        head_[r] = slack_[r];
        basic_pos_[slack_[r]] = r;
      }
    }
    updates_since_refactor_ = 0;
    return dropped;
  }

  void compute_primal() {
    x_ = rhs_;
    ftran(x_);
    for (double& v : x_) {
      if (v < 0.0 && v > -kFeasibilityTolerance) v = 0.0;
    }
  }

  void compute_dual(std::vector<double>& y) const {
    y.resize(n_);
    for (std::size_t pos = 0; pos < n_; ++pos) y[pos] = cost(head_[pos]);
    btran(y);
  }

  // Refactorizes the current basis. A numerically broken basis restarts
  // from the slack basis (phase 1 handles any artificial left positive).
  void refactor() {
    std::vector<std::size_t> current(head_.begin(), head_.end());
    const std::size_t dropped = install_basis(current);
    compute_primal();
    const bool infeasible =
        *std::min_element(x_.begin(), x_.end()) < -1e-7;
    if (dropped > 0 || infeasible) {
      cold_start();
      if (phase_ == 2) restarted_ = true;
    }
  }

  // Rebuilds the sifting candidate list from a full pricing pass. Returns
  // false when no column prices out.
  bool refresh_candidates(const std::vector<double>& y) {
    std::vector<std::pair<double, std::uint32_t>> negative;
    for (std::size_t j = 0; j < m_; ++j) {
      if (basic_pos_[j] != kNone) continue;
      const double d = reduced_cost(j, y);
      if (d < -kOptimalityTolerance) {
        negative.emplace_back(d, static_cast<std::uint32_t>(j));
      }
    }
    if (negative.empty()) return false;
    const std::size_t keep_new = std::max<std::size_t>(1000, 2 * n_);
    if (negative.size() > keep_new) {
      std::nth_element(negative.begin(),
                       negative.begin() + static_cast<std::ptrdiff_t>(keep_new),
                       negative.end());
      negative.resize(keep_new);
    }
    // The new list: the basic columns plus the most attractive entrants.
    std::vector<std::uint32_t> next;
    for (const std::size_t col : head_) {
      if (!is_artificial(col)) next.push_back(static_cast<std::uint32_t>(col));
    }
    for (const auto& entry : negative) next.push_back(entry.second);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    candidates_ = std::move(next);
    return true;
  }

  // Entering column: most negative reduced cost (lowest index on ties), or
  // the lowest-index improving column under Bland's rule.
  std::size_t price(const std::vector<double>& y, bool bland) {
    auto scan = [&](auto&& for_each_candidate) {
      std::size_t best = kNone;
      double best_d = -kOptimalityTolerance;
      for_each_candidate([&](std::size_t j) {
        if (basic_pos_[j] != kNone) return;
        const double d = reduced_cost(j, y);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      });
      return best;
    };
    if (!sifting_) {
      if (bland) {
        for (std::size_t j = 0; j < m_; ++j) {
          if (basic_pos_[j] == kNone && reduced_cost(j, y) < -kOptimalityTolerance) {
            return j;
          }
        }
        return kNone;
      }
      return scan([&](auto&& visit) {
        for (std::size_t j = 0; j < m_; ++j) visit(j);
      });
    }
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::size_t q = kNone;
      if (bland) {
        for (const std::uint32_t j : candidates_) {
          if (basic_pos_[j] == kNone && reduced_cost(j, y) < -kOptimalityTolerance) {
            q = j;
            break;
          }
        }
      } else {
        q = scan([&](auto&& visit) {
          for (const std::uint32_t j : candidates_) visit(j);
        });
      }
      if (q != kNone) return q;
      if (attempt == 0 && !refresh_candidates(y)) return kNone;
    }
    return kNone;
  }

  // Runs simplex pivots for the given phase. Returns false on the iteration
  // cap.
  bool iterate(int phase) {
    phase_ = phase;
    std::size_t degenerate_run = 0;
    std::vector<double> y(n_);
    std::vector<double> alpha(n_);
    while (true) {
      if (restarted_ && phase_ == 2) {
        // A cold restart may have reinstated positive artificials.
        restarted_ = false;
        bool positive = false;
        for (std::size_t pos = 0; pos < n_; ++pos) {
          if (is_artificial(head_[pos]) && x_[pos] > kFeasibilityTolerance) {
            positive = true;
          }
        }
        if (positive) {
          if (!iterate(1)) return false;
          phase_ = 2;
        }
      }
      if (iterations_ >= options_.max_iterations) return false;
      compute_dual(y);
      const bool bland = degenerate_run >= options_.degenerate_switch;
      const std::size_t q = price(y, bland);
      if (q == kNone) {
        if (updates_since_refactor_ == 0) return true;
        refactor();
        continue;
      }

      load_column(q, alpha);
      ftran(alpha);

      double theta = std::numeric_limits<double>::infinity();
      bool artificial_blocks = false;
      for (std::size_t pos = 0; pos < n_; ++pos) {
        const double a = alpha[pos];
        if (phase_ == 2 && is_artificial(head_[pos])) {
          if (std::abs(a) > kPivotTolerance) {
            artificial_blocks = true;
            theta = 0.0;
          }
        } else if (a > kPivotTolerance) {
          theta = std::min(theta, std::max(x_[pos], 0.0) / a);
        }
      }
      if (!std::isfinite(theta)) {
        throw LpError("reduced problem is unbounded (empty column?)");
      }
      std::size_t leave = kNone;
      for (std::size_t pos = 0; pos < n_; ++pos) {
        const double a = alpha[pos];
        const std::size_t col = head_[pos];
        bool eligible;
        if (phase_ == 2 && is_artificial(col)) {
          eligible = std::abs(a) > kPivotTolerance;
        } else {
          eligible = !artificial_blocks && a > kPivotTolerance &&
                     std::max(x_[pos], 0.0) / a <= theta + kDegenerateStep;
        }
        if (!eligible) continue;
        if (leave == kNone) {
          leave = pos;
        } else if (bland) {
          if (col < head_[leave]) leave = pos;
        } else if (std::abs(a) > std::abs(alpha[leave])) {
          leave = pos;
        }
      }

      for (std::size_t pos = 0; pos < n_; ++pos) {
        if (alpha[pos] != 0.0) {
          x_[pos] -= theta * alpha[pos];
          if (x_[pos] < 0.0 && x_[pos] > -kFeasibilityTolerance) x_[pos] = 0.0;
        }
      }
      x_[leave] = theta;
      basic_pos_[head_[leave]] = kNone;
      head_[leave] = q;
      basic_pos_[q] = leave;
      push_eta(leave, alpha);
      ++updates_since_refactor_;
      ++iterations_;
      degenerate_run = theta <= kDegenerateStep ? degenerate_run + 1 : 0;
      if (updates_since_refactor_ >= options_.refactor_interval) refactor();
    }
  }

  LpSolution limit_solution() const {
    LpSolution solution;
    solution.status = LpStatus::kIterationLimit;
    solution.iterations = iterations_;
    return solution;
  }

  LpSolution extract() {
    if (updates_since_refactor_ > 0) refactor();
    LpSolution solution;
    solution.status = LpStatus::kOptimal;
    solution.iterations = iterations_;
    compute_dual(solution.dual);
    std::vector<std::pair<std::size_t, double>> basic;
    for (std::size_t pos = 0; pos < n_; ++pos) {
      if (!is_artificial(head_[pos])) basic.emplace_back(head_[pos], x_[pos]);
    }
    std::sort(basic.begin(), basic.end());
    double objective = 0.0;
    for (const auto& [col, value] : basic) {
      Configuration config(columns_.column(col));
      if (value > 1e-12) {
        objective += columns_.cost(col) * value;
        solution.support.push_back({config, col, value});
      }
      solution.basis.push_back(std::move(config));
    }
    solution.objective = objective;
    return solution;
  }

  std::size_t n_;
  std::size_t m_;
  ColumnsView columns_;
  std::vector<double> rhs_;
  SimplexOptions options_;

  std::vector<std::size_t> slack_;
  std::vector<std::size_t> head_;
  std::vector<std::size_t> basic_pos_;
  std::vector<double> x_;
  std::vector<double> work_;

  std::vector<std::uint32_t> eta_pivot_;
  std::vector<double> eta_pivot_value_;
  std::vector<std::size_t> eta_start_{0};
  std::vector<std::uint32_t> eta_row_;
  std::vector<double> eta_value_;
  std::size_t updates_since_refactor_ = 0;

  bool sifting_ = false;
  std::vector<std::uint32_t> candidates_;

  int phase_ = 2;
  bool restarted_ = false;
  std::size_t iterations_ = 0;
};

void validate(const ReducedProblem& problem) {
  if (problem.n_points == 0) throw InvalidArgument("lp: no constraints");
  if (problem.rhs.size() != problem.n_points) {
    throw InvalidArgument("lp: rhs size does not match the number of points");
  }
  for (const double b : problem.rhs) {
    if (!(b > 0.0)) throw InvalidArgument("lp: rhs must be positive");
  }
  if (problem.columns.size() == 0) throw InvalidArgument("lp: no columns");
  for (std::size_t j = 0; j < problem.columns.size(); ++j) {
    const IndexSpan col = problem.columns.column(j);
    if (col.empty()) throw InvalidArgument("lp: empty column");
    if (!std::isfinite(problem.columns.cost(j))) {
      throw InvalidArgument("lp: column " + std::to_string(j) +
                            " has a non-finite cost");
    }
    for (std::size_t t = 0; t < col.size(); ++t) {
      if (col[t] >= problem.n_points || (t > 0 && col[t] <= col[t - 1])) {
        throw InvalidArgument("lp: column " + std::to_string(j) +
                              " is not a sorted list of point indices");
      }
    }
  }
}

}  // namespace

ReducedProblem ReducedProblem::unit_mass(std::size_t n_points,
                                         ColumnsView columns) {
  return {n_points, columns, std::vector<double>(n_points, 1.0)};
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

double LpSolution::total_mass() const {
  double s = 0.0;
  for (const auto& entry : support) s += entry.weight;
  return s;
}

std::vector<Configuration> LpSolution::support_configurations() const {
  std::vector<Configuration> out;
  out.reserve(support.size());
  for (const auto& entry : support) out.push_back(entry.configuration);
  return out;
}

LpSolution solve(const ReducedProblem& problem, const SimplexOptions& options) {
  validate(problem);
  RevisedSimplex simplex(problem, options);
  simplex.cold_start();
  return simplex.run();
}

LpSolution warm_solve(const ReducedProblem& problem, const LpSolution& previous,
                      const SimplexOptions& options) {
  validate(problem);
  if (previous.basis.empty()) return solve(problem, options);

  std::unordered_map<std::uint64_t, std::vector<std::size_t>> wanted;
  for (std::size_t b = 0; b < previous.basis.size(); ++b) {
    wanted[hash_indices(previous.basis[b].indices())].push_back(b);
  }
  std::vector<std::size_t> desired;
  desired.reserve(previous.basis.size());
  std::vector<bool> found(previous.basis.size(), false);
  for (std::size_t j = 0; j < problem.columns.size(); ++j) {
    const IndexSpan col = problem.columns.column(j);
    const auto it = wanted.find(hash_indices(col));
    if (it == wanted.end()) continue;
    for (const std::size_t b : it->second) {
      if (found[b]) continue;
      const IndexSpan prev = previous.basis[b].indices();
      if (std::equal(col.begin(), col.end(), prev.begin(), prev.end())) {
        found[b] = true;
        desired.push_back(j);
        break;
      }
    }
  }
  RevisedSimplex simplex(problem, options);
  if (!simplex.start_from(desired)) simplex.cold_start();
  return simplex.run();
}

LpSolution solve_pool(const ConfigurationPool& pool, std::size_t n_points,
                      const LpSolution* previous, const SimplexOptions& options) {
  const ReducedProblem problem = ReducedProblem::unit_mass(n_points, pool.columns());
  LpSolution solution = previous ? warm_solve(problem, *previous, options)
                                 : solve(problem, options);
  if (solution.status != LpStatus::kOptimal) {
    throw LpError(std::string("reduced problem not solved: ") +
                  to_string(solution.status));
  }
  return solution;
}

SolutionCheck check_solution(const ReducedProblem& problem,
                             const LpSolution& solution) {
  SolutionCheck check;
  check.support_size = solution.support.size();
  std::vector<double> coverage(problem.n_points, 0.0);
  check.min_weight = std::numeric_limits<double>::infinity();
  for (const auto& entry : solution.support) {
    check.min_weight = std::min(check.min_weight, entry.weight);
    for (const PointIndex i : entry.configuration.indices()) {
      coverage[i] += entry.weight;
    }
    double s = 0.0;
    for (const PointIndex i : entry.configuration.indices()) s += solution.dual[i];
    const double c = problem.columns.cost(entry.column);
    check.slackness = std::max(check.slackness, std::abs(s - c));
  }
  for (std::size_t i = 0; i < problem.n_points; ++i) {
    check.primal_residual =
        std::max(check.primal_residual, std::abs(coverage[i] - problem.rhs[i]));
  }
  for (std::size_t j = 0; j < problem.columns.size(); ++j) {
    double s = 0.0;
    for (const PointIndex i : problem.columns.column(j)) s += solution.dual[i];
    check.dual_violation =
        std::max(check.dual_violation, s - problem.columns.cost(j));
  }
  double dual_objective = 0.0;
  for (std::size_t i = 0; i < problem.n_points; ++i) {
    dual_objective += solution.dual[i] * problem.rhs[i];
  }
  check.duality_gap = std::abs(solution.objective - dual_objective);
  return check;
}

void write_lp_format(const ReducedProblem& problem, std::ostream& out) {
  validate(problem);
  std::vector<std::vector<std::size_t>> rows(problem.n_points);
  for (std::size_t j = 0; j < problem.columns.size(); ++j) {
    for (const PointIndex i : problem.columns.column(j)) rows[i].push_back(j);
  }
  const auto old_precision = out.precision(17);
  out << "\\ reduced adversarial-risk problem: " << problem.n_points
      << " points, " << problem.columns.size() << " configurations\n";
  out << "Minimize\n obj:";
  for (std::size_t j = 0; j < problem.columns.size(); ++j) {
    out << (j == 0 ? " " : " + ") << problem.columns.cost(j) << " g" << j;
    if (j % 8 == 7) out << "\n";
  }
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < problem.n_points; ++i) {
    out << " p" << i << ":";
    for (std::size_t t = 0; t < rows[i].size(); ++t) {
      out << (t == 0 ? " " : " + ") << "g" << rows[i][t];
    }
    out << " = " << problem.rhs[i] << "\n";
  }
  out << "End\n";
  out.precision(old_precision);
}

}  // namespace advrisk

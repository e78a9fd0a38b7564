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

#ifndef ADVRISK_CONFIGURATION_HPP_
#define ADVRISK_CONFIGURATION_HPP_

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "advrisk/dataset.hpp"
#include "advrisk/geometry.hpp"

namespace advrisk {

using IndexSpan = std::span<const PointIndex>;

// A set of point indices, stored sorted. Whether the labels are pairwise
// distinct is a property checked against a dataset (is_feasible), not an
// invariant of the type.
class Configuration {
 public:
  Configuration() = default;
  // Sorts; throws InvalidArgument on an empty list or a repeated index.
  explicit Configuration(std::vector<PointIndex> indices);
  Configuration(std::initializer_list<PointIndex> indices)
      : Configuration(std::vector<PointIndex>(indices)) {}
  explicit Configuration(IndexSpan indices)
      : Configuration(std::vector<PointIndex>(indices.begin(), indices.end())) {}

  IndexSpan indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool contains(PointIndex i) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;

 private:
  std::vector<PointIndex> indices_;
};

std::uint64_t hash_indices(IndexSpan indices);

// Pairwise distinct labels. Throws InvalidArgument on an out-of-range index.
bool is_feasible(IndexSpan indices, const LabeledDataset& ds);

// Cost coefficient model: the classical budget (1 inside an epsilon-ball,
// +infinity otherwise) or the W2 penalty 1 + w2_penalty(points, tau).
class CostModel {
 public:
  enum class Kind { kClassicalBudget, kW2Penalty };

  static CostModel classical(double epsilon, Metric metric);
  static CostModel w2(double tau);

  Kind kind() const { return kind_; }
  double epsilon() const { return parameter_; }
  double tau() const { return parameter_; }
  Metric metric() const { return metric_; }

 private:
  CostModel(Kind kind, double parameter, Metric metric)
      : kind_(kind), parameter_(parameter), metric_(metric) {}
  Kind kind_;
  double parameter_;
  Metric metric_;
};

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

double configuration_radius(IndexSpan indices, const LabeledDataset& ds,
                            Metric metric);

// Throws InvalidArgument when the configuration is infeasible.
double cost(IndexSpan indices, const LabeledDataset& ds, const CostModel& model);

// Column-major 0/1 sparse matrix plus costs: column j covers the rows in
// indices()[offsets[j], offsets[j+1]).
class ColumnsView {
 public:
  ColumnsView() = default;
  ColumnsView(std::span<const std::uint64_t> offsets,
              std::span<const PointIndex> indices,
              std::span<const double> costs)
      : offsets_(offsets), indices_(indices), costs_(costs) {}

  std::size_t size() const { return costs_.size(); }
  IndexSpan column(std::size_t j) const {
    return indices_.subspan(offsets_[j], offsets_[j + 1] - offsets_[j]);
  }
  double cost(std::size_t j) const { return costs_[j]; }
  std::size_t nonzeros() const { return indices_.size(); }

 private:
  std::span<const std::uint64_t> offsets_;
  std::span<const PointIndex> indices_;
  std::span<const double> costs_;
};

// Owning flat storage behind a ColumnsView.
class ColumnStore {
 public:
  ColumnStore() { offsets_.push_back(0); }

  void push_back(IndexSpan sorted_indices, double cost);
  void reserve(std::size_t columns, std::size_t nonzeros);
  void clear();

  std::size_t size() const { return costs_.size(); }
  IndexSpan column(std::size_t j) const { return view().column(j); }
  double cost(std::size_t j) const { return costs_[j]; }
  ColumnsView view() const { return {offsets_, indices_, costs_}; }

  // Keeps the columns with keep[j] true, in order.
  void compact(const std::vector<bool>& keep);

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<PointIndex> indices_;
  std::vector<double> costs_;
};

// The working set of configurations with cached cost coefficients. Members
// are unique; lookups are by content.
class ConfigurationPool {
 public:
  ConfigurationPool() = default;

  std::size_t size() const { return store_.size(); }
  bool empty() const { return store_.size() == 0; }

  IndexSpan members(std::size_t j) const { return store_.column(j); }
  double cost(std::size_t j) const { return store_.cost(j); }
  std::uint64_t serial(std::size_t j) const { return serials_[j]; }
  ColumnsView columns() const { return store_.view(); }

  std::optional<std::size_t> find(IndexSpan sorted_indices) const;
  bool contains(const Configuration& r) const { return find(r.indices()).has_value(); }

  // Returns false if the configuration is already present.
  bool insert(const Configuration& r, double cost);
  // `sorted_indices` must already be canonical.
  bool insert_sorted(IndexSpan sorted_indices, double cost);

  // Adds {i} for every point with cost model's singleton coefficient.
  void insert_singletons(const LabeledDataset& ds, const CostModel& model);

  // Removes up to n_remove members that are neither singletons nor listed in
  // `active`, chosen uniformly at random. Returns the number removed.
  std::size_t trim_inactive(std::span<const Configuration> active,
                            std::size_t n_remove, std::mt19937_64& rng);

  // counts[m] = number of members with m points (counts[0] unused).
  std::vector<std::size_t> counts_by_length() const;

  void reserve(std::size_t columns, std::size_t nonzeros);

 private:
  static constexpr std::uint32_t kEmptySlot = 0xffffffffu;
  std::size_t probe(IndexSpan indices, std::uint64_t hash) const;
  void rebuild_index();

  ColumnStore store_;
  std::vector<std::uint64_t> serials_;
  std::uint64_t next_serial_ = 0;
  // Open addressing over column ids, linear probing, load <= 1/2.
  std::vector<std::uint32_t> slots_;
};

// Debug / warm-restart snapshot: JSON array of {"indices": [...], "cost": c}.
void write_pool_snapshot(const ConfigurationPool& pool, std::ostream& out);
ConfigurationPool read_pool_snapshot(std::istream& in);

}  // namespace advrisk

#endif  // ADVRISK_CONFIGURATION_HPP_

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

#include "advrisk/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "advrisk/error.hpp"
#include "json.hpp"

namespace advrisk {

Configuration::Configuration(std::vector<PointIndex> indices)
    : indices_(std::move(indices)) {
  if (indices_.empty()) throw InvalidArgument("configuration: empty index list");
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw InvalidArgument("configuration: repeated point index");
  }
}

bool Configuration::contains(PointIndex i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::uint64_t hash_indices(IndexSpan indices) {
  // splitmix64 finalizer folded over the indices.
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ indices.size();
  for (const PointIndex i : indices) {
    std::uint64_t z = h + 0x9e3779b97f4a7c15ull + i;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    h = z ^ (z >> 31);
  }
  return h;
}

bool is_feasible(IndexSpan indices, const LabeledDataset& ds) {
  std::vector<bool> seen(ds.n_classes(), false);
  for (const PointIndex i : indices) {
    if (i >= ds.size()) {
      throw InvalidArgument("configuration index " + std::to_string(i) +
                            " out of range");
    }
    const ClassId k = ds.label(i);
    if (seen[k]) return false;
    seen[k] = true;
  }
  return !indices.empty();
}

CostModel CostModel::classical(double epsilon, Metric metric) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("budget epsilon must be >= 0");
  return {Kind::kClassicalBudget, epsilon, metric};
}

CostModel CostModel::w2(double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
  return {Kind::kW2Penalty, tau, Metric::kEuclidean};
}

namespace {
std::vector<PointView> gather(IndexSpan indices, const LabeledDataset& ds) {
  std::vector<PointView> points;
  points.reserve(indices.size());
  for (const PointIndex i : indices) points.push_back(ds.point(i));
  return points;
}
}  // namespace

double configuration_radius(IndexSpan indices, const LabeledDataset& ds,
                            Metric metric) {
  const auto points = gather(indices, ds);
  return enclosing_radius(points, metric);
}

double cost(IndexSpan indices, const LabeledDataset& ds, const CostModel& model) {
  if (!is_feasible(indices, ds)) {
    throw InvalidArgument("cost: configuration has repeated labels");
  }
  if (indices.size() == 1) return 1.0;
  const auto points = gather(indices, ds);
  if (model.kind() == CostModel::Kind::kW2Penalty) {
    return 1.0 + w2_penalty(points, model.tau());
  }
  return within_budget(enclosing_radius(points, model.metric()), model.epsilon())
             ? 1.0
             : kInfiniteCost;
}

// ---------------------------------------------------------------------------

void ColumnStore::push_back(IndexSpan sorted_indices, double cost) {
  indices_.insert(indices_.end(), sorted_indices.begin(), sorted_indices.end());
  offsets_.push_back(indices_.size());
  costs_.push_back(cost);
}

void ColumnStore::reserve(std::size_t columns, std::size_t nonzeros) {
  offsets_.reserve(columns + 1);
  costs_.reserve(columns);
  indices_.reserve(nonzeros);
}

void ColumnStore::clear() {
  offsets_.assign(1, 0);
  indices_.clear();
  costs_.clear();
}

void ColumnStore::compact(const std::vector<bool>& keep) {
  std::size_t out_col = 0;
  std::size_t out_nz = 0;
  for (std::size_t j = 0; j < costs_.size(); ++j) {
    if (!keep[j]) continue;
    const std::size_t begin = offsets_[j];
    const std::size_t end = offsets_[j + 1];
    std::copy(indices_.begin() + static_cast<std::ptrdiff_t>(begin),
              indices_.begin() + static_cast<std::ptrdiff_t>(end),
              indices_.begin() + static_cast<std::ptrdiff_t>(out_nz));
    out_nz += end - begin;
    costs_[out_col] = costs_[j];
    offsets_[++out_col] = out_nz;
  }
  costs_.resize(out_col);
  offsets_.resize(out_col + 1);
  indices_.resize(out_nz);
}

// ---------------------------------------------------------------------------

std::size_t ConfigurationPool::probe(IndexSpan indices,
                                     std::uint64_t hash) const {
  const std::size_t mask = slots_.size() - 1;
  std::size_t pos = static_cast<std::size_t>(hash) & mask;
  while (true) {
    const std::uint32_t id = slots_[pos];
    if (id == kEmptySlot) return pos;
    const IndexSpan other = store_.column(id);
    if (std::equal(other.begin(), other.end(), indices.begin(), indices.end())) {
      return pos;
    }
    pos = (pos + 1) & mask;
  }
}

void ConfigurationPool::rebuild_index() {
  std::size_t capacity = 16;
  while (capacity < 2 * (store_.size() + 1)) capacity *= 2;
  slots_.assign(capacity, kEmptySlot);
  for (std::size_t j = 0; j < store_.size(); ++j) {
    const IndexSpan col = store_.column(j);
    slots_[probe(col, hash_indices(col))] = static_cast<std::uint32_t>(j);
  }
}

std::optional<std::size_t> ConfigurationPool::find(IndexSpan sorted_indices) const {
  if (slots_.empty()) return std::nullopt;
  const std::uint32_t id = slots_[probe(sorted_indices, hash_indices(sorted_indices))];
  if (id == kEmptySlot) return std::nullopt;
  return id;
}

bool ConfigurationPool::insert(const Configuration& r, double cost) {
  return insert_sorted(r.indices(), cost);
}

bool ConfigurationPool::insert_sorted(IndexSpan sorted_indices, double cost) {
  if (2 * (store_.size() + 1) > slots_.size()) rebuild_index();
  const std::size_t pos = probe(sorted_indices, hash_indices(sorted_indices));
  if (slots_[pos] != kEmptySlot) return false;
  if (store_.size() >= kEmptySlot) throw EnumerationCapExceeded("pool is full");
  slots_[pos] = static_cast<std::uint32_t>(store_.size());
  store_.push_back(sorted_indices, cost);
  serials_.push_back(next_serial_++);
  return true;
}

void ConfigurationPool::insert_singletons(const LabeledDataset& ds,
                                          const CostModel& model) {
  for (PointIndex i = 0; i < ds.size(); ++i) {
    const PointIndex single[1] = {i};
    insert_sorted(single, advrisk::cost(single, ds, model));
  }
}

std::size_t ConfigurationPool::trim_inactive(std::span<const Configuration> active,
                                             std::size_t n_remove,
                                             std::mt19937_64& rng) {
  if (n_remove == 0) return 0;
  std::vector<bool> protect(store_.size(), false);
  for (const Configuration& r : active) {
    if (const auto j = find(r.indices())) protect[*j] = true;
  }
  std::vector<std::size_t> eligible;
  for (std::size_t j = 0; j < store_.size(); ++j) {
    if (!protect[j] && store_.column(j).size() > 1) eligible.push_back(j);
  }
  const std::size_t n = std::min(n_remove, eligible.size());
  // Partial Fisher-Yates: the first n entries become a uniform sample.
  for (std::size_t t = 0; t < n; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, eligible.size() - 1);
    std::swap(eligible[t], eligible[pick(rng)]);
  }
  std::vector<bool> keep(store_.size(), true);
  for (std::size_t t = 0; t < n; ++t) keep[eligible[t]] = false;
  std::size_t out = 0;
  for (std::size_t j = 0; j < serials_.size(); ++j) {
    if (keep[j]) serials_[out++] = serials_[j];
  }
  serials_.resize(out);
  store_.compact(keep);
  rebuild_index();
  return n;
}

std::vector<std::size_t> ConfigurationPool::counts_by_length() const {
  std::vector<std::size_t> counts(1, 0);
  for (std::size_t j = 0; j < store_.size(); ++j) {
    const std::size_t m = store_.column(j).size();
    if (counts.size() <= m) counts.resize(m + 1, 0);
    ++counts[m];
  }
  return counts;
}

void ConfigurationPool::reserve(std::size_t columns, std::size_t nonzeros) {
  store_.reserve(columns, nonzeros);
  serials_.reserve(columns);
}

void write_pool_snapshot(const ConfigurationPool& pool, std::ostream& out) {
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const IndexSpan idx = pool.members(j);
    nlohmann::json entry;
    entry["indices"] = std::vector<PointIndex>(idx.begin(), idx.end());
    const double c = pool.cost(j);
    entry["cost"] = std::isfinite(c) ? nlohmann::json(c) : nlohmann::json(nullptr);
    doc.push_back(std::move(entry));
  }
  out << doc.dump() << '\n';
}

ConfigurationPool read_pool_snapshot(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("pool snapshot: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("pool snapshot: expected a JSON array");
  ConfigurationPool pool;
  for (const auto& entry : doc) {
    try {
      const Configuration r(entry.at("indices").get<std::vector<PointIndex>>());
      const auto& c = entry.at("cost");
      pool.insert(r, c.is_null() ? kInfiniteCost : c.get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("pool snapshot: ") + e.what());
    }
  }
  return pool;
}

}  // namespace advrisk

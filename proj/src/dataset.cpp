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

#include "advrisk/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "advrisk/error.hpp"

namespace advrisk {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw DataError("line " + std::to_string(line_no) +
                    ": non-numeric field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

LabeledDataset::LabeledDataset(std::vector<double> features, std::size_t dim,
                               std::span<const std::uint32_t> raw_labels,
                               std::span<const std::string> names)
    : features_(std::move(features)), dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("dataset: dimension must be >= 1");
  if (raw_labels.empty()) throw InvalidArgument("dataset: no points");
  if (features_.size() != raw_labels.size() * dim_) {
    throw InvalidArgument("dataset: feature matrix does not match labels");
  }
  std::unordered_map<std::uint32_t, ClassId> remap;
  labels_.reserve(raw_labels.size());
  for (const std::uint32_t raw : raw_labels) {
    auto [it, inserted] =
        remap.try_emplace(raw, static_cast<ClassId>(class_counts_.size()));
    if (inserted) {
      class_counts_.push_back(0);
      class_names_.push_back(raw < names.size() ? names[raw]
                                                : std::to_string(raw));
    }
    ++class_counts_[it->second];
    labels_.push_back(it->second);
  }
  class_offsets_.assign(class_counts_.size() + 1, 0);
  for (std::size_t k = 0; k < class_counts_.size(); ++k) {
    class_offsets_[k + 1] = class_offsets_[k] + class_counts_[k];
  }
  class_members_.resize(labels_.size());
  std::vector<std::size_t> fill(class_offsets_.begin(), class_offsets_.end() - 1);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    class_members_[fill[labels_[i]]++] = static_cast<PointIndex>(i);
  }
}

std::size_t LabeledDataset::max_class_count() const {
  return *std::max_element(class_counts_.begin(), class_counts_.end());
}

LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<std::uint32_t> raw_labels;
  std::vector<std::string> names;
  std::unordered_map<std::string, std::uint32_t> name_ids;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_commas(view);
    if (!have_header) {
      if (fields.size() < 2) {
        throw DataError("header must be label,x1,...,xd");
      }
      dim = fields.size() - 1;
      have_header = true;
      continue;
    }
    if (fields.size() != dim + 1) {
      throw DataError("line " + std::to_string(line_no) + ": ragged row (" +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(dim + 1) + ")");
    }
    if (fields[0].empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty label");
    }
    auto [it, inserted] = name_ids.try_emplace(
        std::string(fields[0]), static_cast<std::uint32_t>(names.size()));
    if (inserted) names.emplace_back(fields[0]);
    raw_labels.push_back(it->second);
    for (std::size_t k = 1; k <= dim; ++k) {
      features.push_back(parse_double(fields[k], line_no));
    }
  }
  if (!have_header || raw_labels.empty()) {
    throw DataError("'" + path.string() + "' contains no data rows");
  }
  return LabeledDataset(std::move(features), dim, raw_labels, names);
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "label";
  for (std::size_t k = 1; k <= ds.dim(); ++k) out << ",x" << k;
  out << '\n';
  char buf[64];
  for (PointIndex i = 0; i < ds.size(); ++i) {
    out << ds.class_name(ds.label(i));
    for (const double v : ds.point(i)) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

LabeledDataset load_cifar100_test(const std::filesystem::path& path,
                                  int n_classes_keep) {
  if (n_classes_keep < 1 || n_classes_keep > 100) {
    throw InvalidArgument("n_classes_keep must lie in [1, 100]");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
    throw DataError("'" + path.string() + "' is not a CIFAR-100 binary file (" +
                    std::to_string(bytes.size()) +
                    " bytes is not a multiple of 3074)");
  }
  const std::size_t n_records = bytes.size() / kCifarRecordBytes;
  std::vector<double> features;
  std::vector<std::uint32_t> raw_labels;
  for (std::size_t r = 0; r < n_records; ++r) {
    const unsigned char* record = bytes.data() + r * kCifarRecordBytes;
    const unsigned fine = record[1];
    if (fine >= 100) {
      throw DataError("record " + std::to_string(r) + ": fine label " +
                      std::to_string(fine) + " out of range");
    }
    if (fine >= static_cast<unsigned>(n_classes_keep)) continue;
    raw_labels.push_back(fine);
    for (std::size_t k = 0; k < kCifarPixels; ++k) {
      features.push_back(static_cast<double>(record[2 + k]) / 255.0);
    }
  }
  if (raw_labels.empty()) {
    throw DataError("no records with fine label below " +
                    std::to_string(n_classes_keep));
  }
  return LabeledDataset(std::move(features), kCifarPixels, raw_labels);
}

void validate(const SyntheticSpec& spec) {
  if (spec.n_classes < 2) throw InvalidArgument("synthetic: need >= 2 classes");
  if (spec.n_points < spec.n_classes) {
    throw InvalidArgument("synthetic: need at least one point per class");
  }
  if (!(spec.sigma > 0.0)) throw InvalidArgument("synthetic: sigma must be > 0");
  if (!(spec.center_box >= 0.0)) {
    throw InvalidArgument("synthetic: center_box must be >= 0");
  }
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> box(0.0, spec.center_box);
  std::uniform_int_distribution<int> pick_class(0, spec.n_classes - 1);
  std::normal_distribution<double> noise(0.0, spec.sigma);

  std::vector<double> centers(static_cast<std::size_t>(spec.n_classes) * 2);
  for (double& c : centers) c = box(rng);

  std::vector<double> features;
  features.reserve(static_cast<std::size_t>(spec.n_points) * 2);
  std::vector<std::uint32_t> raw_labels;
  raw_labels.reserve(static_cast<std::size_t>(spec.n_points));
  for (int i = 0; i < spec.n_points; ++i) {
    const int k = pick_class(rng);
    raw_labels.push_back(static_cast<std::uint32_t>(k));
    const double x = centers[2 * static_cast<std::size_t>(k)] + noise(rng);
    const double y = centers[2 * static_cast<std::size_t>(k) + 1] + noise(rng);
    features.push_back(x);
    features.push_back(y);
  }
  std::vector<std::string> names;
  for (int k = 1; k <= spec.n_classes; ++k) names.push_back(std::to_string(k));
  return LabeledDataset(std::move(features), 2, raw_labels, names);
}

}  // namespace advrisk

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

#ifndef ADVRISK_DATASET_HPP_
#define ADVRISK_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "advrisk/geometry.hpp"

namespace advrisk {

using PointIndex = std::uint32_t;
using ClassId = std::uint32_t;

// N labelled points in R^d. Class ids are contiguous 0..K-1, assigned in
// order of first appearance; class_name(k) keeps the original label text.
// Every point carries unit marginal mass, so the total mass is N.
class LabeledDataset {
 public:
  // `features` is row-major N x dim. Labels are arbitrary ids that get
  // renumbered by first appearance; `names[label]` is the printable name of a
  // raw label (when empty, the raw id is printed).
  LabeledDataset(std::vector<double> features, std::size_t dim,
                 std::span<const std::uint32_t> raw_labels,
                 std::span<const std::string> names = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t n_classes() const { return class_counts_.size(); }

  PointView point(PointIndex i) const {
    return {features_.data() + static_cast<std::size_t>(i) * dim_, dim_};
  }
  ClassId label(PointIndex i) const { return labels_[i]; }
  std::span<const ClassId> labels() const { return labels_; }
  std::span<const double> features() const { return features_; }

  std::span<const std::size_t> class_counts() const { return class_counts_; }
  std::size_t max_class_count() const;
  const std::string& class_name(ClassId k) const { return class_names_[k]; }
  std::span<const std::string> class_names() const { return class_names_; }

  // Points of class k in increasing index order.
  std::span<const PointIndex> members(ClassId k) const {
    return {class_members_.data() + class_offsets_[k],
            class_offsets_[k + 1] - class_offsets_[k]};
  }

 private:
  std::vector<double> features_;
  std::size_t dim_;
  std::vector<ClassId> labels_;
  std::vector<std::size_t> class_counts_;
  std::vector<std::string> class_names_;
  std::vector<PointIndex> class_members_;
  std::vector<std::size_t> class_offsets_;
};

// CSV with a header row and rows `label,x1,...,xd`.
LabeledDataset load_csv(const std::filesystem::path& path);
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path);

// CIFAR-100 binary test split: records of 1 coarse byte, 1 fine byte and
// 3072 pixel bytes (three 32x32 planes). Keeps records whose fine label is
// below `n_classes_keep`; pixels are scaled to [0, 1].
inline constexpr std::size_t kCifarRecordBytes = 3074;
inline constexpr std::size_t kCifarPixels = 3072;
LabeledDataset load_cifar100_test(const std::filesystem::path& path,
                                  int n_classes_keep);

// Gaussian blobs in the plane: K centers uniform in [0, center_box]^2, each
// point's class uniform in {1..K}, point = center + sigma * N(0, I).
struct SyntheticSpec {
  int n_classes = 10;
  int n_points = 1000;
  double center_box = 0.5;
  double sigma = 2.0;
  std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);
LabeledDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace advrisk

#endif  // ADVRISK_DATASET_HPP_

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

#ifndef ADVRISK_GEOMETRY_HPP_
#define ADVRISK_GEOMETRY_HPP_

#include <span>
#include <string_view>
#include <vector>

namespace advrisk {

// Ground metric on the feature space.
enum class Metric { kEuclidean, kChebyshev };

// Parses "l2" / "linf" (also "euclidean" / "chebyshev").
Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);

using PointView = std::span<const double>;

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

// Slack allowed when checking that a point lies inside a ball of `radius`.
inline double containment_tolerance(double radius) {
  return 1e-9 * (1.0 + radius);
}

// radius <= budget, with the float slack used for every feasibility test.
inline bool within_budget(double radius, double budget) {
  return radius <= budget + 1e-9 * (1.0 + budget);
}

double distance(PointView a, PointView b, Metric metric);

// Minimum enclosing ball of a nonempty point set.
//
// Chebyshev: midpoint of the bounding box, radius half the largest span.
// Euclidean: Welzl's move-to-front recursion when the working dimension is at
// most kExactDimensionLimit. High-dimensional inputs are first projected onto
// the affine hull of the points (dimension <= n - 1); if that is still too
// large, a Frank-Wolfe scheme with away steps on the dual runs until the
// radius is within kIterativeRelativeTolerance of the optimum.
//
// The returned radius is always the maximal distance from the returned center
// to an input point, so containment holds up to rounding.
Ball enclosing_ball(std::span<const PointView> points, Metric metric);

// Radius only; same algorithm as enclosing_ball.
double enclosing_radius(std::span<const PointView> points, Metric metric);

inline constexpr int kExactDimensionLimit = 16;
inline constexpr double kIterativeRelativeTolerance = 1e-6;

// Arithmetic mean. Only the Euclidean Frechet mean is supported.
std::vector<double> frechet_mean(std::span<const PointView> points,
                                 Metric metric = Metric::kEuclidean);

// (1 / tau^2) * sum_i |x_i - mean|^2 under the Euclidean metric.
double w2_penalty(std::span<const PointView> points, double tau);

namespace detail {
// The two Euclidean back ends, exposed for cross-checking. Neither projects
// onto the affine hull.
Ball welzl_ball(std::span<const PointView> points);
Ball iterative_ball(std::span<const PointView> points, double relative_tol);
}  // namespace detail

}  // namespace advrisk

#endif  // ADVRISK_GEOMETRY_HPP_

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

#include "advrisk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "advrisk/error.hpp"

namespace advrisk {
namespace {

std::size_t check_points(std::span<const PointView> points,
                         const char* where) {
  if (points.empty()) {
    throw InvalidArgument(std::string(where) + ": empty point set");
  }
  const std::size_t dim = points.front().size();
  if (dim == 0) throw InvalidArgument(std::string(where) + ": zero dimension");
  for (const PointView& p : points) {
    if (p.size() != dim) {
      throw InvalidArgument(std::string(where) + ": dimension mismatch");
    }
  }
  return dim;
}

double max_distance_from(std::span<const PointView> points,
                         const std::vector<double>& center, Metric metric) {
  double r = 0.0;
  for (const PointView& p : points) {
    r = std::max(r, distance(p, center, metric));
  }
  return r;
}

// Welzl's move-to-front recursion over points in working coordinates.
// `Dim` is a compile-time dimension or Eigen::Dynamic.
template <int Dim>
class MoveToFrontBall {
 public:
  using Vector = Eigen::Matrix<double, Dim, 1>;

  explicit MoveToFrontBall(std::vector<Vector> points)
      : points_(std::move(points)),
        dim_(static_cast<int>(points_.front().size())) {
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    boundary_.reserve(static_cast<std::size_t>(dim_) + 1);
    Ball b = solve(order_.size());
    center_ = std::move(b.center);
    squared_radius_ = b.squared_radius;
  }

  const Vector& center() const { return center_; }

 private:
  struct Ball {
    Vector center;
    double squared_radius;
  };

  bool inside(const Vector& p, const Ball& ball) const {
    if (ball.squared_radius < 0.0) return false;
    return (p - ball.center).squaredNorm() <=
           ball.squared_radius * (1.0 + 1e-12);
  }

  // Smallest ball with every boundary point on its sphere (circumball in the
  // affine hull of the boundary).
  Ball through_boundary() const {
    if (boundary_.empty()) return {Vector::Zero(dim_), -1.0};
    const Vector& origin = points_[boundary_.front()];
    const int m = static_cast<int>(boundary_.size()) - 1;
    if (m == 0) return {origin, 0.0};
    constexpr int kMax = Dim == Eigen::Dynamic ? Eigen::Dynamic : Dim + 1;
    constexpr int kLayout = Dim == 1 ? Eigen::RowMajor : Eigen::ColMajor;
    Eigen::Matrix<double, Dim, Eigen::Dynamic, kLayout, Dim, kMax> spokes(dim_, m);
    for (int j = 0; j < m; ++j) {
      spokes.col(j) = points_[boundary_[static_cast<std::size_t>(j) + 1]] - origin;
    }
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMax, kMax> gram =
        spokes.transpose() * spokes;
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMax, 1> rhs =
        0.5 * gram.diagonal();
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMax, 1> coeff =
        gram.colPivHouseholderQr().solve(rhs);
    Vector center = origin + spokes * coeff;
    double r2 = 0.0;
    for (int idx : boundary_) {
      r2 = std::max(r2, (points_[static_cast<std::size_t>(idx)] - center).squaredNorm());
    }
    return {center, r2};
  }

  // Smallest ball enclosing order_[0, end) with boundary_ on its sphere.
  Ball solve(std::size_t end) {
    Ball ball = through_boundary();
    if (static_cast<int>(boundary_.size()) == dim_ + 1) return ball;
    for (std::size_t i = 0; i < end; ++i) {
      const int idx = order_[i];
      if (inside(points_[static_cast<std::size_t>(idx)], ball)) continue;
      boundary_.push_back(idx);
      ball = solve(i);
      boundary_.pop_back();
      std::rotate(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(i),
                  order_.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
    return ball;
  }

  std::vector<Vector> points_;
  int dim_;
  std::vector<int> order_;
  std::vector<int> boundary_;
  Vector center_;
  double squared_radius_ = 0.0;
};

// Yildirim's Frank-Wolfe with away steps on the dual of the minimum enclosing
// ball problem. Stops once max_i |q_i - c| <= (1 + tol) * sqrt(dual value),
// which bounds the radius relative to the optimum.
Eigen::VectorXd iterative_center(const std::vector<Eigen::VectorXd>& q,
                                 double tol) {
  const std::size_t n = q.size();
  auto far_from = [&](const Eigen::VectorXd& x) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (q[i] - x).squaredNorm();
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return std::pair{best, best_d};
  };
  const auto [a, da] = far_from(q[0]);
  if (da == 0.0) return q[0];
  const auto [b, db] = far_from(q[a]);
  (void)db;

  std::vector<double> weight(n, 0.0);
  std::vector<double> norm2(n);
  for (std::size_t i = 0; i < n; ++i) norm2[i] = q[i].squaredNorm();
  weight[a] = 0.5;
  weight[b] += 0.5;
  Eigen::VectorXd center = 0.5 * (q[a] + q[b]);
  auto dual_value = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += weight[i] * norm2[i];
    return s - center.squaredNorm();
  };
  double phi = dual_value();
  const double stop = (1.0 + tol) * (1.0 + tol);
  std::vector<double> dist2(n);
  for (int iter = 0; iter < 10'000'000; ++iter) {
    std::size_t far = 0;
    std::size_t near = n;
    for (std::size_t i = 0; i < n; ++i) {
      dist2[i] = (q[i] - center).squaredNorm();
      if (dist2[i] > dist2[far]) far = i;
      if (weight[i] > 0.0 && (near == n || dist2[i] < dist2[near])) near = i;
    }
    const double delta_plus = dist2[far] / phi - 1.0;
    if (1.0 + delta_plus <= stop) break;
    const double delta_minus = 1.0 - dist2[near] / phi;
    if (delta_plus >= delta_minus || weight[near] >= 1.0) {
      const double step = delta_plus / (2.0 * (1.0 + delta_plus));
      for (double& w : weight) w *= 1.0 - step;
      weight[far] += step;
      center = (1.0 - step) * center + step * q[far];
    } else {
      const double step =
          std::min(delta_minus / (2.0 * (1.0 - delta_minus)),
                   weight[near] / (1.0 - weight[near]));
      for (double& w : weight) w *= 1.0 + step;
      weight[near] -= step;
      if (weight[near] < 1e-15) weight[near] = 0.0;
      center = (1.0 + step) * center - step * q[near];
    }
    phi = dual_value();
  }
  return center;
}

template <int Dim>
std::vector<double> welzl_center(std::span<const PointView> points) {
  using Vector = Eigen::Matrix<double, Dim, 1>;
  std::vector<Vector> work;
  work.reserve(points.size());
  const auto dim = static_cast<Eigen::Index>(points.front().size());
  for (const PointView& p : points) {
    Vector v;
    if constexpr (Dim == Eigen::Dynamic) v.resize(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = p[static_cast<std::size_t>(k)];
    work.push_back(v);
  }
  MoveToFrontBall<Dim> solver(std::move(work));
  return {solver.center().data(), solver.center().data() + dim};
}

std::vector<double> exact_center(std::span<const PointView> points) {
  switch (points.front().size()) {
    case 1:
      return welzl_center<1>(points);
    case 2:
      return welzl_center<2>(points);
    case 3:
      return welzl_center<3>(points);
    default:
      return welzl_center<Eigen::Dynamic>(points);
  }
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<double> iterative_center_std(std::span<const PointView> points,
                                         double tol) {
  std::vector<Eigen::VectorXd> q;
  q.reserve(points.size());
  for (const PointView& p : points) {
    q.push_back(Eigen::Map<const Eigen::VectorXd>(
        p.data(), static_cast<Eigen::Index>(p.size())));
  }
  return to_std(iterative_center(q, tol));
}

// Projects the points onto an orthonormal basis of their affine hull, solves
// there, and lifts the center back.
std::vector<double> projected_center(std::span<const PointView> points) {
  const auto dim = static_cast<Eigen::Index>(points.front().size());
  const auto m = static_cast<Eigen::Index>(points.size()) - 1;
  const Eigen::Map<const Eigen::VectorXd> origin(points.front().data(), dim);
  Eigen::MatrixXd spokes(dim, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    spokes.col(j) = Eigen::Map<const Eigen::VectorXd>(
                        points[static_cast<std::size_t>(j) + 1].data(), dim) -
                    origin;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(spokes);
  const Eigen::Index rank = qr.rank();
  if (rank == 0) return to_std(origin);
  const Eigen::MatrixXd upper =
      qr.matrixR().topRows(rank).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd coords = upper * qr.colsPermutation().transpose();

  std::vector<double> flat(static_cast<std::size_t>(rank * (m + 1)), 0.0);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < rank; ++k) {
      flat[static_cast<std::size_t>((j + 1) * rank + k)] = coords(k, j);
    }
  }
  std::vector<PointView> reduced;
  for (Eigen::Index j = 0; j <= m; ++j) {
    reduced.emplace_back(flat.data() + j * rank, static_cast<std::size_t>(rank));
  }
  const std::vector<double> local =
      rank <= kExactDimensionLimit
          ? exact_center(reduced)
          : iterative_center_std(reduced, kIterativeRelativeTolerance);

  Eigen::VectorXd lifted = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index k = 0; k < rank; ++k) lifted[k] = local[static_cast<std::size_t>(k)];
  lifted = qr.householderQ() * lifted;
  lifted += origin;
  return to_std(lifted);
}

Ball chebyshev_ball(std::span<const PointView> points) {
  const std::size_t dim = points.front().size();
  Ball ball;
  ball.center.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    double lo = points.front()[k];
    double hi = lo;
    for (const PointView& p : points) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    ball.center[k] = 0.5 * (lo + hi);
  }
  ball.radius = max_distance_from(points, ball.center, Metric::kChebyshev);
  return ball;
}

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "l2" || name == "euclidean") return Metric::kEuclidean;
  if (name == "linf" || name == "chebyshev") return Metric::kChebyshev;
  throw InvalidArgument("unknown metric '" + std::string(name) +
                        "' (expected l2 or linf)");
}

std::string_view metric_name(Metric metric) {
  return metric == Metric::kEuclidean ? "l2" : "linf";
}

double distance(PointView a, PointView b, Metric metric) {
  if (a.size() != b.size()) {
    throw InvalidArgument("distance: dimension mismatch");
  }
  if (a.empty()) throw InvalidArgument("distance: zero dimension");
  if (metric == Metric::kChebyshev) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

Ball enclosing_ball(std::span<const PointView> points, Metric metric) {
  const std::size_t dim = check_points(points, "enclosing_ball");
  if (metric == Metric::kChebyshev) return chebyshev_ball(points);

  Ball ball;
  if (points.size() == 1) {
    ball.center.assign(points.front().begin(), points.front().end());
    return ball;
  }
  if (points.size() == 2) {
    ball.center.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      ball.center[k] = 0.5 * (points[0][k] + points[1][k]);
    }
  } else if (dim <= static_cast<std::size_t>(kExactDimensionLimit)) {
    ball.center = exact_center(points);
  } else if (points.size() - 1 < dim) {
    ball.center = projected_center(points);
  } else {
    ball.center = iterative_center_std(points, kIterativeRelativeTolerance);
  }
  ball.radius = max_distance_from(points, ball.center, metric);
  return ball;
}

double enclosing_radius(std::span<const PointView> points, Metric metric) {
  return enclosing_ball(points, metric).radius;
}

std::vector<double> frechet_mean(std::span<const PointView> points,
                                 Metric metric) {
  const std::size_t dim = check_points(points, "frechet_mean");
  if (metric != Metric::kEuclidean) {
    throw InvalidArgument(
        "frechet_mean: only the Euclidean metric has a unique mean");
  }
  std::vector<double> mean(dim, 0.0);
  for (const PointView& p : points) {
    for (std::size_t k = 0; k < dim; ++k) mean[k] += p[k];
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  for (double& v : mean) v *= inv;
  return mean;
}

double w2_penalty(std::span<const PointView> points, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("w2_penalty: tau must be positive");
  const std::vector<double> mean = frechet_mean(points);
  double s = 0.0;
  for (const PointView& p : points) {
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double d = p[k] - mean[k];
      s += d * d;
    }
  }
  return s / (tau * tau);
}

namespace detail {

Ball welzl_ball(std::span<const PointView> points) {
  check_points(points, "welzl_ball");
  Ball ball;
  ball.center = exact_center(points);
  ball.radius = max_distance_from(points, ball.center, Metric::kEuclidean);
  return ball;
}

Ball iterative_ball(std::span<const PointView> points, double relative_tol) {
  check_points(points, "iterative_ball");
  Ball ball;
  ball.center = iterative_center_std(points, relative_tol);
  ball.radius = max_distance_from(points, ball.center, Metric::kEuclidean);
  return ball;
}

}  // namespace detail
}  // namespace advrisk

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

// Independent reference implementations used only by the tests. They share
// no code with the library: plain loops, no Eigen, brute force throughout.

#ifndef ADVRISK_TESTS_ORACLE_ORACLE_HPP_
#define ADVRISK_TESTS_ORACLE_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Point = std::vector<double>;

struct Instance {
  std::vector<Point> points;
  std::vector<int> labels;  // 0-based, contiguous
};

inline double l2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

inline double linf(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

// Solves the square system A x = b by Gaussian elimination with partial
// pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a,
                                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Center of the smallest sphere through the given points inside their
// affine hull; nullopt for affinely dependent points.
inline std::optional<Point> circumcenter(const std::vector<Point>& pts) {
  const Point& o = pts[0];
  const std::size_t m = pts.size() - 1;
  if (m == 0) return o;
  std::vector<Point> v(m, Point(o.size()));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < o.size(); ++k) v[j][k] = pts[j + 1][k] - o[k];
  }
  std::vector<std::vector<double>> g(m, std::vector<double>(m));
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < o.size(); ++k) s += v[i][k] * v[j][k];
      g[i][j] = s;
    }
    rhs[i] = 0.5 * g[i][i];
  }
  const auto coef = solve_linear(g, rhs);
  if (!coef) return std::nullopt;
  Point c = o;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < o.size(); ++k) c[k] += (*coef)[j] * v[j][k];
  }
  return c;
}

// Euclidean minimum enclosing radius: the smallest ball among those
// circumscribing at most d+1 of the points that contains all of them.
inline double miniball_radius(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  const std::size_t d = pts[0].size();
  const std::size_t max_support = std::min(n, d + 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_support) continue;
    std::vector<Point> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sub.push_back(pts[i]);
    }
    const auto c = circumcenter(sub);
    if (!c) continue;
    const double r = l2(*c, sub[0]);
    if (r >= best) continue;
    bool all_in = true;
    for (const Point& p : pts) {
      if (l2(*c, p) > r * (1.0 + 1e-12) + 1e-12) all_in = false;
    }
    if (all_in) best = r;
  }
  return best;
}

// Radius by direct minimization of max distance over a grid of centers in
// the plane, refined around the incumbent.
inline double grid_miniball_radius_2d(const std::vector<Point>& pts) {
  double lo_x = pts[0][0], hi_x = lo_x, lo_y = pts[0][1], hi_y = lo_y;
  for (const Point& p : pts) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  double span = std::max(hi_x - lo_x, hi_y - lo_y) + 1e-12;
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 80; ++round) {
    double bx = cx, by = cy;
    for (int i = -20; i <= 20; ++i) {
      for (int j = -20; j <= 20; ++j) {
        const Point c = {cx + span * i / 20.0, cy + span * j / 20.0};
        double r = 0.0;
        for (const Point& p : pts) r = std::max(r, l2(c, p));
        if (r < best) {
          best = r;
          bx = c[0];
          by = c[1];
        }
      }
    }
    cx = bx;
    cy = by;
    span *= 0.5;
  }
  return best;
}

inline double chebyshev_radius(const std::vector<Point>& pts) {
  double r = 0.0;
  for (std::size_t k = 0; k < pts[0].size(); ++k) {
    double lo = pts[0][k], hi = lo;
    for (const Point& p : pts) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    r = std::max(r, 0.5 * (hi - lo));
  }
  return r;
}

// Every subset (as a sorted index list) whose labels are pairwise distinct.
inline std::vector<std::vector<std::uint32_t>> label_distinct_subsets(const Instance& in) {
  const std::size_t n = in.points.size();
  std::vector<std::vector<std::uint32_t>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::uint32_t> s;
    std::vector<int> seen;
    bool ok = true;
    for (std::uint32_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      if (std::find(seen.begin(), seen.end(), in.labels[i]) != seen.end()) ok = false;
      seen.push_back(in.labels[i]);
      s.push_back(i);
    }
    if (ok) out.push_back(s);
  }
  return out;
}

inline std::vector<Point> gather(const Instance& in, const std::vector<std::uint32_t>& s) {
  std::vector<Point> pts;
  for (const auto i : s) pts.push_back(in.points[i]);
  return pts;
}

// Configurations within budget eps (same boundary slack as the library's
// contract: radius <= eps + 1e-9 (1 + eps)).
inline std::vector<std::vector<std::uint32_t>> feasible_configurations(const Instance& in,
                                                                      double eps,
                                                                      bool chebyshev) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& s : label_distinct_subsets(in)) {
    const auto pts = gather(in, s);
    const double r = chebyshev ? chebyshev_radius(pts) : miniball_radius(pts);
    if (r <= eps + 1e-9 * (1.0 + eps)) out.push_back(s);
  }
  return out;
}

// 1 + (1/tau^2) sum |x - mean|^2 by the two-pass definition.
inline double w2_cost(const std::vector<Point>& pts, double tau) {
  Point mean(pts[0].size(), 0.0);
  for (const Point& p : pts) {
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += p[k] / pts.size();
  }
  double s = 0.0;
  for (const Point& p : pts) s += l2(p, mean) * l2(p, mean);
  return 1.0 + s / (tau * tau);
}

struct LpResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense two-phase tableau simplex with Bland's rule for
//   min c.x  s.t.  A x = b (b >= 0), x >= 0,
// where A is given column-wise as 0/1 incidence lists over `rows` rows.
inline LpResult dense_lp(std::size_t rows, const std::vector<std::vector<std::uint32_t>>& cols,
                         const std::vector<double>& cost, const std::vector<double>& b) {
  const std::size_t n = cols.size();
  const std::size_t width = n + rows + 1;  // structurals, artificials, rhs
  std::vector<std::vector<double>> t(rows, std::vector<double>(width, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto i : cols[j]) t[i][j] = 1.0;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    t[i][n + i] = 1.0;
    t[i][width - 1] = b[i];
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = n + i;

  auto run = [&](const std::vector<double>& c, std::size_t allowed) {
    for (int guard = 0; guard < 100000; ++guard) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        double d = c[j];
        for (std::size_t i = 0; i < rows; ++i) d -= c[basis[i]] * t[i][j];
        if (d < -1e-11) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return;
      std::size_t leave = rows;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows; ++i) {
        if (t[i][enter] > 1e-11) {
          const double ratio = t[i][width - 1] / t[i][enter];
          if (ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == rows) return;  // unbounded; cannot happen with c >= 0
      const double p = t[leave][enter];
      for (double& v : t[leave]) v /= p;
      for (std::size_t i = 0; i < rows; ++i) {
        if (i == leave || t[i][enter] == 0.0) continue;
        const double f = t[i][enter];
        for (std::size_t k = 0; k < width; ++k) t[i][k] -= f * t[leave][k];
      }
      basis[leave] = enter;
    }
  };

  std::vector<double> phase1(n + rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) phase1[n + i] = 1.0;
  run(phase1, n + rows);
  double infeas = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] >= n) infeas += t[i][width - 1];
  }
  LpResult result;
  if (infeas > 1e-9) return result;
  // Drive zero-level artificials out where possible.
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(t[i][j]) > 1e-9) {
        const double p = t[i][j];
        for (double& v : t[i]) v /= p;
        for (std::size_t r = 0; r < rows; ++r) {
          if (r == i || t[r][j] == 0.0) continue;
          const double f = t[r][j];
          for (std::size_t k = 0; k < width; ++k) t[r][k] -= f * t[i][k];
        }
        basis[i] = j;
        break;
      }
    }
  }
  std::vector<double> phase2(n + rows, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = cost[j];
  // Artificials still basic sit on redundant rows at level 0; exclude them
  // from entering.
  run(phase2, n);
  result.feasible = true;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < n) result.x[basis[i]] = t[i][width - 1];
  }
  for (std::size_t j = 0; j < n; ++j) result.objective += cost[j] * result.x[j];
  return result;
}

// Random instance: n points in [0, box]^d with labels drawn uniformly from k
// classes, every class used at least once.
inline Instance random_instance(std::mt19937_64& rng, std::size_t n, int k, std::size_t d,
                                double box) {
  Instance in;
  std::uniform_real_distribution<double> coord(0.0, box);
  std::uniform_int_distribution<int> label(0, k - 1);
  for (std::size_t i = 0; i < n; ++i) {
    Point p(d);
    for (double& v : p) v = coord(rng);
    in.points.push_back(p);
    in.labels.push_back(i < static_cast<std::size_t>(k) ? static_cast<int>(i) : label(rng));
  }
  return in;
}

}  // namespace oracle

#endif  // ADVRISK_TESTS_ORACLE_ORACLE_HPP_

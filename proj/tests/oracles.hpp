#pragma once

// Brute-force reference implementations. They deliberately avoid the
// library's selection and trimming code paths.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "laysam/core.hpp"

namespace oracle {

using laysam::Index;
using laysam::Matrix;
using laysam::Vector;

inline Vector pairwise_min_distances(const Matrix& points, const Matrix& centers) {
  Vector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) {
    double best = INFINITY;
    for (Index j = 0; j < centers.rows(); ++j) {
      double s = 0.0;
      for (Index c = 0; c < points.cols(); ++c) {
        const double diff = points(i, c) - centers(j, c);
        s += diff * diff;
      }
      best = std::min(best, std::sqrt(s));
    }
    out[i] = best;
  }
  return out;
}

/// Indices in "largest first, smaller index on ties" order via a stable sort.
inline std::vector<Index> rank_order(const std::vector<double>& values) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
  });
  return order;
}

/// Unit weights, integer z: sort distances descending, drop z, average the rest.
inline double expand_sort_drop(std::vector<double> dist, int z, int power) {
  std::sort(dist.begin(), dist.end(), std::greater<>());
  long double sum = 0.0L;
  for (std::size_t i = static_cast<std::size_t>(z); i < dist.size(); ++i) {
    sum += power == 1 ? dist[i] : static_cast<long double>(dist[i]) * dist[i];
  }
  return static_cast<double>(sum / static_cast<long double>(dist.size() - static_cast<std::size_t>(z)));
}

/// Integer weights: expand each point into unit copies first.
inline double expand_integer_weights(const std::vector<double>& dist, const std::vector<int>& w,
                                     int z, int power) {
  std::vector<double> copies;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    for (int c = 0; c < w[i]; ++c) copies.push_back(dist[i]);
  }
  return expand_sort_drop(copies, z, power);
}

/// Fractional weights: walk the sorted order removing mass until z is gone.
inline double sequential_trim(const std::vector<double>& dist, const std::vector<double>& w,
                              double z, int power, std::vector<double>* removed = nullptr) {
  const auto order = rank_order(dist);
  std::vector<double> rem(dist.size(), 0.0);
  long double remaining = z;
  for (Index i : order) {
    if (remaining <= 0) break;
    const auto u = static_cast<std::size_t>(i);
    if (w[u] <= 0) continue;
    const long double take = std::min<long double>(w[u], remaining);
    rem[u] = static_cast<double>(take);
    remaining -= take;
  }
  long double total = 0.0L, sum = 0.0L;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    total += w[i];
    const long double keep = static_cast<long double>(w[i]) - rem[i];
    sum += keep * (power == 1 ? dist[i] : static_cast<long double>(dist[i]) * dist[i]);
  }
  if (removed) *removed = rem;
  return static_cast<double>(sum / (total - z));
}

/// Exhaustive 1-D k=2 trimmed k-means: every inlier subset, every split of
/// the sorted inliers into two contiguous groups.
inline double brute_force_1d_two_means(std::vector<double> pts, int z) {
  std::sort(pts.begin(), pts.end());
  const int n = static_cast<int>(pts.size());
  double best = INFINITY;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != n - z) continue;
    std::vector<double> in;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) in.push_back(pts[static_cast<std::size_t>(i)]);
    }
    for (std::size_t cut = 1; cut < in.size(); ++cut) {
      double cost = 0.0;
      for (int part = 0; part < 2; ++part) {
        const std::size_t b = part == 0 ? 0 : cut, e = part == 0 ? cut : in.size();
        double mean = 0.0;
        for (std::size_t i = b; i < e; ++i) mean += in[i];
        mean /= static_cast<double>(e - b);
        for (std::size_t i = b; i < e; ++i) cost += (in[i] - mean) * (in[i] - mean);
      }
      best = std::min(best, cost / (n - z));
    }
  }
  return best;
}

/// (X^T W X) h = X^T W y with X = [features, 1].
inline Vector normal_equations(const Matrix& coords, const Vector& w) {
  const Index n = coords.rows(), d = coords.cols();
  Eigen::MatrixXd X(n, d);
  X.leftCols(d - 1) = coords.leftCols(d - 1);
  X.col(d - 1).setOnes();
  const Eigen::VectorXd y = coords.col(d - 1);
  const Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
  const Eigen::VectorXd b = X.transpose() * w.asDiagonal() * y;
  return A.ldlt().solve(b);
}

}  // namespace oracle

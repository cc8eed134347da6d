#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace laysam {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using ColVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = RowMatrix<double>;
using Vector = ColVector<double>;
using IndexList = std::vector<Index>;

struct Seed {
  std::uint64_t value = 0;
};

// Stateless mixing used to derive independent substreams from a seed.
std::uint64_t splitmix64(std::uint64_t x);
Seed derive_seed(Seed base, std::uint64_t stream);

// Seeded generator with platform-independent output. The engine is
// mt19937_64 (fully specified by the standard); the conversions to
// uniform/normal variates are implemented here because the standard
// distributions are allowed to differ between library vendors.
class Rng {
 public:
  explicit Rng(Seed seed);

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via the polar method.
  double normal();
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Compensated (Neumaier) accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// An instance P: n points in d dimensions, stored one point per row.
/// With a response column, the last coordinate is the regression target y.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(Matrix coords, bool has_response = false);

  Index size() const { return coords_.rows(); }
  Index dim() const { return coords_.cols(); }
  bool has_response() const { return has_response_; }
  Index feature_dim() const { return has_response_ ? dim() - 1 : dim(); }

  const Matrix& coords() const { return coords_; }
  auto point(Index i) const { return coords_.row(i); }
  auto features() const { return coords_.leftCols(feature_dim()); }
  auto response() const { return coords_.col(dim() - 1); }

  PointSet subset(std::span<const Index> rows) const;

 private:
  Matrix coords_;
  bool has_response_ = false;
};

/// Points with nonnegative masses; a weight w is read as w overlapping unit points.
class WeightedPointSet {
 public:
  WeightedPointSet() = default;
  WeightedPointSet(PointSet points, Vector weights);
  static WeightedPointSet unit(PointSet points);

  const PointSet& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Index size() const { return points_.size(); }
  Index dim() const { return points_.dim(); }
  double total_weight() const { return total_weight_; }

 private:
  PointSet points_;
  Vector weights_;
  double total_weight_ = 0.0;
};

/// A clustering solution: k centers, one per row.
class CenterSet {
 public:
  CenterSet() = default;
  explicit CenterSet(Matrix centers);

  Index k() const { return centers_.rows(); }
  Index dim() const { return centers_.cols(); }
  const Matrix& centers() const { return centers_; }
  Matrix& centers() { return centers_; }
  auto center(Index j) const { return centers_.row(j); }

 private:
  Matrix centers_;
};

void set_num_threads(int threads);
int num_threads();

// Runs body(begin, end) over disjoint chunks of [0, n). Each index is visited
// by exactly one call, so per-index results do not depend on the thread count.
template <typename Body>
void parallel_for(Index n, Body&& body) {
  const int threads = num_threads();
  constexpr Index kMinChunk = 4096;
  if (threads <= 1 || n < 2 * kMinChunk) {
    body(Index{0}, n);
    return;
  }
  const Index chunks = std::min<Index>(threads, (n + kMinChunk - 1) / kMinChunk);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  for (Index c = 0; c < chunks; ++c) {
    const Index begin = n * c / chunks;
    const Index end = n * (c + 1) / chunks;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

/// Nearest-center distance kernel over Eigen row-major blocks. Writes the
/// Euclidean distance to the nearest center and its index (lowest index on ties).
template <typename DerivedP, typename DerivedC>
void nearest_centers(const Eigen::MatrixBase<DerivedP>& points,
                     const Eigen::MatrixBase<DerivedC>& centers,
                     Eigen::Ref<ColVector<typename DerivedP::Scalar>> dist,
                     Eigen::Ref<Eigen::VectorXi> nearest) {
  using Scalar = typename DerivedP::Scalar;
  const Index n = points.rows();
  const Index k = centers.rows();
  parallel_for(n, [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      Scalar best = (points.row(i) - centers.row(0)).squaredNorm();
      int arg = 0;
      for (Index j = 1; j < k; ++j) {
        const Scalar s = (points.row(i) - centers.row(j)).squaredNorm();
        if (s < best) {
          best = s;
          arg = static_cast<int>(j);
        }
      }
      dist[i] = std::sqrt(best);
      nearest[i] = arg;
    }
  });
}

struct NearestCenters {
  Vector distances;
  Eigen::VectorXi nearest;
};

NearestCenters nearest_centers(const PointSet& points, const CenterSet& centers);
Vector min_distances(const PointSet& points, const CenterSet& centers);

// Total order behind every "largest first" ranking: larger value first,
// smaller index on ties.
inline bool ranks_before(double va, Index a, double vb, Index b) {
  return va > vb || (va == vb && a < b);
}

struct TopSelection {
  IndexList indices;  // ascending
  double threshold = 0.0;
};

/// Indices of the m largest values (smaller index wins ties) and the largest
/// value left unselected (0 when everything is selected). Expected linear time.
TopSelection select_top_m(std::span<const double> values, Index m, Seed seed = {});

/// m distinct indices drawn uniformly from [0, population), ascending.
IndexList sample_without_replacement(Index population, Index m, Seed seed);
IndexList sample_without_replacement(Index population, Index m, Rng& rng);

}  // namespace laysam

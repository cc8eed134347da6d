#pragma once

#include <optional>
#include <vector>

#include "laysam/core.hpp"
#include "laysam/layering.hpp"
#include "laysam/trimming.hpp"

namespace laysam {

/// Coefficients h of the model y = sum_{j<d} h_j x_j + h_d.
class Hyperplane {
 public:
  Hyperplane() = default;
  explicit Hyperplane(Vector coeffs);

  Index dim() const { return coeffs_.size(); }
  const Vector& coeffs() const { return coeffs_; }
  auto slopes() const { return coeffs_.head(coeffs_.size() - 1); }
  double intercept() const { return coeffs_[coeffs_.size() - 1]; }

 private:
  Vector coeffs_;
};

/// Features of the regression domain lie in [0, D].
struct RegionBox {
  double bound = 10.0;
};

/// y - <x, h_slopes> - h_d for a point laid out as (x_1..x_{d-1}, y).
template <typename DerivedP>
double residual(const Eigen::MatrixBase<DerivedP>& point, const Hyperplane& h) {
  const Index d = point.size();
  if (d != h.dim()) {
    throw std::invalid_argument("residual: point has d=" + std::to_string(d) +
                                " but hyperplane has d=" + std::to_string(h.dim()));
  }
  return point(d - 1) - point.head(d - 1).dot(h.slopes()) - h.intercept();
}

/// Residuals of every point of a response-bearing set.
Vector residuals(const PointSet& points, const Hyperplane& h);

/// x' = scale * x + offset for one feature column.
struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;
};

struct Normalized {
  PointSet points;
  std::vector<AffineMap> maps;
  std::vector<Index> constant_columns;  // mapped to D/2
};

/// Min-max scales every feature column onto [0, D]; the response is untouched.
Normalized normalize_features(const PointSet& points, const RegionBox& region);

/// Expresses a hyperplane fitted on normalized features in raw coordinates.
Hyperplane denormalize(const Hyperplane& h, const std::vector<AffineMap>& maps);

TrimmedCostReport trimmed_regression_cost(const WeightedPointSet& points, const Hyperplane& h,
                                          double z, int power);
TrimmedCostReport trimmed_regression_cost(const PointSet& points, const Hyperplane& h, double z,
                                          int power);

std::optional<LayerPartition> build_layers_regression(const PointSet& points,
                                                      const Hyperplane& anchor, Index z,
                                                      double epsilon,
                                                      std::optional<int> layer_count_override = {});

/// Layered sampling in slabs around an anchor hyperplane.
Coreset layered_coreset_regression(const PointSet& points, const Hyperplane& anchor, Index z,
                                   const LayeredSamplingOptions& options, Seed seed);

struct OlsResult {
  Hyperplane h;
  Index rank = 0;
  bool rank_deficient = false;
};

/// Minimizer of sum_i w_i Res(p_i, h)^2 via a complete orthogonal
/// decomposition of the weighted design [x, 1]. `mass` replaces the stored
/// weights when given (e.g. the inlier mass left after trimming).
/// Rank-deficient designs get the minimum-norm solution.
OlsResult weighted_ols(const WeightedPointSet& points, const Vector* mass = nullptr);

struct RegressionSolveOptions {
  int max_iter = 50;
  double tol = 1e-6;
  int power = 2;
  int irls_rounds = 5;
};

struct RegressionResult {
  Hyperplane h;
  TrimmedCostReport report;
  int iterations = 0;
  std::vector<double> cost_history;
  bool stalled = false;
};

/// Trimmed regression by alternating minimization: trim the z mass with the
/// largest |residual|, refit on what remains, repeat.
RegressionResult trimmed_regression_solve(const WeightedPointSet& points, double z,
                                          const Hyperplane& init,
                                          const RegressionSolveOptions& options = {});

struct RegressionInitResult {
  Hyperplane h;
  IndexList sample;
  bool rank_deficient = false;
};

Index regression_init_sample_size(Index n, Index d, Index z, Index sample_factor);

/// Ordinary least squares on a uniform sample of size min(max(f z, 10 d), n).
RegressionInitResult regression_init(const PointSet& points, Index z, Index sample_factor,
                                     Seed seed);

}  // namespace laysam

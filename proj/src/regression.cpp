#include "laysam/regression.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

namespace laysam {

namespace {

void check_layout(const PointSet& points, const Hyperplane& h, const char* where) {
  if (!points.has_response()) {
    throw std::invalid_argument(std::string(where) + ": point set has no response column");
  }
  if (points.dim() != h.dim()) {
    throw std::invalid_argument(std::string(where) + ": points have d=" +
                                std::to_string(points.dim()) + " but hyperplane has d=" +
                                std::to_string(h.dim()));
  }
}

Vector abs_residuals(const PointSet& points, const Hyperplane& h) {
  return residuals(points, h).cwiseAbs();
}

}  // namespace

Hyperplane::Hyperplane(Vector coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 1) throw std::invalid_argument("Hyperplane: need at least the intercept");
  if (!coeffs_.allFinite()) throw std::invalid_argument("Hyperplane: coefficients must be finite");
}

Vector residuals(const PointSet& points, const Hyperplane& h) {
  check_layout(points, h, "residuals");
  Vector out = points.response();
  out.noalias() -= points.features() * h.slopes();
  out.array() -= h.intercept();
  return out;
}

Normalized normalize_features(const PointSet& points, const RegionBox& region) {
  if (!points.has_response()) throw std::invalid_argument("normalize_features: no response column");
  if (!(region.bound > 0.0)) throw std::invalid_argument("normalize_features: D must be positive");
  Normalized out;
  Matrix coords = points.coords();
  const double D = region.bound;
  for (Index j = 0; j < points.feature_dim(); ++j) {
    const double lo = coords.col(j).minCoeff();
    const double hi = coords.col(j).maxCoeff();
    AffineMap map;
    if (hi > lo) {
      map.scale = D / (hi - lo);
      map.offset = -lo * map.scale;
      if (lo == 0.0 && hi == D) map = AffineMap{};
    } else {
      map.scale = 0.0;
      map.offset = 0.5 * D;
      out.constant_columns.push_back(j);
    }
    if (map.scale != 1.0 || map.offset != 0.0) {
      for (Index i = 0; i < coords.rows(); ++i) {
        // Endpoints land exactly on 0 and D.
        const double v = coords(i, j);
        coords(i, j) = (map.scale == 0.0) ? map.offset
                       : (v == lo)        ? 0.0
                       : (v == hi)        ? D
                                          : std::clamp((v - lo) * map.scale, 0.0, D);
      }
    }
    out.maps.push_back(map);
  }
  out.points = PointSet(std::move(coords), true);
  return out;
}

Hyperplane denormalize(const Hyperplane& h, const std::vector<AffineMap>& maps) {
  if (static_cast<Index>(maps.size()) + 1 != h.dim()) {
    throw std::invalid_argument("denormalize: one affine map per feature required");
  }
  Vector raw(h.dim());
  double intercept = h.intercept();
  for (std::size_t j = 0; j < maps.size(); ++j) {
    raw[static_cast<Index>(j)] = h.coeffs()[static_cast<Index>(j)] * maps[j].scale;
    intercept += h.coeffs()[static_cast<Index>(j)] * maps[j].offset;
  }
  raw[h.dim() - 1] = intercept;
  return Hyperplane(std::move(raw));
}

TrimmedCostReport trimmed_regression_cost(const WeightedPointSet& points, const Hyperplane& h,
                                          double z, int power) {
  check_layout(points.points(), h, "trimmed_regression_cost");
  return trim_and_cost(abs_residuals(points.points(), h), points.weights(), points.total_weight(),
                       z, power);
}

TrimmedCostReport trimmed_regression_cost(const PointSet& points, const Hyperplane& h, double z,
                                          int power) {
  return trimmed_regression_cost(WeightedPointSet::unit(points), h, z, power);
}

std::optional<LayerPartition> build_layers_regression(const PointSet& points,
                                                      const Hyperplane& anchor, Index z,
                                                      double epsilon,
                                                      std::optional<int> layer_count_override) {
  check_layout(points, anchor, "build_layers_regression");
  return build_layers(abs_residuals(points, anchor), z, epsilon, layer_count_override);
}

Coreset layered_coreset_regression(const PointSet& points, const Hyperplane& anchor, Index z,
                                   const LayeredSamplingOptions& options, Seed seed) {
  if (!(options.eta > 0.0 && options.eta < 1.0)) {
    throw std::invalid_argument("layered_coreset_regression: eta must lie in (0, 1)");
  }
  auto partition =
      build_layers_regression(points, anchor, z, options.epsilon, options.layer_count_override);
  Coreset out;
  if (!partition) {
    out = identity_coreset(points);
  } else {
    const Index target = options.per_layer_override
                             ? *options.per_layer_override
                             : layer_sample_target(options.constant, options.epsilon, options.eta,
                                                   1, points.dim(), partition->layer_count);
    out = assemble_layered_coreset(points, *partition,
                                   std::vector<Index>(partition->layers.size(), target), seed);
  }
  out.params.method = "laysam";
  out.params.epsilon = options.epsilon;
  out.params.eta = options.eta;
  return out;
}

OlsResult weighted_ols(const WeightedPointSet& points, const Vector* mass) {
  const PointSet& P = points.points();
  if (!P.has_response()) throw std::invalid_argument("weighted_ols: point set has no response column");
  const Vector& w = mass ? *mass : points.weights();
  if (w.size() != P.size()) throw std::invalid_argument("weighted_ols: mass length mismatch");
  if ((w.array() < 0.0).any()) throw std::invalid_argument("weighted_ols: negative mass");

  IndexList rows;
  for (Index i = 0; i < P.size(); ++i) {
    if (w[i] > 0.0) rows.push_back(i);
  }
  const Index m = static_cast<Index>(rows.size());
  const Index d = P.dim();
  Matrix X(m, d);
  Vector y(m);
  for (Index r = 0; r < m; ++r) {
    const Index i = rows[static_cast<std::size_t>(r)];
    const double s = std::sqrt(w[i]);
    X.row(r).head(d - 1) = s * P.features().row(i);
    X(r, d - 1) = s;
    y[r] = s * P.response()[i];
  }

  OlsResult out;
  if (m == 0) {
    out.h = Hyperplane(Vector::Zero(d));
    out.rank_deficient = true;
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  out.rank = cod.rank();
  out.rank_deficient = out.rank < d;
  out.h = Hyperplane(cod.solve(y));
  return out;
}

RegressionResult trimmed_regression_solve(const WeightedPointSet& points, double z,
                                          const Hyperplane& init,
                                          const RegressionSolveOptions& options) {
  check_layout(points.points(), init, "trimmed_regression_solve");
  check_power(options.power);
  const Index d = points.dim();
  if (!(z < points.total_weight() - static_cast<double>(d))) {
    throw std::invalid_argument("trimmed_regression_solve: need z < W - d");
  }

  RegressionResult result;
  result.h = init;
  result.report = trimmed_regression_cost(points, result.h, z, options.power);

  for (int it = 0; it < options.max_iter; ++it) {
    result.cost_history.push_back(result.report.cost);
    const Vector mass = inlier_mass(result.report, points.weights());

    OlsResult fit = weighted_ols(points, &mass);
    if (options.power == 1 && !fit.rank_deficient) {
      // Iteratively reweighted least squares toward the least-absolute fit.
      const double scale = std::max(result.report.cost, 1e-300);
      for (int round = 0; round < options.irls_rounds; ++round) {
        const Vector res = residuals(points.points(), fit.h).cwiseAbs();
        Vector reweighted(mass.size());
        for (Index i = 0; i < mass.size(); ++i) {
          reweighted[i] = mass[i] / std::max(res[i], 1e-8 * scale);
        }
        OlsResult next = weighted_ols(points, &reweighted);
        if (next.rank_deficient) break;
        fit = std::move(next);
      }
    }
    if (fit.rank_deficient) {
      result.stalled = true;
      break;
    }

    auto report = trimmed_regression_cost(points, fit.h, z, options.power);
    if (report.cost > result.report.cost) break;

    const double previous = result.report.cost;
    result.h = std::move(fit.h);
    result.report = std::move(report);
    ++result.iterations;
    if (result.report.cost == 0.0 || previous - result.report.cost <= options.tol * previous) break;
  }
  result.cost_history.push_back(result.report.cost);
  return result;
}

Index regression_init_sample_size(Index n, Index d, Index z, Index sample_factor) {
  return std::min(std::max(sample_factor * z, 10 * d), n);
}

RegressionInitResult regression_init(const PointSet& points, Index z, Index sample_factor,
                                     Seed seed) {
  if (!points.has_response()) throw std::invalid_argument("regression_init: no response column");
  const Index n = points.size();
  const Index d = points.dim();
  Index size = regression_init_sample_size(n, d, z, sample_factor);
  if (size < d) {
    throw std::invalid_argument("regression_init: sample of " + std::to_string(size) +
                                " points cannot determine " + std::to_string(d) + " coefficients");
  }
  RegressionInitResult out;
  for (int attempt = 0; attempt < 2; ++attempt) {
    out.sample = sample_without_replacement(n, size, derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    const auto fit = weighted_ols(WeightedPointSet::unit(points.subset(out.sample)));
    out.h = fit.h;
    out.rank_deficient = fit.rank_deficient;
    if (!fit.rank_deficient) break;
    size = std::min(2 * size, n);
  }
  return out;
}

}  // namespace laysam

#include "laysam/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace laysam {

namespace {

void check_dims(const PointSet& points, const CenterSet& centers, const char* where) {
  if (centers.k() < 1) throw std::invalid_argument(std::string(where) + ": center set is empty");
  if (points.dim() != centers.dim()) {
    throw std::invalid_argument(std::string(where) + ": points have d=" +
                                std::to_string(points.dim()) + " but centers have d=" +
                                std::to_string(centers.dim()));
  }
}

double weighted_median(std::vector<std::pair<double, double>>& values, double total) {
  std::sort(values.begin(), values.end());
  CompensatedSum acc;
  for (const auto& [value, mass] : values) {
    acc.add(mass);
    if (acc.value() >= 0.5 * total) return value;
  }
  return values.back().first;
}

// Trimmed cost of unit-weight distances with an integer outlier count.
double unit_trimmed_cost(std::vector<double>& dist, Index z, int power) {
  const auto n = static_cast<Index>(dist.size());
  if (z > 0) {
    std::nth_element(dist.begin(), dist.begin() + (z - 1), dist.end(), std::greater<>());
  }
  CompensatedSum acc;
  for (Index i = z; i < n; ++i) {
    const double d = dist[static_cast<std::size_t>(i)];
    acc.add(power == 1 ? d : d * d);
  }
  return acc.value() / static_cast<double>(n - z);
}

}  // namespace

TrimmedCostReport trimmed_cluster_cost(const WeightedPointSet& points, const CenterSet& centers,
                                       double z, int power) {
  check_dims(points.points(), centers, "trimmed_cluster_cost");
  auto nearest = nearest_centers(points.points(), centers);
  auto report = trim_and_cost(std::move(nearest.distances), points.weights(),
                              points.total_weight(), z, power);
  report.assignment = std::move(nearest.nearest);
  return report;
}

TrimmedCostReport trimmed_cluster_cost(const PointSet& points, const CenterSet& centers, double z,
                                       int power) {
  return trimmed_cluster_cost(WeightedPointSet::unit(points), centers, z, power);
}

std::optional<LayerPartition> build_layers_clustering(const PointSet& points,
                                                      const CenterSet& anchor, Index z,
                                                      double epsilon,
                                                      std::optional<int> layer_count_override) {
  check_dims(points, anchor, "build_layers_clustering");
  return build_layers(min_distances(points, anchor), z, epsilon, layer_count_override);
}

Coreset layered_coreset_clustering(const PointSet& points, const CenterSet& anchor, Index z,
                                   const LayeredSamplingOptions& options, Seed seed) {
  if (!(options.eta > 0.0 && options.eta < 1.0)) {
    throw std::invalid_argument("layered_coreset_clustering: eta must lie in (0, 1)");
  }
  auto partition =
      build_layers_clustering(points, anchor, z, options.epsilon, options.layer_count_override);
  Coreset out;
  if (!partition) {
    out = identity_coreset(points);
  } else {
    const Index target = options.per_layer_override
                             ? *options.per_layer_override
                             : layer_sample_target(options.constant, options.epsilon, options.eta,
                                                   anchor.k(), points.dim(),
                                                   partition->layer_count);
    out = assemble_layered_coreset(points, *partition,
                                   std::vector<Index>(partition->layers.size(), target), seed);
  }
  out.params.method = "laysam";
  out.params.epsilon = options.epsilon;
  out.params.eta = options.eta;
  return out;
}

KMeansResult kmeans_minus_minus(const WeightedPointSet& points, double z, const CenterSet& init,
                                const KMeansOptions& options) {
  check_dims(points.points(), init, "kmeans_minus_minus");
  check_power(options.power);
  if (options.max_iter < 0) throw std::invalid_argument("kmeans_minus_minus: max_iter must be >= 0");

  const Index n = points.size();
  const Index k = init.k();
  const Index d = points.dim();
  const Matrix& X = points.points().coords();

  KMeansResult result;
  result.centers = init;
  result.report = trimmed_cluster_cost(points, result.centers, z, options.power);

  for (int it = 0; it < options.max_iter; ++it) {
    result.cost_history.push_back(result.report.cost);
    const Vector mass = inlier_mass(result.report, points.weights());
    const Eigen::VectorXi& assign = result.report.assignment;

    Matrix next = result.centers.centers();
    Vector cluster_mass = Vector::Zero(k);
    for (Index i = 0; i < n; ++i) cluster_mass[assign[i]] += mass[i];

    if (options.power == 2) {
      Matrix sums = Matrix::Zero(k, d);
      for (Index i = 0; i < n; ++i) {
        if (mass[i] > 0.0) sums.row(assign[i]) += mass[i] * X.row(i);
      }
      for (Index j = 0; j < k; ++j) {
        if (cluster_mass[j] > 0.0) next.row(j) = sums.row(j) / cluster_mass[j];
      }
    } else {
      std::vector<IndexList> members(static_cast<std::size_t>(k));
      for (Index i = 0; i < n; ++i) {
        if (mass[i] > 0.0) members[static_cast<std::size_t>(assign[i])].push_back(i);
      }
      std::vector<std::pair<double, double>> column;
      for (Index j = 0; j < k; ++j) {
        const auto& rows = members[static_cast<std::size_t>(j)];
        if (rows.empty()) continue;
        for (Index c = 0; c < d; ++c) {
          column.clear();
          for (Index i : rows) column.emplace_back(X(i, c), mass[i]);
          next(j, c) = weighted_median(column, cluster_mass[j]);
        }
      }
    }

    // Empty clusters move to the farthest inlier points, one each.
    std::vector<Index> empty;
    for (Index j = 0; j < k; ++j) {
      if (!(cluster_mass[j] > 0.0)) empty.push_back(j);
    }
    if (!empty.empty()) {
      IndexList inliers;
      for (Index i = 0; i < n; ++i) {
        if (mass[i] > 0.0) inliers.push_back(i);
      }
      const Vector& dist = result.report.distances;
      std::sort(inliers.begin(), inliers.end(),
                [&](Index a, Index b) { return ranks_before(dist[a], a, dist[b], b); });
      for (std::size_t e = 0; e < empty.size() && e < inliers.size(); ++e) {
        next.row(empty[e]) = X.row(inliers[e]);
        ++result.reseeded;
      }
    }

    CenterSet candidate(std::move(next));
    auto report = trimmed_cluster_cost(points, candidate, z, options.power);
    if (report.cost > result.report.cost) break;  // median steps are not guaranteed to descend

    const double previous = result.report.cost;
    result.centers = std::move(candidate);
    result.report = std::move(report);
    ++result.iterations;
    if (result.report.cost == 0.0 || previous - result.report.cost <= options.tol * previous) break;
  }
  result.cost_history.push_back(result.report.cost);
  return result;
}

SeedingResult local_search_outliers_seed(const PointSet& points, Index k, Index z,
                                         const LocalSearchOptions& options, Seed seed) {
  const Index n = points.size();
  if (k < 1) throw std::invalid_argument("local_search_outliers_seed: k must be >= 1");
  if (z < 0 || z >= n) throw std::invalid_argument("local_search_outliers_seed: need 0 <= z < n");
  if (options.sample_factor < 1) {
    throw std::invalid_argument("local_search_outliers_seed: sample_factor must be >= 1");
  }
  check_power(options.power);

  SeedingResult result;
  const Index size = std::min(options.sample_factor * k, n);
  result.sample = sample_without_replacement(n, size, derive_seed(seed, 0));
  const Matrix S = points.subset(result.sample).coords();

  Index zs = 0;
  if (z > 0) {
    zs = static_cast<Index>(std::ceil(options.outlier_slack * static_cast<double>(z) *
                                      static_cast<double>(size) / static_cast<double>(n)));
  }
  zs = std::clamp<Index>(zs, 0, size - 1);
  result.sample_outliers = zs;

  // Farthest-point sweep from a random sample point.
  Rng rng(derive_seed(seed, 1));
  std::vector<Index> chosen{static_cast<Index>(rng.below(static_cast<std::uint64_t>(size)))};
  Vector nearest(size);
  for (Index i = 0; i < size; ++i) nearest[i] = (S.row(i) - S.row(chosen[0])).norm();
  while (static_cast<Index>(chosen.size()) < k) {
    Index arg = 0;
    for (Index i = 1; i < size; ++i) {
      if (nearest[i] > nearest[arg]) arg = i;
    }
    if (nearest[arg] == 0.0) result.duplicates = true;
    chosen.push_back(arg);
    for (Index i = 0; i < size; ++i) nearest[i] = std::min(nearest[i], (S.row(i) - S.row(arg)).norm());
  }

  std::vector<double> scratch(static_cast<std::size_t>(size));
  Vector d1(size), d2(size);
  Eigen::VectorXi a1(size);
  auto refresh = [&] {
    for (Index i = 0; i < size; ++i) {
      double best = std::numeric_limits<double>::infinity();
      double second = best;
      int arg = 0;
      for (Index j = 0; j < k; ++j) {
        const double dist = (S.row(i) - S.row(chosen[static_cast<std::size_t>(j)])).norm();
        if (dist < best) {
          second = best;
          best = dist;
          arg = static_cast<int>(j);
        } else if (dist < second) {
          second = dist;
        }
      }
      d1[i] = best;
      d2[i] = second;
      a1[i] = arg;
    }
    for (Index i = 0; i < size; ++i) scratch[static_cast<std::size_t>(i)] = d1[i];
    return unit_trimmed_cost(scratch, zs, options.power);
  };

  double current = refresh();
  const double factor = 1.0 - options.improvement / static_cast<double>(k);
  const int budget = static_cast<int>(100 * k);
  Vector to_candidate(size);
  while (result.swaps < budget && current > 0.0) {
    double best_cost = std::numeric_limits<double>::infinity();
    Index best_j = -1, best_q = -1;
    for (Index q = 0; q < size; ++q) {
      if (std::find(chosen.begin(), chosen.end(), q) != chosen.end()) continue;
      for (Index i = 0; i < size; ++i) to_candidate[i] = (S.row(i) - S.row(q)).norm();
      for (Index j = 0; j < k; ++j) {
        for (Index i = 0; i < size; ++i) {
          const double kept = (a1[i] == j) ? d2[i] : d1[i];
          scratch[static_cast<std::size_t>(i)] = std::min(kept, to_candidate[i]);
        }
        const double cost = unit_trimmed_cost(scratch, zs, options.power);
        if (cost < best_cost) {
          best_cost = cost;
          best_j = j;
          best_q = q;
        }
      }
    }
    if (best_j < 0 || !(best_cost < factor * current)) break;
    chosen[static_cast<std::size_t>(best_j)] = best_q;
    ++result.swaps;
    current = refresh();
  }

  Matrix centers(k, points.dim());
  for (Index j = 0; j < k; ++j) centers.row(j) = S.row(chosen[static_cast<std::size_t>(j)]);
  result.centers = CenterSet(std::move(centers));
  return result;
}

}  // namespace laysam

#pragma once

#include <optional>
#include <vector>

#include "laysam/core.hpp"
#include "laysam/layering.hpp"
#include "laysam/trimming.hpp"

namespace laysam {

/// K^{-z}_power(W, C): power 1 is k-median, power 2 is k-means with outliers.
TrimmedCostReport trimmed_cluster_cost(const WeightedPointSet& points, const CenterSet& centers,
                                       double z, int power);
TrimmedCostReport trimmed_cluster_cost(const PointSet& points, const CenterSet& centers, double z,
                                       int power);

std::optional<LayerPartition> build_layers_clustering(const PointSet& points,
                                                      const CenterSet& anchor, Index z,
                                                      double epsilon,
                                                      std::optional<int> layer_count_override = {});

/// Layered sampling around an anchor solution. The result carries weight n
/// and keeps the ceil((1 + 1/eps) z) farthest points verbatim.
Coreset layered_coreset_clustering(const PointSet& points, const CenterSet& anchor, Index z,
                                   const LayeredSamplingOptions& options, Seed seed);

struct KMeansOptions {
  int max_iter = 100;
  double tol = 1e-6;
  int power = 2;
};

struct KMeansResult {
  CenterSet centers;
  TrimmedCostReport report;
  int iterations = 0;
  std::vector<double> cost_history;  // cost before each update, then the final cost
  int reseeded = 0;                  // centers that lost all inlier mass
};

/// k-means--: alternate between trimming the z farthest mass and moving each
/// center to the weighted mean (power 2) or coordinate-wise weighted median
/// (power 1) of its inliers. A center left without inlier mass is moved to
/// the farthest remaining inlier point.
KMeansResult kmeans_minus_minus(const WeightedPointSet& points, double z, const CenterSet& init,
                                const KMeansOptions& options = {});

struct LocalSearchOptions {
  Index sample_factor = 40;
  // Outlier budget on the sample is ceil(slack * z * |sample| / n).
  double outlier_slack = 2.0;
  // A swap must bring the cost below (1 - improvement / k) times the current cost.
  double improvement = 1.0;
  int power = 2;
};

struct SeedingResult {
  CenterSet centers;
  IndexList sample;          // rows of P the search ran on
  Index sample_outliers = 0;  // trimmed count used on the sample
  int swaps = 0;
  bool duplicates = false;  // fewer than k distinct sample points
};

/// Local search with outliers on a small uniform sample: farthest-point
/// initialization followed by single-center swaps with sample points.
SeedingResult local_search_outliers_seed(const PointSet& points, Index k, Index z,
                                         const LocalSearchOptions& options, Seed seed);

}  // namespace laysam

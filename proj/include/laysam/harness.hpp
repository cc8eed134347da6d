#pragma once

#include <string>
#include <vector>

#include "laysam/clustering.hpp"
#include "laysam/core.hpp"
#include "laysam/layering.hpp"
#include "laysam/regression.hpp"
#include "laysam/trimming.hpp"

namespace laysam {

enum class NoiseDistribution { gauss, uniform };

NoiseDistribution parse_distribution(const std::string& text);
std::string to_string(NoiseDistribution dist);

struct ClusterInstance {
  PointSet points;
  CenterSet centers;
  std::vector<int> labels;
};

struct RegressionInstance {
  PointSet points;
  Hyperplane h;
};

/// k centers uniform in [0, 100]^d; point i belongs to center i mod k and is
/// that center plus a standard normal offset per coordinate.
ClusterInstance gen_syncluster(Index n, Index d, Index k, Seed seed);

/// h uniform in [-5, 5]^d, features uniform in [0, 10]^{d-1},
/// y = <(x, 1), h> + N(0, 1).
RegressionInstance gen_synregression(Index n, Index d, Seed seed);

struct GroundTruth {
  IndexList outliers;  // ascending
  NoiseDistribution distribution = NoiseDistribution::gauss;
  double sigma = 0.0;
};

struct Injected {
  PointSet points;
  GroundTruth truth;
};

/// Perturbs z uniformly chosen rows in every coordinate (response included)
/// by N(0, sigma) or uniform[-sigma, sigma]. Other rows are copied verbatim.
Injected inject_outliers(const PointSet& points, Index z, NoiseDistribution distribution,
                         double sigma, Seed seed);

struct Timings {
  double construct_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct MetricReport {
  double l1_loss = 0.0;
  double l2_loss = 0.0;
  double recall_precision = 0.0;
  double pre_recall = 0.0;
  double construct_seconds = 0.0;
  double solve_seconds = 0.0;
  bool empty_truth = false;
};

/// recall = precision = (predicted outlier mass on O*) / z and
/// pre-recall = |S ∩ O*| / |O*|.
MetricReport eval_metrics(const IndexList& truth, const std::vector<OutlierMass>& predicted,
                          const IndexList& coreset_source, double l1_loss, double l2_loss,
                          const Timings& timings = {});

struct ProbeResult {
  double max_abs_error = 0.0;
  double bound = 0.0;  // eps * (cost(P, anchor) + L)
  double anchor_cost = 0.0;
  Index violations = 0;
  Index out_of_range = 0;  // sampled solutions outside the declared range
};

/// A clustering solution whose every center is within L of the anchor's.
CenterSet sample_center_range(const CenterSet& anchor, double L, Rng& rng);

/// A hyperplane whose residuals differ from the anchor's by at most L on R_D:
/// u ~ U[0,1], offset shift in [-L(1-u), L(1-u)], each slope shift in
/// [-uL/((d-1)D), uL/((d-1)D)].
Hyperplane sample_hyperplane_range(const Hyperplane& anchor, double L, const RegionBox& region,
                                   Rng& rng);

/// Largest |residual(p, h) - residual(p, anchor)| over the corners of R_D.
double hyperplane_range_radius(const Hyperplane& anchor, const Hyperplane& h,
                               const RegionBox& region);

/// Draws `trials` solutions from the anchor's range and compares the trimmed
/// power-loss on the coreset against the full instance.
ProbeResult range_probe(const PointSet& points, const Coreset& coreset, const CenterSet& anchor,
                        double L, Index z, int power, Index trials, Seed seed);
ProbeResult range_probe(const PointSet& points, const Coreset& coreset, const Hyperplane& anchor,
                        const RegionBox& region, double L, Index z, int power, Index trials,
                        Seed seed);

}  // namespace laysam

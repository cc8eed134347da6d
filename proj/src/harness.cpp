#include "laysam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace laysam {

NoiseDistribution parse_distribution(const std::string& text) {
  if (text == "gauss") return NoiseDistribution::gauss;
  if (text == "uniform") return NoiseDistribution::uniform;
  throw std::invalid_argument("unknown distribution '" + text + "' (expected gauss or uniform)");
}

std::string to_string(NoiseDistribution dist) {
  return dist == NoiseDistribution::gauss ? "gauss" : "uniform";
}

ClusterInstance gen_syncluster(Index n, Index d, Index k, Seed seed) {
  if (k < 1 || n < k || d < 1) throw std::invalid_argument("gen_syncluster: need n >= k >= 1, d >= 1");
  Rng rng(seed);
  Matrix centers(k, d);
  for (Index j = 0; j < k; ++j) {
    for (Index c = 0; c < d; ++c) centers(j, c) = rng.uniform(0.0, 100.0);
  }
  ClusterInstance out;
  Matrix coords(n, d);
  out.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index j = i % k;
    out.labels[static_cast<std::size_t>(i)] = static_cast<int>(j);
    for (Index c = 0; c < d; ++c) coords(i, c) = centers(j, c) + rng.normal();
  }
  out.points = PointSet(std::move(coords));
  out.centers = CenterSet(std::move(centers));
  return out;
}

RegressionInstance gen_synregression(Index n, Index d, Seed seed) {
  if (n < 1 || d < 2) throw std::invalid_argument("gen_synregression: need n >= 1, d >= 2");
  Rng rng(seed);
  Vector h(d);
  for (Index j = 0; j < d; ++j) h[j] = rng.uniform(-5.0, 5.0);
  Matrix coords(n, d);
  for (Index i = 0; i < n; ++i) {
    double y = h[d - 1];
    for (Index j = 0; j + 1 < d; ++j) {
      coords(i, j) = rng.uniform(0.0, 10.0);
      y += h[j] * coords(i, j);
    }
    coords(i, d - 1) = y + rng.normal();
  }
  return {PointSet(std::move(coords), true), Hyperplane(std::move(h))};
}

Injected inject_outliers(const PointSet& points, Index z, NoiseDistribution distribution,
                         double sigma, Seed seed) {
  if (z < 0 || z >= points.size()) throw std::invalid_argument("inject_outliers: need 0 <= z < n");
  if (!(sigma >= 0.0)) throw std::invalid_argument("inject_outliers: sigma must be nonnegative");
  Injected out;
  out.truth.distribution = distribution;
  out.truth.sigma = sigma;
  out.truth.outliers = sample_without_replacement(points.size(), z, derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  Matrix coords = points.coords();
  for (Index i : out.truth.outliers) {
    for (Index c = 0; c < coords.cols(); ++c) {
      const double shift = distribution == NoiseDistribution::gauss ? sigma * rng.normal()
                                                                    : rng.uniform(-sigma, sigma);
      coords(i, c) += shift;
    }
  }
  out.points = PointSet(std::move(coords), points.has_response());
  return out;
}

MetricReport eval_metrics(const IndexList& truth, const std::vector<OutlierMass>& predicted,
                          const IndexList& coreset_source, double l1_loss, double l2_loss,
                          const Timings& timings) {
  MetricReport out;
  out.l1_loss = l1_loss;
  out.l2_loss = l2_loss;
  out.construct_seconds = timings.construct_seconds;
  out.solve_seconds = timings.solve_seconds;
  if (truth.empty()) {
    out.recall_precision = 1.0;
    out.pre_recall = 1.0;
    out.empty_truth = true;
    return out;
  }
  const std::unordered_set<Index> planted(truth.begin(), truth.end());
  CompensatedSum hit;
  for (const auto& o : predicted) {
    if (planted.count(o.index)) hit.add(o.weight);
  }
  const double z = static_cast<double>(truth.size());
  out.recall_precision = std::clamp(hit.value() / z, 0.0, 1.0);

  const std::unordered_set<Index> kept(coreset_source.begin(), coreset_source.end());
  Index retained = 0;
  for (Index i : truth) retained += kept.count(i) ? 1 : 0;
  out.pre_recall = static_cast<double>(retained) / z;
  return out;
}

CenterSet sample_center_range(const CenterSet& anchor, double L, Rng& rng) {
  const Index d = anchor.dim();
  Matrix centers = anchor.centers();
  Vector direction(d);
  for (Index j = 0; j < anchor.k(); ++j) {
    double norm = 0.0;
    do {
      for (Index c = 0; c < d; ++c) direction[c] = rng.normal();
      norm = direction.norm();
    } while (norm == 0.0);
    // Uniform in the ball: radius L u^(1/d).
    const double radius = L * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    centers.row(j) += (radius / norm) * direction.transpose();
  }
  return CenterSet(std::move(centers));
}

Hyperplane sample_hyperplane_range(const Hyperplane& anchor, double L, const RegionBox& region,
                                   Rng& rng) {
  const Index d = anchor.dim();
  Vector coeffs = anchor.coeffs();
  const double u = rng.uniform();
  if (d > 1) {
    const double slope_budget = u * L / (static_cast<double>(d - 1) * region.bound);
    for (Index j = 0; j + 1 < d; ++j) coeffs[j] += rng.uniform(-slope_budget, slope_budget);
  }
  const double offset_budget = (1.0 - u) * L;
  coeffs[d - 1] += rng.uniform(-offset_budget, offset_budget);
  return Hyperplane(std::move(coeffs));
}

double hyperplane_range_radius(const Hyperplane& anchor, const Hyperplane& h,
                               const RegionBox& region) {
  // Res(p, anchor) - Res(p, h) = <x, dslope> + dintercept, extreme at a corner of R_D.
  const Vector delta = h.coeffs() - anchor.coeffs();
  const Index d = delta.size();
  double hi = delta[d - 1], lo = delta[d - 1];
  for (Index j = 0; j + 1 < d; ++j) {
    hi += std::max(delta[j] * region.bound, 0.0);
    lo += std::min(delta[j] * region.bound, 0.0);
  }
  return std::max(std::abs(hi), std::abs(lo));
}

namespace {

template <typename Solution, typename Sampler, typename InRange, typename Cost>
ProbeResult run_probe(const PointSet& points, const Coreset& coreset, const Solution& anchor,
                      double L, Index z, int power, Index trials, Seed seed, Sampler sample,
                      InRange in_range, Cost cost) {
  if (!(L >= 0.0)) throw std::invalid_argument("range_probe: L must be nonnegative");
  if (trials < 1) throw std::invalid_argument("range_probe: need at least one trial");
  const auto full = WeightedPointSet::unit(points);
  ProbeResult out;
  out.anchor_cost = cost(full, anchor, z, power);
  out.bound = coreset.params.epsilon * (out.anchor_cost + L);
  for (Index t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    // L = 0 leaves only the anchor itself.
    const Solution solution = L > 0.0 ? sample(anchor, L, rng) : anchor;
    if (!in_range(solution)) ++out.out_of_range;
    const double error =
        std::abs(cost(coreset.data, solution, z, power) - cost(full, solution, z, power));
    out.max_abs_error = std::max(out.max_abs_error, error);
    if (error > out.bound) ++out.violations;
  }
  return out;
}

}  // namespace

ProbeResult range_probe(const PointSet& points, const Coreset& coreset, const CenterSet& anchor,
                        double L, Index z, int power, Index trials, Seed seed) {
  return run_probe(
      points, coreset, anchor, L, z, power, trials, seed,
      [](const CenterSet& a, double range, Rng& rng) { return sample_center_range(a, range, rng); },
      [&](const CenterSet& c) {
        for (Index j = 0; j < c.k(); ++j) {
          if ((c.center(j) - anchor.center(j)).norm() > L * (1.0 + 1e-12)) return false;
        }
        return true;
      },
      [](const WeightedPointSet& w, const CenterSet& c, Index outliers, int p) {
        return trimmed_cluster_cost(w, c, static_cast<double>(outliers), p).cost;
      });
}

ProbeResult range_probe(const PointSet& points, const Coreset& coreset, const Hyperplane& anchor,
                        const RegionBox& region, double L, Index z, int power, Index trials,
                        Seed seed) {
  return run_probe(
      points, coreset, anchor, L, z, power, trials, seed,
      [&](const Hyperplane& a, double range, Rng& rng) {
        return sample_hyperplane_range(a, range, region, rng);
      },
      [&](const Hyperplane& h) {
        return hyperplane_range_radius(anchor, h, region) <= L * (1.0 + 1e-12);
      },
      [](const WeightedPointSet& w, const Hyperplane& h, Index outliers, int p) {
        return trimmed_regression_cost(w, h, static_cast<double>(outliers), p).cost;
      });
}

}  // namespace laysam

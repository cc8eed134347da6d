#include "laysam/baselines.hpp"

namespace laysam {

namespace {

IndexList draw(const PointSet& points, Index m, Seed seed, const char* where) {
  const Index n = points.size();
  if (m < 1 || m > n) {
    throw std::invalid_argument(std::string(where) + ": need 1 <= m <= n (m=" + std::to_string(m) +
                                ", n=" + std::to_string(n) + ")");
  }
  return sample_without_replacement(n, m, seed);
}

}  // namespace

Coreset uniform_coreset(const PointSet& points, Index m, Seed seed) {
  Coreset out;
  out.source = draw(points, m, seed, "uniform_coreset");
  out.origin.assign(static_cast<std::size_t>(m), Origin{OriginKind::uniform, 0});
  const double weight = static_cast<double>(points.size()) / static_cast<double>(m);
  out.data = WeightedPointSet(points.subset(out.source), Vector::Constant(m, weight));
  out.params.method = "unisam";
  return out;
}

Coreset nn_coreset(const PointSet& points, Index m, Seed seed) {
  Coreset out;
  out.source = draw(points, m, seed, "nn_coreset");
  out.origin.assign(static_cast<std::size_t>(m), Origin{OriginKind::nn, 0});
  PointSet sample = points.subset(out.source);

  // Brute-force assignment, O(n m d).
  const auto nearest = nearest_centers(points, CenterSet(sample.coords()));
  Vector counts = Vector::Zero(m);
  for (Index i = 0; i < points.size(); ++i) counts[nearest.nearest[i]] += 1.0;
  out.data = WeightedPointSet(std::move(sample), std::move(counts));
  out.params.method = "nn";
  return out;
}

}  // namespace laysam

#include "laysam/trimming.hpp"

#include <algorithm>

namespace laysam {

double TrimmedCostReport::outlier_weight() const {
  CompensatedSum acc;
  for (const auto& o : outliers) acc.add(o.weight);
  return acc.value();
}

void check_power(int power) {
  if (power != 1 && power != 2) {
    throw std::invalid_argument("power must be 1 or 2, got " + std::to_string(power));
  }
}

TrimmedCostReport trim_and_cost(Vector distances, const Vector& weights, double total_weight,
                                double z, int power) {
  check_power(power);
  if (distances.size() != weights.size()) {
    throw std::invalid_argument("trim_and_cost: distance/weight length mismatch");
  }
  if (!(z >= 0.0)) throw std::invalid_argument("trim_and_cost: z must be nonnegative");
  if (!(z < total_weight)) {
    throw std::invalid_argument("trim_and_cost: outlier mass z=" + std::to_string(z) +
                                " must be below the total weight " + std::to_string(total_weight));
  }

  TrimmedCostReport report;
  report.inlier_weight = total_weight - z;

  // Weighted quickselect over the rank order. Positive-weight points only;
  // zero-mass points never carry outlier weight.
  IndexList order;
  order.reserve(static_cast<std::size_t>(distances.size()));
  for (Index i = 0; i < distances.size(); ++i) {
    if (weights[i] > 0.0) order.push_back(i);
  }
  auto before = [&](Index a, Index b) { return ranks_before(distances[a], a, distances[b], b); };

  Index boundary = 0;  // order[0..boundary) are removed entirely
  double boundary_take = 0.0;
  bool has_boundary = false;
  double remaining = z;
  if (remaining > 0.0) {
    Rng rng(Seed{static_cast<std::uint64_t>(order.size())});
    Index lo = 0, hi = static_cast<Index>(order.size());
    while (true) {
      if (lo >= hi) {
        // Rounding left a sliver of z beyond the active range.
        boundary = lo;
        break;
      }
      const Index p = lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo)));
      std::swap(order[static_cast<std::size_t>(p)], order[static_cast<std::size_t>(hi - 1)]);
      const Index pivot = order[static_cast<std::size_t>(hi - 1)];
      Index store = lo;
      CompensatedSum ahead;
      for (Index i = lo; i < hi - 1; ++i) {
        const Index e = order[static_cast<std::size_t>(i)];
        if (before(e, pivot)) {
          ahead.add(weights[e]);
          std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(store)]);
          ++store;
        }
      }
      std::swap(order[static_cast<std::size_t>(store)], order[static_cast<std::size_t>(hi - 1)]);
      const double mass_ahead = ahead.value();
      if (mass_ahead >= remaining) {
        hi = store;
      } else if (mass_ahead + weights[pivot] >= remaining) {
        boundary = store;
        boundary_take = remaining - mass_ahead;
        has_boundary = true;
        break;
      } else {
        remaining -= mass_ahead + weights[pivot];
        lo = store + 1;
      }
    }
  }

  Vector removed = Vector::Zero(distances.size());
  for (Index i = 0; i < boundary; ++i) {
    const Index e = order[static_cast<std::size_t>(i)];
    removed[e] = weights[e];
  }
  if (has_boundary) removed[order[static_cast<std::size_t>(boundary)]] = boundary_take;

  CompensatedSum acc;
  for (Index i = 0; i < distances.size(); ++i) {
    if (removed[i] > 0.0) report.outliers.push_back({i, removed[i]});
    const double keep = weights[i] - removed[i];
    if (keep <= 0.0) continue;
    const double d = distances[i];
    acc.add(keep * (power == 1 ? d : d * d));
  }
  report.cost = acc.value() / report.inlier_weight;
  report.distances = std::move(distances);
  return report;
}

Vector inlier_mass(const TrimmedCostReport& report, const Vector& weights) {
  Vector mass = weights;
  for (const auto& o : report.outliers) mass[o.index] -= o.weight;
  return mass.cwiseMax(0.0);
}

}  // namespace laysam

#pragma once

#include <vector>

#include "laysam/core.hpp"

namespace laysam {

struct OutlierMass {
  Index index = 0;
  double weight = 0.0;
};

/// Objective value of a solution after discarding outlier mass z, plus the
/// inlier/outlier split that produced it.
struct TrimmedCostReport {
  double cost = 0.0;  // normalized by 1 / (W - z)
  double inlier_weight = 0.0;
  // Removed mass per point, ascending by index. Sums to z; only the last
  // point in rank order may be split.
  std::vector<OutlierMass> outliers;
  // Nearest center per point (clustering only; empty for regression).
  Eigen::VectorXi assignment;
  // Per-point distance to the solution: nearest center or |residual|.
  Vector distances;

  double outlier_weight() const;
};

void check_power(int power);

/// Removes mass z from the largest distances (ties: smaller index first),
/// splitting the boundary point's weight if needed, and returns the
/// normalized power-loss of what remains.
TrimmedCostReport trim_and_cost(Vector distances, const Vector& weights, double total_weight,
                                double z, int power);

/// Weight each point keeps after trimming.
Vector inlier_mass(const TrimmedCostReport& report, const Vector& weights);

}  // namespace laysam
